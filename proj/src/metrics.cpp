#include "lkgomea/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace lkgomea
{

double hypervolume_2d(std::span<const Point> front, const Point &reference)
{
    std::vector<Point> pts;
    pts.reserve(front.size());
    for (const auto &p : front)
        if (p[0] > reference[0] && p[1] > reference[1])
            pts.push_back(p);
    std::sort(pts.begin(), pts.end(), [](const Point &a, const Point &b) {
        if (a[0] != b[0])
            return a[0] > b[0];
        return a[1] > b[1];
    });
    double area = 0.0;
    double covered = reference[1];
    for (const auto &p : pts)
    {
        if (p[1] <= covered)
            continue;
        area += (p[0] - reference[0]) * (p[1] - covered);
        covered = p[1];
    }
    return area;
}

std::vector<Solution> non_dominated(std::span<const Solution> solutions)
{
    std::vector<const Solution *> order;
    order.reserve(solutions.size());
    for (const auto &s : solutions)
        order.push_back(&s);
    // Stable so the first of several fitness duplicates keeps its genotype.
    std::stable_sort(order.begin(), order.end(), [](const Solution *a, const Solution *b) {
        if (a->fitness[0] != b->fitness[0])
            return a->fitness[0] > b->fitness[0];
        return a->fitness[1] > b->fitness[1];
    });
    std::vector<Solution> out;
    for (const auto *s : order)
        if (out.empty() || s->fitness[1] > out.back().fitness[1])
            out.push_back(*s);
    // Sorted by f0 descending, hence f1 ascending.
    return out;
}

std::vector<Solution> merge_fronts(std::span<const std::vector<Solution>> fronts)
{
    std::vector<Solution> all;
    for (const auto &f : fronts)
        all.insert(all.end(), f.begin(), f.end());
    return non_dominated(all);
}

double normalized_hv(std::span<const Solution> front, std::span<const Solution> reference)
{
    if (reference.empty())
        throw std::invalid_argument("normalized_hv needs a reference front");
    Point lo{0.0, 0.0};
    Point hi{0.0, 0.0};
    for (std::size_t o = 0; o < 2; ++o)
    {
        lo[o] = hi[o] = static_cast<double>(reference[0].fitness[o]);
        for (const auto &s : reference)
        {
            lo[o] = std::min(lo[o], static_cast<double>(s.fitness[o]));
            hi[o] = std::max(hi[o], static_cast<double>(s.fitness[o]));
        }
        if (hi[o] <= lo[o])
            throw std::invalid_argument("reference front spans a zero range in an objective");
    }
    auto normalize = [&](std::span<const Solution> solutions) {
        std::vector<Point> pts;
        pts.reserve(solutions.size());
        for (const auto &s : solutions)
            pts.push_back({(static_cast<double>(s.fitness[0]) - lo[0]) / (hi[0] - lo[0]),
                           (static_cast<double>(s.fitness[1]) - lo[1]) / (hi[1] - lo[1])});
        return pts;
    };
    const Point ref{-reference_point_offset, -reference_point_offset};
    const auto ref_pts = normalize(reference);
    const auto pts = normalize(front);
    return hypervolume_2d(pts, ref) / hypervolume_2d(ref_pts, ref);
}

std::vector<Solution> enumerate_pareto_front(const MoProblem &problem)
{
    const std::size_t l = length(problem);
    if (l > max_exact_length)
        throw std::invalid_argument("enumeration refuses lengths above " + std::to_string(max_exact_length));
    std::vector<Solution> all;
    all.reserve(std::size_t{1} << l);
    Genotype g(l);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << l); ++mask)
    {
        for (std::size_t i = 0; i < l; ++i)
            g[i] = static_cast<std::uint8_t>((mask >> i) & 1u);
        all.push_back(Solution{g, evaluate(g, problem), 0});
    }
    return non_dominated(all);
}

std::vector<Instance> sub_problems(const Instance &instance)
{
    std::vector<Instance> out;
    if (const auto *bot = std::get_if<BotInstance>(&instance))
    {
        for (const auto &sp : bot->sub_problems)
        {
            BotInstance part;
            part.length = bot->length;
            part.block_size = bot->block_size;
            part.seed = bot->seed;
            part.sub_problems = {sp};
            out.emplace_back(std::move(part));
        }
    }
    else
    {
        out.push_back(instance);
    }
    return out;
}

ReferenceFront build_reference_front_bot(const MoProblem &problem,
                                         const PairSolver &solver,
                                         std::size_t enumeration_limit)
{
    const std::size_t l = length(problem);
    const auto first = sub_problems(problem.objectives[0]);
    const auto second = sub_problems(problem.objectives[1]);
    std::vector<std::vector<Solution>> fronts;
    bool exact = true;
    for (const auto &a : first)
        for (const auto &b : second)
        {
            MoProblem pair{{a, b}};
            if (l <= enumeration_limit && l <= max_exact_length)
            {
                fronts.push_back(enumerate_pareto_front(pair));
            }
            else
            {
                if (!solver)
                    throw std::invalid_argument("reference front for long genotypes needs a pair solver");
                auto [front, pair_exact] = solver(pair);
                fronts.push_back(std::move(front));
                exact = exact && pair_exact;
            }
        }
    // Pairwise values never exceed the full ones; re-evaluate before the final merge.
    for (auto &f : fronts)
        for (auto &s : f)
            if (s.genotype.size() == l)
                s.fitness = evaluate(s.genotype, problem);
    return ReferenceFront{merge_fronts(fronts), exact};
}

} // namespace lkgomea
