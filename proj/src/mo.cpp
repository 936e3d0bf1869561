#include "lkgomea/mo.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lkgomea
{

bool ElitistArchive::admissible(const Fitness &fitness) const
{
    for (const auto &m : members_)
        if (weakly_dominates(m.fitness, fitness))
            return false;
    return true;
}

bool ElitistArchive::insert(const Solution &candidate)
{
    if (!admissible(candidate.fitness))
        return false;
    std::erase_if(members_, [&](const Solution &m) { return weakly_dominates(candidate.fitness, m.fitness); });
    members_.push_back(candidate);
    members_.back().nis = 0;
    return true;
}

const Solution &ElitistArchive::best_in(std::size_t objective) const
{
    if (members_.empty())
        throw std::logic_error("empty archive has no best member");
    const std::size_t other = 1 - objective;
    const Solution *best = &members_.front();
    for (const auto &m : members_)
        if (m.fitness[objective] > best->fitness[objective] ||
            (m.fitness[objective] == best->fitness[objective] && m.fitness[other] > best->fitness[other]))
            best = &m;
    return *best;
}

std::vector<Solution> ElitistArchive::sorted() const
{
    auto out = members_;
    std::sort(out.begin(), out.end(), [](const Solution &a, const Solution &b) {
        if (a.fitness[0] != b.fitness[0])
            return a.fitness[0] > b.fitness[0];
        return a.fitness[1] < b.fitness[1];
    });
    return out;
}

bool ElitistArchive::is_consistent() const
{
    for (std::size_t i = 0; i < members_.size(); ++i)
        for (std::size_t j = 0; j < members_.size(); ++j)
            if (i != j && weakly_dominates(members_[i].fitness, members_[j].fitness))
                return false;
    return true;
}

void write_front(std::ostream &out, std::span<const Solution> front)
{
    std::vector<const Solution *> order;
    for (const auto &s : front)
        order.push_back(&s);
    std::stable_sort(order.begin(), order.end(), [](const Solution *a, const Solution *b) {
        if (a->fitness[0] != b->fitness[0])
            return a->fitness[0] > b->fitness[0];
        return a->fitness[1] < b->fitness[1];
    });
    for (const auto *s : order)
    {
        out << s->fitness[0] << ' ' << s->fitness[1];
        if (s->genotype.size() > 0)
            out << ' ' << s->genotype.to_string();
        out << '\n';
    }
}

void write_archive(std::ostream &out, const ElitistArchive &archive)
{
    write_front(out, archive.members());
}

std::vector<Solution> read_front(std::istream &in)
{
    std::vector<Solution> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line))
    {
        ++number;
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream fields(line);
        Objective f0 = 0, f1 = 0;
        if (!(fields >> f0 >> f1))
            throw std::runtime_error("bad front line " + std::to_string(number) + ": " + line);
        Solution s;
        s.fitness = Fitness(f0, f1);
        std::string bits;
        if (fields >> bits)
            s.genotype = Genotype::from_string(bits);
        out.push_back(std::move(s));
    }
    return out;
}

double ObjectiveRanges::normalize(const Fitness &f, std::size_t objective) const
{
    double width = hi[objective] - lo[objective];
    if (width <= 0.0)
        width = 1.0;
    return (static_cast<double>(f[objective]) - lo[objective]) / width;
}

ObjectiveRanges ranges_of(std::span<const Solution> solutions)
{
    ObjectiveRanges r;
    if (solutions.empty())
        return r;
    for (std::size_t o = 0; o < 2; ++o)
    {
        r.lo[o] = std::numeric_limits<double>::infinity();
        r.hi[o] = -std::numeric_limits<double>::infinity();
        for (const auto &s : solutions)
        {
            r.lo[o] = std::min(r.lo[o], static_cast<double>(s.fitness[o]));
            r.hi[o] = std::max(r.hi[o], static_cast<double>(s.fitness[o]));
        }
    }
    return r;
}

ObjectiveRanges ranges_of(const ElitistArchive &archive)
{
    return ranges_of(std::span<const Solution>(archive.members()));
}

namespace
{

double squared_distance(const std::array<double, 2> &a, const std::array<double, 2> &b)
{
    const double d0 = a[0] - b[0];
    const double d1 = a[1] - b[1];
    return d0 * d0 + d1 * d1;
}

} // namespace

std::vector<Cluster> cluster_population(std::span<const Solution> population, std::size_t cluster_count, Rng &rng)
{
    const std::size_t n = population.size();
    const std::size_t c = cluster_count;
    if (c < 2 || n < c)
        throw std::invalid_argument("cluster_population needs 2 <= c <= |P|");

    std::vector<Cluster> clusters(c);
    bool degenerate = true;
    for (const auto &s : population)
        if (!(s.fitness == population[0].fitness))
            degenerate = false;
    if (degenerate)
    {
        for (auto &cl : clusters)
        {
            cl.members.resize(n);
            std::iota(cl.members.begin(), cl.members.end(), 0u);
            cl.mean = {static_cast<double>(population[0].fitness[0]), static_cast<double>(population[0].fitness[1])};
        }
        clusters[0].role = ClusterRole::objective0;
        clusters[1].role = ClusterRole::objective1;
        return clusters;
    }

    const auto ranges = ranges_of(population);
    std::vector<std::array<double, 2>> points(n);
    for (std::size_t i = 0; i < n; ++i)
        points[i] = {ranges.normalize(population[i].fitness, 0), ranges.normalize(population[i].fitness, 1)};

    // Farthest-point seeding.
    std::vector<std::array<double, 2>> centers;
    centers.reserve(c);
    centers.push_back(points[rng.below(n)]);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    while (centers.size() < c)
    {
        std::size_t far = 0;
        for (std::size_t i = 0; i < n; ++i)
        {
            nearest[i] = std::min(nearest[i], squared_distance(points[i], centers.back()));
            if (nearest[i] > nearest[far])
                far = i;
        }
        centers.push_back(points[far]);
    }

    auto closest_center = [&](const std::array<double, 2> &p) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < c; ++k)
            if (squared_distance(p, centers[k]) < squared_distance(p, centers[best]))
                best = k;
        return best;
    };

    std::vector<std::size_t> assignment(n, c);
    for (int iteration = 0; iteration < 100; ++iteration)
    {
        bool moved = false;
        for (std::size_t i = 0; i < n; ++i)
        {
            auto k = closest_center(points[i]);
            if (k != assignment[i])
            {
                assignment[i] = k;
                moved = true;
            }
        }
        if (!moved)
            break;
        std::vector<std::array<double, 2>> sums(c, {0.0, 0.0});
        std::vector<std::size_t> counts(c, 0);
        for (std::size_t i = 0; i < n; ++i)
        {
            sums[assignment[i]][0] += points[i][0];
            sums[assignment[i]][1] += points[i][1];
            ++counts[assignment[i]];
        }
        for (std::size_t k = 0; k < c; ++k)
            if (counts[k] > 0)
                centers[k] = {sums[k][0] / static_cast<double>(counts[k]), sums[k][1] / static_cast<double>(counts[k])};
    }

    for (std::size_t k = 0; k < c; ++k)
    {
        std::array<double, 2> sum{0.0, 0.0};
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (assignment[i] == k)
            {
                sum[0] += static_cast<double>(population[i].fitness[0]);
                sum[1] += static_cast<double>(population[i].fitness[1]);
                ++count;
            }
        if (count > 0)
            clusters[k].mean = {sum[0] / static_cast<double>(count), sum[1] / static_cast<double>(count)};
        else
            for (std::size_t o = 0; o < 2; ++o)
                clusters[k].mean[o] = ranges.lo[o] + centers[k][o] * std::max(ranges.hi[o] - ranges.lo[o], 1.0);
    }

    const std::size_t take = std::min(n, (2 * n + c - 1) / c);
    std::vector<bool> covered(n, false);
    std::vector<std::pair<double, std::uint32_t>> by_distance(n);
    for (std::size_t k = 0; k < c; ++k)
    {
        for (std::uint32_t i = 0; i < n; ++i)
            by_distance[i] = {squared_distance(points[i], centers[k]), i};
        std::partial_sort(by_distance.begin(), by_distance.begin() + static_cast<std::ptrdiff_t>(take),
                          by_distance.end());
        for (std::size_t r = 0; r < take; ++r)
        {
            clusters[k].members.push_back(by_distance[r].second);
            covered[by_distance[r].second] = true;
        }
    }
    for (std::uint32_t i = 0; i < n; ++i)
        if (!covered[i])
            clusters[closest_center(points[i])].members.push_back(i);
    for (auto &cl : clusters)
        std::sort(cl.members.begin(), cl.members.end());

    std::size_t best0 = 0;
    for (std::size_t k = 1; k < c; ++k)
        if (clusters[k].mean[0] > clusters[best0].mean[0])
            best0 = k;
    std::size_t best1 = best0 == 0 ? 1 : 0;
    for (std::size_t k = 0; k < c; ++k)
        if (k != best0 && clusters[k].mean[1] > clusters[best1].mean[1])
            best1 = k;
    clusters[best0].role = ClusterRole::objective0;
    clusters[best1].role = ClusterRole::objective1;
    return clusters;
}

double tchebycheff(const Fitness &f, const Weights &w, const ObjectiveRanges &ranges)
{
    // Zero-weight objectives are left out entirely so (1,0) orders exactly like objective 0.
    double g = -std::numeric_limits<double>::infinity();
    for (std::size_t o = 0; o < 2; ++o)
        if (w[o] > 0.0)
            g = std::max(g, w[o] * (1.0 - ranges.normalize(f, o)));
    return g;
}

Verdict domination_verdict(const Fitness &before, const Fitness &after, const ElitistArchive *archive)
{
    if (dominates(after, before) || (archive && archive->admissible(after)))
        return Verdict::improve;
    if (weakly_dominates(after, before))
        return Verdict::accept;
    return Verdict::reject;
}

Verdict scalarized_verdict(const Fitness &before,
                           const Fitness &after,
                           const Weights &weights,
                           const ObjectiveRanges &ranges,
                           const ElitistArchive *archive)
{
    const double gb = tchebycheff(before, weights, ranges);
    const double ga = tchebycheff(after, weights, ranges);
    if (ga < gb || (archive && archive->admissible(after)))
        return Verdict::improve;
    if (ga == gb)
        return Verdict::accept;
    return Verdict::reject;
}

bool mo_accept_domination(const Fitness &before, const Fitness &after, const ElitistArchive &archive)
{
    return domination_verdict(before, after, &archive) != Verdict::reject;
}

bool mo_accept_scalarized(const Fitness &before,
                          const Fitness &after,
                          const Weights &weights,
                          const ObjectiveRanges &ranges,
                          const ElitistArchive &archive)
{
    return scalarized_verdict(before, after, weights, ranges, &archive) != Verdict::reject;
}

std::vector<Weights> simplex_weights(std::size_t n)
{
    if (n == 0)
        return {};
    if (n == 1)
        return {Weights{0.5, 0.5}};
    std::vector<Weights> out(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        const double t = static_cast<double>(k) / static_cast<double>(n - 1);
        out[k] = {1.0 - t, t};
    }
    out.front() = {1.0, 0.0};
    out.back() = {0.0, 1.0};
    return out;
}

std::vector<Weights> assign_scalarization_weights(std::span<const Solution> population,
                                                  const ObjectiveRanges &ranges,
                                                  Rng &rng)
{
    const std::size_t n = population.size();
    const auto weights = simplex_weights(n);
    std::vector<Weights> out(n);
    if (n == 0)
        return out;

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    if (n > 2)
    {
        // Extremes first: order = 0, n-1, shuffled middle.
        std::vector<std::uint32_t> middle(order.begin() + 1, order.end() - 1);
        rng.shuffle(std::span<std::uint32_t>(middle));
        order = {0, static_cast<std::uint32_t>(n - 1)};
        order.insert(order.end(), middle.begin(), middle.end());
    }

    std::vector<std::array<double, 2>> normalized(n);
    for (std::size_t i = 0; i < n; ++i)
        normalized[i] = {ranges.normalize(population[i].fitness, 0), ranges.normalize(population[i].fitness, 1)};

    std::vector<bool> taken(n, false);
    for (auto w : order)
    {
        const auto &weight = weights[w];
        std::size_t best = n;
        double best_g = 0.0;
        double best_other = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            if (taken[i])
                continue;
            double g = -std::numeric_limits<double>::infinity();
            for (std::size_t o = 0; o < 2; ++o)
                if (weight[o] > 0.0)
                    g = std::max(g, weight[o] * (1.0 - normalized[i][o]));
            // Among equal values prefer the better overall point.
            const double other = normalized[i][0] + normalized[i][1];
            if (best == n || g < best_g || (g == best_g && other > best_other))
            {
                best = i;
                best_g = g;
                best_other = other;
            }
        }
        taken[best] = true;
        out[best] = weight;
    }
    return out;
}

std::string to_string(MoModel model)
{
    switch (model)
    {
    case MoModel::objective_clusters:
        return "objective";
    case MoModel::kernel_asymmetric:
        return "lk-asym";
    case MoModel::kernel_symmetric:
        return "lk-sym";
    }
    return "unknown";
}

std::string to_string(MoAcceptanceRule rule)
{
    return rule == MoAcceptanceRule::domination ? "domination" : "scalarized";
}

MoModel parse_mo_model(const std::string &name)
{
    if (name == "objective" || name == "objective_clusters" || name == "clusters")
        return MoModel::objective_clusters;
    if (name == "lk-asym" || name == "kernel_asymmetric" || name == "asymmetric")
        return MoModel::kernel_asymmetric;
    if (name == "lk-sym" || name == "kernel_symmetric" || name == "symmetric")
        return MoModel::kernel_symmetric;
    throw std::invalid_argument("unknown MO model: " + name);
}

MoAcceptanceRule parse_mo_acceptance(const std::string &name)
{
    if (name == "domination")
        return MoAcceptanceRule::domination;
    if (name == "scalarized" || name == "scalarization")
        return MoAcceptanceRule::scalarized;
    throw std::invalid_argument("unknown MO acceptance rule: " + name);
}

std::size_t mo_cluster_count(std::size_t population_index)
{
    return std::max<std::size_t>(2, population_index + 1);
}

Population initialize_mo_population(std::size_t size,
                                    std::size_t length,
                                    Evaluator &evaluator,
                                    ElitistArchive &archive,
                                    Rng &rng)
{
    if (size == 0)
        throw std::invalid_argument("population size must be positive");
    Population population;
    population.solutions.reserve(size);
    const auto before = evaluator.evaluations();
    try
    {
        for (std::size_t i = 0; i < size; ++i)
        {
            Solution s;
            s.genotype = Genotype::random(length, rng);
            s.fitness = evaluator(s.genotype);
            archive.insert(s);
            population.solutions.push_back(std::move(s));
        }
    }
    catch (const StopRun &)
    {
        population.evaluations_used = evaluator.evaluations() - before;
        throw;
    }
    population.evaluations_used = evaluator.evaluations() - before;
    population.elitist = population.solutions.front();
    return population;
}

void mo_generation_step(Population &population,
                        const MoConfig &config,
                        std::size_t cluster_count,
                        Evaluator &evaluator,
                        ElitistArchive &archive,
                        Rng &rng)
{
    const std::size_t n = population.solutions.size();
    if (n < 2)
        return;
    const std::vector<Solution> originals = population.solutions;
    const ObjectiveRanges ranges = ranges_of(archive);

    std::vector<Weights> weights;
    if (config.acceptance == MoAcceptanceRule::scalarized)
        weights = assign_scalarization_weights(originals, ranges, rng);

    // Per solution: which FOS, which donors, which role.
    std::vector<Fos> models;
    std::vector<std::vector<const Solution *>> donor_sets;
    std::vector<std::uint32_t> model_of(n);
    std::vector<std::uint32_t> donors_of(n);
    std::vector<ClusterRole> role_of(n, ClusterRole::mixed);

    if (config.model == MoModel::objective_clusters)
    {
        const std::size_t c = std::min(cluster_count, n);
        const auto clusters = cluster_population(originals, std::max<std::size_t>(c, 2), rng);
        std::vector<std::vector<std::uint32_t>> containing(n);
        for (std::uint32_t k = 0; k < clusters.size(); ++k)
        {
            std::vector<const Genotype *> set;
            std::vector<const Solution *> donors;
            for (auto i : clusters[k].members)
            {
                set.push_back(&originals[i].genotype);
                donors.push_back(&originals[i]);
                containing[i].push_back(k);
            }
            models.push_back(set.size() >= 2 ? learn_model(set, config.filter_eps) : Fos{});
            if (models.back().empty())
                for (std::uint32_t v = 0; v < originals[0].genotype.size(); ++v)
                    models.back().subsets.push_back(FosSubset{{v}, 1.0});
            donor_sets.push_back(std::move(donors));
        }
        for (std::size_t i = 0; i < n; ++i)
        {
            const auto k = containing[i][rng.below(containing[i].size())];
            model_of[i] = k;
            donors_of[i] = k;
            role_of[i] = clusters[k].role;
        }
    }
    else
    {
        AlgorithmConfig kernel;
        kernel.model = config.model == MoModel::kernel_symmetric ? ModelMode::kernel_symmetric
                                                                 : ModelMode::kernel_asymmetric;
        kernel.neighborhood_size = config.neighborhood_size;
        kernel.filter_eps = config.filter_eps;
        auto learned = learn_generation_models(originals, kernel, rng);
        models = std::move(learned.fos);
        donor_sets.resize(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            for (auto j : learned.neighborhoods[i])
                donor_sets[i].push_back(&originals[j]);
            model_of[i] = static_cast<std::uint32_t>(i);
            donors_of[i] = static_cast<std::uint32_t>(i);
        }
    }

    std::vector<DonorPool> pools;
    pools.reserve(donor_sets.size());
    for (const auto &d : donor_sets)
        pools.emplace_back(d);

    const std::size_t threshold = nis_threshold(n);
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    rng.shuffle(std::span<std::uint32_t>(order));
    const auto before = evaluator.evaluations();
    try
    {
        for (auto i : order)
        {
            const ClusterRole role = role_of[i];
            Acceptance acceptance = [&, i, role](const Fitness &b, const Fitness &a, const Genotype &candidate) {
                Verdict v;
                if (role == ClusterRole::objective0)
                    v = single_objective_verdict(b, a, 0);
                else if (role == ClusterRole::objective1)
                    v = single_objective_verdict(b, a, 1);
                else if (config.acceptance == MoAcceptanceRule::scalarized)
                    v = scalarized_verdict(b, a, weights[i], ranges, &archive);
                else
                    v = domination_verdict(b, a, &archive);
                archive.insert(Solution{candidate, a, 0});
                return v;
            };

            Solution &s = population.solutions[i];
            const Fitness start = s.fitness;
            const Fos &fos = models[model_of[i]];
            auto r = gom(s, fos, pools[donors_of[i]], evaluator, acceptance, rng, config.donor_search);
            bool improved = r.improved;
            if (config.forced_improvements && (!r.changed || s.nis > threshold) && !archive.empty())
            {
                Solution elitist;
                if (role == ClusterRole::objective0)
                    elitist = archive.best_in(0);
                else if (role == ClusterRole::objective1)
                    elitist = archive.best_in(1);
                else
                    elitist = archive[rng.below(archive.size())];
                auto f = forced_improvements(s, fos, elitist, evaluator, acceptance, rng);
                improved = improved || f.improved;
            }
            improved = improved || dominates(s.fitness, start);
            s.nis = improved ? 0 : s.nis + 1;
        }
    }
    catch (const StopRun &)
    {
        population.evaluations_used += evaluator.evaluations() - before;
        throw;
    }
    population.evaluations_used += evaluator.evaluations() - before;
}

} // namespace lkgomea
