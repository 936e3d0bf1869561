#include "lkgomea/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace lkgomea
{

std::string to_string(StopReason reason)
{
    switch (reason)
    {
    case StopReason::none:
        return "none";
    case StopReason::evaluation_budget:
        return "evaluation_budget";
    case StopReason::value_to_reach:
        return "value_to_reach";
    case StopReason::time_limit:
        return "time_limit";
    case StopReason::front_reached:
        return "front_reached";
    }
    return "unknown";
}

const char *StopRun::what() const noexcept
{
    switch (reason_)
    {
    case StopReason::evaluation_budget:
        return "evaluation budget exhausted";
    case StopReason::value_to_reach:
        return "value to reach hit";
    case StopReason::time_limit:
        return "time limit reached";
    case StopReason::front_reached:
        return "reference front reached";
    default:
        return "run stopped";
    }
}

Evaluator::Evaluator(Function function, std::uint64_t evaluation_limit)
    : function_(std::move(function)), limit_(evaluation_limit), start_(std::chrono::steady_clock::now())
{
    if (!function_)
        throw std::invalid_argument("evaluator needs a fitness function");
}

std::int64_t Evaluator::elapsed_ms() const
{
    if (!record_time_)
        return 0;
    auto d = std::chrono::steady_clock::now() - start_;
    return std::chrono::duration_cast<std::chrono::milliseconds>(d).count();
}

Fitness Evaluator::operator()(const Genotype &genotype)
{
    if (evaluations_ >= limit_)
        throw StopRun(StopReason::evaluation_budget);
    // Checking the clock is not free; every 256 evaluations is plenty.
    if (time_limit_.count() > 0 && (evaluations_ & 255) == 0 &&
        std::chrono::steady_clock::now() - start_ >= time_limit_)
        throw StopRun(StopReason::time_limit);

    Fitness f = function_(genotype);
    ++evaluations_;

    if (f.size() == 1)
    {
        if (!best_ || f[0] > best_->fitness[0])
        {
            best_ = Solution{genotype, f, 0};
            trace_.push_back(TraceRecord{evaluations_, elapsed_ms(), f[0]});
        }
        if (value_to_reach_ && f[0] >= *value_to_reach_)
        {
            if (!reached_at_)
                reached_at_ = std::make_pair(evaluations_, elapsed_ms());
            throw StopRun(StopReason::value_to_reach);
        }
    }
    return f;
}

void write_trace(std::ostream &out, std::span<const TraceRecord> trace)
{
    for (const auto &r : trace)
        out << r.evaluations << ' ' << r.milliseconds << ' ' << r.fitness << '\n';
}

std::string to_string(ModelMode mode)
{
    switch (mode)
    {
    case ModelMode::single_tree:
        return "single-tree";
    case ModelMode::kernel_asymmetric:
        return "lk-asym";
    case ModelMode::kernel_symmetric:
        return "lk-sym";
    }
    return "unknown";
}

ModelMode parse_model_mode(const std::string &name)
{
    if (name == "single-tree" || name == "single_tree" || name == "lt")
        return ModelMode::single_tree;
    if (name == "lk-asym" || name == "kernel_asymmetric" || name == "asymmetric")
        return ModelMode::kernel_asymmetric;
    if (name == "lk-sym" || name == "kernel_symmetric" || name == "symmetric")
        return ModelMode::kernel_symmetric;
    throw std::invalid_argument("unknown model mode: " + name);
}

std::size_t nis_threshold(std::size_t population_size)
{
    if (population_size == 0)
        return 1;
    return 1 + static_cast<std::size_t>(std::floor(10.0 * std::log10(static_cast<double>(population_size))));
}

Verdict single_objective_verdict(const Fitness &before, const Fitness &after, std::size_t objective)
{
    if (after[objective] > before[objective])
        return Verdict::improve;
    if (after[objective] == before[objective])
        return Verdict::accept;
    return Verdict::reject;
}

Acceptance single_objective_acceptance(std::size_t objective)
{
    return [objective](const Fitness &before, const Fitness &after, const Genotype &) {
        return single_objective_verdict(before, after, objective);
    };
}

namespace
{

bool differs_on(const Genotype &a, const Genotype &b, std::span<const std::uint32_t> subset)
{
    for (auto v : subset)
        if (a[v] != b[v])
            return true;
    return false;
}

std::vector<std::uint32_t> shuffled_order(std::size_t n, Rng &rng)
{
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    rng.shuffle(std::span<std::uint32_t>(order));
    return order;
}

// Copies `source` into `target` on `subset`, evaluates and applies the verdict.
// Returns the verdict; a rejected or interrupted copy is undone.
Verdict try_copy(Solution &target,
                 const Genotype &source,
                 std::span<const std::uint32_t> subset,
                 std::vector<std::uint8_t> &backup,
                 Evaluator &evaluator,
                 const Acceptance &acceptance)
{
    backup.resize(subset.size());
    for (std::size_t k = 0; k < subset.size(); ++k)
    {
        backup[k] = target.genotype[subset[k]];
        target.genotype[subset[k]] = source[subset[k]];
    }
    auto restore = [&] {
        for (std::size_t k = 0; k < subset.size(); ++k)
            target.genotype[subset[k]] = backup[k];
    };

    Fitness after;
    try
    {
        after = evaluator(target.genotype);
    }
    catch (...)
    {
        restore();
        throw;
    }
    Verdict v = acceptance(target.fitness, after, target.genotype);
    if (v == Verdict::reject)
        restore();
    else
        target.fitness = after;
    return v;
}

} // namespace

DonorPool::DonorPool(std::span<const Solution *const> donors)
{
    std::vector<const Genotype *> sorted;
    sorted.reserve(donors.size());
    for (const auto *d : donors)
        sorted.push_back(&d->genotype);
    // Sorting by value keeps the group order independent of memory layout.
    std::sort(sorted.begin(), sorted.end(), [](const Genotype *a, const Genotype *b) { return *a < *b; });
    for (const auto *g : sorted)
    {
        if (genotypes_.empty() || *genotypes_.back() != *g)
        {
            genotypes_.push_back(g);
            cumulative_.push_back(cumulative_.empty() ? 0 : cumulative_.back());
        }
        ++cumulative_.back();
    }
}

std::size_t DonorPool::draw(Rng &rng) const
{
    const auto r = rng.below(cumulative_.back());
    return static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), r) - cumulative_.begin());
}

GomResult gom(Solution &target,
              const Fos &fos,
              std::span<const Solution *const> donors,
              Evaluator &evaluator,
              const Acceptance &acceptance,
              Rng &rng,
              bool donor_search)
{
    return gom(target, fos, DonorPool(donors), evaluator, acceptance, rng, donor_search);
}

GomResult gom(Solution &target,
              const Fos &fos,
              const DonorPool &donors,
              Evaluator &evaluator,
              const Acceptance &acceptance,
              Rng &rng,
              bool donor_search)
{
    GomResult result;
    if (fos.empty() || donors.empty())
        return result;

    // Trying donors in random order until one differs picks a uniform member of
    // the differing donors. A few random draws usually find one; otherwise scan.
    constexpr int quick_draws = 4;
    const auto order = shuffled_order(fos.size(), rng);
    std::vector<std::size_t> differing;
    std::vector<std::uint64_t> cumulative;
    std::vector<std::uint8_t> backup;
    for (auto s : order)
    {
        const auto &subset = fos[s].indices;
        const Genotype *donor = nullptr;
        for (int t = 0; t < (donor_search ? quick_draws : 1) && !donor; ++t)
        {
            const auto &g = donors.genotype(donors.draw(rng));
            if (differs_on(g, target.genotype, subset))
                donor = &g;
        }
        if (!donor && donor_search)
        {
            differing.clear();
            cumulative.clear();
            for (std::size_t g = 0; g < donors.groups(); ++g)
                if (differs_on(donors.genotype(g), target.genotype, subset))
                {
                    differing.push_back(g);
                    cumulative.push_back((cumulative.empty() ? 0 : cumulative.back()) + donors.weight(g));
                }
            if (!differing.empty())
            {
                const auto r = rng.below(cumulative.back());
                const auto k = std::upper_bound(cumulative.begin(), cumulative.end(), r) - cumulative.begin();
                donor = &donors.genotype(differing[static_cast<std::size_t>(k)]);
            }
        }
        if (!donor)
            continue;

        Verdict v = try_copy(target, *donor, subset, backup, evaluator, acceptance);
        if (v != Verdict::reject)
            result.changed = true;
        if (v == Verdict::improve)
            result.improved = true;
    }
    return result;
}

GomResult forced_improvements(Solution &target,
                              const Fos &fos,
                              const Solution &elitist,
                              Evaluator &evaluator,
                              const Acceptance &acceptance,
                              Rng &rng)
{
    GomResult result;
    const auto order = shuffled_order(fos.size(), rng);
    std::vector<std::uint8_t> backup;
    for (auto s : order)
    {
        const auto &subset = fos[s].indices;
        if (!differs_on(elitist.genotype, target.genotype, subset))
            continue;
        Verdict v = try_copy(target, elitist.genotype, subset, backup, evaluator, acceptance);
        if (v != Verdict::reject)
            result.changed = true;
        if (v == Verdict::improve)
        {
            result.improved = true;
            return result;
        }
    }
    if (target.genotype != elitist.genotype)
    {
        target.genotype = elitist.genotype;
        target.fitness = elitist.fitness;
        result.changed = true;
    }
    return result;
}

namespace
{

Fos univariate_fos(std::size_t length)
{
    Fos fos;
    for (std::uint32_t v = 0; v < length; ++v)
        fos.subsets.push_back(FosSubset{{v}, 1.0});
    return fos;
}

Fos learn_or_univariate(std::span<const Genotype *const> set, std::size_t length, double eps)
{
    if (set.size() < 2)
        return univariate_fos(length);
    return learn_model(set, eps);
}

} // namespace

GenerationModels learn_generation_models(std::span<const Solution> solutions, const AlgorithmConfig &config, Rng &rng)
{
    GenerationModels models;
    const std::size_t n = solutions.size();
    if (n == 0)
        return models;
    const std::size_t length = solutions[0].genotype.size();

    std::vector<const Genotype *> all;
    all.reserve(n);
    for (const auto &s : solutions)
        all.push_back(&s.genotype);

    if (config.model == ModelMode::single_tree || n < 2)
    {
        models.fos.push_back(learn_or_univariate(all, length, config.filter_eps));
        return models;
    }

    const std::size_t k = config.neighborhood_size.value_or(default_k(n));
    const auto mode = config.model == ModelMode::kernel_symmetric ? NeighborhoodMode::symmetric
                                                                  : NeighborhoodMode::asymmetric;
    models.neighborhoods = compute_neighborhoods(std::span<const Genotype *const>(all), k, mode, rng).members;
    models.fos.reserve(n);
    std::vector<const Genotype *> set;
    for (std::size_t i = 0; i < n; ++i)
    {
        set.clear();
        if (config.owner_in_learning_set)
            set.push_back(all[i]);
        for (auto j : models.neighborhoods[i])
            set.push_back(all[j]);
        models.fos.push_back(learn_or_univariate(set, length, config.filter_eps));
    }
    return models;
}

Population initialize_population(std::size_t size, std::size_t length, Evaluator &evaluator, Rng &rng)
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
    for (const auto &s : population.solutions)
        if (s.fitness[0] > population.elitist.fitness[0])
            population.elitist = s;
    return population;
}

void generation_step(Population &population, const AlgorithmConfig &config, Evaluator &evaluator, Rng &rng)
{
    const std::size_t n = population.solutions.size();
    if (n == 0)
        return;
    const std::vector<Solution> originals = population.solutions;
    const auto models = learn_generation_models(originals, config, rng);

    std::vector<const Solution *> everyone;
    everyone.reserve(n);
    for (const auto &s : originals)
        everyone.push_back(&s);
    const DonorPool whole = models.neighborhoods.empty() ? DonorPool(everyone) : DonorPool();

    const std::size_t threshold = nis_threshold(n);
    const auto acceptance = single_objective_acceptance();
    const auto order = shuffled_order(n, rng);
    const auto before = evaluator.evaluations();
    std::vector<const Solution *> donors;
    try
    {
        for (auto i : order)
        {
            Solution &s = population.solutions[i];
            const Fitness start = s.fitness;
            const Fos &fos = models.fos_for(i);
            GomResult r;
            if (models.neighborhoods.empty())
                r = gom(s, fos, whole, evaluator, acceptance, rng, config.donor_search);
            else
            {
                donors.clear();
                for (auto j : models.neighborhoods[i])
                    donors.push_back(&originals[j]);
                r = gom(s, fos, donors, evaluator, acceptance, rng, config.donor_search);
            }
            bool improved = r.improved;
            if (config.forced_improvements && (!r.changed || s.nis > threshold))
            {
                auto f = forced_improvements(s, fos, population.elitist, evaluator, acceptance, rng);
                improved = improved || f.improved;
            }
            improved = improved || s.fitness[0] > start[0];
            s.nis = improved ? 0 : s.nis + 1;
            if (s.fitness[0] > population.elitist.fitness[0])
                population.elitist = s;
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
