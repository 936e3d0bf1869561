#include "lkgomea/ims.hpp"

#include "lkgomea/metrics.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace lkgomea
{

ImsScheduler::ImsScheduler(std::size_t interleave) : b_(interleave)
{
    if (b_ < 2)
        throw std::invalid_argument("interleaving factor must be at least 2");
}

std::size_t ImsScheduler::next_raw()
{
    const std::size_t p = next_;
    if (counters_.size() <= p)
        counters_.resize(p + 1, 0);
    if (++counters_[p] == b_)
    {
        counters_[p] = 0;
        next_ = p + 1;
    }
    else
    {
        next_ = 0;
    }
    return p;
}

std::size_t ImsScheduler::tick(const std::vector<bool> &active)
{
    while (true)
    {
        const std::size_t p = next_raw();
        if (p >= active.size())
            return active.size();
        if (active[p])
            return p;
    }
}

void ims_retire(std::span<const double> means, std::vector<bool> &active)
{
    if (means.size() != active.size())
        throw std::invalid_argument("ims_retire needs one mean per population");
    // Best mean among active populations larger than p, scanning from the largest.
    bool seen = false;
    double best_larger = 0.0;
    for (std::size_t q = means.size(); q-- > 0;)
    {
        const bool was_active = active[q];
        if (was_active && seen && means[q] < best_larger)
            active[q] = false;
        if (was_active)
        {
            best_larger = seen ? std::max(best_larger, means[q]) : means[q];
            seen = true;
        }
    }
}

namespace
{

bool converged(const Population &population)
{
    const auto &first = population.solutions.front().genotype;
    for (const auto &s : population.solutions)
        if (s.genotype != first)
            return false;
    return true;
}

struct Bookkeeping
{
    std::vector<std::size_t> generations;
    std::vector<bool> active;
};

void fill_populations(RunReport &report, const std::vector<Population> &populations, const Bookkeeping &book)
{
    for (std::size_t p = 0; p < populations.size(); ++p)
    {
        report.population_sizes.push_back(populations[p].solutions.size());
        report.population_active.push_back(book.active[p]);
        report.population_evaluations.push_back(populations[p].evaluations_used);
        report.population_generations.push_back(book.generations[p]);
    }
}

std::size_t population_size(const ImsConfig &ims, std::size_t index)
{
    if (index >= 40)
        throw std::length_error("population size overflow");
    return ims.base_population << index;
}

} // namespace

RunReport run_with_ims(const Instance &instance,
                       const AlgorithmConfig &config,
                       const ImsConfig &ims,
                       const RunLimits &limits,
                       std::uint64_t seed)
{
    RunReport report;
    report.problem = describe(instance);
    report.config = to_string(config.model);
    report.seed = seed;
    report.budget = limits.evaluations;

    const std::size_t l = length(instance);
    report.length = l;
    Evaluator evaluator([&instance](const Genotype &g) { return Fitness(evaluate(g, instance)); },
                        limits.evaluations);
    evaluator.set_value_to_reach(limits.value_to_reach);
    evaluator.set_time_limit(limits.time);
    evaluator.set_record_time(limits.record_time);

    Rng rng(derive_seed(seed, "run"));
    ImsScheduler scheduler(ims.interleave);
    std::vector<Population> populations;
    Bookkeeping book;

    try
    {
        if (limits.evaluations == 0)
            throw StopRun(StopReason::evaluation_budget);
        while (true)
        {
            const std::size_t p = scheduler.tick(book.active);
            const auto before = evaluator.evaluations();
            if (p == populations.size())
            {
                populations.emplace_back();
                book.active.push_back(true);
                book.generations.push_back(0);
                populations[p] = initialize_population(population_size(ims, p), l, evaluator, rng);
            }
            generation_step(populations[p], config, evaluator, rng);
            ++book.generations[p];

            if (ims.retire_stalled && (converged(populations[p]) || evaluator.evaluations() == before))
                book.active[p] = false;
            std::vector<double> means;
            for (const auto &pop : populations)
            {
                double sum = 0.0;
                for (const auto &s : pop.solutions)
                    sum += static_cast<double>(s.fitness[0]);
                means.push_back(pop.solutions.empty() ? 0.0 : sum / static_cast<double>(pop.solutions.size()));
            }
            ims_retire(means, book.active);
        }
    }
    catch (const StopRun &stop)
    {
        report.reason = stop.reason();
    }

    // A population interrupted during initialization has no solutions yet but did spend evaluations.
    if (!populations.empty() && populations.back().solutions.empty())
    {
        std::uint64_t accounted = 0;
        for (std::size_t p = 0; p + 1 < populations.size(); ++p)
            accounted += populations[p].evaluations_used;
        populations.back().evaluations_used = evaluator.evaluations() - accounted;
    }

    report.evaluations = evaluator.evaluations();
    report.milliseconds = evaluator.elapsed_ms();
    report.success = evaluator.reached();
    if (evaluator.reached_at())
    {
        report.evaluations_to_optimum = evaluator.reached_at()->first;
        report.milliseconds_to_optimum = evaluator.reached_at()->second;
    }
    report.best = evaluator.best();
    report.trace = evaluator.trace();
    fill_populations(report, populations, book);
    return report;
}

RunReport run_mo_with_ims(const MoProblem &problem,
                          const MoConfig &config,
                          const ImsConfig &ims,
                          const RunLimits &limits,
                          std::uint64_t seed,
                          const std::vector<Solution> *reference_front)
{
    RunReport report;
    report.problem = describe(problem.objectives[0]) + " vs " + describe(problem.objectives[1]);
    report.config = to_string(config.model) + "/" + to_string(config.acceptance);
    report.seed = seed;
    report.budget = limits.evaluations;

    const std::size_t l = length(problem);
    report.length = l;
    Evaluator evaluator([&problem](const Genotype &g) { return evaluate(g, problem); }, limits.evaluations);
    evaluator.set_time_limit(limits.time);
    evaluator.set_record_time(limits.record_time);

    Rng rng(derive_seed(seed, "run"));
    ImsScheduler scheduler(ims.interleave);
    std::vector<Population> populations;
    Bookkeeping book;
    ElitistArchive archive;

    auto checkpoint = [&] {
        if (!reference_front || archive.empty())
            return;
        const double hv = normalized_hv(archive.members(), *reference_front);
        if (report.hv_series.empty() || report.hv_series.back().second != hv)
            report.hv_series.emplace_back(evaluator.evaluations(), hv);
        if (limits.stop_at_front && hv >= 1.0 - 1e-12)
            throw StopRun(StopReason::front_reached);
    };

    try
    {
        if (limits.evaluations == 0)
            throw StopRun(StopReason::evaluation_budget);
        while (true)
        {
            const std::size_t p = scheduler.tick(book.active);
            const auto before = evaluator.evaluations();
            if (p == populations.size())
            {
                populations.emplace_back();
                book.active.push_back(true);
                book.generations.push_back(0);
                populations[p] = initialize_mo_population(population_size(ims, p), l, evaluator, archive, rng);
                checkpoint();
            }
            mo_generation_step(populations[p], config, mo_cluster_count(p), evaluator, archive, rng);
            ++book.generations[p];
            checkpoint();

            if (ims.retire_stalled && (converged(populations[p]) || evaluator.evaluations() == before))
                book.active[p] = false;
            const auto ranges = ranges_of(archive);
            std::vector<double> means;
            for (const auto &pop : populations)
            {
                double sum = 0.0;
                for (const auto &s : pop.solutions)
                    sum += (ranges.normalize(s.fitness, 0) + ranges.normalize(s.fitness, 1)) / 2.0;
                means.push_back(pop.solutions.empty() ? 0.0 : sum / static_cast<double>(pop.solutions.size()));
            }
            ims_retire(means, book.active);
        }
    }
    catch (const StopRun &stop)
    {
        report.reason = stop.reason();
    }

    if (!populations.empty() && populations.back().solutions.empty())
    {
        std::uint64_t accounted = 0;
        for (std::size_t p = 0; p + 1 < populations.size(); ++p)
            accounted += populations[p].evaluations_used;
        populations.back().evaluations_used = evaluator.evaluations() - accounted;
    }

    report.evaluations = evaluator.evaluations();
    report.milliseconds = evaluator.elapsed_ms();
    report.archive = archive.sorted();
    if (reference_front && !archive.empty())
    {
        report.final_hv = normalized_hv(archive.members(), *reference_front);
        if (report.hv_series.empty() || report.hv_series.back().second != *report.final_hv)
            report.hv_series.emplace_back(evaluator.evaluations(), *report.final_hv);
        report.success = *report.final_hv >= 1.0 - 1e-12;
    }
    fill_populations(report, populations, book);
    return report;
}

} // namespace lkgomea
