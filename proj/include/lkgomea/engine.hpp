#pragma once

#include "lkgomea/linkage.hpp"
#include "lkgomea/neighborhoods.hpp"
#include "lkgomea/rng.hpp"
#include "lkgomea/types.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lkgomea
{

enum class StopReason
{
    none,
    evaluation_budget,
    value_to_reach,
    time_limit,
    front_reached,
};

std::string to_string(StopReason reason);

/**
 * @brief Thrown from inside an evaluation when a run limit is hit.
 *
 * Budget and time limits throw before evaluating; the value-to-reach signal is
 * thrown right after the evaluation that reached it.
 */
class StopRun : public std::exception
{
  public:
    explicit StopRun(StopReason reason) : reason_(reason)
    {
    }
    StopReason reason() const
    {
        return reason_;
    }
    const char *what() const noexcept override;

  private:
    StopReason reason_;
};

// One record per improvement of the best-so-far (single-objective runs).
struct TraceRecord
{
    std::uint64_t evaluations = 0;
    std::int64_t milliseconds = 0;
    Objective fitness = 0;
};

/**
 * @brief Counting, budget-enforcing evaluation front-end for one run.
 *
 * Every call is one full evaluation. For single-objective fitness it also keeps
 * the best-so-far solution, the improvement trace, and the value-to-reach hit.
 */
class Evaluator
{
  public:
    using Function = std::function<Fitness(const Genotype &)>;

    explicit Evaluator(Function function,
                       std::uint64_t evaluation_limit = std::numeric_limits<std::uint64_t>::max());

    Fitness operator()(const Genotype &genotype);

    std::uint64_t evaluations() const
    {
        return evaluations_;
    }
    std::uint64_t evaluation_limit() const
    {
        return limit_;
    }
    bool budget_left() const
    {
        return evaluations_ < limit_;
    }

    void set_value_to_reach(std::optional<Objective> value)
    {
        value_to_reach_ = value;
    }
    // Zero disables the wall-clock limit.
    void set_time_limit(std::chrono::milliseconds limit)
    {
        time_limit_ = limit;
    }
    // When off, all recorded times are zero so traces are reproducible byte-for-byte.
    void set_record_time(bool on)
    {
        record_time_ = on;
    }
    std::int64_t elapsed_ms() const;

    const std::optional<Solution> &best() const
    {
        return best_;
    }
    const std::vector<TraceRecord> &trace() const
    {
        return trace_;
    }
    bool reached() const
    {
        return reached_at_.has_value();
    }
    // (evaluations, milliseconds) at which value-to-reach was first met.
    const std::optional<std::pair<std::uint64_t, std::int64_t>> &reached_at() const
    {
        return reached_at_;
    }

  private:
    Function function_;
    std::uint64_t limit_;
    std::uint64_t evaluations_ = 0;
    std::optional<Objective> value_to_reach_;
    std::chrono::milliseconds time_limit_{0};
    bool record_time_ = true;
    std::chrono::steady_clock::time_point start_;
    std::optional<Solution> best_;
    std::vector<TraceRecord> trace_;
    std::optional<std::pair<std::uint64_t, std::int64_t>> reached_at_;
};

// Line-delimited "evaluations milliseconds fitness" records.
void write_trace(std::ostream &out, std::span<const TraceRecord> trace);

enum class ModelMode
{
    single_tree,
    kernel_asymmetric,
    kernel_symmetric,
};

std::string to_string(ModelMode mode);
ModelMode parse_model_mode(const std::string &name);

struct AlgorithmConfig
{
    ModelMode model = ModelMode::single_tree;
    bool donor_search = true;
    bool forced_improvements = true;
    // Learn each kernel over {owner} + neighbors rather than the neighbors alone.
    bool owner_in_learning_set = true;
    // Overrides default_k(|P|) in kernel modes.
    std::optional<std::size_t> neighborhood_size;
    double filter_eps = default_filter_eps;
};

struct Population
{
    std::vector<Solution> solutions;
    Solution elitist;
    std::uint64_t evaluations_used = 0;
};

// 1 + floor(10 log10(population_size))
std::size_t nis_threshold(std::size_t population_size);

enum class Verdict
{
    reject,
    accept,
    improve,
};

// Decides on a change from `before` to `after` (the candidate genotype is passed for archiving).
using Acceptance = std::function<Verdict(const Fitness &before, const Fitness &after, const Genotype &candidate)>;

// Equal-or-better on one objective; strictly better counts as an improvement.
Verdict single_objective_verdict(const Fitness &before, const Fitness &after, std::size_t objective = 0);
Acceptance single_objective_acceptance(std::size_t objective = 0);

struct GomResult
{
    bool changed = false;
    bool improved = false;
};

/**
 * @brief Donor genotypes grouped by value and weighted by multiplicity.
 *
 * Drawing a group in proportion to its size is the same as drawing a donor
 * uniformly, but a converged population collapses to a handful of groups.
 */
class DonorPool
{
  public:
    DonorPool() = default;
    explicit DonorPool(std::span<const Solution *const> donors);

    bool empty() const
    {
        return genotypes_.empty();
    }
    std::size_t groups() const
    {
        return genotypes_.size();
    }
    const Genotype &genotype(std::size_t group) const
    {
        return *genotypes_[group];
    }
    std::uint64_t weight(std::size_t group) const
    {
        return cumulative_[group] - (group == 0 ? 0 : cumulative_[group - 1]);
    }
    // Group of a uniformly drawn donor.
    std::size_t draw(Rng &rng) const;

  private:
    std::vector<const Genotype *> genotypes_;
    std::vector<std::uint64_t> cumulative_;
};

/**
 * @brief Gene-pool optimal mixing on one solution.
 *
 * FOS subsets are visited in a fresh random order. For each subset the donors
 * are drawn in random order until one differs from the target on the subset
 * (only the first donor when donor search is off). The copy is evaluated once
 * and kept unless the acceptance rejects it, in which case the subset is
 * restored bit-exactly. No-op copies are never evaluated.
 */
GomResult gom(Solution &target,
              const Fos &fos,
              std::span<const Solution *const> donors,
              Evaluator &evaluator,
              const Acceptance &acceptance,
              Rng &rng,
              bool donor_search = true);
GomResult gom(Solution &target,
              const Fos &fos,
              const DonorPool &donors,
              Evaluator &evaluator,
              const Acceptance &acceptance,
              Rng &rng,
              bool donor_search = true);

/**
 * @brief Copy subsets from the elitist until one copy is an improvement.
 *
 * If no subset yields an improvement, the target is replaced by the elitist.
 */
GomResult forced_improvements(Solution &target,
                              const Fos &fos,
                              const Solution &elitist,
                              Evaluator &evaluator,
                              const Acceptance &acceptance,
                              Rng &rng);

// Per-generation models: one shared FOS (single tree) or one FOS per solution.
struct GenerationModels
{
    std::vector<Fos> fos;
    // Kernel modes: donor indices per solution. Empty in single-tree mode (everyone donates).
    std::vector<std::vector<std::uint32_t>> neighborhoods;

    const Fos &fos_for(std::size_t i) const
    {
        return fos.size() == 1 ? fos.front() : fos[i];
    }
};

GenerationModels learn_generation_models(std::span<const Solution> solutions, const AlgorithmConfig &config, Rng &rng);

Population initialize_population(std::size_t size, std::size_t length, Evaluator &evaluator, Rng &rng);

/**
 * @brief One GOMEA / LK-GOMEA generation.
 *
 * Donors are read from a snapshot of the population taken at the start of the
 * generation. A StopRun from the evaluator leaves every solution consistent with
 * its fitness and is rethrown.
 */
void generation_step(Population &population, const AlgorithmConfig &config, Evaluator &evaluator, Rng &rng);

} // namespace lkgomea
