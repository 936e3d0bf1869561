#pragma once

#include "lkgomea/engine.hpp"
#include "lkgomea/mo.hpp"
#include "lkgomea/problems.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lkgomea
{

/**
 * @brief Recursive interleaving counters.
 *
 * Population p + 1 takes one generation for every b generations of population p.
 */
class ImsScheduler
{
  public:
    explicit ImsScheduler(std::size_t interleave = 4);

    // Next population in the raw schedule, retired or not.
    std::size_t next_raw();

    /**
     * @brief Next population to step. Retired populations are passed over as
     * virtual steps; an index equal to active.size() means "create it".
     */
    std::size_t tick(const std::vector<bool> &active);

    std::size_t interleave() const
    {
        return b_;
    }

  private:
    std::size_t b_;
    std::size_t next_ = 0;
    std::vector<std::size_t> counters_;
};

// Retire every active population whose mean is strictly below that of an active larger one.
void ims_retire(std::span<const double> means, std::vector<bool> &active);

struct ImsConfig
{
    std::size_t base_population = 8;
    std::size_t interleave = 4;
    // Also retire populations whose genotypes all coincide or whose last generation spent no evaluations.
    bool retire_stalled = true;
};

struct RunLimits
{
    std::uint64_t evaluations = 10'000'000;
    std::chrono::milliseconds time{0};
    std::optional<Objective> value_to_reach;
    // MO: stop once the archive attains the full normalized HV of the reference front.
    bool stop_at_front = false;
    // Off: all reported times are 0 so reports compare byte-for-byte.
    bool record_time = true;
};

struct RunReport
{
    std::string problem;
    // Experiment-level identifiers; empty for standalone runs.
    std::string problem_id;
    std::string kind;
    std::size_t length = 0;
    std::size_t fns = 0;
    std::string config;
    std::uint64_t seed = 0;
    std::uint64_t budget = 0;
    bool success = false;
    StopReason reason = StopReason::none;
    std::uint64_t evaluations = 0;
    std::int64_t milliseconds = 0;
    std::optional<std::uint64_t> evaluations_to_optimum;
    std::optional<std::int64_t> milliseconds_to_optimum;
    // Single-objective best.
    std::optional<Solution> best;
    std::vector<TraceRecord> trace;
    std::vector<std::size_t> population_sizes;
    std::vector<bool> population_active;
    std::vector<std::uint64_t> population_evaluations;
    std::vector<std::size_t> population_generations;
    // MO results.
    std::vector<Solution> archive;
    // (evaluations, normalized HV) at generation ends where HV changed.
    std::vector<std::pair<std::uint64_t, double>> hv_series;
    std::optional<double> final_hv;
};

RunReport run_with_ims(const Instance &instance,
                       const AlgorithmConfig &config,
                       const ImsConfig &ims,
                       const RunLimits &limits,
                       std::uint64_t seed);

RunReport run_mo_with_ims(const MoProblem &problem,
                          const MoConfig &config,
                          const ImsConfig &ims,
                          const RunLimits &limits,
                          std::uint64_t seed,
                          const std::vector<Solution> *reference_front = nullptr);

} // namespace lkgomea
