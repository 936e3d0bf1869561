#pragma once

#include "lkgomea/engine.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lkgomea
{

/**
 * @brief Mutually non-dominated set of bi-objective solutions (maximization).
 *
 * Fitness duplicates are rejected, so integer-valued fronts stay small.
 */
class ElitistArchive
{
  public:
    // Would `fitness` be inserted? No mutation.
    bool admissible(const Fitness &fitness) const;
    // Inserts iff admissible; removes every member the candidate dominates.
    bool insert(const Solution &candidate);

    const std::vector<Solution> &members() const
    {
        return members_;
    }
    std::size_t size() const
    {
        return members_.size();
    }
    bool empty() const
    {
        return members_.empty();
    }
    const Solution &operator[](std::size_t i) const
    {
        return members_[i];
    }
    // The member with the largest value on `objective` (ties towards the other objective).
    const Solution &best_in(std::size_t objective) const;

    // Members sorted by f0 descending.
    std::vector<Solution> sorted() const;
    bool is_consistent() const;

  private:
    std::vector<Solution> members_;
};

// "f0 f1 bitstring" per line, sorted by f0 descending.
void write_archive(std::ostream &out, const ElitistArchive &archive);
void write_front(std::ostream &out, std::span<const Solution> front);
// Reads the format above; the bitstring column is optional.
std::vector<Solution> read_front(std::istream &in);

// Per-objective [lo, hi] used for min-max normalization.
struct ObjectiveRanges
{
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{1.0, 1.0};

    // Zero-width ranges normalize with a unit denominator.
    double normalize(const Fitness &f, std::size_t objective) const;
};

ObjectiveRanges ranges_of(std::span<const Solution> solutions);
ObjectiveRanges ranges_of(const ElitistArchive &archive);

enum class ClusterRole
{
    mixed,
    objective0,
    objective1,
};

struct Cluster
{
    std::vector<std::uint32_t> members;
    // Centroid of the hard k-means assignment, in raw objective units.
    std::array<double, 2> mean{0.0, 0.0};
    ClusterRole role = ClusterRole::mixed;
};

/**
 * @brief Overlapping k-means clustering in normalized objective space.
 *
 * Farthest-point seeding, Lloyd iterations, then every cluster takes the
 * ceil(2n/c) solutions nearest its center. Solutions left out join their
 * nearest center. Objective i's role goes to the cluster whose centroid is
 * largest on i.
 */
std::vector<Cluster> cluster_population(std::span<const Solution> population, std::size_t cluster_count, Rng &rng);

using Weights = std::array<double, 2>;

// max_i w_i (1 - normalized f_i); lower is better.
double tchebycheff(const Fitness &f, const Weights &w, const ObjectiveRanges &ranges);

// Weak dominance accepts; strict dominance or archive admission improves.
Verdict domination_verdict(const Fitness &before, const Fitness &after, const ElitistArchive *archive);
// Non-increasing Tchebycheff value accepts; decrease or archive admission improves.
Verdict scalarized_verdict(const Fitness &before,
                           const Fitness &after,
                           const Weights &weights,
                           const ObjectiveRanges &ranges,
                           const ElitistArchive *archive);

bool mo_accept_domination(const Fitness &before, const Fitness &after, const ElitistArchive &archive);
bool mo_accept_scalarized(const Fitness &before,
                          const Fitness &after,
                          const Weights &weights,
                          const ObjectiveRanges &ranges,
                          const ElitistArchive &archive);

// n evenly spaced weights from (1, 0) to (0, 1).
std::vector<Weights> simplex_weights(std::size_t n);

/**
 * @brief Give each solution an improvement direction.
 *
 * The two extreme weights are matched first, then the remaining weights in a
 * random order; each takes the unassigned solution with the lowest Tchebycheff
 * value under that weight.
 */
std::vector<Weights> assign_scalarization_weights(std::span<const Solution> population,
                                                  const ObjectiveRanges &ranges,
                                                  Rng &rng);

enum class MoModel
{
    objective_clusters,
    kernel_asymmetric,
    kernel_symmetric,
};

enum class MoAcceptanceRule
{
    domination,
    scalarized,
};

std::string to_string(MoModel model);
std::string to_string(MoAcceptanceRule rule);
MoModel parse_mo_model(const std::string &name);
MoAcceptanceRule parse_mo_acceptance(const std::string &name);

struct MoConfig
{
    MoModel model = MoModel::objective_clusters;
    MoAcceptanceRule acceptance = MoAcceptanceRule::domination;
    bool donor_search = true;
    bool forced_improvements = true;
    std::optional<std::size_t> neighborhood_size;
    double filter_eps = default_filter_eps;
};

// Clusters used when stepping population `population_index` under IMS.
std::size_t mo_cluster_count(std::size_t population_index);

// Random genotypes; every evaluation is offered to the archive.
Population initialize_mo_population(std::size_t size,
                                    std::size_t length,
                                    Evaluator &evaluator,
                                    ElitistArchive &archive,
                                    Rng &rng);

/**
 * @brief One MO-GOMEA / MO-LK-GOMEA generation.
 *
 * Every evaluated genotype is offered to the archive. The archive stays
 * consistent when a StopRun escapes.
 */
void mo_generation_step(Population &population,
                        const MoConfig &config,
                        std::size_t cluster_count,
                        Evaluator &evaluator,
                        ElitistArchive &archive,
                        Rng &rng);

} // namespace lkgomea
