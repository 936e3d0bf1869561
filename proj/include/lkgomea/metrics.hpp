#pragma once

#include "lkgomea/problems.hpp"
#include "lkgomea/types.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lkgomea
{

using Point = std::array<double, 2>;

// Offset below the reference front's worst values, in normalized units.
inline constexpr double reference_point_offset = 0.05;

/**
 * @brief Area dominated by `front` and bounded by `reference` (maximization).
 *
 * Points that do not strictly dominate the reference point contribute nothing.
 * The input need not be sorted or non-dominated.
 */
double hypervolume_2d(std::span<const Point> front, const Point &reference);

// Union of fronts with dominated points and fitness duplicates removed, sorted by f0 descending.
std::vector<Solution> merge_fronts(std::span<const std::vector<Solution>> fronts);
std::vector<Solution> non_dominated(std::span<const Solution> solutions);

/**
 * @brief HV of `front` over HV of `reference`, both normalized onto the reference front's ranges.
 *
 * The reference point sits at -0.05 in each normalized objective. Throws
 * std::invalid_argument if the reference front spans a zero range.
 */
double normalized_hv(std::span<const Solution> front, std::span<const Solution> reference);

// Exhaustive Pareto front of a bi-objective problem (length <= max_exact_length).
std::vector<Solution> enumerate_pareto_front(const MoProblem &problem);

struct ReferenceFront
{
    std::vector<Solution> front;
    bool exact = false;
};

// Solves one pair of sub-problems; the bool reports whether the result is exact.
using PairSolver = std::function<std::pair<std::vector<Solution>, bool>(const MoProblem &pair)>;

// Objective `o` split into single-sub-problem instances (a non-BoT objective is its own only part).
std::vector<Instance> sub_problems(const Instance &instance);

/**
 * @brief Pareto front of a BoT-based MO problem by sub-problem decomposition.
 *
 * Each (sub-problem of objective 0, sub-problem of objective 1) pair is solved
 * separately, by enumeration when the length allows and otherwise by `solver`.
 * The merged pairwise fronts are re-evaluated on the full problem.
 */
ReferenceFront build_reference_front_bot(const MoProblem &problem,
                                         const PairSolver &solver = {},
                                         std::size_t enumeration_limit = 16);

} // namespace lkgomea
