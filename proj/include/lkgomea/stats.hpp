#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace lkgomea
{

// Samples at most this large (combined) get an exact p-value.
inline constexpr std::size_t mwu_exact_limit = 12;

struct MannWhitneyResult
{
    // U of the first sample: pairs (x in a, y in b) with x > y, ties counting 1/2.
    double u = 0.0;
    // Two-sided.
    double p = 1.0;
    bool exact = false;
};

/**
 * @brief Two-sided Mann-Whitney U test with midranks for ties.
 *
 * Exact over all rank assignments when |a| + |b| <= mwu_exact_limit, otherwise
 * the normal approximation with tie-corrected variance and continuity correction.
 */
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);
MannWhitneyResult mann_whitney_u_exact(std::span<const double> a, std::span<const double> b);
MannWhitneyResult mann_whitney_u_normal(std::span<const double> a, std::span<const double> b);

// Step-down Holm correction; flags are returned in input order.
std::vector<bool> holm_bonferroni(std::span<const double> p_values, double alpha = 0.05);

// One run's outcome. Censored runs hit a limit and carry the limit value.
struct RunOutcome
{
    double value = 0.0;
    bool censored = false;
};

struct Summary
{
    std::size_t runs = 0;
    std::size_t successes = 0;
    double success_rate = 0.0;
    // Absent when the statistic falls on a censored run.
    std::optional<double> median;
    std::optional<double> p5;
    std::optional<double> p95;
};

/**
 * @brief Median (mean of the central pair for even counts) and nearest-rank
 * 5th/95th percentiles, with censored runs ordered as the worst outcomes.
 */
Summary summarize(std::span<const RunOutcome> runs, bool lower_is_better = true);

struct Comparison
{
    std::size_t a = 0;
    std::size_t b = 0;
    double u = 0.0;
    double p = 1.0;
    bool significant = false;
    // +1: a is better, -1: b is better, 0: no difference in location.
    int better = 0;
};

// All pairs of samples, Holm-corrected as one family.
std::vector<Comparison> pairwise_comparisons(std::span<const std::vector<double>> samples,
                                             bool lower_is_better,
                                             double alpha = 0.05);

struct WinRow
{
    std::size_t config = 0;
    std::size_t wins = 0;
    // Dense rank, 1 = most wins.
    std::size_t rank = 0;
};

// Rows in input order; ranks by descending win count.
std::vector<WinRow> win_table(std::span<const std::size_t> wins);

} // namespace lkgomea
