#include "lkgomea/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace lkgomea
{

namespace
{

// Midranks (1-based) of the pooled sample a ++ b.
std::vector<double> midranks(std::span<const double> pooled)
{
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n)
    {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]])
            ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t)
            ranks[order[t]] = r;
        i = j + 1;
    }
    return ranks;
}

std::vector<double> pool(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty())
        throw std::invalid_argument("mann_whitney_u needs two non-empty samples");
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    return pooled;
}

bool all_equal(std::span<const double> values)
{
    return std::all_of(values.begin(), values.end(), [&](double v) { return v == values[0]; });
}

} // namespace

MannWhitneyResult mann_whitney_u_exact(std::span<const double> a, std::span<const double> b)
{
    const auto pooled = pool(a, b);
    const std::size_t n = pooled.size();
    if (n > 24)
        throw std::invalid_argument("exact Mann-Whitney enumeration is limited to 24 observations");
    const auto ranks = midranks(pooled);
    const double na = static_cast<double>(a.size());
    const double offset = na * (na + 1.0) / 2.0;

    double rank_sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        rank_sum += ranks[i];
    MannWhitneyResult result;
    result.u = rank_sum - offset;
    result.exact = true;
    if (all_equal(pooled))
        return result;

    // Every way of choosing which |a| ranks belong to the first sample is equally likely.
    std::size_t total = 0, lower = 0, upper = 0;
    const double tol = 1e-9;
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask)
    {
        if (static_cast<std::size_t>(std::popcount(mask)) != a.size())
            continue;
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1u)
                s += ranks[i];
        const double u = s - offset;
        ++total;
        if (u <= result.u + tol)
            ++lower;
        if (u >= result.u - tol)
            ++upper;
    }
    const double p = 2.0 * static_cast<double>(std::min(lower, upper)) / static_cast<double>(total);
    result.p = std::min(1.0, p);
    return result;
}

MannWhitneyResult mann_whitney_u_normal(std::span<const double> a, std::span<const double> b)
{
    const auto pooled = pool(a, b);
    const auto ranks = midranks(pooled);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double n = na + nb;

    double rank_sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        rank_sum += ranks[i];
    MannWhitneyResult result;
    result.u = rank_sum - na * (na + 1.0) / 2.0;

    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double ties = 0.0;
    for (std::size_t i = 0; i < sorted.size();)
    {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i])
            ++j;
        const double t = static_cast<double>(j - i);
        ties += t * t * t - t;
        i = j;
    }
    const double variance = na * nb / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    if (variance <= 0.0)
        return result;
    const double z = std::max(0.0, std::abs(result.u - na * nb / 2.0) - 0.5) / std::sqrt(variance);
    result.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return result;
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b)
{
    if (a.size() + b.size() <= mwu_exact_limit)
        return mann_whitney_u_exact(a, b);
    return mann_whitney_u_normal(a, b);
}

std::vector<bool> holm_bonferroni(std::span<const double> p_values, double alpha)
{
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return p_values[x] < p_values[y]; });
    std::vector<bool> reject(m, false);
    for (std::size_t i = 0; i < m; ++i)
    {
        if (p_values[order[i]] > alpha / static_cast<double>(m - i))
            break;
        reject[order[i]] = true;
    }
    return reject;
}

Summary summarize(std::span<const RunOutcome> runs, bool lower_is_better)
{
    Summary s;
    s.runs = runs.size();
    for (const auto &r : runs)
        s.successes += !r.censored;
    if (runs.empty())
        return s;
    s.success_rate = static_cast<double>(s.successes) / static_cast<double>(s.runs);

    // Best first, censored runs last.
    std::vector<RunOutcome> sorted(runs.begin(), runs.end());
    std::sort(sorted.begin(), sorted.end(), [&](const RunOutcome &x, const RunOutcome &y) {
        if (x.censored != y.censored)
            return !x.censored;
        return lower_is_better ? x.value < y.value : x.value > y.value;
    });
    const std::size_t n = sorted.size();
    auto at = [&](std::size_t i) -> std::optional<double> {
        if (sorted[i].censored)
            return std::nullopt;
        return sorted[i].value;
    };
    auto nearest_rank = [&](double q) {
        auto r = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
        return at(std::clamp<std::size_t>(r, 1, n) - 1);
    };
    if (n % 2 == 1)
        s.median = at(n / 2);
    else if (auto lo = at(n / 2 - 1), hi = at(n / 2); lo && hi)
        s.median = (*lo + *hi) / 2.0;
    s.p5 = nearest_rank(0.05);
    s.p95 = nearest_rank(0.95);
    return s;
}

std::vector<Comparison> pairwise_comparisons(std::span<const std::vector<double>> samples,
                                             bool lower_is_better,
                                             double alpha)
{
    std::vector<Comparison> out;
    std::vector<double> p;
    for (std::size_t a = 0; a < samples.size(); ++a)
        for (std::size_t b = a + 1; b < samples.size(); ++b)
        {
            auto r = mann_whitney_u(samples[a], samples[b]);
            Comparison c;
            c.a = a;
            c.b = b;
            c.u = r.u;
            c.p = r.p;
            const double mid = static_cast<double>(samples[a].size() * samples[b].size()) / 2.0;
            // U counts pairs where a's value is larger.
            if (r.u != mid)
            {
                const bool a_larger = r.u > mid;
                c.better = a_larger != lower_is_better ? 1 : -1;
            }
            out.push_back(c);
            p.push_back(r.p);
        }
    const auto reject = holm_bonferroni(p, alpha);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i].significant = reject[i] && out[i].better != 0;
    return out;
}

std::vector<WinRow> win_table(std::span<const std::size_t> wins)
{
    std::set<std::size_t, std::greater<>> distinct(wins.begin(), wins.end());
    std::vector<WinRow> rows;
    for (std::size_t i = 0; i < wins.size(); ++i)
    {
        WinRow r;
        r.config = i;
        r.wins = wins[i];
        r.rank = static_cast<std::size_t>(std::distance(distinct.begin(), distinct.find(wins[i]))) + 1;
        rows.push_back(r);
    }
    return rows;
}

} // namespace lkgomea
