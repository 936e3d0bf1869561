#pragma once

// Straight-line reference implementations used only by tests. They share no
// code with the library beyond the plain data types.

#include "lkgomea/problems.hpp"
#include "lkgomea/rng.hpp"
#include "lkgomea/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace oracle
{

using lkgomea::Genotype;
using lkgomea::Objective;

inline Genotype from_mask(std::uint64_t mask, std::size_t l)
{
    Genotype g(l);
    for (std::size_t i = 0; i < l; ++i)
        g[i] = static_cast<std::uint8_t>((mask >> i) & 1u);
    return g;
}

inline Objective trap_sub(const Genotype &s, const lkgomea::TrapSubProblem &sp)
{
    const long k = static_cast<long>(sp.block_size);
    const long blocks = static_cast<long>(s.size()) / k;
    Objective total = 0;
    for (long b = 0; b < blocks; ++b)
    {
        long u = 0;
        for (long t = 0; t < k; ++t)
        {
            const auto v = sp.permutation[static_cast<std::size_t>(b * k + t)];
            if (s[v] == sp.optimum[v])
                ++u;
        }
        total += (u == k) ? k : (k - 1 - u);
    }
    return total;
}

inline Objective bot(const Genotype &s, const lkgomea::BotInstance &inst)
{
    Objective best = -1;
    for (const auto &sp : inst.sub_problems)
        best = std::max(best, trap_sub(s, sp));
    return best;
}

inline Objective maxcut(const Genotype &s, const lkgomea::MaxCutInstance &inst)
{
    // Dense adjacency, then every unordered vertex pair once.
    const std::size_t n = inst.vertex_count;
    std::vector<Objective> w(n * n, 0);
    for (const auto &e : inst.edges)
    {
        w[e.i * n + e.j] += e.weight;
        w[e.j * n + e.i] += e.weight;
    }
    Objective total = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (s[i] != s[j])
                total += w[i * n + j];
    return total;
}

inline Objective worst_of_maxcuts(const Genotype &s, const lkgomea::WorstOfMaxCutsInstance &inst)
{
    Objective worst = maxcut(s, inst.instances.at(0));
    for (const auto &m : inst.instances)
        worst = std::min(worst, maxcut(s, m));
    return worst;
}

inline Objective evaluate(const Genotype &s, const lkgomea::Instance &inst)
{
    if (auto *b = std::get_if<lkgomea::BotInstance>(&inst))
        return bot(s, *b);
    if (auto *m = std::get_if<lkgomea::MaxCutInstance>(&inst))
        return maxcut(s, *m);
    return worst_of_maxcuts(s, std::get<lkgomea::WorstOfMaxCutsInstance>(inst));
}

inline Objective brute_force_max(const lkgomea::Instance &inst, std::size_t l)
{
    Objective best = -1;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << l); ++m)
        best = std::max(best, oracle::evaluate(from_mask(m, l), inst));
    return best;
}

// NMI via explicit probability tables, base-2 logs.
inline double nmi(const std::vector<Genotype> &pop, std::size_t i, std::size_t j)
{
    const double n = static_cast<double>(pop.size());
    double joint[2][2] = {{0, 0}, {0, 0}};
    for (const auto &g : pop)
        joint[g[i]][g[j]] += 1.0;
    double pi[2] = {0, 0}, pj[2] = {0, 0};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
        {
            pi[a] += joint[a][b] / n;
            pj[b] += joint[a][b] / n;
        }
    double hij = 0, mi = 0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
        {
            const double p = joint[a][b] / n;
            if (p > 0)
            {
                hij -= p * std::log2(p);
                mi += p * std::log2(p / (pi[a] * pj[b]));
            }
        }
    if (i == j)
    {
        double h = 0;
        for (double p : pi)
            if (p > 0)
                h -= p * std::log2(p);
        return h > 0 ? 1.0 : 0.0;
    }
    return hij > 0 ? std::clamp(mi / hij, 0.0, 1.0) : 0.0;
}

// Naive UPGMA: the cluster similarity is recomputed from scratch as the mean of
// all member-pair similarities. Ties: max first, then the lexicographically
// smallest (min-index, min-index) pair within `tie` of it.
inline std::vector<std::vector<std::uint32_t>> upgma(const std::vector<std::vector<double>> &sim, double tie)
{
    const std::size_t l = sim.size();
    std::vector<std::vector<std::uint32_t>> out;
    std::vector<std::vector<std::uint32_t>> clusters;
    for (std::uint32_t v = 0; v < l; ++v)
    {
        out.push_back({v});
        clusters.push_back({v});
    }
    auto avg = [&](const std::vector<std::uint32_t> &a, const std::vector<std::uint32_t> &b) {
        double s = 0;
        for (auto x : a)
            for (auto y : b)
                s += sim[x][y];
        return s / static_cast<double>(a.size() * b.size());
    };
    while (clusters.size() > 2)
    {
        std::sort(clusters.begin(), clusters.end(), [](const auto &a, const auto &b) { return a.front() < b.front(); });
        double best = -1e300;
        for (std::size_t a = 0; a < clusters.size(); ++a)
            for (std::size_t b = a + 1; b < clusters.size(); ++b)
                best = std::max(best, avg(clusters[a], clusters[b]));
        std::size_t ba = 0, bb = 0;
        bool found = false;
        for (std::size_t a = 0; a < clusters.size() && !found; ++a)
            for (std::size_t b = a + 1; b < clusters.size() && !found; ++b)
                if (avg(clusters[a], clusters[b]) >= best - tie)
                {
                    ba = a;
                    bb = b;
                    found = true;
                }
        std::vector<std::uint32_t> merged = clusters[ba];
        merged.insert(merged.end(), clusters[bb].begin(), clusters[bb].end());
        std::sort(merged.begin(), merged.end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
        clusters[ba] = merged;
        out.push_back(merged);
    }
    return out;
}

// Dominated area by uniform sampling in the bounding box; returns (estimate, standard error).
inline std::pair<double, double> monte_carlo_hv(const std::vector<std::array<double, 2>> &front,
                                                std::array<double, 2> ref,
                                                std::size_t samples,
                                                std::uint64_t seed)
{
    double hi0 = ref[0], hi1 = ref[1];
    for (const auto &p : front)
    {
        hi0 = std::max(hi0, p[0]);
        hi1 = std::max(hi1, p[1]);
    }
    const double box = (hi0 - ref[0]) * (hi1 - ref[1]);
    if (box <= 0)
        return {0.0, 0.0};
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u0(ref[0], hi0), u1(ref[1], hi1);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < samples; ++s)
    {
        const double x = u0(gen), y = u1(gen);
        for (const auto &p : front)
            if (p[0] >= x && p[1] >= y)
            {
                ++hits;
                break;
            }
    }
    const double q = static_cast<double>(hits) / static_cast<double>(samples);
    return {q * box, box * std::sqrt(q * (1 - q) / static_cast<double>(samples))};
}

// Two-sided exact Mann-Whitney p by enumerating every labelling of the pooled sample.
inline double mwu_exact_p(const std::vector<double> &a, const std::vector<double> &b)
{
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    // U counted directly by pair comparisons.
    auto u_of = [](const std::vector<double> &x, const std::vector<double> &y) {
        double u = 0;
        for (double p : x)
            for (double q : y)
                u += p > q ? 1.0 : (p == q ? 0.5 : 0.0);
        return u;
    };
    const double observed = u_of(a, b);
    std::vector<int> labels(pooled.size(), 0);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(a.size()), 1);
    std::sort(labels.begin(), labels.end());
    std::size_t total = 0, lo = 0, hi = 0;
    do
    {
        std::vector<double> x, y;
        for (std::size_t i = 0; i < pooled.size(); ++i)
            (labels[i] ? x : y).push_back(pooled[i]);
        const double u = u_of(x, y);
        ++total;
        lo += u <= observed + 1e-9;
        hi += u >= observed - 1e-9;
    } while (std::next_permutation(labels.begin(), labels.end()));
    bool constant = std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled[0]; });
    if (constant)
        return 1.0;
    return std::min(1.0, 2.0 * static_cast<double>(std::min(lo, hi)) / static_cast<double>(total));
}

// Pareto front by pairwise dominance checks over all 2^l genotypes; fitness pairs only.
inline std::set<std::pair<Objective, Objective>> pareto_front(const lkgomea::MoProblem &p, std::size_t l)
{
    std::map<std::pair<Objective, Objective>, int> seen;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << l); ++m)
    {
        auto g = from_mask(m, l);
        seen[{oracle::evaluate(g, p.objectives[0]), oracle::evaluate(g, p.objectives[1])}] = 1;
    }
    std::vector<std::pair<Objective, Objective>> pts;
    for (const auto &kv : seen)
        pts.push_back(kv.first);
    std::set<std::pair<Objective, Objective>> front;
    for (const auto &a : pts)
    {
        bool dominated = false;
        for (const auto &b : pts)
            if (b != a && b.first >= a.first && b.second >= a.second)
            {
                dominated = true;
                break;
            }
        if (!dominated)
            front.insert(a);
    }
    return front;
}

} // namespace oracle
