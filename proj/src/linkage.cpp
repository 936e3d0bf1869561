#include "lkgomea/linkage.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lkgomea
{

NmiMatrix pairwise_nmi(std::span<const Genotype *const> solutions, NmiNormalization normalization)
{
    const std::size_t n = solutions.size();
    if (n < 2)
        throw std::invalid_argument("pairwise_nmi needs at least two solutions");
    const std::size_t l = solutions[0]->size();
    for (const auto *s : solutions)
        if (s->size() != l)
            throw std::invalid_argument("pairwise_nmi needs solutions of equal length");

    // Bit-packed columns: column v holds variable v over all solutions.
    const std::size_t words = (n + 63) / 64;
    std::vector<std::uint64_t> columns(l * words, 0);
    for (std::size_t s = 0; s < n; ++s)
    {
        const auto bits = solutions[s]->bits();
        const std::uint64_t mask = std::uint64_t{1} << (s % 64);
        const std::size_t w = s / 64;
        for (std::size_t v = 0; v < l; ++v)
            if (bits[v])
                columns[v * words + w] |= mask;
    }

    // h[c] = -(c/n) ln(c/n)
    std::vector<double> h(n + 1, 0.0);
    for (std::size_t c = 1; c <= n; ++c)
    {
        double p = static_cast<double>(c) / static_cast<double>(n);
        h[c] = -p * std::log(p);
    }

    std::vector<std::size_t> ones(l, 0);
    std::vector<double> marginal(l, 0.0);
    for (std::size_t v = 0; v < l; ++v)
    {
        std::size_t c = 0;
        for (std::size_t w = 0; w < words; ++w)
            c += static_cast<std::size_t>(std::popcount(columns[v * words + w]));
        ones[v] = c;
        marginal[v] = h[c] + h[n - c];
    }

    NmiMatrix nmi(l);
    for (std::size_t i = 0; i < l; ++i)
    {
        nmi.set(i, i, marginal[i] > 0.0 ? 1.0 : 0.0);
        const std::uint64_t *ci = &columns[i * words];
        for (std::size_t j = i + 1; j < l; ++j)
        {
            const std::uint64_t *cj = &columns[j * words];
            std::size_t c11 = 0;
            for (std::size_t w = 0; w < words; ++w)
                c11 += static_cast<std::size_t>(std::popcount(ci[w] & cj[w]));
            const std::size_t c10 = ones[i] - c11;
            const std::size_t c01 = ones[j] - c11;
            const std::size_t c00 = n - ones[i] - ones[j] + c11;
            const double joint = h[c00] + h[c01] + h[c10] + h[c11];
            const double mi = std::max(0.0, marginal[i] + marginal[j] - joint);
            double denominator = normalization == NmiNormalization::joint_entropy
                                     ? joint
                                     : std::max(marginal[i], marginal[j]);
            double value = denominator > 0.0 ? std::min(1.0, mi / denominator) : 0.0;
            nmi.set(i, j, value);
        }
    }
    return nmi;
}

NmiMatrix pairwise_nmi(std::span<const Genotype> solutions, NmiNormalization normalization)
{
    std::vector<const Genotype *> ptrs;
    ptrs.reserve(solutions.size());
    for (const auto &g : solutions)
        ptrs.push_back(&g);
    return pairwise_nmi(std::span<const Genotype *const>(ptrs), normalization);
}

Fos build_linkage_tree(const NmiMatrix &nmi)
{
    const std::size_t l = nmi.size();
    Fos fos;
    fos.subsets.reserve(l == 0 ? 0 : 2 * l - 1);
    for (std::uint32_t v = 0; v < l; ++v)
        fos.subsets.push_back(FosSubset{{v}, 1.0});
    if (l < 2)
        return fos;

    // Clusters are identified by their smallest variable index; merging j into i
    // (i < j) keeps that property, so scanning ids in order scans pairs in
    // lexicographic (min-index, min-index) order.
    std::vector<double> sim(l * l);
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < l; ++j)
            sim[i * l + j] = nmi(i, j);
    std::vector<std::vector<std::uint32_t>> members(l);
    for (std::uint32_t v = 0; v < l; ++v)
        members[v] = {v};
    std::vector<std::size_t> active(l);
    for (std::size_t v = 0; v < l; ++v)
        active[v] = v;

    for (std::size_t step = 0; step + 1 < l; ++step)
    {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < active.size(); ++a)
            for (std::size_t b = a + 1; b < active.size(); ++b)
                best = std::max(best, sim[active[a] * l + active[b]]);

        std::size_t ai = 0, bi = 0;
        bool found = false;
        for (std::size_t a = 0; a < active.size() && !found; ++a)
            for (std::size_t b = a + 1; b < active.size(); ++b)
                if (sim[active[a] * l + active[b]] >= best - upgma_tie_tolerance)
                {
                    ai = a;
                    bi = b;
                    found = true;
                    break;
                }

        const std::size_t i = active[ai];
        const std::size_t j = active[bi];
        const double merged_at = sim[i * l + j];
        const double size_i = static_cast<double>(members[i].size());
        const double size_j = static_cast<double>(members[j].size());
        for (std::size_t c : active)
        {
            if (c == i || c == j)
                continue;
            double v = (size_i * sim[i * l + c] + size_j * sim[j * l + c]) / (size_i + size_j);
            sim[i * l + c] = v;
            sim[c * l + i] = v;
        }
        std::vector<std::uint32_t> merged;
        merged.reserve(members[i].size() + members[j].size());
        std::merge(members[i].begin(), members[i].end(), members[j].begin(), members[j].end(),
                   std::back_inserter(merged));
        members[i] = std::move(merged);
        members[j].clear();
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(bi));

        if (active.size() > 1)
            fos.subsets.push_back(FosSubset{members[i], merged_at});
    }
    return fos;
}

Fos filter_fos(const Fos &fos, double eps)
{
    std::size_t l = 0;
    for (const auto &s : fos.subsets)
        for (auto v : s.indices)
            l = std::max<std::size_t>(l, v + 1);

    std::vector<bool> keep(fos.size(), true);
    for (std::size_t i = 0; i < fos.size(); ++i)
        if (fos[i].indices.size() > 1 && fos[i].similarity <= eps)
            keep[i] = false;

    std::vector<bool> inside(l);
    for (std::size_t i = 0; i < fos.size(); ++i)
    {
        const auto &s = fos[i];
        if (s.indices.size() < 2 || s.similarity < 1.0 - eps)
            continue;
        std::fill(inside.begin(), inside.end(), false);
        for (auto v : s.indices)
            inside[v] = true;
        // Subsets of a linkage tree are laminar: overlap plus smaller size means descendant.
        for (std::size_t j = 0; j < fos.size(); ++j)
            if (j != i && fos[j].indices.size() < s.indices.size() && inside[fos[j].indices.front()])
                keep[j] = false;
    }

    Fos out;
    for (std::size_t i = 0; i < fos.size(); ++i)
        if (keep[i])
            out.subsets.push_back(fos[i]);
    return out;
}

Fos learn_model(std::span<const Genotype *const> solutions, double eps, NmiNormalization normalization)
{
    return filter_fos(build_linkage_tree(pairwise_nmi(solutions, normalization)), eps);
}

Fos learn_model(std::span<const Genotype> solutions, double eps)
{
    return filter_fos(build_linkage_tree(pairwise_nmi(solutions)), eps);
}

std::string dump_fos(const Fos &fos)
{
    std::ostringstream out;
    for (const auto &s : fos.subsets)
    {
        for (std::size_t i = 0; i < s.indices.size(); ++i)
            out << (i ? " " : "") << s.indices[i];
        out << '\n';
    }
    return out.str();
}

} // namespace lkgomea
