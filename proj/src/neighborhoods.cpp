#include "lkgomea/neighborhoods.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace lkgomea
{

std::size_t hamming(const Genotype &a, const Genotype &b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("hamming distance needs equal lengths");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d += a[i] != b[i];
    return d;
}

std::size_t default_k(std::size_t population_size)
{
    if (population_size < 2)
        return 0;
    std::size_t k = 0;
    while (k * k < population_size)
        ++k;
    return std::min(k, population_size - 1);
}

NeighborhoodSet compute_neighborhoods(std::span<const Genotype *const> population,
                                      std::size_t k,
                                      NeighborhoodMode mode,
                                      Rng &rng)
{
    const std::size_t n = population.size();
    if (k == 0 || k + 1 > n)
        throw std::invalid_argument("neighborhood size k must be in [1, |P| - 1]");
    const std::size_t l = population[0]->size();

    const std::size_t words = (l + 63) / 64;
    std::vector<std::uint64_t> packed(n * words, 0);
    for (std::size_t s = 0; s < n; ++s)
    {
        if (population[s]->size() != l)
            throw std::invalid_argument("hamming distance needs equal lengths");
        const auto bits = population[s]->bits();
        for (std::size_t v = 0; v < l; ++v)
            if (bits[v])
                packed[s * words + v / 64] |= std::uint64_t{1} << (v % 64);
    }
    auto distance = [&](std::size_t i, std::size_t j) {
        std::uint32_t d = 0;
        for (std::size_t w = 0; w < words; ++w)
            d += static_cast<std::uint32_t>(std::popcount(packed[i * words + w] ^ packed[j * words + w]));
        return d;
    };

    // The k nearest: everything closer than the k-th distance, plus a uniform
    // sample of the candidates tied at it (same law as random tie-break keys).
    NeighborhoodSet out;
    out.mode = mode;
    out.members.resize(n);
    std::vector<std::uint32_t> dist(n);
    std::vector<std::uint32_t> histogram(l + 2);
    std::vector<std::uint32_t> tied;
    for (std::size_t i = 0; i < n; ++i)
    {
        std::fill(histogram.begin(), histogram.end(), 0u);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                ++histogram[dist[j] = distance(i, j)];
        std::uint32_t boundary = 0;
        std::size_t closer = 0;
        while (closer + histogram[boundary] < k)
            closer += histogram[boundary++];

        auto &mine = out.members[i];
        tied.clear();
        for (std::size_t j = 0; j < n; ++j)
        {
            if (j == i)
                continue;
            if (dist[j] < boundary)
                mine.push_back(static_cast<std::uint32_t>(j));
            else if (dist[j] == boundary)
                tied.push_back(static_cast<std::uint32_t>(j));
        }
        const std::size_t need = k - closer;
        for (std::size_t r = 0; r < need; ++r)
        {
            const auto pick = r + rng.below(tied.size() - r);
            std::swap(tied[r], tied[pick]);
            mine.push_back(tied[r]);
        }
    }
    if (mode == NeighborhoodMode::symmetric)
    {
        std::vector<std::vector<std::uint32_t>> reverse(n);
        for (std::size_t i = 0; i < n; ++i)
            for (auto j : out.members[i])
                reverse[j].push_back(static_cast<std::uint32_t>(i));
        for (std::size_t i = 0; i < n; ++i)
            out.members[i].insert(out.members[i].end(), reverse[i].begin(), reverse[i].end());
    }
    for (auto &m : out.members)
    {
        std::sort(m.begin(), m.end());
        m.erase(std::unique(m.begin(), m.end()), m.end());
    }
    return out;
}

NeighborhoodSet compute_neighborhoods(std::span<const Genotype> population,
                                      std::size_t k,
                                      NeighborhoodMode mode,
                                      Rng &rng)
{
    std::vector<const Genotype *> ptrs;
    ptrs.reserve(population.size());
    for (const auto &g : population)
        ptrs.push_back(&g);
    return compute_neighborhoods(std::span<const Genotype *const>(ptrs), k, mode, rng);
}

} // namespace lkgomea
