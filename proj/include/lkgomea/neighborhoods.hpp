#pragma once

#include "lkgomea/rng.hpp"
#include "lkgomea/types.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lkgomea
{

enum class NeighborhoodMode
{
    // The k nearest neighbors of each solution.
    asymmetric,
    // Own k nearest neighbors plus every solution that lists the owner among its k nearest.
    symmetric,
};

struct NeighborhoodSet
{
    // members[i]: sorted population indices in the neighborhood of solution i (never i itself).
    std::vector<std::vector<std::uint32_t>> members;
    NeighborhoodMode mode = NeighborhoodMode::asymmetric;
};

std::size_t hamming(const Genotype &a, const Genotype &b);

// ceil(sqrt(population_size)), clamped to population_size - 1.
std::size_t default_k(std::size_t population_size);

/**
 * @brief KNN neighborhoods under Hamming distance.
 *
 * Ties at the k-th distance are broken uniformly at random, afresh on every
 * call, so they resolve differently between generations.
 */
NeighborhoodSet compute_neighborhoods(std::span<const Genotype *const> population,
                                      std::size_t k,
                                      NeighborhoodMode mode,
                                      Rng &rng);
NeighborhoodSet compute_neighborhoods(std::span<const Genotype> population,
                                      std::size_t k,
                                      NeighborhoodMode mode,
                                      Rng &rng);

} // namespace lkgomea
