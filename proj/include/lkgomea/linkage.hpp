#pragma once

#include "lkgomea/types.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lkgomea
{

// Tolerance for the ~0 / ~1 FOS filter rules.
inline constexpr double default_filter_eps = 1e-6;
// Cluster-pair similarities closer than this count as tied during UPGMA.
inline constexpr double upgma_tie_tolerance = 1e-12;

enum class NmiNormalization
{
    // MI / H(X_i, X_j)
    joint_entropy,
    // MI / max(H(X_i), H(X_j))
    max_marginal_entropy,
};

// Symmetric l x l matrix of pairwise normalized mutual information.
class NmiMatrix
{
  public:
    NmiMatrix() = default;
    explicit NmiMatrix(std::size_t size) : size_(size), values_(size * size, 0.0)
    {
    }

    std::size_t size() const
    {
        return size_;
    }
    double operator()(std::size_t i, std::size_t j) const
    {
        return values_[i * size_ + j];
    }
    void set(std::size_t i, std::size_t j, double v)
    {
        values_[i * size_ + j] = v;
        values_[j * size_ + i] = v;
    }

  private:
    std::size_t size_ = 0;
    std::vector<double> values_;
};

struct FosSubset
{
    // Sorted variable indices.
    std::vector<std::uint32_t> indices;
    // Similarity at which the subset was formed; 1.0 for singletons.
    double similarity = 1.0;
};

// Family Of Subsets: the variable groups GOM recombines jointly.
struct Fos
{
    std::vector<FosSubset> subsets;

    std::size_t size() const
    {
        return subsets.size();
    }
    bool empty() const
    {
        return subsets.empty();
    }
    const FosSubset &operator[](std::size_t i) const
    {
        return subsets[i];
    }
};

NmiMatrix pairwise_nmi(std::span<const Genotype *const> solutions,
                       NmiNormalization normalization = NmiNormalization::joint_entropy);
NmiMatrix pairwise_nmi(std::span<const Genotype> solutions,
                       NmiNormalization normalization = NmiNormalization::joint_entropy);

/**
 * @brief UPGMA (average linkage) over NMI similarities.
 *
 * Emits the l singletons followed by every internal merge in merge order,
 * excluding the root. Ties are broken towards the pair of clusters with the
 * lexicographically smallest (min-index, min-index).
 */
Fos build_linkage_tree(const NmiMatrix &nmi);

/**
 * @brief Drop merges with similarity <= eps, and all strict descendants of
 * merges with similarity >= 1 - eps.
 */
Fos filter_fos(const Fos &fos, double eps = default_filter_eps);

// pairwise_nmi -> build_linkage_tree -> filter_fos
Fos learn_model(std::span<const Genotype *const> solutions,
                double eps = default_filter_eps,
                NmiNormalization normalization = NmiNormalization::joint_entropy);
Fos learn_model(std::span<const Genotype> solutions, double eps = default_filter_eps);

// One subset per line, sorted indices separated by spaces.
std::string dump_fos(const Fos &fos);

} // namespace lkgomea
