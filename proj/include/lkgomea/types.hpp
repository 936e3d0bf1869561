#pragma once

#include "lkgomea/rng.hpp"

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lkgomea
{

/**
 * @brief Fixed-length binary string; the search-space point for every problem.
 *
 * The length is set at construction and cannot change afterwards.
 */
class Genotype
{
  public:
    Genotype() = default;
    explicit Genotype(std::size_t length) : bits_(length, 0)
    {
    }
    Genotype(std::initializer_list<std::uint8_t> bits) : bits_(bits)
    {
        for (auto b : bits_)
            if (b > 1)
                throw std::invalid_argument("genotype bits must be 0 or 1");
    }

    static Genotype from_string(std::string_view text);
    static Genotype random(std::size_t length, Rng &rng);

    std::string to_string() const;
    Genotype complement() const;

    std::size_t size() const
    {
        return bits_.size();
    }
    std::uint8_t operator[](std::size_t i) const
    {
        return bits_[i];
    }
    std::uint8_t &operator[](std::size_t i)
    {
        return bits_[i];
    }
    std::span<const std::uint8_t> bits() const
    {
        return bits_;
    }

    auto operator<=>(const Genotype &) const = default;
    bool operator==(const Genotype &) const = default;

  private:
    std::vector<std::uint8_t> bits_;
};

using Objective = std::int64_t;
inline constexpr std::size_t max_objectives = 2;

/**
 * @brief Small fixed-capacity vector of exact integer objective values.
 *
 * All objectives are maximized.
 */
class Fitness
{
  public:
    Fitness() = default;
    explicit Fitness(Objective single) : values_{single, 0}, size_(1)
    {
    }
    Fitness(Objective f0, Objective f1) : values_{f0, f1}, size_(2)
    {
    }

    std::size_t size() const
    {
        return size_;
    }
    Objective operator[](std::size_t i) const
    {
        return values_[i];
    }
    Objective &operator[](std::size_t i)
    {
        return values_[i];
    }
    std::span<const Objective> values() const
    {
        return {values_.data(), size_};
    }

    bool operator==(const Fitness &o) const
    {
        if (size_ != o.size_)
            return false;
        for (std::size_t i = 0; i < size_; ++i)
            if (values_[i] != o.values_[i])
                return false;
        return true;
    }

  private:
    std::array<Objective, max_objectives> values_{};
    std::size_t size_ = 0;
};

// a weakly dominates b: no worse in every objective.
bool weakly_dominates(const Fitness &a, const Fitness &b);
// a dominates b: weakly dominates and strictly better somewhere.
bool dominates(const Fitness &a, const Fitness &b);

struct Solution
{
    Genotype genotype;
    Fitness fitness;
    // Generations since the last strict improvement.
    std::uint32_t nis = 0;
};

} // namespace lkgomea
