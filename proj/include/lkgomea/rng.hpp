#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace lkgomea
{

// SplitMix64 finalizer. Used to derive independent seed streams.
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_tag(std::string_view tag)
{
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag)
    {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/**
 * @brief Derive a child seed from a parent seed, a stream tag and an index.
 *
 * Instance generation and algorithm runs take seeds from different tags, so
 * changing one never perturbs the other.
 */
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag, std::uint64_t index = 0)
{
    return mix64(mix64(parent ^ hash_tag(tag)) + mix64(index + 0x632be59bd9b4e019ULL));
}

/**
 * @brief Seedable 64-bit generator (mt19937_64) with platform-independent draws.
 *
 * The standard distributions are implementation-defined, so bounded integers,
 * reals and shuffles are implemented here to keep runs bit-reproducible across
 * standard libraries.
 */
class Rng
{
  public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) : engine_(seed)
    {
    }

    static constexpr result_type min()
    {
        return std::mt19937_64::min();
    }
    static constexpr result_type max()
    {
        return std::mt19937_64::max();
    }

    result_type operator()()
    {
        return engine_();
    }

    // Uniform on [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n)
    {
        // Lemire's nearly-divisionless method.
        unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n)
        {
            std::uint64_t threshold = (0 - n) % n;
            while (low < threshold)
            {
                m = static_cast<unsigned __int128>(engine_()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Uniform on [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi)
    {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    // Uniform on [0, 1) with 53 bits of precision.
    double uniform()
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool bit()
    {
        return (engine_() >> 63) != 0;
    }

    template <class T> void shuffle(std::span<T> items)
    {
        for (std::size_t i = items.size(); i > 1; --i)
        {
            std::size_t j = below(i);
            std::swap(items[i - 1], items[j]);
        }
    }

    std::mt19937_64 &engine()
    {
        return engine_;
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace lkgomea
