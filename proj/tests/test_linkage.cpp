#include "catch_amalgamated.hpp"

#include "lkgomea/linkage.hpp"
#include "oracles.hpp"

#include <set>

using namespace lkgomea;
using Catch::Matchers::WithinAbs;

namespace
{

std::vector<Genotype> random_population(std::size_t n, std::size_t l, Rng &rng)
{
    std::vector<Genotype> pop;
    for (std::size_t i = 0; i < n; ++i)
        pop.push_back(Genotype::random(l, rng));
    return pop;
}

std::vector<std::vector<double>> as_table(const NmiMatrix &m)
{
    std::vector<std::vector<double>> t(m.size(), std::vector<double>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            t[i][j] = m(i, j);
    return t;
}

std::vector<std::vector<std::uint32_t>> as_sets(const Fos &fos)
{
    std::vector<std::vector<std::uint32_t>> out;
    for (const auto &s : fos.subsets)
        out.push_back(s.indices);
    return out;
}

} // namespace

TEST_CASE("nmi of copies and of independent variables", "[linkage]")
{
    std::vector<Genotype> pop{Genotype::from_string("000"), Genotype::from_string("110"),
                              Genotype::from_string("011"), Genotype::from_string("101")};
    auto m = pairwise_nmi(std::span<const Genotype>(pop));
    // Bits 0 and 1 are pairwise independent here.
    CHECK_THAT(m(0, 1), WithinAbs(0.0, 1e-12));

    std::vector<Genotype> copies{Genotype::from_string("00"), Genotype::from_string("11"),
                                 Genotype::from_string("11"), Genotype::from_string("00")};
    auto c = pairwise_nmi(std::span<const Genotype>(copies));
    CHECK_THAT(c(0, 1), WithinAbs(1.0, 1e-12));
    CHECK(c(0, 0) == 1.0);

    // Negated copy is still fully informative.
    std::vector<Genotype> neg{Genotype::from_string("01"), Genotype::from_string("10"),
                              Genotype::from_string("10")};
    CHECK_THAT(pairwise_nmi(std::span<const Genotype>(neg))(0, 1), WithinAbs(1.0, 1e-12));

    // A constant column carries no information.
    std::vector<Genotype> constant{Genotype::from_string("01"), Genotype::from_string("00")};
    auto k = pairwise_nmi(std::span<const Genotype>(constant));
    CHECK(k(0, 0) == 0.0);
    CHECK(k(0, 1) == 0.0);
    CHECK_THROWS_AS(pairwise_nmi(std::span<const Genotype>(constant.data(), 1)), std::invalid_argument);
}

TEST_CASE("nmi matches the probability-table oracle", "[linkage][property]")
{
    Rng rng(11);
    std::size_t cases = 0;
    for (int t = 0; t < 60; ++t)
    {
        const std::size_t n = 2 + rng.below(70);
        const std::size_t l = 2 + rng.below(10);
        auto pop = random_population(n, l, rng);
        // Correlate some columns so values are not all near zero.
        for (auto &g : pop)
            if (rng.below(3) == 0)
                g[1] = g[0];
        auto m = pairwise_nmi(std::span<const Genotype>(pop));
        for (std::size_t i = 0; i < l; ++i)
            for (std::size_t j = 0; j < l; ++j)
            {
                REQUIRE_THAT(m(i, j), WithinAbs(oracle::nmi(pop, i, j), 1e-9));
                REQUIRE(m(i, j) == m(j, i));
                REQUIRE(m(i, j) >= 0.0);
                REQUIRE(m(i, j) <= 1.0);
                ++cases;
            }
    }
    CHECK(cases >= 1000);
}

TEST_CASE("linkage tree structure", "[linkage][property]")
{
    Rng rng(4);
    for (int t = 0; t < 1000; ++t)
    {
        const std::size_t l = 2 + rng.below(15);
        auto pop = random_population(4 + rng.below(30), l, rng);
        auto fos = build_linkage_tree(pairwise_nmi(std::span<const Genotype>(pop)));
        // l singletons and l - 2 internal merges (root excluded).
        REQUIRE(fos.size() == 2 * l - 2);
        for (std::size_t v = 0; v < l; ++v)
            REQUIRE(fos[v].indices == std::vector<std::uint32_t>{static_cast<std::uint32_t>(v)});
        std::set<std::vector<std::uint32_t>> seen;
        for (std::size_t a = 0; a < fos.size(); ++a)
        {
            REQUIRE(std::is_sorted(fos[a].indices.begin(), fos[a].indices.end()));
            REQUIRE(fos[a].indices.size() < l);
            REQUIRE(seen.insert(fos[a].indices).second);
            // Laminar family.
            for (std::size_t b = 0; b < a; ++b)
            {
                std::vector<std::uint32_t> common;
                std::set_intersection(fos[a].indices.begin(), fos[a].indices.end(), fos[b].indices.begin(),
                                      fos[b].indices.end(), std::back_inserter(common));
                REQUIRE((common.empty() || common == fos[a].indices || common == fos[b].indices));
            }
        }
    }
}

TEST_CASE("linkage tree equals naive UPGMA", "[linkage][property]")
{
    Rng rng(21);
    for (int t = 0; t < 1000; ++t)
    {
        const std::size_t l = 2 + rng.below(11);
        auto pop = random_population(3 + rng.below(40), l, rng);
        auto m = pairwise_nmi(std::span<const Genotype>(pop));
        auto expected = oracle::upgma(as_table(m), upgma_tie_tolerance);
        REQUIRE(as_sets(build_linkage_tree(m)) == expected);
    }
}

TEST_CASE("ties break towards the smallest index pair", "[linkage]")
{
    // All similarities equal: merges go (0,1), then ({0,1},2), ...
    NmiMatrix m(4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j)
            m.set(i, j, 0.5);
    auto fos = build_linkage_tree(m);
    REQUIRE(fos.size() == 6);
    CHECK(fos[4].indices == std::vector<std::uint32_t>{0, 1});
    CHECK(fos[5].indices == std::vector<std::uint32_t>{0, 1, 2});
}

TEST_CASE("fos filter rules", "[linkage]")
{
    Fos fos;
    fos.subsets = {{{0}, 1.0}, {{1}, 1.0}, {{2}, 1.0}, {{3}, 1.0},
                   {{0, 1}, 1.0}, {{2, 3}, 0.0}, {{0, 1, 2}, 1.0}};
    auto out = filter_fos(fos);
    // {0,1,2} merged at 1: its descendants {0}, {1}, {2}, {0,1} go. {2,3} merged at 0 goes.
    REQUIRE(as_sets(out) == std::vector<std::vector<std::uint32_t>>{{3}, {0, 1, 2}});

    Fos plain;
    plain.subsets = {{{0}, 1.0}, {{1}, 1.0}, {{2}, 1.0}, {{0, 1}, 0.4}};
    CHECK(as_sets(filter_fos(plain)) == as_sets(plain));
}

TEST_CASE("filtered fos invariants", "[linkage][property]")
{
    Rng rng(5);
    for (int t = 0; t < 1000; ++t)
    {
        const std::size_t l = 2 + rng.below(12);
        auto pop = random_population(2 + rng.below(12), l, rng);
        if (rng.bit())
            for (auto &g : pop)
                g[l - 1] = g[0];
        auto full = build_linkage_tree(pairwise_nmi(std::span<const Genotype>(pop)));
        auto fos = filter_fos(full);
        // Every variable stays covered.
        std::vector<bool> covered(l, false);
        for (const auto &s : fos.subsets)
        {
            REQUIRE(!(s.indices.size() > 1 && s.similarity <= default_filter_eps));
            for (auto v : s.indices)
                covered[v] = true;
        }
        for (bool c : covered)
            REQUIRE(c);
        // No kept subset strictly inside a kept subset merged at ~1.
        for (const auto &a : fos.subsets)
            for (const auto &b : fos.subsets)
                if (b.indices.size() > 1 && b.similarity >= 1.0 - default_filter_eps &&
                    a.indices.size() < b.indices.size())
                    REQUIRE_FALSE(std::includes(b.indices.begin(), b.indices.end(), a.indices.begin(),
                                                a.indices.end()));
    }
}

TEST_CASE("learn_model and dump_fos", "[linkage]")
{
    std::vector<Genotype> pop{Genotype::from_string("0011"), Genotype::from_string("1100"),
                              Genotype::from_string("0000"), Genotype::from_string("1111"),
                              Genotype::from_string("0111"), Genotype::from_string("1000")};
    auto fos = learn_model(std::span<const Genotype>(pop));
    auto text = dump_fos(fos);
    CHECK(text.find("2 3\n") != std::string::npos);
    CHECK_FALSE(fos.empty());
}
