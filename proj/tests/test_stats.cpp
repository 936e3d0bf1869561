#include "catch_amalgamated.hpp"

#include "lkgomea/rng.hpp"
#include "lkgomea/stats.hpp"
#include "oracles.hpp"

using namespace lkgomea;
using Catch::Matchers::WithinAbs;

TEST_CASE("mann whitney examples", "[stats]")
{
    std::vector<double> a{1, 2, 3}, b{4, 5, 6};
    auto r = mann_whitney_u(a, b);
    CHECK(r.exact);
    CHECK(r.u == 0.0);
    CHECK_THAT(r.p, WithinAbs(0.1, 1e-12));
    CHECK_THAT(mann_whitney_u(b, a).p, WithinAbs(0.1, 1e-12));
    CHECK(mann_whitney_u(b, a).u == 9.0);

    std::vector<double> same{3, 1, 2};
    CHECK(mann_whitney_u(a, same).p == 1.0);
    std::vector<double> flat{7, 7, 7, 7};
    CHECK(mann_whitney_u(flat, flat).p == 1.0);
    CHECK(mann_whitney_u_normal(flat, flat).p == 1.0);
    CHECK_THROWS_AS(mann_whitney_u(std::vector<double>{}, a), std::invalid_argument);
}

TEST_CASE("exact p matches enumeration over labelings", "[stats][property]")
{
    Rng rng(25);
    for (int t = 0; t < 1000; ++t)
    {
        const std::size_t na = 1 + rng.below(6), nb = 1 + rng.below(6);
        std::vector<double> a, b;
        // Small value range forces ties.
        for (std::size_t i = 0; i < na; ++i)
            a.push_back(static_cast<double>(rng.below(5)));
        for (std::size_t i = 0; i < nb; ++i)
            b.push_back(static_cast<double>(rng.below(5)));
        auto r = mann_whitney_u_exact(a, b);
        REQUIRE_THAT(r.p, WithinAbs(oracle::mwu_exact_p(a, b), 1e-12));
        REQUIRE_THAT(r.p, WithinAbs(mann_whitney_u_exact(b, a).p, 1e-12));
        REQUIRE(r.u + mann_whitney_u_exact(b, a).u == static_cast<double>(na * nb));
    }
}

TEST_CASE("normal approximation close to exact at 6+6", "[stats][property]")
{
    Rng rng(26);
    double worst = 0;
    for (int t = 0; t < 1000; ++t)
    {
        std::vector<double> a, b;
        for (int i = 0; i < 6; ++i)
        {
            a.push_back(rng.uniform());
            b.push_back(rng.uniform() + 0.3 * rng.uniform());
        }
        const double pe = mann_whitney_u_exact(a, b).p;
        const double pn = mann_whitney_u_normal(a, b).p;
        worst = std::max(worst, std::abs(pe - pn));
    }
    INFO("largest |exact - normal| = " << worst);
    CHECK(worst <= 0.02);
}

TEST_CASE("holm examples", "[stats]")
{
    CHECK(holm_bonferroni(std::vector<double>{0.04}, 0.05) == std::vector<bool>{true});
    CHECK(holm_bonferroni(std::vector<double>{0.01, 0.04, 0.03}, 0.05) == std::vector<bool>{true, false, false});
    CHECK(holm_bonferroni(std::vector<double>{1, 1, 1}, 0.05) == std::vector<bool>{false, false, false});
    CHECK(holm_bonferroni(std::vector<double>{0.01, 0.02, 0.04}, 0.05) == std::vector<bool>{true, true, true});
}

TEST_CASE("holm contains bonferroni", "[stats][property]")
{
    Rng rng(27);
    for (int t = 0; t < 1000; ++t)
    {
        std::vector<double> p;
        const std::size_t m = 1 + rng.below(10);
        for (std::size_t i = 0; i < m; ++i)
            p.push_back(rng.uniform() * (rng.bit() ? 0.05 : 1.0));
        auto holm = holm_bonferroni(p, 0.05);
        for (std::size_t i = 0; i < m; ++i)
            if (p[i] <= 0.05 / static_cast<double>(m))
                REQUIRE(holm[i]);
    }
}

TEST_CASE("summaries", "[stats]")
{
    std::vector<RunOutcome> ten;
    for (int v = 1; v <= 10; ++v)
        ten.push_back({static_cast<double>(v), false});
    auto s = summarize(ten);
    CHECK(s.success_rate == 1.0);
    CHECK(s.median == 5.5);
    CHECK(s.p5 == 1.0);
    CHECK(s.p95 == 10.0);

    std::vector<RunOutcome> mostly_failed;
    for (int v = 0; v < 10; ++v)
        mostly_failed.push_back({static_cast<double>(v), v >= 4});
    auto f = summarize(mostly_failed);
    CHECK(f.successes == 4);
    CHECK_FALSE(f.median);
    CHECK(f.p5 == 0.0);
    CHECK_FALSE(f.p95);

    // Higher is better (HV): the best run is the largest.
    std::vector<RunOutcome> hv{{0.2, false}, {0.9, false}, {0.5, false}};
    auto h = summarize(hv, false);
    CHECK(h.median == 0.5);
    CHECK(h.p5 == 0.9);
    CHECK(summarize(std::vector<RunOutcome>{}).runs == 0);
}

TEST_CASE("summaries are permutation invariant", "[stats][property]")
{
    Rng rng(28);
    for (int t = 0; t < 1000; ++t)
    {
        std::vector<RunOutcome> runs;
        for (std::size_t i = 0; i < 1 + rng.below(15); ++i)
            runs.push_back({static_cast<double>(rng.below(20)), rng.below(4) == 0});
        auto a = summarize(runs);
        rng.shuffle(std::span<RunOutcome>(runs));
        auto b = summarize(runs);
        REQUIRE(a.median == b.median);
        REQUIRE(a.p5 == b.p5);
        REQUIRE(a.p95 == b.p95);
        REQUIRE(a.successes == b.successes);
    }
}

TEST_CASE("pairwise comparisons and win tables", "[stats]")
{
    std::vector<std::vector<double>> samples{{1, 2, 3, 4, 5, 6, 7, 8, 9, 10},
                                             {101, 102, 103, 104, 105, 106, 107, 108, 109, 110},
                                             {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}};
    auto c = pairwise_comparisons(samples, true);
    REQUIRE(c.size() == 3);
    CHECK(c[0].a == 0);
    CHECK(c[0].b == 1);
    CHECK(c[0].significant);
    CHECK(c[0].better == 1);
    CHECK(c[1].significant == false);
    CHECK(c[1].better == 0);
    CHECK(c[2].better == -1);
    CHECK(c[2].significant);
    // Same data where higher is better flips the direction.
    auto h = pairwise_comparisons(samples, false);
    CHECK(h[0].better == -1);

    auto rows = win_table(std::vector<std::size_t>{3, 7, 3, 1});
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].rank == 2);
    CHECK(rows[1].rank == 1);
    CHECK(rows[2].rank == 2);
    CHECK(rows[3].rank == 3);
    CHECK(rows[1].wins == 7);
}
