#include "catch_amalgamated.hpp"

#include "lkgomea/metrics.hpp"
#include "oracles.hpp"

using namespace lkgomea;
using Catch::Matchers::WithinAbs;

namespace
{

Solution point(Objective a, Objective b)
{
    return Solution{Genotype{}, Fitness(a, b), 0};
}

std::set<std::pair<Objective, Objective>> as_set(const std::vector<Solution> &front)
{
    std::set<std::pair<Objective, Objective>> out;
    for (const auto &s : front)
        out.insert({s.fitness[0], s.fitness[1]});
    return out;
}

std::vector<Point> random_front(Rng &rng)
{
    // Points on a decreasing staircase, plus a few dominated ones.
    std::vector<Point> pts;
    const std::size_t n = 1 + rng.below(12);
    for (std::size_t i = 0; i < n; ++i)
        pts.push_back({rng.uniform(), rng.uniform()});
    return pts;
}

} // namespace

TEST_CASE("hypervolume examples", "[metrics]")
{
    std::vector<Point> unit{{1.0, 1.0}};
    CHECK(hypervolume_2d(unit, {0.0, 0.0}) == 1.0);
    std::vector<Point> two{{1.0, 0.5}, {0.5, 1.0}};
    CHECK_THAT(hypervolume_2d(two, {0.0, 0.0}), WithinAbs(0.75, 1e-15));
    CHECK(hypervolume_2d(std::vector<Point>{}, {0.0, 0.0}) == 0.0);
    std::vector<Point> below{{-1.0, 5.0}, {1.0, 0.0}};
    CHECK(hypervolume_2d(below, {0.0, 0.0}) == 0.0);
}

TEST_CASE("hypervolume equals exact grid area", "[metrics][property]")
{
    // Integer fronts: count dominated unit cells directly.
    Rng rng(19);
    for (int t = 0; t < 1000; ++t)
    {
        std::vector<Point> pts;
        const std::size_t n = 1 + rng.below(8);
        for (std::size_t i = 0; i < n; ++i)
            pts.push_back({static_cast<double>(rng.below(12)), static_cast<double>(rng.below(12))});
        double cells = 0;
        for (int x = 0; x < 12; ++x)
            for (int y = 0; y < 12; ++y)
            {
                bool dom = false;
                for (const auto &p : pts)
                    dom = dom || (p[0] >= x + 1 && p[1] >= y + 1);
                cells += dom;
            }
        REQUIRE(hypervolume_2d(pts, {0.0, 0.0}) == cells);
    }
}

TEST_CASE("hypervolume is monotone", "[metrics][property]")
{
    Rng rng(20);
    for (int t = 0; t < 1000; ++t)
    {
        auto pts = random_front(rng);
        const double before = hypervolume_2d(pts, {0.0, 0.0});
        pts.push_back({rng.uniform(), rng.uniform()});
        REQUIRE(hypervolume_2d(pts, {0.0, 0.0}) >= before);
    }
}

TEST_CASE("hypervolume agrees with Monte-Carlo sampling", "[metrics]")
{
    Rng rng(21);
    for (int t = 0; t < 5; ++t)
    {
        auto pts = random_front(rng);
        auto [estimate, se] = oracle::monte_carlo_hv(pts, {0.0, 0.0}, 200000, rng());
        CHECK(std::abs(hypervolume_2d(pts, {0.0, 0.0}) - estimate) <= 3 * se + 1e-12);
    }
}

TEST_CASE("non_dominated and merge", "[metrics]")
{
    std::vector<std::vector<Solution>> a{{point(2, 0)}, {point(0, 2)}};
    CHECK(as_set(merge_fronts(a)) == std::set<std::pair<Objective, Objective>>{{2, 0}, {0, 2}});
    std::vector<std::vector<Solution>> b{{point(2, 2)}, {point(1, 1)}};
    CHECK(as_set(merge_fronts(b)) == std::set<std::pair<Objective, Objective>>{{2, 2}});
    std::vector<Solution> f{point(5, 1), point(3, 3), point(1, 5)};
    std::vector<Solution> g{point(1, 5), point(5, 1), point(3, 3)};
    std::vector<std::vector<Solution>> c{f, g, f};
    auto merged = merge_fronts(c);
    REQUIRE(merged.size() == 3);
    CHECK(merged[0].fitness == Fitness(5, 1));
    CHECK(merged[2].fitness == Fitness(1, 5));
}

TEST_CASE("merge output is mutually non-dominated", "[metrics][property]")
{
    Rng rng(22);
    for (int t = 0; t < 1000; ++t)
    {
        std::vector<std::vector<Solution>> fronts(1 + rng.below(4));
        for (auto &f : fronts)
            for (std::size_t i = 0; i < rng.below(10); ++i)
                f.push_back(point(rng.between(0, 9), rng.between(0, 9)));
        auto m = merge_fronts(fronts);
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = 0; j < m.size(); ++j)
                if (i != j)
                    REQUIRE_FALSE(weakly_dominates(m[i].fitness, m[j].fitness));
        // Everything offered is weakly dominated by the merge.
        for (const auto &f : fronts)
            for (const auto &s : f)
            {
                bool covered = false;
                for (const auto &x : m)
                    covered = covered || weakly_dominates(x.fitness, s.fitness);
                REQUIRE(covered);
            }
    }
}

TEST_CASE("normalized hypervolume", "[metrics]")
{
    std::vector<Solution> ref{point(10, 0), point(5, 5), point(0, 10)};
    CHECK_THAT(normalized_hv(ref, ref), WithinAbs(1.0, 1e-12));
    CHECK(normalized_hv(std::vector<Solution>{}, ref) == 0.0);

    std::vector<Solution> partial{point(10, 0), point(0, 10)};
    // Normalized: (1,0), (0.5,0.5), (0,1); reference point (-0.05,-0.05).
    std::vector<Point> rn{{1.0, 0.0}, {0.5, 0.5}, {0.0, 1.0}};
    std::vector<Point> pn{{1.0, 0.0}, {0.0, 1.0}};
    const Point r{-0.05, -0.05};
    auto mc = oracle::monte_carlo_hv(pn, r, 400000, 3);
    auto mc_ref = oracle::monte_carlo_hv(rn, r, 400000, 4);
    const double expected = hypervolume_2d(pn, r) / hypervolume_2d(rn, r);
    CHECK_THAT(normalized_hv(partial, ref), WithinAbs(expected, 1e-12));
    CHECK(std::abs(mc.first / mc_ref.first - expected) < 0.01);
    // Hand value: partial area 1.05*0.05 + 0.05*1.05 - 0.05^2 + ... via inclusion-exclusion.
    const double hand_partial = 1.05 * 0.05 + 0.05 * 1.05 - 0.05 * 0.05;
    const double hand_ref = hand_partial + 0.5 * 0.5;
    CHECK_THAT(normalized_hv(partial, ref), WithinAbs(hand_partial / hand_ref, 1e-12));

    std::vector<Solution> flat{point(3, 1), point(3, 1)};
    CHECK_THROWS_AS(normalized_hv(ref, flat), std::invalid_argument);
}

TEST_CASE("enumerated front matches the oracle", "[metrics][property]")
{
    Rng rng(23);
    for (int t = 0; t < 10; ++t)
    {
        auto p = make_mo_problem(generate_bot(10, 5, 1 + rng.below(3), rng()),
                                 generate_bot(10, 5, 1 + rng.below(3), rng()));
        CHECK(as_set(enumerate_pareto_front(p)) == oracle::pareto_front(p, 10));
    }
}

TEST_CASE("reference front decomposition", "[metrics]")
{
    Rng rng(24);
    for (int t = 0; t < 4; ++t)
    {
        auto p = make_mo_problem(generate_bot(15, 5, 2 + rng.below(2), rng()),
                                 generate_bot(15, 5, 2 + rng.below(2), rng()));
        auto ref = build_reference_front_bot(p);
        CHECK(ref.exact);
        CHECK(as_set(ref.front) == as_set(enumerate_pareto_front(p)));
    }
    // fns = 1 both sides: the single pairwise front.
    auto single = make_mo_problem(generate_bot(10, 5, 1, 1), generate_bot(10, 5, 1, 2));
    CHECK(as_set(build_reference_front_bot(single).front) == as_set(enumerate_pareto_front(single)));

    auto parts = sub_problems(generate_bot(10, 5, 3, 5));
    CHECK(parts.size() == 3);
    CHECK(sub_problems(generate_maxcut(6, 1)).size() == 1);

    // Long genotypes go to the solver; its exactness flag propagates.
    auto longer = make_mo_problem(generate_bot(20, 5, 2, 1), generate_bot(20, 5, 1, 2));
    int calls = 0;
    PairSolver solver = [&](const MoProblem &pair) {
        ++calls;
        return std::make_pair(enumerate_pareto_front(pair), false);
    };
    auto approx = build_reference_front_bot(longer, solver);
    CHECK(calls == 2);
    CHECK_FALSE(approx.exact);
    CHECK_THROWS_AS(build_reference_front_bot(longer), std::invalid_argument);
}
