#include "catch_amalgamated.hpp"

#include "lkgomea/experiment.hpp"
#include "lkgomea/ims.hpp"
#include "lkgomea/mo.hpp"
#include "lkgomea/problems.hpp"
#include "oracles.hpp"

#include <set>
#include <sstream>

using namespace lkgomea;
using Catch::Matchers::WithinAbs;

namespace
{

Solution point(Objective a, Objective b)
{
    return Solution{Genotype{}, Fitness(a, b), 0};
}

std::set<std::pair<Objective, Objective>> fitness_set(const ElitistArchive &archive)
{
    std::set<std::pair<Objective, Objective>> out;
    for (const auto &m : archive.members())
        out.insert({m.fitness[0], m.fitness[1]});
    return out;
}

} // namespace

TEST_CASE("archive example", "[mo]")
{
    ElitistArchive a;
    CHECK(a.insert(point(3, 1)));
    CHECK(a.insert(point(1, 3)));
    CHECK(a.insert(point(2, 2)));
    CHECK(a.insert(point(4, 4)));
    CHECK(a.size() == 1);
    CHECK(a[0].fitness == Fitness(4, 4));
    CHECK_FALSE(a.insert(point(4, 4)));
    CHECK_FALSE(a.insert(point(4, 3)));
    CHECK(a.insert(point(5, 0)));
    CHECK(a.size() == 2);
    CHECK(a.best_in(0).fitness == Fitness(5, 0));
    CHECK(a.best_in(1).fitness == Fitness(4, 4));
    CHECK_THROWS_AS(ElitistArchive{}.best_in(0), std::logic_error);
}

TEST_CASE("archive equals the non-dominated set of everything offered", "[mo][property]")
{
    Rng rng(12);
    for (int t = 0; t < 1000; ++t)
    {
        ElitistArchive a;
        std::vector<std::pair<Objective, Objective>> offered;
        const int count = 1 + static_cast<int>(rng.below(40));
        for (int k = 0; k < count; ++k)
        {
            const Objective f0 = rng.between(0, 12), f1 = rng.between(0, 12);
            offered.push_back({f0, f1});
            a.insert(point(f0, f1));
            REQUIRE(a.is_consistent());
        }
        std::set<std::pair<Objective, Objective>> expected;
        for (const auto &p : offered)
        {
            bool dominated = false;
            for (const auto &q : offered)
                if (q != p && q.first >= p.first && q.second >= p.second)
                    dominated = true;
            if (!dominated)
                expected.insert(p);
        }
        REQUIRE(fitness_set(a) == expected);
        REQUIRE(a.size() == expected.size());
    }
}

TEST_CASE("front text round trip", "[mo]")
{
    ElitistArchive a;
    a.insert(Solution{Genotype::from_string("0011"), Fitness(3, 1), 0});
    a.insert(Solution{Genotype::from_string("1100"), Fitness(1, 3), 0});
    std::ostringstream out;
    write_archive(out, a);
    CHECK(out.str() == "3 1 0011\n1 3 1100\n");
    std::istringstream in("# header\n" + out.str() + "\n2 2\n");
    auto back = read_front(in);
    REQUIRE(back.size() == 3);
    CHECK(back[0].genotype.to_string() == "0011");
    CHECK(back[2].genotype.size() == 0);
    std::istringstream bad("1 x\n");
    CHECK_THROWS(read_front(bad));
}

TEST_CASE("ranges and normalization", "[mo]")
{
    std::vector<Solution> s{point(2, 10), point(6, 10)};
    auto r = ranges_of(std::span<const Solution>(s));
    CHECK(r.lo[0] == 2);
    CHECK(r.hi[0] == 6);
    CHECK(r.normalize(Fitness(4, 10), 0) == 0.5);
    // Zero-width range: unit denominator.
    CHECK(r.normalize(Fitness(4, 12), 1) == 2.0);
}

TEST_CASE("tchebycheff with extreme weights orders like a single objective", "[mo][property]")
{
    Rng rng(13);
    for (int t = 0; t < 1000; ++t)
    {
        ObjectiveRanges r;
        r.lo = {0.0, 0.0};
        r.hi = {10.0, 10.0};
        const Fitness a(rng.between(0, 15), rng.between(0, 15));
        const Fitness b(rng.between(0, 15), rng.between(0, 15));
        const double ga = tchebycheff(a, {1.0, 0.0}, r), gb = tchebycheff(b, {1.0, 0.0}, r);
        REQUIRE((ga < gb) == (a[0] > b[0]));
        REQUIRE((ga == gb) == (a[0] == b[0]));
        const double w = rng.uniform();
        // Monotone: dominating never increases the scalarized value.
        if (weakly_dominates(a, b))
            REQUIRE(tchebycheff(a, {w, 1 - w}, r) <= tchebycheff(b, {w, 1 - w}, r));
    }
}

TEST_CASE("domination and scalarized verdicts", "[mo]")
{
    ElitistArchive a;
    a.insert(point(5, 5));
    CHECK(domination_verdict(Fitness(1, 1), Fitness(2, 1), &a) == Verdict::improve);
    CHECK(domination_verdict(Fitness(1, 1), Fitness(1, 1), &a) == Verdict::accept);
    CHECK(domination_verdict(Fitness(1, 1), Fitness(0, 3), &a) == Verdict::reject);
    // Archive admission turns a trade-off into an improvement.
    CHECK(domination_verdict(Fitness(1, 1), Fitness(0, 6), &a) == Verdict::improve);
    CHECK(mo_accept_domination(Fitness(1, 1), Fitness(0, 6), a));

    ObjectiveRanges r;
    r.lo = {0, 0};
    r.hi = {10, 10};
    const Weights w{0.5, 0.5};
    CHECK(scalarized_verdict(Fitness(2, 2), Fitness(3, 3), w, r, &a) == Verdict::improve);
    CHECK(scalarized_verdict(Fitness(2, 2), Fitness(2, 4), w, r, &a) == Verdict::accept);
    CHECK(scalarized_verdict(Fitness(2, 2), Fitness(1, 4), w, r, &a) == Verdict::reject);
    CHECK(scalarized_verdict(Fitness(2, 2), Fitness(1, 9), w, r, &a) == Verdict::improve);
    CHECK_FALSE(mo_accept_scalarized(Fitness(2, 2), Fitness(1, 4), w, r, a));
}

TEST_CASE("simplex weights", "[mo]")
{
    auto w = simplex_weights(5);
    REQUIRE(w.size() == 5);
    CHECK(w[0] == Weights{1.0, 0.0});
    CHECK(w[4] == Weights{0.0, 1.0});
    CHECK_THAT(w[2][0], WithinAbs(0.5, 1e-15));
    for (const auto &x : w)
        CHECK_THAT(x[0] + x[1], WithinAbs(1.0, 1e-15));
    CHECK(simplex_weights(1).size() == 1);
}

TEST_CASE("weight assignment is a bijection that gives extremes to extremes", "[mo][property]")
{
    Rng rng(14);
    for (int t = 0; t < 1000; ++t)
    {
        const std::size_t n = 2 + rng.below(20);
        std::vector<Solution> pop;
        for (std::size_t i = 0; i < n; ++i)
            pop.push_back(point(rng.between(0, 20), rng.between(0, 20)));
        auto r = ranges_of(std::span<const Solution>(pop));
        auto w = assign_scalarization_weights(pop, r, rng);
        auto sorted_w = w;
        std::sort(sorted_w.begin(), sorted_w.end());
        auto expected = simplex_weights(n);
        std::sort(expected.begin(), expected.end());
        REQUIRE(sorted_w == expected);
        // The solution with weight (1, 0) is a best on objective 0.
        Objective top0 = 0;
        for (const auto &s : pop)
            top0 = std::max(top0, s.fitness[0]);
        for (std::size_t i = 0; i < n; ++i)
            if (w[i] == Weights{1.0, 0.0})
                REQUIRE(pop[i].fitness[0] == top0);
    }
}

TEST_CASE("clustering covers the population and assigns both roles", "[mo][property]")
{
    Rng rng(15);
    for (int t = 0; t < 1000; ++t)
    {
        const std::size_t n = 4 + rng.below(40);
        const std::size_t c = 2 + rng.below(std::min<std::size_t>(n - 1, 6));
        std::vector<Solution> pop;
        for (std::size_t i = 0; i < n; ++i)
            pop.push_back(point(rng.between(0, 30), rng.between(0, 30)));
        auto clusters = cluster_population(pop, c, rng);
        REQUIRE(clusters.size() == c);
        std::vector<int> seen(n, 0);
        int r0 = 0, r1 = 0;
        for (const auto &cl : clusters)
        {
            REQUIRE_FALSE(cl.members.empty());
            for (auto m : cl.members)
                seen[m]++;
            r0 += cl.role == ClusterRole::objective0;
            r1 += cl.role == ClusterRole::objective1;
        }
        for (auto s : seen)
            REQUIRE(s >= 1);
        REQUIRE(r0 == 1);
        REQUIRE(r1 == 1);
    }
}

TEST_CASE("degenerate clustering", "[mo]")
{
    std::vector<Solution> pop(5, point(3, 3));
    Rng rng(0);
    auto clusters = cluster_population(pop, 3, rng);
    for (const auto &cl : clusters)
        CHECK(cl.members.size() == 5);
    CHECK(clusters[0].role == ClusterRole::objective0);
    CHECK(clusters[1].role == ClusterRole::objective1);
    CHECK_THROWS_AS(cluster_population(pop, 1, rng), std::invalid_argument);
    CHECK_THROWS_AS(cluster_population(pop, 6, rng), std::invalid_argument);
}

TEST_CASE("clusters separate two clouds", "[mo]")
{
    std::vector<Solution> pop;
    for (int i = 0; i < 10; ++i)
        pop.push_back(point(100 + i % 3, i % 2));
    for (int i = 0; i < 10; ++i)
        pop.push_back(point(i % 2, 100 + i % 3));
    Rng rng(1);
    auto clusters = cluster_population(pop, 2, rng);
    for (const auto &cl : clusters)
    {
        if (cl.role == ClusterRole::objective0)
            CHECK(cl.mean[0] > 50);
        else
            CHECK(cl.mean[1] > 50);
    }
}

TEST_CASE("mode names", "[mo]")
{
    for (auto m : {MoModel::objective_clusters, MoModel::kernel_asymmetric, MoModel::kernel_symmetric})
        CHECK(parse_mo_model(to_string(m)) == m);
    for (auto r : {MoAcceptanceRule::domination, MoAcceptanceRule::scalarized})
        CHECK(parse_mo_acceptance(to_string(r)) == r);
    CHECK_THROWS_AS(parse_mo_model("nope"), std::invalid_argument);
    CHECK(mo_cluster_count(0) == 2);
    CHECK(mo_cluster_count(4) == 5);
}

TEST_CASE("mo generations keep archive and population consistent", "[mo][property]")
{
    Rng rng(16);
    int checks = 0;
    for (auto model : {MoModel::objective_clusters, MoModel::kernel_asymmetric, MoModel::kernel_symmetric})
        for (auto rule : {MoAcceptanceRule::domination, MoAcceptanceRule::scalarized})
            for (int t = 0; t < 4; ++t)
            {
                const std::size_t l = 10;
                auto problem = make_mo_problem(generate_bot(l, 5, 1 + rng.below(2), rng()),
                                               generate_bot(l, 5, 1 + rng.below(2), rng()));
                std::vector<Genotype> offered;
                Evaluator ev(
                    [&](const Genotype &g) {
                        offered.push_back(g);
                        return evaluate(g, problem);
                    },
                    2000);
                ElitistArchive archive;
                MoConfig cfg{model, rule};
                Population pop;
                try
                {
                    pop = initialize_mo_population(16, l, ev, archive, rng);
                    for (int gen = 0; gen < 100; ++gen)
                    {
                        mo_generation_step(pop, cfg, 2 + rng.below(3), ev, archive, rng);
                        for (const auto &s : pop.solutions)
                        {
                            REQUIRE(s.fitness == evaluate(s.genotype, problem));
                            ++checks;
                        }
                    }
                }
                catch (const StopRun &)
                {
                }
                REQUIRE(archive.is_consistent());
                for (const auto &m : archive.members())
                    REQUIRE(m.fitness == evaluate(m.genotype, problem));
                // Every evaluated genotype is weakly dominated by some archive member.
                for (const auto &g : offered)
                {
                    const auto f = evaluate(g, problem);
                    bool covered = false;
                    for (const auto &m : archive.members())
                        covered = covered || weakly_dominates(m.fitness, f);
                    REQUIRE(covered);
                    ++checks;
                }
                for (const auto &s : pop.solutions)
                    REQUIRE(s.fitness == evaluate(s.genotype, problem));
            }
    CHECK(checks >= 1000);
}

TEST_CASE("mo-gomea finds the whole front of a tiny problem", "[mo]")
{
    auto problem = make_mo_problem(generate_bot(10, 5, 1, 1), generate_bot(10, 5, 1, 2));
    auto truth = oracle::pareto_front(problem, 10);
    {
        // Single-objective clusters hold the extremes even in one fixed population.
        Evaluator ev([&](const Genotype &g) { return evaluate(g, problem); }, 200000);
        ElitistArchive archive;
        Rng rng(3);
        MoConfig cfg{MoModel::objective_clusters, MoAcceptanceRule::domination};
        auto pop = initialize_mo_population(64, 10, ev, archive, rng);
        try
        {
            for (int gen = 0; gen < 60; ++gen)
                mo_generation_step(pop, cfg, 3, ev, archive, rng);
        }
        catch (const StopRun &)
        {
        }
        CHECK(fitness_set(archive) == truth);
    }
    // Kernel modes have no extreme clusters; a single population may stall, so run them as deployed.
    for (auto model : {MoModel::objective_clusters, MoModel::kernel_asymmetric, MoModel::kernel_symmetric})
        for (auto rule : {MoAcceptanceRule::domination, MoAcceptanceRule::scalarized})
        {
            RunLimits limits;
            limits.evaluations = 200000;
            limits.record_time = false;
            auto r = run_mo_with_ims(problem, MoConfig{model, rule}, ImsConfig{}, limits, 3, nullptr);
            ElitistArchive archive;
            for (const auto &s : r.archive)
                archive.insert(s);
            INFO("model " << to_string(model) << ", acceptance " << to_string(rule));
            CHECK(fitness_set(archive) == truth);
        }
}

TEST_CASE("objective clustering covers a single-trap front", "[mo]")
{
    auto problem = make_mo_problem(generate_bot(20, 5, 1, 11), generate_bot(20, 5, 1, 12));
    const auto reference = compute_reference_front(problem, 13, 1, 1'000'000);
    int reached = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
        RunLimits limits;
        limits.evaluations = 1'000'000;
        limits.stop_at_front = true;
        limits.record_time = false;
        auto r = run_mo_with_ims(problem, MoConfig{MoModel::objective_clusters, MoAcceptanceRule::domination},
                                 ImsConfig{}, limits, seed, &reference.front);
        REQUIRE(r.final_hv.has_value());
        if (*r.final_hv >= 0.95)
            ++reached;
    }
    CHECK(reached >= 9);
}
