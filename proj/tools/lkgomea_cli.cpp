// Command-line harness: generate instances, run experiment plans, analyze results.

#include "lkgomea/experiment.hpp"
#include "lkgomea/metrics.hpp"
#include "lkgomea/mo.hpp"
#include "lkgomea/problems.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace lkgomea;

namespace
{

std::optional<std::string> env(const char *name)
{
    const char *v = std::getenv(name);
    if (v && *v)
        return std::string(v);
    return std::nullopt;
}

struct PlanOverrides
{
    std::string plan_file;
    std::string output_dir;
    std::optional<std::uint64_t> master_seed;
    std::optional<std::uint64_t> budget;
    std::optional<std::int64_t> time_ms;
    std::optional<std::size_t> repeats;
    bool no_time = false;

    // Inline single-grid plan when no plan file is given.
    std::string kind;
    std::vector<std::size_t> lengths;
    std::vector<std::size_t> fns{1};
    std::size_t block_size = default_block_size;
    std::size_t count = 2;
    std::size_t instances = 1;
};

void add_plan_options(CLI::App *cmd, PlanOverrides &o, bool inline_grid)
{
    cmd->add_option("--plan", o.plan_file, "JSON experiment plan")->check(CLI::ExistingFile);
    cmd->add_option("--output-dir", o.output_dir, "Output directory (overrides plan and LKGOMEA_OUTPUT_DIR)");
    cmd->add_option("--master-seed", o.master_seed, "Master seed (overrides plan)");
    cmd->add_option("--budget", o.budget, "Evaluation budget per run");
    cmd->add_option("--time-ms", o.time_ms, "Wall-clock limit per run in milliseconds (0 = none)");
    cmd->add_option("--repeats", o.repeats, "Runs per (problem, algorithm) cell");
    cmd->add_flag("--no-time", o.no_time, "Record zero times so reports are reproducible byte-for-byte");
    if (inline_grid)
    {
        cmd->add_option("--kind", o.kind, "bot | maxcut | worst_of_maxcuts | mo_bot (without --plan)");
        cmd->add_option("--lengths", o.lengths, "Genotype lengths");
        cmd->add_option("--fns", o.fns, "BoT sub-problem counts");
        cmd->add_option("--block-size", o.block_size, "Trap block size");
        cmd->add_option("--count", o.count, "Worst-of-MaxCuts sub-instance count");
        cmd->add_option("--instances", o.instances, "Instances per cell");
    }
}

ExperimentPlan resolve_plan(const PlanOverrides &o)
{
    ExperimentPlan plan;
    if (!o.plan_file.empty())
    {
        plan = load_plan(o.plan_file);
    }
    else
    {
        if (o.kind.empty() || o.lengths.empty())
            throw UsageError("give --plan, or --kind and --lengths");
        if (!o.master_seed)
            throw UsageError("a master seed is required (--master-seed)");
        ProblemGrid g;
        g.kind = parse_problem_kind(o.kind);
        g.lengths = o.lengths;
        g.fns = o.fns;
        g.block_size = o.block_size;
        g.count = o.count;
        g.instances = o.instances;
        plan.problems.push_back(g);
        for (auto model : {MoModel::objective_clusters, MoModel::kernel_asymmetric, MoModel::kernel_symmetric})
            for (auto rule : {MoAcceptanceRule::domination, MoAcceptanceRule::scalarized})
                plan.mo_algorithms.push_back(MoAlgorithm{model, rule});
    }
    if (auto dir = env("LKGOMEA_OUTPUT_DIR"))
        plan.output_dir = *dir;
    if (!o.output_dir.empty())
        plan.output_dir = o.output_dir;
    if (o.master_seed)
        plan.master_seed = *o.master_seed;
    if (o.budget)
        plan.budget_evaluations = *o.budget;
    if (o.time_ms)
        plan.budget_milliseconds = *o.time_ms;
    if (o.repeats)
        plan.repeats = *o.repeats;
    if (o.no_time)
        plan.record_time = false;
    return plan;
}

std::size_t default_workers()
{
    if (auto w = env("LKGOMEA_WORKERS"))
    {
        try
        {
            return std::max<std::size_t>(1, std::stoul(*w));
        }
        catch (const std::exception &)
        {
            throw UsageError("LKGOMEA_WORKERS must be a positive integer");
        }
    }
    return 1;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Linkage-kernel GOMEA experiment harness"};
    app.require_subcommand(1);

    PlanOverrides gen_opts;
    auto *generate = app.add_subcommand("generate", "Write every instance of a plan");
    add_plan_options(generate, gen_opts, true);

    PlanOverrides run_opts;
    std::optional<std::size_t> workers;
    auto *run = app.add_subcommand("run", "Execute all missing runs of a plan (resumable)");
    add_plan_options(run, run_opts, true);
    run->add_option("--workers", workers, "Parallel runs (default LKGOMEA_WORKERS or 1)");

    std::string analyze_dir;
    double alpha = 0.05;
    auto *analyze = app.add_subcommand("analyze", "Summaries, series, tests and win tables from run reports");
    analyze->add_option("dir", analyze_dir, "Experiment output directory (default LKGOMEA_OUTPUT_DIR)");
    analyze->add_option("--alpha", alpha, "Family-wise significance level");

    std::string exact_file;
    auto *exact = app.add_subcommand("solve-exact", "Enumerate the optimum of a small instance");
    exact->add_option("instance", exact_file, "Instance file")->required()->check(CLI::ExistingFile);

    std::string ref_file, ref_out;
    std::uint64_t ref_seed = 0, ref_budget = 1'000'000;
    std::size_t ref_runs = 1;
    auto *ref = app.add_subcommand("ref-front", "Reference Pareto front of a BoT-vs-BoT problem");
    ref->add_option("problem", ref_file, "MO problem file")->required()->check(CLI::ExistingFile);
    ref->add_option("--out", ref_out, "Front output file (default stdout)");
    ref->add_option("--seed", ref_seed, "Seed for solver runs on long genotypes");
    ref->add_option("--runs", ref_runs, "Solver runs per sub-problem pair and config");
    ref->add_option("--budget", ref_budget, "Evaluations per solver run");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? exit_success : exit_usage;
    }

    try
    {
        if (*generate)
        {
            const auto plan = resolve_plan(gen_opts);
            for (const auto &p : cmd_generate(plan))
                std::cout << p.generic_string() << '\n';
            return exit_success;
        }
        if (*run)
        {
            const auto plan = resolve_plan(run_opts);
            const auto summary = cmd_run(plan, workers.value_or(default_workers()));
            std::cout << "completed " << summary.completed << ", skipped " << summary.skipped << ", failed "
                      << summary.failed << '\n';
            return summary.failed > 0 ? exit_incomplete : exit_success;
        }
        if (*analyze)
        {
            if (analyze_dir.empty())
            {
                auto dir = env("LKGOMEA_OUTPUT_DIR");
                if (!dir)
                    throw UsageError("give the experiment directory or set LKGOMEA_OUTPUT_DIR");
                analyze_dir = *dir;
            }
            const auto summary = cmd_analyze(analyze_dir, alpha);
            std::cout << "analyzed " << summary.reports << " reports\n";
            for (const auto &p : summary.outputs)
                std::cout << p.generic_string() << '\n';
            return exit_success;
        }
        if (*exact)
        {
            const auto inst = load_instance(exact_file);
            const auto best = solve_exact(inst);
            std::cout << best.value << ' ' << best.genotype.to_string() << '\n';
            return exit_success;
        }
        if (*ref)
        {
            const auto problem = load_mo_problem(ref_file);
            const auto front = compute_reference_front(problem, ref_seed, ref_runs, ref_budget);
            if (ref_out.empty())
            {
                std::cout << "# exact " << (front.exact ? 1 : 0) << '\n';
                write_front(std::cout, front.front);
            }
            else
            {
                std::ofstream out(ref_out);
                if (!out)
                    throw IoError("cannot write " + ref_out);
                out << "# exact " << (front.exact ? 1 : 0) << '\n';
                write_front(out, front.front);
            }
            return exit_success;
        }
    }
    catch (const UsageError &e)
    {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const ParseError &e)
    {
        std::cerr << "parse error on line " << e.line() << ": " << e.what() << '\n';
        return exit_io;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    }
    return exit_usage;
}
