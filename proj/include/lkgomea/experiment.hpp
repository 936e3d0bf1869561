#pragma once

#include "lkgomea/ims.hpp"
#include "lkgomea/metrics.hpp"
#include "lkgomea/problems.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lkgomea
{

// Exit-code carrying errors for the command-line harness.
class UsageError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

enum ExitCode
{
    exit_success = 0,
    exit_usage = 1,
    exit_io = 2,
    exit_incomplete = 3,
};

enum class ProblemKind
{
    bot,
    maxcut,
    worst_of_maxcuts,
    mo_bot,
};

std::string to_string(ProblemKind kind);
ProblemKind parse_problem_kind(const std::string &name);

struct ProblemGrid
{
    ProblemKind kind = ProblemKind::bot;
    std::vector<std::size_t> lengths;
    std::size_t block_size = default_block_size;
    // BoT sub-problem counts (ignored by MaxCut kinds).
    std::vector<std::size_t> fns{1};
    // Worst-of-MaxCuts sub-instance count.
    std::size_t count = 2;
    // Instances per (length, fns) cell.
    std::size_t instances = 1;
    // Optional fixed value-to-reach; otherwise derived per instance.
    std::optional<Objective> value_to_reach;
};

struct MoAlgorithm
{
    MoModel model = MoModel::objective_clusters;
    MoAcceptanceRule acceptance = MoAcceptanceRule::domination;

    std::string name() const;
};

struct ExperimentPlan
{
    std::uint64_t master_seed = 0;
    std::filesystem::path output_dir = "experiment";
    std::vector<ProblemGrid> problems;
    std::vector<ModelMode> algorithms{ModelMode::single_tree, ModelMode::kernel_asymmetric,
                                      ModelMode::kernel_symmetric};
    std::vector<MoAlgorithm> mo_algorithms;
    std::uint64_t budget_evaluations = 10'000'000;
    std::int64_t budget_milliseconds = 0;
    std::size_t repeats = 10;
    ImsConfig ims;
    bool record_time = true;
    // Reference fronts for long MO problems come from this many runs per sub-problem pair and MO config.
    std::size_t reference_runs = 1;
    std::uint64_t reference_budget = 1'000'000;
    // Worst-of-MaxCuts / large MaxCut value-to-reach from consensus runs.
    std::size_t consensus_runs = 3;
    std::uint64_t consensus_budget = 2'000'000;
    bool stop_at_front = true;
};

// Reads the JSON plan format documented in the README.
ExperimentPlan load_plan(const std::filesystem::path &path);
ExperimentPlan parse_plan(const std::string &json_text);
std::string plan_to_json(const ExperimentPlan &plan);

struct Cell
{
    std::string id;
    ProblemKind kind = ProblemKind::bot;
    std::size_t length = 0;
    std::size_t fns = 1;
    std::size_t instance = 0;
    std::uint64_t seed = 0;
    const ProblemGrid *grid = nullptr;
};

// Every (problem, length, fns, instance) cell of the plan, in plan order.
std::vector<Cell> plan_cells(const ExperimentPlan &plan);

std::filesystem::path instance_path(const ExperimentPlan &plan, const Cell &cell);

// Writes every instance file; returns the paths written.
std::vector<std::filesystem::path> cmd_generate(const ExperimentPlan &plan);

struct RunSummary
{
    std::size_t completed = 0;
    std::size_t skipped = 0;
    std::size_t failed = 0;
};

// Executes every missing (cell, algorithm, repeat) run with `workers` threads.
RunSummary cmd_run(const ExperimentPlan &plan, std::size_t workers = 1);

struct AnalysisSummary
{
    std::size_t reports = 0;
    std::vector<std::filesystem::path> outputs;
};

// Reads <dir>/runs and writes tables and series under <dir>/analysis.
AnalysisSummary cmd_analyze(const std::filesystem::path &dir, double alpha = 0.05);

// Reference front of an MO problem: enumeration/decomposition, solver runs otherwise.
ReferenceFront compute_reference_front(const MoProblem &problem,
                                       std::uint64_t seed,
                                       std::size_t runs,
                                       std::uint64_t budget);

// Best value over several seeded runs; the stand-in optimum when enumeration is out of reach.
Objective consensus_value_to_reach(const Instance &instance, std::size_t runs, std::uint64_t budget, std::uint64_t seed);

// JSON report with a fixed key order.
std::string report_to_json(const RunReport &report);
RunReport report_from_json(const std::string &text);

void write_text_atomic(const std::filesystem::path &path, const std::string &text);
std::string read_text(const std::filesystem::path &path);

} // namespace lkgomea
