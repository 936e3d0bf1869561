#include "lkgomea/experiment.hpp"

#include "lkgomea/stats.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace lkgomea
{

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string to_string(ProblemKind kind)
{
    switch (kind)
    {
    case ProblemKind::bot:
        return "bot";
    case ProblemKind::maxcut:
        return "maxcut";
    case ProblemKind::worst_of_maxcuts:
        return "worst_of_maxcuts";
    case ProblemKind::mo_bot:
        return "mo_bot";
    }
    return "unknown";
}

ProblemKind parse_problem_kind(const std::string &name)
{
    if (name == "bot")
        return ProblemKind::bot;
    if (name == "maxcut")
        return ProblemKind::maxcut;
    if (name == "worst_of_maxcuts" || name == "wmc")
        return ProblemKind::worst_of_maxcuts;
    if (name == "mo_bot" || name == "bot_vs_bot")
        return ProblemKind::mo_bot;
    throw UsageError("unknown problem kind: " + name);
}

std::string MoAlgorithm::name() const
{
    return to_string(model) + "-" + to_string(acceptance);
}

void write_text_atomic(const fs::path &path, const std::string &text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw IoError("cannot write " + tmp.string());
        out << text;
        if (!out)
            throw IoError("failed writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_text(const fs::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace
{

std::uint64_t as_u64(const json &v, const char *what)
{
    if (v.is_number_unsigned() || v.is_number_integer())
    {
        if (v.get<std::int64_t>() < 0)
            throw UsageError(std::string(what) + " must be non-negative");
        return v.get<std::uint64_t>();
    }
    if (v.is_number_float())
    {
        double d = v.get<double>();
        if (d < 0 || d != std::floor(d))
            throw UsageError(std::string(what) + " must be a non-negative integer");
        return static_cast<std::uint64_t>(d);
    }
    throw UsageError(std::string(what) + " must be a number");
}

std::vector<std::size_t> as_sizes(const json &v, const char *what)
{
    std::vector<std::size_t> out;
    if (v.is_array())
        for (const auto &x : v)
            out.push_back(as_u64(x, what));
    else
        out.push_back(as_u64(v, what));
    return out;
}

} // namespace

ExperimentPlan parse_plan(const std::string &json_text)
{
    json j;
    try
    {
        j = json::parse(json_text);
    }
    catch (const json::parse_error &e)
    {
        throw UsageError(std::string("plan is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw UsageError("plan must be a JSON object");
    if (!j.contains("master_seed"))
        throw UsageError("plan needs a master_seed");

    ExperimentPlan plan;
    plan.master_seed = as_u64(j["master_seed"], "master_seed");
    if (j.contains("output_dir"))
        plan.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("repeats"))
        plan.repeats = as_u64(j["repeats"], "repeats");
    if (j.contains("record_time"))
        plan.record_time = j["record_time"].get<bool>();
    if (j.contains("stop_at_front"))
        plan.stop_at_front = j["stop_at_front"].get<bool>();
    if (j.contains("budget"))
    {
        const auto &b = j["budget"];
        if (b.is_object())
        {
            if (b.contains("evaluations"))
                plan.budget_evaluations = as_u64(b["evaluations"], "budget.evaluations");
            if (b.contains("milliseconds"))
                plan.budget_milliseconds = static_cast<std::int64_t>(as_u64(b["milliseconds"], "budget.milliseconds"));
        }
        else
        {
            plan.budget_evaluations = as_u64(b, "budget");
        }
    }
    if (j.contains("ims"))
    {
        const auto &m = j["ims"];
        if (m.contains("base_population"))
            plan.ims.base_population = as_u64(m["base_population"], "ims.base_population");
        if (m.contains("interleave"))
            plan.ims.interleave = as_u64(m["interleave"], "ims.interleave");
        if (m.contains("retire_stalled"))
            plan.ims.retire_stalled = m["retire_stalled"].get<bool>();
    }
    if (j.contains("reference"))
    {
        const auto &r = j["reference"];
        if (r.contains("runs"))
            plan.reference_runs = as_u64(r["runs"], "reference.runs");
        if (r.contains("budget"))
            plan.reference_budget = as_u64(r["budget"], "reference.budget");
    }
    if (j.contains("consensus"))
    {
        const auto &r = j["consensus"];
        if (r.contains("runs"))
            plan.consensus_runs = as_u64(r["runs"], "consensus.runs");
        if (r.contains("budget"))
            plan.consensus_budget = as_u64(r["budget"], "consensus.budget");
    }
    if (j.contains("algorithms"))
    {
        plan.algorithms.clear();
        for (const auto &a : j["algorithms"])
        {
            try
            {
                plan.algorithms.push_back(parse_model_mode(a.get<std::string>()));
            }
            catch (const std::invalid_argument &e)
            {
                throw UsageError(e.what());
            }
        }
    }
    if (j.contains("mo_algorithms"))
    {
        for (const auto &a : j["mo_algorithms"])
        {
            MoAlgorithm m;
            try
            {
                m.model = parse_mo_model(a.at("model").get<std::string>());
                m.acceptance = parse_mo_acceptance(a.at("acceptance").get<std::string>());
            }
            catch (const std::exception &e)
            {
                throw UsageError(std::string("bad mo_algorithms entry: ") + e.what());
            }
            plan.mo_algorithms.push_back(m);
        }
    }
    if (!j.contains("problems") || !j["problems"].is_array())
        throw UsageError("plan needs a problems array");
    for (const auto &p : j["problems"])
    {
        ProblemGrid g;
        g.kind = parse_problem_kind(p.at("kind").get<std::string>());
        if (!p.contains("lengths"))
            throw UsageError("problem entry needs lengths");
        g.lengths = as_sizes(p["lengths"], "lengths");
        if (p.contains("block_size"))
            g.block_size = as_u64(p["block_size"], "block_size");
        if (p.contains("fns"))
            g.fns = as_sizes(p["fns"], "fns");
        if (p.contains("count"))
            g.count = as_u64(p["count"], "count");
        if (p.contains("instances"))
            g.instances = as_u64(p["instances"], "instances");
        if (p.contains("value_to_reach") && !p["value_to_reach"].is_null())
            g.value_to_reach = p["value_to_reach"].get<Objective>();
        plan.problems.push_back(std::move(g));
    }
    if (plan.mo_algorithms.empty())
        for (auto model : {MoModel::objective_clusters, MoModel::kernel_asymmetric, MoModel::kernel_symmetric})
            for (auto rule : {MoAcceptanceRule::domination, MoAcceptanceRule::scalarized})
                plan.mo_algorithms.push_back(MoAlgorithm{model, rule});
    return plan;
}

ExperimentPlan load_plan(const fs::path &path)
{
    return parse_plan(read_text(path));
}

std::string plan_to_json(const ExperimentPlan &plan)
{
    json j;
    j["master_seed"] = plan.master_seed;
    j["output_dir"] = plan.output_dir.generic_string();
    j["problems"] = json::array();
    for (const auto &g : plan.problems)
    {
        json p;
        p["kind"] = to_string(g.kind);
        p["lengths"] = g.lengths;
        p["block_size"] = g.block_size;
        p["fns"] = g.fns;
        p["count"] = g.count;
        p["instances"] = g.instances;
        if (g.value_to_reach)
            p["value_to_reach"] = *g.value_to_reach;
        j["problems"].push_back(p);
    }
    j["algorithms"] = json::array();
    for (auto a : plan.algorithms)
        j["algorithms"].push_back(to_string(a));
    j["mo_algorithms"] = json::array();
    for (const auto &a : plan.mo_algorithms)
        j["mo_algorithms"].push_back({{"model", to_string(a.model)}, {"acceptance", to_string(a.acceptance)}});
    j["budget"] = {{"evaluations", plan.budget_evaluations}, {"milliseconds", plan.budget_milliseconds}};
    j["repeats"] = plan.repeats;
    j["ims"] = {{"base_population", plan.ims.base_population},
                {"interleave", plan.ims.interleave},
                {"retire_stalled", plan.ims.retire_stalled}};
    j["record_time"] = plan.record_time;
    j["reference"] = {{"runs", plan.reference_runs}, {"budget", plan.reference_budget}};
    j["consensus"] = {{"runs", plan.consensus_runs}, {"budget", plan.consensus_budget}};
    j["stop_at_front"] = plan.stop_at_front;
    return j.dump(2) + "\n";
}

std::vector<Cell> plan_cells(const ExperimentPlan &plan)
{
    std::vector<Cell> cells;
    for (const auto &g : plan.problems)
    {
        const bool has_fns = g.kind == ProblemKind::bot || g.kind == ProblemKind::mo_bot;
        const std::vector<std::size_t> fns_list = has_fns ? g.fns : std::vector<std::size_t>{1};
        for (auto l : g.lengths)
            for (auto fns : fns_list)
                for (std::size_t i = 0; i < g.instances; ++i)
                {
                    Cell c;
                    c.kind = g.kind;
                    c.length = l;
                    c.fns = fns;
                    c.instance = i;
                    c.grid = &g;
                    std::ostringstream id;
                    switch (g.kind)
                    {
                    case ProblemKind::bot:
                        id << "bot_l" << l << "_k" << g.block_size << "_fns" << fns;
                        break;
                    case ProblemKind::maxcut:
                        id << "maxcut_l" << l;
                        break;
                    case ProblemKind::worst_of_maxcuts:
                        id << "wmc_l" << l << "_c" << g.count;
                        break;
                    case ProblemKind::mo_bot:
                        id << "mobot_l" << l << "_k" << g.block_size << "_fns" << fns;
                        break;
                    }
                    id << "_i" << i;
                    c.id = id.str();
                    c.seed = derive_seed(plan.master_seed, "instance:" + c.id);
                    cells.push_back(std::move(c));
                }
    }
    return cells;
}

fs::path instance_path(const ExperimentPlan &plan, const Cell &cell)
{
    return plan.output_dir / "instances" / (cell.id + ".txt");
}

namespace
{

fs::path objective_path(const ExperimentPlan &plan, const Cell &cell, int objective)
{
    return plan.output_dir / "instances" / (cell.id + "_o" + std::to_string(objective) + ".txt");
}

std::vector<fs::path> generate_cell(const ExperimentPlan &plan, const Cell &cell)
{
    const auto &g = *cell.grid;
    const auto path = instance_path(plan, cell);
    try
    {
        switch (cell.kind)
        {
        case ProblemKind::bot:
            write_text_atomic(path, serialize_instance(generate_bot(cell.length, g.block_size, cell.fns, cell.seed)));
            return {path};
        case ProblemKind::maxcut:
            write_text_atomic(path, serialize_instance(generate_maxcut(cell.length, cell.seed)));
            return {path};
        case ProblemKind::worst_of_maxcuts:
            write_text_atomic(path,
                              serialize_instance(generate_worst_of_maxcuts(cell.length, g.count, cell.seed)));
            return {path};
        case ProblemKind::mo_bot:
        {
            std::vector<fs::path> written;
            for (int o = 0; o < 2; ++o)
            {
                auto bot = generate_bot(cell.length, g.block_size, cell.fns, derive_seed(cell.seed, "objective", o));
                write_text_atomic(objective_path(plan, cell, o), serialize_instance(bot));
                written.push_back(objective_path(plan, cell, o));
            }
            std::ostringstream mo;
            mo << "mo " << cell.length << " 2\n"
               << objective_path(plan, cell, 0).filename().generic_string() << '\n'
               << objective_path(plan, cell, 1).filename().generic_string() << '\n';
            write_text_atomic(path, mo.str());
            written.push_back(path);
            return written;
        }
        }
    }
    catch (const fs::filesystem_error &e)
    {
        throw IoError(e.what());
    }
    catch (const std::invalid_argument &e)
    {
        throw UsageError(cell.id + ": " + e.what());
    }
    return {};
}

} // namespace

std::vector<fs::path> cmd_generate(const ExperimentPlan &plan)
{
    std::vector<fs::path> written;
    for (const auto &cell : plan_cells(plan))
    {
        auto w = generate_cell(plan, cell);
        written.insert(written.end(), w.begin(), w.end());
    }
    return written;
}

Objective consensus_value_to_reach(const Instance &instance, std::size_t runs, std::uint64_t budget, std::uint64_t seed)
{
    Objective best = std::numeric_limits<Objective>::min();
    for (std::size_t r = 0; r < std::max<std::size_t>(runs, 1); ++r)
    {
        AlgorithmConfig cfg;
        cfg.model = r % 2 == 0 ? ModelMode::kernel_symmetric : ModelMode::single_tree;
        RunLimits limits;
        limits.evaluations = budget;
        limits.record_time = false;
        auto report = run_with_ims(instance, cfg, ImsConfig{}, limits, derive_seed(seed, "consensus", r));
        if (report.best)
            best = std::max(best, report.best->fitness[0]);
    }
    return best;
}

ReferenceFront compute_reference_front(const MoProblem &problem, std::uint64_t seed, std::size_t runs, std::uint64_t budget)
{
    std::uint64_t index = 0;
    PairSolver solver = [&](const MoProblem &pair) {
        std::vector<std::vector<Solution>> fronts;
        // The optimum of each single-trap side is known; it anchors the extremes.
        std::vector<Solution> anchors;
        for (const auto &obj : pair.objectives)
            if (const auto *bot = std::get_if<BotInstance>(&obj))
                for (const auto &sp : bot->sub_problems)
                    anchors.push_back(Solution{sp.optimum, evaluate(sp.optimum, pair), 0});
        fronts.push_back(non_dominated(anchors));
        const std::pair<MoModel, MoAcceptanceRule> configs[] = {
            {MoModel::objective_clusters, MoAcceptanceRule::domination},
            {MoModel::objective_clusters, MoAcceptanceRule::scalarized},
            {MoModel::kernel_symmetric, MoAcceptanceRule::domination},
            {MoModel::kernel_symmetric, MoAcceptanceRule::scalarized},
        };
        for (const auto &[model, rule] : configs)
            for (std::size_t r = 0; r < std::max<std::size_t>(runs, 1); ++r)
            {
                MoConfig cfg;
                cfg.model = model;
                cfg.acceptance = rule;
                RunLimits limits;
                limits.evaluations = budget;
                limits.record_time = false;
                auto report = run_mo_with_ims(pair, cfg, ImsConfig{}, limits, derive_seed(seed, "reference", index++));
                fronts.push_back(report.archive);
            }
        return std::make_pair(merge_fronts(fronts), false);
    };
    return build_reference_front_bot(problem, solver);
}

std::string report_to_json(const RunReport &report)
{
    json j;
    j["problem_id"] = report.problem_id;
    j["kind"] = report.kind;
    j["length"] = report.length;
    j["fns"] = report.fns;
    j["problem"] = report.problem;
    j["config"] = report.config;
    j["seed"] = report.seed;
    j["budget"] = report.budget;
    j["success"] = report.success;
    j["reason"] = to_string(report.reason);
    j["evaluations"] = report.evaluations;
    j["milliseconds"] = report.milliseconds;
    j["evaluations_to_optimum"] = report.evaluations_to_optimum ? json(*report.evaluations_to_optimum) : json(nullptr);
    j["milliseconds_to_optimum"] =
        report.milliseconds_to_optimum ? json(*report.milliseconds_to_optimum) : json(nullptr);
    j["best_fitness"] = report.best ? json(report.best->fitness[0]) : json(nullptr);
    j["best_genotype"] = report.best ? json(report.best->genotype.to_string()) : json(nullptr);
    j["populations"] = json::array();
    for (std::size_t p = 0; p < report.population_sizes.size(); ++p)
        j["populations"].push_back({{"size", report.population_sizes[p]},
                                    {"active", static_cast<bool>(report.population_active[p])},
                                    {"evaluations", report.population_evaluations[p]},
                                    {"generations", report.population_generations[p]}});
    j["archive_size"] = report.archive.size();
    j["final_hv"] = report.final_hv ? json(*report.final_hv) : json(nullptr);
    j["hv_series"] = json::array();
    for (const auto &[e, hv] : report.hv_series)
        j["hv_series"].push_back({e, hv});
    return j.dump(2) + "\n";
}

RunReport report_from_json(const std::string &text)
{
    const auto j = json::parse(text);
    RunReport r;
    r.problem_id = j.value("problem_id", "");
    r.kind = j.value("kind", "");
    r.length = j.value("length", std::size_t{0});
    r.fns = j.value("fns", std::size_t{0});
    r.problem = j.value("problem", "");
    r.config = j.value("config", "");
    r.seed = j.value("seed", std::uint64_t{0});
    r.budget = j.value("budget", std::uint64_t{0});
    r.success = j.value("success", false);
    const auto reason = j.value("reason", "none");
    for (auto s : {StopReason::none, StopReason::evaluation_budget, StopReason::value_to_reach,
                   StopReason::time_limit, StopReason::front_reached})
        if (to_string(s) == reason)
            r.reason = s;
    r.evaluations = j.value("evaluations", std::uint64_t{0});
    r.milliseconds = j.value("milliseconds", std::int64_t{0});
    if (j.contains("evaluations_to_optimum") && !j["evaluations_to_optimum"].is_null())
        r.evaluations_to_optimum = j["evaluations_to_optimum"].get<std::uint64_t>();
    if (j.contains("milliseconds_to_optimum") && !j["milliseconds_to_optimum"].is_null())
        r.milliseconds_to_optimum = j["milliseconds_to_optimum"].get<std::int64_t>();
    if (j.contains("best_fitness") && !j["best_fitness"].is_null())
    {
        Solution s;
        s.fitness = Fitness(j["best_fitness"].get<Objective>());
        if (j.contains("best_genotype") && j["best_genotype"].is_string())
            s.genotype = Genotype::from_string(j["best_genotype"].get<std::string>());
        r.best = s;
    }
    if (j.contains("populations"))
        for (const auto &p : j["populations"])
        {
            r.population_sizes.push_back(p.value("size", std::size_t{0}));
            r.population_active.push_back(p.value("active", false));
            r.population_evaluations.push_back(p.value("evaluations", std::uint64_t{0}));
            r.population_generations.push_back(p.value("generations", std::size_t{0}));
        }
    if (j.contains("final_hv") && !j["final_hv"].is_null())
        r.final_hv = j["final_hv"].get<double>();
    if (j.contains("hv_series"))
        for (const auto &e : j["hv_series"])
            r.hv_series.emplace_back(e.at(0).get<std::uint64_t>(), e.at(1).get<double>());
    return r;
}

namespace
{

struct Task
{
    const Cell *cell = nullptr;
    std::string algorithm;
    std::optional<ModelMode> so;
    std::optional<MoAlgorithm> mo;
    std::size_t repeat = 0;
    fs::path base;
};

fs::path run_dir(const ExperimentPlan &plan, const Cell &cell, const std::string &algorithm)
{
    return plan.output_dir / "runs" / cell.id / algorithm;
}

// Value-to-reach per cell, cached next to the instance.
Objective cell_value_to_reach(const ExperimentPlan &plan, const Cell &cell, const Instance &instance)
{
    if (cell.grid->value_to_reach)
        return *cell.grid->value_to_reach;
    if (const auto *bot = std::get_if<BotInstance>(&instance))
        return bot_optimum_value(*bot);
    const auto cache = plan.output_dir / "instances" / (cell.id + ".vtr");
    if (fs::exists(cache))
        return std::stoll(read_text(cache));
    Objective v;
    if (length(instance) <= max_exact_length)
        v = solve_exact(instance).value;
    else
        v = consensus_value_to_reach(instance, plan.consensus_runs, plan.consensus_budget,
                                     derive_seed(cell.seed, "consensus"));
    write_text_atomic(cache, std::to_string(v) + "\n");
    return v;
}

std::vector<Solution> cell_reference_front(const ExperimentPlan &plan, const Cell &cell, const MoProblem &problem)
{
    std::ostringstream name;
    name << cell.id << '_' << std::hex << std::setw(16) << std::setfill('0') << cell.seed << ".front";
    const auto cache = plan.output_dir / "fronts" / name.str();
    if (fs::exists(cache))
    {
        std::ifstream in(cache);
        return read_front(in);
    }
    auto ref = compute_reference_front(problem, derive_seed(cell.seed, "reference"), plan.reference_runs,
                                       plan.reference_budget);
    std::ostringstream out;
    out << "# exact " << (ref.exact ? 1 : 0) << '\n';
    write_front(out, ref.front);
    write_text_atomic(cache, out.str());
    return ref.front;
}

} // namespace

RunSummary cmd_run(const ExperimentPlan &plan, std::size_t workers)
{
    const auto cells = plan_cells(plan);
    std::vector<Task> tasks;
    for (const auto &cell : cells)
    {
        auto add = [&](const std::string &algorithm, std::optional<ModelMode> so, std::optional<MoAlgorithm> mo) {
            for (std::size_t r = 0; r < plan.repeats; ++r)
            {
                Task t;
                t.cell = &cell;
                t.algorithm = algorithm;
                t.so = so;
                t.mo = mo;
                t.repeat = r;
                t.base = run_dir(plan, cell, algorithm) / ("r" + std::to_string(r));
                tasks.push_back(std::move(t));
            }
        };
        if (cell.kind == ProblemKind::mo_bot)
            for (const auto &a : plan.mo_algorithms)
                add(a.name(), std::nullopt, a);
        else
            for (auto a : plan.algorithms)
                add(to_string(a), a, std::nullopt);
    }

    RunSummary summary;
    std::vector<Task> pending;
    for (auto &t : tasks)
    {
        auto done = t.base;
        done += ".json";
        if (fs::exists(done))
            ++summary.skipped;
        else
            pending.push_back(std::move(t));
    }

    // Shared per-cell inputs are prepared up front, sequentially.
    std::map<std::string, Instance> instances;
    std::map<std::string, MoProblem> mo_problems;
    std::map<std::string, Objective> targets;
    std::map<std::string, std::vector<Solution>> references;
    for (const auto &t : pending)
    {
        const Cell &cell = *t.cell;
        if (instances.count(cell.id) || mo_problems.count(cell.id))
            continue;
        const auto path = instance_path(plan, cell);
        try
        {
            if (!fs::exists(path))
                generate_cell(plan, cell);
            if (cell.kind == ProblemKind::mo_bot)
            {
                auto problem = load_mo_problem(path);
                references[cell.id] = cell_reference_front(plan, cell, problem);
                mo_problems.emplace(cell.id, std::move(problem));
            }
            else
            {
                auto instance = load_instance(path);
                targets[cell.id] = cell_value_to_reach(plan, cell, instance);
                instances.emplace(cell.id, std::move(instance));
            }
        }
        catch (const ParseError &e)
        {
            throw IoError(path.string() + ":" + std::to_string(e.line()) + ": " + e.what());
        }
        catch (const fs::filesystem_error &e)
        {
            throw IoError(e.what());
        }
    }

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> completed{0};
    std::atomic<std::size_t> failed{0};
    std::mutex log_mutex;
    auto worker = [&] {
        while (true)
        {
            const std::size_t i = next.fetch_add(1);
            if (i >= pending.size())
                return;
            const Task &t = pending[i];
            const Cell &cell = *t.cell;
            auto marker = t.base;
            marker += ".incomplete";
            try
            {
                write_text_atomic(marker, "");
                const std::uint64_t seed = derive_seed(cell.seed, "repeat:" + t.algorithm, t.repeat);
                RunLimits limits;
                limits.evaluations = plan.budget_evaluations;
                limits.time = std::chrono::milliseconds(plan.budget_milliseconds);
                limits.record_time = plan.record_time;
                RunReport report;
                std::string extra;
                if (t.so)
                {
                    limits.value_to_reach = targets.at(cell.id);
                    AlgorithmConfig cfg;
                    cfg.model = *t.so;
                    report = run_with_ims(instances.at(cell.id), cfg, plan.ims, limits, seed);
                    std::ostringstream trace;
                    write_trace(trace, report.trace);
                    auto trace_path = t.base;
                    trace_path += ".trace";
                    write_text_atomic(trace_path, trace.str());
                }
                else
                {
                    limits.stop_at_front = plan.stop_at_front;
                    MoConfig cfg;
                    cfg.model = t.mo->model;
                    cfg.acceptance = t.mo->acceptance;
                    const auto &ref = references.at(cell.id);
                    report = run_mo_with_ims(mo_problems.at(cell.id), cfg, plan.ims, limits, seed, &ref);
                    std::ostringstream front;
                    write_front(front, report.archive);
                    auto front_path = t.base;
                    front_path += ".front";
                    write_text_atomic(front_path, front.str());
                }
                report.problem_id = cell.id;
                report.kind = to_string(cell.kind);
                report.fns = cell.fns;
                report.config = t.algorithm;
                auto json_path = t.base;
                json_path += ".json";
                write_text_atomic(json_path, report_to_json(report));
                fs::remove(marker);
                ++completed;
            }
            catch (const std::exception &e)
            {
                ++failed;
                std::lock_guard lock(log_mutex);
                std::cerr << "run " << t.base.string() << " failed: " << e.what() << '\n';
            }
        }
    };

    workers = std::max<std::size_t>(1, std::min(workers, pending.size()));
    if (workers == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::thread> threads;
        for (std::size_t w = 0; w < workers; ++w)
            threads.emplace_back(worker);
        for (auto &th : threads)
            th.join();
    }
    summary.completed = completed;
    summary.failed = failed;
    return summary;
}

namespace
{

std::string fmt(double v)
{
    std::ostringstream out;
    out << std::setprecision(10) << v;
    return out.str();
}

std::string fmt(const std::optional<double> &v)
{
    return v ? fmt(*v) : "NA";
}

json opt_json(const std::optional<double> &v)
{
    return v ? json(*v) : json(nullptr);
}

struct Loaded
{
    RunReport report;
    fs::path path;
};

// Step-function value of an HV series at `evaluations`.
double hv_at(const RunReport &r, std::uint64_t evaluations)
{
    double hv = 0.0;
    for (const auto &[e, v] : r.hv_series)
    {
        if (e > evaluations)
            break;
        hv = v;
    }
    return hv;
}

double median_of(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

} // namespace

AnalysisSummary cmd_analyze(const fs::path &dir, double alpha)
{
    const auto runs = dir / "runs";
    std::vector<Loaded> loaded;
    if (fs::exists(runs))
    {
        std::vector<fs::path> files;
        for (const auto &entry : fs::recursive_directory_iterator(runs))
            if (entry.is_regular_file() && entry.path().extension() == ".json")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto &f : files)
        {
            try
            {
                loaded.push_back(Loaded{report_from_json(read_text(f)), f});
            }
            catch (const json::exception &e)
            {
                throw IoError("bad report " + f.string() + ": " + e.what());
            }
        }
    }
    if (loaded.empty())
        throw IoError("nothing to analyze in " + dir.string());

    AnalysisSummary out;
    out.reports = loaded.size();
    const auto analysis = dir / "analysis";

    // problem_id -> config -> reports (in file order, i.e. by repeat)
    std::map<std::string, std::map<std::string, std::vector<const Loaded *>>> by_problem;
    for (const auto &l : loaded)
        by_problem[l.report.problem_id][l.report.config].push_back(&l);

    json summary_doc = json::object();
    std::ostringstream summary_tsv;
    summary_tsv << "problem_id\tconfig\truns\tsuccesses\tsuccess_rate\tmedian_evaluations\tp5_evaluations\t"
                   "p95_evaluations\tmedian_ms\tp5_ms\tp95_ms\tmedian_hv\n";

    // Scalability: (kind, fns, config, length) pooled over instances.
    struct ScaleKey
    {
        std::string kind;
        std::size_t fns;
        std::string config;
        std::size_t length;
        auto operator<=>(const ScaleKey &) const = default;
    };
    std::map<ScaleKey, std::vector<const Loaded *>> scale;

    std::ostringstream comparisons;
    comparisons << "problem_id\tmetric\tconfig_a\tconfig_b\tu\tp\tsignificant\tbetter\n";
    std::map<std::string, std::map<std::string, std::size_t>> wins; // metric -> config -> wins

    std::ostringstream hv_series;
    hv_series << "problem_id\tconfig\tevaluations\tmedian_hv\n";

    for (const auto &[problem_id, configs] : by_problem)
    {
        std::vector<std::string> names;
        for (const auto &[config, reports] : configs)
            names.push_back(config);
        const bool mo = configs.begin()->second.front()->report.kind == "mo_bot";

        for (const auto &[config, reports] : configs)
        {
            std::vector<RunOutcome> evals, ms, hvs;
            for (const auto *l : reports)
            {
                const auto &r = l->report;
                evals.push_back(RunOutcome{static_cast<double>(r.evaluations_to_optimum.value_or(r.budget)), !r.success});
                ms.push_back(RunOutcome{static_cast<double>(r.milliseconds_to_optimum.value_or(r.milliseconds)),
                                        !r.success});
                if (r.final_hv)
                    hvs.push_back(RunOutcome{*r.final_hv, false});
                if (!mo)
                    scale[ScaleKey{r.kind, r.fns, config, r.length}].push_back(l);
            }
            const auto se = summarize(evals);
            const auto sm = summarize(ms);
            const auto sh = summarize(hvs, false);
            summary_tsv << problem_id << '\t' << config << '\t' << se.runs << '\t' << se.successes << '\t'
                        << fmt(se.success_rate) << '\t' << fmt(se.median) << '\t' << fmt(se.p5) << '\t'
                        << fmt(se.p95) << '\t' << fmt(sm.median) << '\t' << fmt(sm.p5) << '\t' << fmt(sm.p95) << '\t'
                        << (hvs.empty() ? "NA" : fmt(sh.median)) << '\n';
            summary_doc[problem_id][config] = {
                {"runs", se.runs},
                {"successes", se.successes},
                {"success_rate", se.success_rate},
                {"evaluations", {{"median", opt_json(se.median)}, {"p5", opt_json(se.p5)}, {"p95", opt_json(se.p95)}}},
                {"milliseconds", {{"median", opt_json(sm.median)}, {"p5", opt_json(sm.p5)}, {"p95", opt_json(sm.p95)}}},
                {"hv", hvs.empty() ? json(nullptr) : json({{"median", opt_json(sh.median)}})},
            };

            if (mo)
            {
                std::uint64_t budget = 0;
                for (const auto *l : reports)
                    budget = std::max(budget, l->report.budget);
                std::set<std::uint64_t> grid;
                for (double e = 100.0; e < static_cast<double>(budget); e *= std::sqrt(std::sqrt(10.0)))
                    grid.insert(static_cast<std::uint64_t>(std::llround(e)));
                grid.insert(budget);
                for (auto e : grid)
                {
                    std::vector<double> values;
                    for (const auto *l : reports)
                        values.push_back(hv_at(l->report, e));
                    hv_series << problem_id << '\t' << config << '\t' << e << '\t' << fmt(median_of(values)) << '\n';
                }

                // Merged final front over all runs of this config.
                std::vector<std::vector<Solution>> fronts;
                for (const auto *l : reports)
                {
                    auto front_path = l->path;
                    front_path.replace_extension(".front");
                    if (fs::exists(front_path))
                    {
                        std::ifstream in(front_path);
                        fronts.push_back(read_front(in));
                    }
                }
                std::ostringstream merged;
                write_front(merged, merge_fronts(fronts));
                const auto fp = analysis / "fronts" / (problem_id + "__" + config + ".front");
                write_text_atomic(fp, merged.str());
                out.outputs.push_back(fp);
            }
        }

        auto compare = [&](const std::string &metric, bool lower_is_better, auto value_of) {
            std::vector<std::vector<double>> samples;
            for (const auto &name : names)
            {
                std::vector<double> s;
                for (const auto *l : configs.at(name))
                    s.push_back(value_of(l->report));
                samples.push_back(std::move(s));
            }
            for (const auto &c : pairwise_comparisons(samples, lower_is_better, alpha))
            {
                comparisons << problem_id << '\t' << metric << '\t' << names[c.a] << '\t' << names[c.b] << '\t'
                            << fmt(c.u) << '\t' << fmt(c.p) << '\t' << (c.significant ? 1 : 0) << '\t'
                            << (c.better > 0 ? names[c.a] : c.better < 0 ? names[c.b] : "none") << '\n';
                wins[metric][names[c.a]] += c.significant && c.better > 0;
                wins[metric][names[c.b]] += c.significant && c.better < 0;
            }
        };
        if (names.size() >= 2)
        {
            if (mo)
            {
                compare("hv", false, [](const RunReport &r) { return r.final_hv.value_or(0.0); });
            }
            else
            {
                compare("evaluations", true, [](const RunReport &r) {
                    return static_cast<double>(r.evaluations_to_optimum.value_or(r.budget));
                });
                compare("milliseconds", true, [](const RunReport &r) {
                    return r.milliseconds_to_optimum ? static_cast<double>(*r.milliseconds_to_optimum)
                                                     : std::numeric_limits<double>::infinity();
                });
            }
        }
    }

    std::ostringstream scalability;
    scalability << "kind\tfns\tconfig\tlength\truns\tsuccess_rate\tmedian_evaluations\tp5_evaluations\t"
                   "p95_evaluations\tmedian_ms\tp5_ms\tp95_ms\n";
    for (const auto &[key, reports] : scale)
    {
        std::vector<RunOutcome> evals, ms;
        for (const auto *l : reports)
        {
            const auto &r = l->report;
            evals.push_back(RunOutcome{static_cast<double>(r.evaluations_to_optimum.value_or(r.budget)), !r.success});
            ms.push_back(RunOutcome{static_cast<double>(r.milliseconds_to_optimum.value_or(r.milliseconds)), !r.success});
        }
        const auto se = summarize(evals);
        const auto sm = summarize(ms);
        // Cells whose median run failed are left out of the series.
        if (!se.median)
            continue;
        scalability << key.kind << '\t' << key.fns << '\t' << key.config << '\t' << key.length << '\t' << se.runs
                    << '\t' << fmt(se.success_rate) << '\t' << fmt(se.median) << '\t' << fmt(se.p5) << '\t'
                    << fmt(se.p95) << '\t' << fmt(sm.median) << '\t' << fmt(sm.p5) << '\t' << fmt(sm.p95) << '\n';
    }

    auto emit = [&](const std::string &name, const std::string &text) {
        const auto p = analysis / name;
        write_text_atomic(p, text);
        out.outputs.push_back(p);
    };
    emit("summary.tsv", summary_tsv.str());
    emit("summary.json", summary_doc.dump(2) + "\n");
    emit("scalability.tsv", scalability.str());
    emit("comparisons.tsv", comparisons.str());
    emit("mo_hv_series.tsv", hv_series.str());
    for (const auto &[metric, table] : wins)
    {
        std::vector<std::string> names;
        std::vector<std::size_t> counts;
        for (const auto &[config, count] : table)
        {
            names.push_back(config);
            counts.push_back(count);
        }
        std::ostringstream t;
        t << "config\twins\trank\n";
        for (const auto &row : win_table(counts))
            t << names[row.config] << '\t' << row.wins << '\t' << row.rank << '\n';
        emit("wins_" + metric + ".tsv", t.str());
    }
    return out;
}

} // namespace lkgomea
