#include "lkgomea/experiment.hpp"
#include "lkgomea/ims.hpp"
#include "lkgomea/linkage.hpp"
#include "lkgomea/metrics.hpp"
#include "lkgomea/mo.hpp"
#include "lkgomea/neighborhoods.hpp"
#include "lkgomea/problems.hpp"
#include "lkgomea/stats.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace lkgomea;

namespace
{

// Opaque holder: the variant itself would be unpacked by the stl casters.
struct InstanceHandle
{
    Instance value;
};

std::vector<Genotype> genotypes(const std::vector<std::string> &bits)
{
    std::vector<Genotype> out;
    out.reserve(bits.size());
    for (const auto &b : bits)
        out.push_back(Genotype::from_string(b));
    return out;
}

std::vector<Solution> front_of(const std::vector<std::pair<Objective, Objective>> &points)
{
    std::vector<Solution> out;
    for (auto [a, b] : points)
        out.push_back(Solution{Genotype{}, Fitness(a, b), 0});
    return out;
}

py::dict report_dict(const RunReport &r)
{
    py::dict d;
    d["problem"] = r.problem;
    d["config"] = r.config;
    d["seed"] = r.seed;
    d["success"] = r.success;
    d["reason"] = to_string(r.reason);
    d["evaluations"] = r.evaluations;
    d["milliseconds"] = r.milliseconds;
    d["evaluations_to_optimum"] = r.evaluations_to_optimum;
    d["best_fitness"] = r.best ? py::object(py::int_(r.best->fitness[0])) : py::object(py::none());
    d["best_genotype"] = r.best ? py::object(py::str(r.best->genotype.to_string())) : py::object(py::none());
    d["population_sizes"] = r.population_sizes;
    d["population_evaluations"] = r.population_evaluations;
    py::list trace;
    for (const auto &t : r.trace)
        trace.append(py::make_tuple(t.evaluations, t.milliseconds, t.fitness));
    d["trace"] = trace;
    py::list archive;
    for (const auto &s : r.archive)
        archive.append(py::make_tuple(s.fitness[0], s.fitness[1], s.genotype.to_string()));
    d["archive"] = archive;
    d["hv_series"] = r.hv_series;
    d["final_hv"] = r.final_hv;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Linkage-kernel GOMEA core";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<StopRun>(m, "StopRun");

    py::class_<InstanceHandle>(m, "Instance")
        .def_property_readonly("length", [](const InstanceHandle &i) { return length(i.value); })
        .def("evaluate",
             [](const InstanceHandle &i, const std::string &bits) {
                 return evaluate(Genotype::from_string(bits), i.value);
             })
        .def("serialize", [](const InstanceHandle &i) { return serialize_instance(i.value); })
        .def("__repr__", [](const InstanceHandle &i) { return "<Instance " + describe(i.value) + ">"; });

    m.def("trap", &trap, py::arg("unitation"), py::arg("block_size"));
    m.def(
        "generate_bot",
        [](std::size_t l, std::size_t k, std::size_t fns, std::uint64_t seed) {
            return InstanceHandle{generate_bot(l, k, fns, seed)};
        },
        py::arg("length"), py::arg("block_size") = default_block_size, py::arg("fns") = 1, py::arg("seed") = 0);
    m.def(
        "generate_maxcut", [](std::size_t l, std::uint64_t seed) { return InstanceHandle{generate_maxcut(l, seed)}; },
        py::arg("length"), py::arg("seed") = 0);
    m.def(
        "generate_worst_of_maxcuts",
        [](std::size_t l, std::size_t count, std::uint64_t seed) {
            return InstanceHandle{generate_worst_of_maxcuts(l, count, seed)};
        },
        py::arg("length"), py::arg("count") = 2, py::arg("seed") = 0);
    m.def("deserialize_instance", [](const std::string &text) { return InstanceHandle{deserialize_instance(text)}; });
    m.def("solve_exact", [](const InstanceHandle &i) {
        auto e = solve_exact(i.value);
        return py::make_tuple(e.value, e.genotype.to_string());
    });

    m.def(
        "learn_model",
        [](const std::vector<std::string> &population, double eps) {
            auto pop = genotypes(population);
            std::vector<std::vector<std::uint32_t>> out;
            for (const auto &s : learn_model(std::span<const Genotype>(pop), eps).subsets)
                out.push_back(s.indices);
            return out;
        },
        py::arg("population"), py::arg("eps") = default_filter_eps);
    m.def("pairwise_nmi", [](const std::vector<std::string> &population) {
        auto pop = genotypes(population);
        auto nmi = pairwise_nmi(std::span<const Genotype>(pop));
        std::vector<std::vector<double>> out(nmi.size(), std::vector<double>(nmi.size()));
        for (std::size_t i = 0; i < nmi.size(); ++i)
            for (std::size_t j = 0; j < nmi.size(); ++j)
                out[i][j] = nmi(i, j);
        return out;
    });
    m.def(
        "neighborhoods",
        [](const std::vector<std::string> &population, std::size_t k, bool symmetric, std::uint64_t seed) {
            auto pop = genotypes(population);
            Rng rng(seed);
            return compute_neighborhoods(std::span<const Genotype>(pop), k,
                                         symmetric ? NeighborhoodMode::symmetric : NeighborhoodMode::asymmetric, rng)
                .members;
        },
        py::arg("population"), py::arg("k"), py::arg("symmetric") = false, py::arg("seed") = 0);

    m.def(
        "run",
        [](const InstanceHandle &instance, const std::string &model, std::uint64_t budget,
           std::optional<Objective> value_to_reach, std::uint64_t seed, bool record_time) {
            AlgorithmConfig cfg;
            cfg.model = parse_model_mode(model);
            RunLimits limits;
            limits.evaluations = budget;
            limits.value_to_reach = value_to_reach;
            limits.record_time = record_time;
            RunReport r;
            {
                py::gil_scoped_release release;
                r = run_with_ims(instance.value, cfg, ImsConfig{}, limits, seed);
            }
            return report_dict(r);
        },
        py::arg("instance"), py::arg("model") = "lk-sym", py::arg("budget") = 1'000'000,
        py::arg("value_to_reach") = py::none(), py::arg("seed") = 0, py::arg("record_time") = true);
    m.def(
        "run_mo",
        [](const InstanceHandle &first, const InstanceHandle &second, const std::string &model,
           const std::string &acceptance,
           std::uint64_t budget, std::uint64_t seed, bool with_reference) {
            auto problem = make_mo_problem(first.value, second.value);
            MoConfig cfg;
            cfg.model = parse_mo_model(model);
            cfg.acceptance = parse_mo_acceptance(acceptance);
            RunLimits limits;
            limits.evaluations = budget;
            limits.stop_at_front = with_reference;
            limits.record_time = false;
            RunReport r;
            {
                py::gil_scoped_release release;
                std::vector<Solution> reference;
                if (with_reference)
                    reference = compute_reference_front(problem, derive_seed(seed, "reference"), 1, 1'000'000).front;
                r = run_mo_with_ims(problem, cfg, ImsConfig{}, limits, seed, with_reference ? &reference : nullptr);
            }
            return report_dict(r);
        },
        py::arg("first"), py::arg("second"), py::arg("model") = "lk-sym", py::arg("acceptance") = "scalarized",
        py::arg("budget") = 100'000, py::arg("seed") = 0, py::arg("with_reference") = false);

    m.def("hypervolume_2d", [](const std::vector<Point> &front, const Point &reference) {
        return hypervolume_2d(front, reference);
    });
    m.def("normalized_hv", [](const std::vector<std::pair<Objective, Objective>> &front,
                              const std::vector<std::pair<Objective, Objective>> &reference) {
        return normalized_hv(front_of(front), front_of(reference));
    });
    m.def("pareto_front", [](const InstanceHandle &first, const InstanceHandle &second) {
        std::vector<std::pair<Objective, Objective>> out;
        for (const auto &s : enumerate_pareto_front(make_mo_problem(first.value, second.value)))
            out.emplace_back(s.fitness[0], s.fitness[1]);
        return out;
    });

    m.def("mann_whitney_u", [](const std::vector<double> &a, const std::vector<double> &b) {
        auto r = mann_whitney_u(a, b);
        return py::make_tuple(r.u, r.p);
    });
    m.def(
        "holm_bonferroni", [](const std::vector<double> &p, double alpha) { return holm_bonferroni(p, alpha); },
        py::arg("p_values"), py::arg("alpha") = 0.05);
}
