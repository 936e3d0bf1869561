#pragma once

#include "lkgomea/types.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lkgomea
{

inline constexpr std::size_t default_block_size = 5;
// solve_exact refuses instances longer than this.
inline constexpr std::size_t max_exact_length = 20;

// Deceptive trap: k at full unitation, k - u - 1 otherwise.
Objective trap(std::size_t unitation, std::size_t block_size);

/**
 * @brief Permuted concatenated deceptive trap with its own optimum.
 *
 * Block i covers variables permutation[i*k .. i*k + k), and unitation counts
 * matches against `optimum` rather than ones.
 */
struct TrapSubProblem
{
    std::vector<std::uint32_t> permutation;
    Genotype optimum;
    std::size_t block_size = default_block_size;

    bool operator==(const TrapSubProblem &) const = default;
};

// Best-of-Traps: the maximum over several trap sub-problems.
struct BotInstance
{
    std::vector<TrapSubProblem> sub_problems;
    std::size_t length = 0;
    std::size_t block_size = default_block_size;
    std::uint64_t seed = 0;

    bool operator==(const BotInstance &) const = default;
};

struct Edge
{
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    Objective weight = 0;

    bool operator==(const Edge &) const = default;
};

struct MaxCutInstance
{
    std::size_t vertex_count = 0;
    std::vector<Edge> edges;
    std::uint64_t seed = 0;

    bool operator==(const MaxCutInstance &) const = default;
};

// Robust MaxCut: the worst cut value over several instances on the same vertex set.
struct WorstOfMaxCutsInstance
{
    std::vector<MaxCutInstance> instances;

    bool operator==(const WorstOfMaxCutsInstance &) const = default;
};

using Instance = std::variant<BotInstance, MaxCutInstance, WorstOfMaxCutsInstance>;

// Two maximized objectives over the same genotype length.
struct MoProblem
{
    std::array<Instance, 2> objectives;
};

class ParseError : public std::runtime_error
{
  public:
    ParseError(std::size_t line, const std::string &what);
    std::size_t line() const
    {
        return line_;
    }

  private:
    std::size_t line_;
};

Objective eval_trap_subproblem(const Genotype &s, const TrapSubProblem &sp);
Objective eval_bot(const Genotype &s, const BotInstance &inst);
Objective eval_maxcut(const Genotype &s, const MaxCutInstance &inst);
Objective eval_worst_of_maxcuts(const Genotype &s, const WorstOfMaxCutsInstance &inst);
Objective evaluate(const Genotype &s, const Instance &inst);
Fitness evaluate(const Genotype &s, const MoProblem &problem);

std::size_t length(const Instance &inst);
std::size_t length(const MoProblem &problem);
// Largest attainable value bound: l for BoT, total edge weight for MaxCut.
Objective upper_bound(const Instance &inst);
// Short human-readable descriptor, e.g. "bot l=20 k=5 fns=2".
std::string describe(const Instance &inst);

BotInstance generate_bot(std::size_t length, std::size_t block_size, std::size_t fns, std::uint64_t seed);
MaxCutInstance generate_maxcut(std::size_t length, std::uint64_t seed);
WorstOfMaxCutsInstance generate_worst_of_maxcuts(std::size_t length, std::size_t count, std::uint64_t seed);
MoProblem make_mo_problem(Instance first, Instance second);

// Known by construction: every sub-problem optimum scores l.
Objective bot_optimum_value(const BotInstance &inst);

struct ExactSolution
{
    Objective value = 0;
    Genotype genotype;
};

// Exhaustive maximization over all 2^l genotypes. Refuses l > max_exact_length.
ExactSolution solve_exact(const Instance &inst);

// Throws std::invalid_argument when a structural invariant is violated.
void validate(const Instance &inst);

std::string serialize_instance(const Instance &inst);
Instance deserialize_instance(std::string_view text);

void save_instance(const std::filesystem::path &path, const Instance &inst);
Instance load_instance(const std::filesystem::path &path);

// MO problem files reference two instance files, relative to the MO file's directory.
void save_mo_problem(const std::filesystem::path &path,
                     std::size_t length,
                     const std::filesystem::path &first,
                     const std::filesystem::path &second);
MoProblem load_mo_problem(const std::filesystem::path &path);

} // namespace lkgomea
