#include "lkgomea/problems.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

namespace lkgomea
{

namespace
{

template <class... Ts> struct overloaded : Ts...
{
    using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

void require_length(const Genotype &s, std::size_t expected)
{
    if (s.size() != expected)
        throw std::invalid_argument("genotype length " + std::to_string(s.size()) + " does not match instance length " +
                                    std::to_string(expected));
}

void validate_bot(const BotInstance &inst)
{
    if (inst.block_size == 0 || inst.length == 0 || inst.length % inst.block_size != 0)
        throw std::invalid_argument("BoT block size must divide the string length");
    if (inst.sub_problems.empty())
        throw std::invalid_argument("BoT needs at least one sub-problem");
    for (const auto &sp : inst.sub_problems)
    {
        if (sp.block_size != inst.block_size || sp.optimum.size() != inst.length ||
            sp.permutation.size() != inst.length)
            throw std::invalid_argument("BoT sub-problem does not match instance dimensions");
        std::vector<bool> seen(inst.length, false);
        for (auto v : sp.permutation)
        {
            if (v >= inst.length || seen[v])
                throw std::invalid_argument("BoT permutation is not a bijection");
            seen[v] = true;
        }
    }
}

void validate_maxcut(const MaxCutInstance &inst)
{
    std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (const auto &e : inst.edges)
    {
        if (e.i >= e.j || e.j >= inst.vertex_count)
            throw std::invalid_argument("MaxCut edge endpoints must satisfy i < j < vertex_count");
        if (e.weight <= 0)
            throw std::invalid_argument("MaxCut edge weights must be positive");
        if (!pairs.emplace(e.i, e.j).second)
            throw std::invalid_argument("MaxCut instance has a duplicate edge");
    }
}

void validate_worst(const WorstOfMaxCutsInstance &inst)
{
    if (inst.instances.size() < 2)
        throw std::invalid_argument("Worst-of-MaxCuts needs at least two instances");
    for (const auto &m : inst.instances)
    {
        if (m.vertex_count != inst.instances.front().vertex_count)
            throw std::invalid_argument("Worst-of-MaxCuts instances must share the vertex count");
        validate_maxcut(m);
    }
}

std::uint64_t instance_seed(const Instance &inst)
{
    return std::visit(overloaded{[](const BotInstance &b) { return b.seed; },
                                 [](const MaxCutInstance &m) { return m.seed; },
                                 [](const WorstOfMaxCutsInstance &w) {
                                     std::uint64_t s = 0;
                                     for (const auto &m : w.instances)
                                         s = mix64(s ^ m.seed);
                                     return s;
                                 }},
                      inst);
}

// -- Text format

class LineReader
{
  public:
    explicit LineReader(std::string_view text) : text_(text)
    {
    }

    // Next non-empty line that is not a plain comment. Seed comments are captured.
    bool next(std::vector<std::string> &tokens)
    {
        std::string line;
        while (read_raw(line))
        {
            tokens = split(line);
            if (tokens.empty())
                continue;
            if (tokens[0] == "#")
            {
                if (tokens.size() == 3 && tokens[1] == "seed")
                    pending_seed_ = parse_u64(tokens[2]);
                continue;
            }
            if (tokens[0].starts_with('#'))
                continue;
            return true;
        }
        return false;
    }

    std::vector<std::string> expect(const char *what)
    {
        std::vector<std::string> tokens;
        if (!next(tokens))
            throw ParseError(line_no_ + 1, std::string("unexpected end of document, expected ") + what);
        return tokens;
    }

    std::uint64_t take_seed()
    {
        std::uint64_t s = pending_seed_;
        pending_seed_ = 0;
        return s;
    }

    std::size_t line() const
    {
        return line_no_;
    }

    std::uint64_t parse_u64(const std::string &token) const
    {
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc() || ptr != token.data() + token.size())
            throw ParseError(line_no_, "expected a non-negative integer, got '" + token + "'");
        return v;
    }

    std::int64_t parse_i64(const std::string &token) const
    {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc() || ptr != token.data() + token.size())
            throw ParseError(line_no_, "expected an integer, got '" + token + "'");
        return v;
    }

  private:
    bool read_raw(std::string &line)
    {
        if (pos_ >= text_.size())
            return false;
        auto end = text_.find('\n', pos_);
        if (end == std::string_view::npos)
            end = text_.size();
        line.assign(text_.substr(pos_, end - pos_));
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        pos_ = end + 1;
        ++line_no_;
        return true;
    }

    static std::vector<std::string> split(const std::string &line)
    {
        std::vector<std::string> out;
        std::istringstream ss(line);
        std::string t;
        while (ss >> t)
            out.push_back(t);
        return out;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_no_ = 0;
    std::uint64_t pending_seed_ = 0;
};

void write_maxcut(std::ostream &out, const MaxCutInstance &m)
{
    out << "maxcut " << m.vertex_count << ' ' << m.edges.size() << '\n';
    out << "# seed " << m.seed << '\n';
    for (const auto &e : m.edges)
        out << e.i << ' ' << e.j << ' ' << e.weight << '\n';
}

MaxCutInstance read_maxcut_body(LineReader &in, const std::vector<std::string> &header)
{
    if (header.size() != 3)
        throw ParseError(in.line(), "maxcut header must be 'maxcut <l> <edge_count>'");
    MaxCutInstance m;
    m.vertex_count = in.parse_u64(header[1]);
    auto edge_count = in.parse_u64(header[2]);
    bool seed_read = false;
    m.edges.reserve(edge_count);
    for (std::uint64_t e = 0; e < edge_count; ++e)
    {
        auto t = in.expect("an edge line 'i j w'");
        if (!seed_read)
        {
            m.seed = in.take_seed();
            seed_read = true;
        }
        if (t.size() != 3)
            throw ParseError(in.line(), "edge line must have exactly three fields");
        Edge edge{static_cast<std::uint32_t>(in.parse_u64(t[0])),
                  static_cast<std::uint32_t>(in.parse_u64(t[1])),
                  in.parse_i64(t[2])};
        m.edges.push_back(edge);
    }
    if (!seed_read)
        m.seed = in.take_seed();
    try
    {
        validate_maxcut(m);
    }
    catch (const std::invalid_argument &e)
    {
        throw ParseError(in.line(), e.what());
    }
    return m;
}

} // namespace

ParseError::ParseError(std::size_t line, const std::string &what) :
    std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
{
}

Objective trap(std::size_t unitation, std::size_t block_size)
{
    if (unitation > block_size)
        throw std::invalid_argument("unitation exceeds block size");
    if (unitation == block_size)
        return static_cast<Objective>(block_size);
    return static_cast<Objective>(block_size - unitation - 1);
}

Objective eval_trap_subproblem(const Genotype &s, const TrapSubProblem &sp)
{
    require_length(s, sp.permutation.size());
    const std::size_t k = sp.block_size;
    Objective total = 0;
    for (std::size_t start = 0; start < sp.permutation.size(); start += k)
    {
        std::size_t u = 0;
        for (std::size_t j = start; j < start + k; ++j)
        {
            auto v = sp.permutation[j];
            u += (s[v] == sp.optimum[v]);
        }
        total += (u == k) ? static_cast<Objective>(k) : static_cast<Objective>(k - u - 1);
    }
    return total;
}

Objective eval_bot(const Genotype &s, const BotInstance &inst)
{
    require_length(s, inst.length);
    Objective best = std::numeric_limits<Objective>::min();
    for (const auto &sp : inst.sub_problems)
        best = std::max(best, eval_trap_subproblem(s, sp));
    return best;
}

Objective eval_maxcut(const Genotype &s, const MaxCutInstance &inst)
{
    require_length(s, inst.vertex_count);
    Objective total = 0;
    for (const auto &e : inst.edges)
        if (s[e.i] != s[e.j])
            total += e.weight;
    return total;
}

Objective eval_worst_of_maxcuts(const Genotype &s, const WorstOfMaxCutsInstance &inst)
{
    Objective worst = std::numeric_limits<Objective>::max();
    for (const auto &m : inst.instances)
        worst = std::min(worst, eval_maxcut(s, m));
    return worst;
}

Objective evaluate(const Genotype &s, const Instance &inst)
{
    return std::visit(overloaded{[&](const BotInstance &b) { return eval_bot(s, b); },
                                 [&](const MaxCutInstance &m) { return eval_maxcut(s, m); },
                                 [&](const WorstOfMaxCutsInstance &w) { return eval_worst_of_maxcuts(s, w); }},
                      inst);
}

Fitness evaluate(const Genotype &s, const MoProblem &problem)
{
    return Fitness(evaluate(s, problem.objectives[0]), evaluate(s, problem.objectives[1]));
}

std::size_t length(const Instance &inst)
{
    return std::visit(overloaded{[](const BotInstance &b) { return b.length; },
                                 [](const MaxCutInstance &m) { return m.vertex_count; },
                                 [](const WorstOfMaxCutsInstance &w) {
                                     return w.instances.empty() ? std::size_t{0} : w.instances.front().vertex_count;
                                 }},
                      inst);
}

std::size_t length(const MoProblem &problem)
{
    return length(problem.objectives[0]);
}

Objective upper_bound(const Instance &inst)
{
    auto total_weight = [](const MaxCutInstance &m) {
        Objective t = 0;
        for (const auto &e : m.edges)
            t += e.weight;
        return t;
    };
    return std::visit(overloaded{[](const BotInstance &b) { return static_cast<Objective>(b.length); },
                                 [&](const MaxCutInstance &m) { return total_weight(m); },
                                 [&](const WorstOfMaxCutsInstance &w) {
                                     Objective t = std::numeric_limits<Objective>::max();
                                     for (const auto &m : w.instances)
                                         t = std::min(t, total_weight(m));
                                     return t;
                                 }},
                      inst);
}

std::string describe(const Instance &inst)
{
    return std::visit(overloaded{[](const BotInstance &b) {
                                     return "bot l=" + std::to_string(b.length) + " k=" + std::to_string(b.block_size) +
                                            " fns=" + std::to_string(b.sub_problems.size());
                                 },
                                 [](const MaxCutInstance &m) { return "maxcut l=" + std::to_string(m.vertex_count); },
                                 [](const WorstOfMaxCutsInstance &w) {
                                     return "worst_of_maxcuts l=" +
                                            std::to_string(w.instances.empty() ? 0 : w.instances[0].vertex_count) +
                                            " count=" + std::to_string(w.instances.size());
                                 }},
                      inst);
}

BotInstance generate_bot(std::size_t length, std::size_t block_size, std::size_t fns, std::uint64_t seed)
{
    if (block_size == 0 || length == 0 || length % block_size != 0)
        throw std::invalid_argument("block size must divide the string length");
    if (fns == 0)
        throw std::invalid_argument("BoT needs at least one sub-problem");
    Rng rng(derive_seed(seed, "bot"));
    BotInstance inst;
    inst.length = length;
    inst.block_size = block_size;
    inst.seed = seed;
    for (std::size_t a = 0; a < fns; ++a)
    {
        TrapSubProblem sp;
        sp.block_size = block_size;
        sp.permutation.resize(length);
        std::iota(sp.permutation.begin(), sp.permutation.end(), 0u);
        rng.shuffle(std::span(sp.permutation));
        sp.optimum = Genotype::random(length, rng);
        inst.sub_problems.push_back(std::move(sp));
    }
    return inst;
}

MaxCutInstance generate_maxcut(std::size_t length, std::uint64_t seed)
{
    if (length < 2)
        throw std::invalid_argument("MaxCut needs at least two vertices");
    Rng rng(derive_seed(seed, "maxcut"));
    MaxCutInstance inst;
    inst.vertex_count = length;
    inst.seed = seed;
    inst.edges.reserve(length * (length - 1) / 2);
    for (std::uint32_t i = 0; i < length; ++i)
        for (std::uint32_t j = i + 1; j < length; ++j)
            inst.edges.push_back(Edge{i, j, rng.between(1, 5)});
    return inst;
}

WorstOfMaxCutsInstance generate_worst_of_maxcuts(std::size_t length, std::size_t count, std::uint64_t seed)
{
    if (count < 2)
        throw std::invalid_argument("Worst-of-MaxCuts needs at least two instances");
    WorstOfMaxCutsInstance inst;
    for (std::size_t c = 0; c < count; ++c)
        inst.instances.push_back(generate_maxcut(length, derive_seed(seed, "worst_of_maxcuts", c)));
    return inst;
}

MoProblem make_mo_problem(Instance first, Instance second)
{
    if (length(first) != length(second))
        throw std::invalid_argument("MO objectives must share the genotype length");
    if (instance_seed(first) == instance_seed(second) && first.index() == second.index())
        throw std::invalid_argument("MO objectives must use different instances");
    return MoProblem{{std::move(first), std::move(second)}};
}

Objective bot_optimum_value(const BotInstance &inst)
{
    return static_cast<Objective>(inst.length);
}

ExactSolution solve_exact(const Instance &inst)
{
    const std::size_t l = length(inst);
    if (l > max_exact_length)
        throw std::invalid_argument("instance too large for exhaustive enumeration (l = " + std::to_string(l) + ")");
    ExactSolution best;
    best.value = std::numeric_limits<Objective>::min();
    Genotype g(l);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << l); ++mask)
    {
        for (std::size_t i = 0; i < l; ++i)
            g[i] = static_cast<std::uint8_t>((mask >> i) & 1);
        Objective v = evaluate(g, inst);
        if (v > best.value)
        {
            best.value = v;
            best.genotype = g;
        }
    }
    return best;
}

void validate(const Instance &inst)
{
    std::visit(overloaded{[](const BotInstance &b) { validate_bot(b); },
                          [](const MaxCutInstance &m) { validate_maxcut(m); },
                          [](const WorstOfMaxCutsInstance &w) { validate_worst(w); }},
               inst);
}

std::string serialize_instance(const Instance &inst)
{
    std::ostringstream out;
    std::visit(overloaded{[&](const BotInstance &b) {
                              out << "bot " << b.length << ' ' << b.block_size << ' ' << b.sub_problems.size() << '\n';
                              out << "# seed " << b.seed << '\n';
                              for (const auto &sp : b.sub_problems)
                              {
                                  for (std::size_t i = 0; i < sp.permutation.size(); ++i)
                                      out << (i ? " " : "") << sp.permutation[i];
                                  out << '\n' << sp.optimum.to_string() << '\n';
                              }
                          },
                          [&](const MaxCutInstance &m) { write_maxcut(out, m); },
                          [&](const WorstOfMaxCutsInstance &w) {
                              out << "worst_of_maxcuts " << length(inst) << ' ' << w.instances.size() << '\n';
                              for (const auto &m : w.instances)
                                  write_maxcut(out, m);
                          }},
               inst);
    return out.str();
}

Instance deserialize_instance(std::string_view text)
{
    LineReader in(text);
    auto header = in.expect("a header line");
    const std::string &kind = header[0];
    if (kind == "bot")
    {
        if (header.size() != 4)
            throw ParseError(in.line(), "bot header must be 'bot <l> <k> <fns>'");
        BotInstance b;
        b.length = in.parse_u64(header[1]);
        b.block_size = in.parse_u64(header[2]);
        auto fns = in.parse_u64(header[3]);
        for (std::uint64_t a = 0; a < fns; ++a)
        {
            TrapSubProblem sp;
            sp.block_size = b.block_size;
            auto perm = in.expect("a permutation line");
            if (a == 0)
                b.seed = in.take_seed();
            if (perm.size() != b.length)
                throw ParseError(in.line(), "permutation line must have l entries");
            for (const auto &t : perm)
                sp.permutation.push_back(static_cast<std::uint32_t>(in.parse_u64(t)));
            auto opt = in.expect("an optimum bit string");
            if (opt.size() != 1 || opt[0].size() != b.length)
                throw ParseError(in.line(), "optimum line must be a single bit string of length l");
            try
            {
                sp.optimum = Genotype::from_string(opt[0]);
            }
            catch (const std::invalid_argument &e)
            {
                throw ParseError(in.line(), e.what());
            }
            b.sub_problems.push_back(std::move(sp));
        }
        try
        {
            validate_bot(b);
        }
        catch (const std::invalid_argument &e)
        {
            throw ParseError(in.line(), e.what());
        }
        return b;
    }
    if (kind == "maxcut")
        return read_maxcut_body(in, header);
    if (kind == "worst_of_maxcuts")
    {
        if (header.size() != 3)
            throw ParseError(in.line(), "worst_of_maxcuts header must be 'worst_of_maxcuts <l> <count>'");
        auto l = in.parse_u64(header[1]);
        auto count = in.parse_u64(header[2]);
        WorstOfMaxCutsInstance w;
        for (std::uint64_t c = 0; c < count; ++c)
        {
            auto sub = in.expect("a maxcut header");
            if (sub[0] != "maxcut")
                throw ParseError(in.line(), "expected a nested maxcut instance");
            w.instances.push_back(read_maxcut_body(in, sub));
            if (w.instances.back().vertex_count != l)
                throw ParseError(in.line(), "nested maxcut vertex count differs from header");
        }
        try
        {
            validate_worst(w);
        }
        catch (const std::invalid_argument &e)
        {
            throw ParseError(in.line(), e.what());
        }
        return w;
    }
    throw ParseError(in.line(), "unknown instance kind '" + kind + "'");
}

void save_instance(const std::filesystem::path &path, const Instance &inst)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << serialize_instance(inst);
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

namespace
{
std::string read_file(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
} // namespace

Instance load_instance(const std::filesystem::path &path)
{
    return deserialize_instance(read_file(path));
}

void save_mo_problem(const std::filesystem::path &path,
                     std::size_t length,
                     const std::filesystem::path &first,
                     const std::filesystem::path &second)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "mo " << length << " 2\n" << first.generic_string() << '\n' << second.generic_string() << '\n';
}

MoProblem load_mo_problem(const std::filesystem::path &path)
{
    auto text = read_file(path);
    LineReader in(text);
    auto header = in.expect("a header line");
    if (header.size() != 3 || header[0] != "mo" || header[2] != "2")
        throw ParseError(in.line(), "mo header must be 'mo <l> 2'");
    auto l = in.parse_u64(header[1]);
    std::array<Instance, 2> objectives;
    for (auto &obj : objectives)
    {
        auto ref = in.expect("an instance path");
        if (ref.size() != 1)
            throw ParseError(in.line(), "instance reference must be a single path");
        std::filesystem::path p = ref[0];
        if (p.is_relative())
            p = path.parent_path() / p;
        obj = load_instance(p);
        if (length(obj) != l)
            throw ParseError(in.line(), "referenced instance length differs from header");
    }
    return make_mo_problem(std::move(objectives[0]), std::move(objectives[1]));
}

} // namespace lkgomea
