#pragma once

// Run specification: UTF-8 text, one `key = value` per line (or several on a
// line separated by ';'), '#' starts a comment, and two sections:
//
//   [lambda_range]   from = A, to = B, steps = N   (N points, ends included)
//   [mask]           rows of 0/1 cells, first row is y = 0
//
// Top-level keys:
//   domain        rectangle NX NY H | square N | chain N H | mask H
//   potential     constant C | values V0 V1 ... | expr EXPRESSION(x, y)
//   command       spectrum | maps | verify | sweep | friedlander
//   lambda, mu    comma-separated expressions, complex allowed (20+3i)
//   tol           rank-decision tolerance (1e-10)
//   zero_tol      κ zero threshold, <0 = relative default (1e-8 relative)
//   check_tol     pass threshold of identity checks (1e-9)
//   relation_tol  rank decisions inside the identity suite (1e-8)
//   lowest        number of eigenvalues listed by convergence rows (6)
//   extend        add every eigenvalue of A_D, A_N to the verify λ set (true)
//   derivative    run derivative checks in verify (true)
//   ttprop_trials random B^*A^{-1}B instances added to verify (0)
//   convergence   spectrum only: cells per unit length, increasing (8, 16, 32)
//   seed, threads, out
//   corrupt       debug: break the symmetry of S by this relative amount (0)

#include "dnrel/cli/expression.hpp"
#include "dnrel/grid/model.hpp"
#include "dnrel/parallel.hpp"

#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace dnrel::cli {

/// Syntax or validation error. line/column are 1-based; 0 when not tied to a
/// position (missing keys).
class RunSpecError : public std::invalid_argument {
public:
    RunSpecError(const std::string& what, int line, int column, std::string field = {})
        : std::invalid_argument(format(what, line, column)), line_(line), column_(column), field_(std::move(field))
    {
    }
    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& field() const { return field_; }

private:
    static std::string format(const std::string& what, int line, int column)
    {
        if (line == 0) return what;
        return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
    }
    int line_, column_;
    std::string field_;
};

enum class Command { spectrum, maps, verify, sweep, friedlander };

inline const char* to_string(Command c)
{
    switch (c) {
    case Command::spectrum: return "spectrum";
    case Command::maps: return "maps";
    case Command::verify: return "verify";
    case Command::sweep: return "sweep";
    case Command::friedlander: return "friedlander";
    }
    return "?";
}

struct DomainSpec {
    enum class Kind { rectangle, chain, mask } kind = Kind::rectangle;
    int nx = 0, ny = 0;  // rectangle cells, or chain node count in nx
    double h = 0.0;
    grid::CellMask mask;

    bool is_square() const { return kind == Kind::rectangle && nx == ny; }
};

struct PotentialSpec {
    enum class Kind { constant, values, expr } kind = Kind::constant;
    double constant = 0.0;
    std::vector<double> values;
    std::string expr;
};

struct LambdaRange {
    double from = 0.0, to = 0.0;
    int steps = 1;

    /// steps points from `from` to `to`, both included.
    std::vector<double> points() const
    {
        std::vector<double> p(static_cast<std::size_t>(steps));
        for (int k = 0; k < steps; ++k)
            p[static_cast<std::size_t>(k)] = steps == 1 ? from : from + (to - from) * k / (steps - 1);
        return p;
    }
};

struct RunSpec {
    DomainSpec domain;
    PotentialSpec potential;
    Command command = Command::spectrum;
    std::vector<Complex> lambdas;
    std::vector<Complex> mus;
    std::optional<LambdaRange> range;
    double tol = 1e-10;
    double zero_tol = -1.0;
    double check_tol = 1e-9;
    double relation_tol = 1e-8;
    int lowest = 6;
    bool extend = true;
    bool derivative = true;
    int ttprop_trials = 0;
    std::vector<int> convergence_cells;
    std::uint64_t seed = 1;
    unsigned threads = 0;  // 0: default_thread_count()
    std::string out = ".";
    double corrupt = 0.0;

    /// Explicit λ values followed by the range points, real ones first
    /// (order as given).
    std::vector<Complex> all_lambdas() const
    {
        std::vector<Complex> v = lambdas;
        if (range)
            for (double x : range->points()) v.emplace_back(x, 0.0);
        return v;
    }
};

namespace detail {

struct Cursor {
    int line;
    int column;  // of the first character of `text`
    std::string text;
};

inline std::string trim(const std::string& s, std::size_t* lead = nullptr)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        if (lead) *lead = s.size();
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    if (lead) *lead = b;
    return s.substr(b, e - b + 1);
}

/// Whitespace-separated words with their columns.
inline std::vector<Cursor> words(const Cursor& c)
{
    std::vector<Cursor> out;
    std::size_t i = 0;
    while (i < c.text.size()) {
        while (i < c.text.size() && std::isspace(static_cast<unsigned char>(c.text[i]))) ++i;
        const std::size_t b = i;
        while (i < c.text.size() && !std::isspace(static_cast<unsigned char>(c.text[i]))) ++i;
        if (i > b) out.push_back({c.line, c.column + static_cast<int>(b), c.text.substr(b, i - b)});
    }
    return out;
}

inline Complex complex_value(const Cursor& c, const std::string& field)
{
    try {
        const auto v = Expression(c.text).eval();
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw RunSpecError("value of '" + field + "' is not finite", c.line, c.column, field);
        return v;
    } catch (const ExpressionError& e) {
        throw RunSpecError(std::string(e.what()) + " in value of '" + field + "'", c.line,
                           c.column + static_cast<int>(e.offset()), field);
    }
}

inline double real_value(const Cursor& c, const std::string& field)
{
    const Complex v = complex_value(c, field);
    if (v.imag() != 0.0) throw RunSpecError("'" + field + "' must be real", c.line, c.column, field);
    return v.real();
}

inline long integer_value(const Cursor& c, const std::string& field)
{
    const double v = real_value(c, field);
    if (v != std::round(v) || std::abs(v) > 1e15)
        throw RunSpecError("'" + field + "' must be an integer", c.line, c.column, field);
    return static_cast<long>(v);
}

inline bool bool_value(const Cursor& c, const std::string& field)
{
    if (c.text == "true" || c.text == "yes" || c.text == "1") return true;
    if (c.text == "false" || c.text == "no" || c.text == "0") return false;
    throw RunSpecError("'" + field + "' must be true or false", c.line, c.column, field);
}

/// Comma-separated list of expressions.
inline std::vector<Complex> complex_list(const Cursor& c, const std::string& field)
{
    std::vector<Complex> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = c.text.find(',', start);
        const std::string piece = c.text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        std::size_t lead = 0;
        const std::string t = trim(piece, &lead);
        const int col = c.column + static_cast<int>(start + lead);
        if (t.empty()) throw RunSpecError("empty entry in list '" + field + "'", c.line, col, field);
        out.push_back(complex_value({c.line, col, t}, field));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

inline void expect_words(const std::vector<Cursor>& w, std::size_t n, const Cursor& value, const std::string& usage)
{
    if (w.size() != n)
        throw RunSpecError("expected '" + usage + "'", value.line, w.size() > n ? w[n].column : value.column + static_cast<int>(value.text.size()), "domain");
}

inline DomainSpec parse_domain(const Cursor& v)
{
    const auto w = words(v);
    if (w.empty()) throw RunSpecError("empty domain", v.line, v.column, "domain");
    DomainSpec d;
    const std::string& kind = w[0].text;
    const auto positive_h = [&](const Cursor& c) {
        const double h = real_value(c, "domain");
        if (!(h > 0.0)) throw RunSpecError("grid spacing h must be positive", c.line, c.column, "domain");
        return h;
    };
    if (kind == "rectangle") {
        expect_words(w, 4, v, "rectangle NX NY H");
        d.kind = DomainSpec::Kind::rectangle;
        d.nx = static_cast<int>(integer_value(w[1], "domain"));
        d.ny = static_cast<int>(integer_value(w[2], "domain"));
        d.h = positive_h(w[3]);
    } else if (kind == "square") {
        expect_words(w, 2, v, "square N");
        d.kind = DomainSpec::Kind::rectangle;
        d.nx = d.ny = static_cast<int>(integer_value(w[1], "domain"));
        if (d.nx < 1) throw RunSpecError("square needs N >= 1", w[1].line, w[1].column, "domain");
        d.h = 1.0 / d.nx;
    } else if (kind == "chain") {
        expect_words(w, 3, v, "chain N H");
        d.kind = DomainSpec::Kind::chain;
        d.nx = static_cast<int>(integer_value(w[1], "domain"));
        d.h = positive_h(w[2]);
    } else if (kind == "mask") {
        expect_words(w, 2, v, "mask H");
        d.kind = DomainSpec::Kind::mask;
        d.h = positive_h(w[1]);
    } else {
        throw RunSpecError("unknown domain kind '" + kind + "' (rectangle, square, chain, mask)", w[0].line,
                           w[0].column, "domain");
    }
    return d;
}

inline PotentialSpec parse_potential(const Cursor& v)
{
    const auto w = words(v);
    if (w.empty()) throw RunSpecError("empty potential", v.line, v.column, "potential");
    PotentialSpec p;
    const std::string& kind = w[0].text;
    if (kind == "constant") {
        expect_words(w, 2, v, "constant C");
        p.kind = PotentialSpec::Kind::constant;
        p.constant = real_value(w[1], "potential");
    } else if (kind == "values") {
        p.kind = PotentialSpec::Kind::values;
        for (std::size_t i = 1; i < w.size(); ++i) p.values.push_back(real_value(w[i], "potential"));
        if (p.values.empty()) throw RunSpecError("'values' needs at least one number", v.line, v.column, "potential");
    } else if (kind == "expr") {
        if (w.size() < 2) throw RunSpecError("'expr' needs an expression", v.line, v.column, "potential");
        const int off = w[1].column - v.column;
        p.kind = PotentialSpec::Kind::expr;
        p.expr = v.text.substr(static_cast<std::size_t>(off));
        try {
            Expression e(p.expr);
            (void)e;
        } catch (const ExpressionError& e) {
            throw RunSpecError(std::string(e.what()) + " in potential expression", v.line,
                               w[1].column + static_cast<int>(e.offset()), "potential");
        }
    } else {
        throw RunSpecError("unknown potential kind '" + kind + "' (constant, values, expr)", w[0].line, w[0].column,
                           "potential");
    }
    return p;
}

inline Command parse_command(const Cursor& v)
{
    static const std::pair<const char*, Command> names[] = {{"spectrum", Command::spectrum},
                                                            {"maps", Command::maps},
                                                            {"verify", Command::verify},
                                                            {"sweep", Command::sweep},
                                                            {"friedlander", Command::friedlander}};
    for (const auto& [n, c] : names)
        if (v.text == n) return c;
    throw RunSpecError("unknown command '" + v.text + "' (spectrum, maps, verify, sweep, friedlander)", v.line,
                       v.column, "command");
}

}  // namespace detail

/// Parses and validates a run specification.
inline RunSpec parse_runspec(const std::string& text)
{
    using detail::Cursor;
    RunSpec spec;
    std::set<std::string> seen;
    std::string section;
    bool have_domain = false, have_command = false;
    int mask_line = 0;
    std::optional<double> r_from, r_to;
    std::optional<long> r_steps;
    Cursor range_anchor{0, 0, ""};

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (line_no == 1 && raw.starts_with("\xEF\xBB\xBF")) raw = std::string(3, ' ') + raw.substr(3);
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::size_t lead = 0;
        const std::string line = detail::trim(raw, &lead);
        if (line.empty()) continue;
        const int line_col = static_cast<int>(lead) + 1;

        if (line.front() == '[') {
            if (line.back() != ']') throw RunSpecError("unterminated section header", line_no, line_col);
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section != "lambda_range" && section != "mask")
                throw RunSpecError("unknown section '" + section + "' (lambda_range, mask)", line_no, line_col + 1,
                                   section);
            if (!seen.insert("[" + section + "]").second)
                throw RunSpecError("section [" + section + "] given twice", line_no, line_col, section);
            if (section == "lambda_range") range_anchor = {line_no, line_col, line};
            if (section == "mask") mask_line = line_no;
            continue;
        }

        if (section == "mask") {
            std::vector<bool> row;
            for (std::size_t i = 0; i < line.size(); ++i) {
                const char ch = line[i];
                if (ch == '1') row.push_back(true);
                else if (ch == '0') row.push_back(false);
                else if (ch != ' ' && ch != '\t' && ch != ',')
                    throw RunSpecError("mask rows may contain only 0 and 1", line_no, line_col + static_cast<int>(i),
                                       "mask");
            }
            if (!spec.domain.mask.empty() && row.size() != spec.domain.mask.front().size())
                throw RunSpecError("mask row has " + std::to_string(row.size()) + " cells, expected " +
                                       std::to_string(spec.domain.mask.front().size()),
                                   line_no, line_col, "mask");
            spec.domain.mask.push_back(std::move(row));
            continue;
        }

        // key = value statements, ';'-separated.
        std::size_t start = 0;
        while (start <= line.size()) {
            const auto semi = line.find(';', start);
            const std::string stmt = line.substr(start, semi == std::string::npos ? std::string::npos : semi - start);
            std::size_t slead = 0;
            const std::string st = detail::trim(stmt, &slead);
            const int st_col = line_col + static_cast<int>(start + slead);
            if (!st.empty()) {
                const auto eq = st.find('=');
                if (eq == std::string::npos) throw RunSpecError("expected 'key = value'", line_no, st_col);
                const std::string key = detail::trim(st.substr(0, eq));
                std::size_t vlead = 0;
                const std::string val = detail::trim(st.substr(eq + 1), &vlead);
                const Cursor v{line_no, st_col + static_cast<int>(eq + 1 + vlead), val};
                if (key.empty()) throw RunSpecError("missing key before '='", line_no, st_col);
                if (val.empty()) throw RunSpecError("missing value for '" + key + "'", line_no, v.column, key);
                const std::string qualified = section.empty() ? key : section + "." + key;
                if (!seen.insert(qualified).second)
                    throw RunSpecError("key '" + key + "' given twice", line_no, st_col, key);

                if (section == "lambda_range") {
                    if (key == "from") r_from = detail::real_value(v, "from");
                    else if (key == "to") r_to = detail::real_value(v, "to");
                    else if (key == "steps") r_steps = detail::integer_value(v, "steps");
                    else throw RunSpecError("unknown key '" + key + "' in [lambda_range] (from, to, steps)", line_no, st_col, key);
                } else if (key == "domain") {
                    spec.domain = [&] { auto d = detail::parse_domain(v); d.mask = spec.domain.mask; return d; }();
                    have_domain = true;
                } else if (key == "potential") {
                    spec.potential = detail::parse_potential(v);
                } else if (key == "command") {
                    spec.command = detail::parse_command(v);
                    have_command = true;
                } else if (key == "lambda") {
                    spec.lambdas = detail::complex_list(v, key);
                } else if (key == "mu") {
                    spec.mus = detail::complex_list(v, key);
                } else if (key == "tol" || key == "check_tol" || key == "relation_tol") {
                    const double x = detail::real_value(v, key);
                    if (!(x > 0.0)) throw RunSpecError("'" + key + "' must be positive", line_no, v.column, key);
                    (key == "tol" ? spec.tol : key == "check_tol" ? spec.check_tol : spec.relation_tol) = x;
                } else if (key == "zero_tol") {
                    spec.zero_tol = detail::real_value(v, key);
                } else if (key == "lowest") {
                    const long n = detail::integer_value(v, key);
                    if (n < 1) throw RunSpecError("'lowest' must be at least 1", line_no, v.column, key);
                    spec.lowest = static_cast<int>(n);
                } else if (key == "extend") {
                    spec.extend = detail::bool_value(v, key);
                } else if (key == "derivative") {
                    spec.derivative = detail::bool_value(v, key);
                } else if (key == "ttprop_trials") {
                    const long n = detail::integer_value(v, key);
                    if (n < 0) throw RunSpecError("'ttprop_trials' must be >= 0", line_no, v.column, key);
                    spec.ttprop_trials = static_cast<int>(n);
                } else if (key == "convergence") {
                    for (Complex z : detail::complex_list(v, key)) {
                        if (z.imag() != 0.0 || z.real() != std::round(z.real()) || z.real() < 2)
                            throw RunSpecError("'convergence' entries must be integers >= 2", line_no, v.column, key);
                        if (!spec.convergence_cells.empty() && z.real() <= spec.convergence_cells.back())
                            throw RunSpecError("'convergence' must increase (h decreasing)", line_no, v.column, key);
                        spec.convergence_cells.push_back(static_cast<int>(z.real()));
                    }
                } else if (key == "seed") {
                    const long n = detail::integer_value(v, key);
                    if (n < 0) throw RunSpecError("'seed' must be >= 0", line_no, v.column, key);
                    spec.seed = static_cast<std::uint64_t>(n);
                } else if (key == "threads") {
                    const long n = detail::integer_value(v, key);
                    if (n < 0) throw RunSpecError("'threads' must be >= 0", line_no, v.column, key);
                    spec.threads = static_cast<unsigned>(n);
                } else if (key == "out") {
                    spec.out = val;
                } else if (key == "corrupt") {
                    spec.corrupt = detail::real_value(v, key);
                } else {
                    throw RunSpecError("unknown key '" + key + "'", line_no, st_col, key);
                }
            }
            if (semi == std::string::npos) break;
            start = semi + 1;
        }
    }

    if (!have_domain) throw RunSpecError("missing required key 'domain'", 0, 0, "domain");
    if (!have_command) throw RunSpecError("missing required key 'command'", 0, 0, "command");
    if (spec.domain.kind == DomainSpec::Kind::mask && spec.domain.mask.empty())
        throw RunSpecError("domain 'mask' needs a [mask] section", 0, 0, "mask");
    if (spec.domain.kind != DomainSpec::Kind::mask && mask_line != 0)
        throw RunSpecError("[mask] section given for a non-mask domain", mask_line, 1, "mask");

    if (seen.contains("[lambda_range]")) {
        const auto missing = [&](const char* k) {
            return RunSpecError(std::string("[lambda_range] is missing '") + k + "'", range_anchor.line,
                                range_anchor.column, k);
        };
        if (!r_from) throw missing("from");
        if (!r_to) throw missing("to");
        if (!r_steps) throw missing("steps");
        if (*r_steps < 1) throw RunSpecError("'steps' must be at least 1", range_anchor.line, range_anchor.column, "steps");
        if (*r_from > *r_to) throw RunSpecError("'from' must not exceed 'to'", range_anchor.line, range_anchor.column, "from");
        if (*r_steps == 1 && *r_from != *r_to)
            throw RunSpecError("steps = 1 needs from = to", range_anchor.line, range_anchor.column, "steps");
        spec.range = LambdaRange{*r_from, *r_to, static_cast<int>(*r_steps)};
    }
    if (spec.command != Command::spectrum && spec.all_lambdas().empty() &&
        !(spec.command == Command::verify && spec.extend))
        throw RunSpecError(std::string("command '") + to_string(spec.command) + "' needs 'lambda' or [lambda_range]", 0,
                           0, "lambda");
    for (const Complex& z : spec.all_lambdas())
        if (z.imag() != 0.0 && spec.command != Command::verify && spec.command != Command::maps)
            throw RunSpecError(std::string("command '") + to_string(spec.command) + "' needs real lambda values", 0, 0,
                               "lambda");
    return spec;
}

/// Node-order potential for the domain.
inline Eigen::VectorXd potential_values(const RunSpec& spec, const grid::GridDomain& dom)
{
    const Index n = dom.node_count();
    switch (spec.potential.kind) {
    case PotentialSpec::Kind::constant: return Eigen::VectorXd::Constant(n, spec.potential.constant);
    case PotentialSpec::Kind::values: {
        if (static_cast<Index>(spec.potential.values.size()) != n)
            throw RunSpecError("potential has " + std::to_string(spec.potential.values.size()) + " values for " +
                                   std::to_string(n) + " nodes",
                               0, 0, "potential");
        return Eigen::Map<const Eigen::VectorXd>(spec.potential.values.data(), n);
    }
    case PotentialSpec::Kind::expr: {
        const Expression e(spec.potential.expr);
        Eigen::VectorXd v(n);
        for (Index i = 0; i < n; ++i) {
            const auto [x, y] = dom.position(i);
            const auto z = e.eval(x, y);
            if (z.imag() != 0.0 || !std::isfinite(z.real()))
                throw RunSpecError("potential must be real and finite (node " + std::to_string(i) + ")", 0, 0,
                                   "potential");
            v(i) = z.real();
        }
        return v;
    }
    }
    return {};
}

inline grid::GridDomain build_domain(const DomainSpec& d)
{
    switch (d.kind) {
    case DomainSpec::Kind::rectangle: return grid::build_rectangle(d.nx, d.ny, d.h);
    case DomainSpec::Kind::chain: return grid::build_chain(d.nx, d.h);
    case DomainSpec::Kind::mask: return grid::build_masked(d.mask, d.h);
    }
    throw std::logic_error("unknown domain kind");
}

/// The model described by the spec, with the debug corruption applied.
inline grid::DiscreteModel build_model(const RunSpec& spec)
{
    auto dom = build_domain(spec.domain);
    auto v = potential_values(spec, dom);
    auto model = grid::assemble(std::move(dom), std::move(v));
    if (spec.corrupt != 0.0) return grid::corrupt_symmetry(model, spec.corrupt);
    return model;
}

inline unsigned effective_threads(const RunSpec& spec)
{
    return spec.threads > 0 ? spec.threads : default_thread_count();
}

}  // namespace dnrel::cli
