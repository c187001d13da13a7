#pragma once

// Batch command dispatch. run() never throws: errors become exit code 1
// with a diagnostic, reports are canonical JSON.

#include "io.hpp"
#include "lab.hpp"
#include "symbol.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace eqfred::cli {

enum class Verb { check, decompose, induce, prim, bvp, sweep };

inline std::optional<Verb> parse_verb(std::string_view s) {
    if (s == "check") return Verb::check;
    if (s == "decompose") return Verb::decompose;
    if (s == "induce") return Verb::induce;
    if (s == "prim") return Verb::prim;
    if (s == "bvp") return Verb::bvp;
    if (s == "sweep") return Verb::sweep;
    return std::nullopt;
}

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCriterionFails = 2;

struct Command {
    Verb verb = Verb::check;
    std::string input;
    std::optional<std::vector<int>> alpha;
    double tol = 1e-8;
    std::vector<int> sizes;
    std::optional<BoundaryPair> bc;
    /// sweep: elliptic | alpha-elliptic | zero
    std::string scenario = "elliptic";
    int k = 4;
    /// bvp: number of eigenvalues
    int count = 5;
};

struct RunResult {
    int exit_code = kExitOk;
    /// Canonical JSON; empty on error.
    std::string report;
    std::string diagnostic;
};

inline std::vector<int> parse_int_list(const std::string &s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(part, &used);
        } catch (const std::exception &) {
            fail(Errc::invalid_input, "malformed integer list '" + s + "'");
        }
        require(used == part.size(), "malformed integer list '" + s + "'");
        out.push_back(v);
    }
    require(!out.empty(), "empty integer list");
    return out;
}

inline BoundaryPair parse_bc(const std::string &s) {
    auto one = [&](const std::string &t) {
        if (t == "D" || t == "d" || t == "dirichlet")
            return BoundaryCondition::dirichlet;
        if (t == "N" || t == "n" || t == "neumann")
            return BoundaryCondition::neumann;
        fail(Errc::invalid_input, "boundary condition must be D or N, got '" + t + "'");
    };
    const auto comma = s.find(',');
    require(comma != std::string::npos, "--bc expects left,right");
    return {one(s.substr(0, comma)), one(s.substr(comma + 1))};
}

/// Eigenvalues of -u'' on [0, pi] with the given end conditions.
inline double analytic_interval_eigenvalue(BoundaryPair bc, int k) {
    const bool dl = bc.first == BoundaryCondition::dirichlet;
    const bool dr = bc.second == BoundaryCondition::dirichlet;
    double root = k;
    if (dl && dr)
        root = k + 1.0;
    else if (dl != dr)
        root = k + 0.5;
    return root * root;
}

namespace detail {

inline io::json read_document(const std::string &path) {
    require(!path.empty(), "--input is required for this verb");
    std::ifstream in(path);
    if (!in)
        fail(Errc::invalid_input, "cannot read '" + path + "'");
    try {
        return io::json::parse(in);
    } catch (const io::json::parse_error &e) {
        fail(Errc::invalid_input,
             path + ": JSON parse error at byte " + std::to_string(e.byte));
    }
}

inline Character alpha_for(const Group &G, const Command &cmd) {
    require(cmd.alpha.has_value(), "--alpha is required for this verb");
    require(cmd.alpha->size() == G.rank(),
            "--alpha needs " + std::to_string(G.rank()) + " exponents");
    for (size_t i = 0; i < G.rank(); ++i)
        require((*cmd.alpha)[i] >= 0 && (*cmd.alpha)[i] < G.orders()[i],
                "--alpha exponent out of range");
    return Character(G, *cmd.alpha);
}

inline RunResult run_check(const Command &cmd) {
    auto doc = io::parse_bundle_document(read_document(cmd.input));
    if (!doc.symbol)
        throw io::DocumentError("/symbol", "missing required member");
    const Character alpha = alpha_for(doc.bundle.group, cmd);
    const auto report = alpha_elliptic_check(*doc.symbol, alpha, {cmd.tol, 1e-8});
    return {report.verdict ? kExitOk : kExitCriterionFails,
            io::dump_canonical(io::to_json(report)), {}};
}

inline RunResult run_decompose(const Command &cmd) {
    const UnitaryRep rep = io::parse_rep(read_document(cmd.input));
    return {kExitOk, io::dump_canonical(io::to_json(decompose(rep))), {}};
}

inline RunResult run_induce(const Command &cmd) {
    const UnitaryRep v = io::parse_rep(read_document(cmd.input));
    const Group &G = v.group();
    const UnitaryRep ind = induce(v, G);
    const MultiplicityVector mv = decompose(ind);
    const MultiplicityVector res = decompose(v);
    io::json table = io::json::array();
    bool consistent = true;
    for (const auto &[chi, m] : mv.entries) {
        // Frobenius count: the multiplicity of chi|_H in V.
        const int expected =
            res.multiplicity(restrict_to(chi.representative(), v.domain()));
        consistent = consistent && expected == m;
        table.push_back({{"character", io::to_json(chi.representative())},
                         {"multiplicity", m},
                         {"expected", expected}});
    }
    io::json out{{"induced", io::to_json(ind)},
                 {"index", v.domain().index()},
                 {"multiplicities", std::move(table)},
                 {"consistent", consistent}};
    return {consistent ? kExitOk : kExitCriterionFails, io::dump_canonical(out), {}};
}

inline RunResult run_prim(const Command &cmd) {
    const auto doc = io::parse_bundle_document(read_document(cmd.input));
    const auto &b = doc.bundle;
    const auto fibers = prim_enumerate(b);
    io::json fj = io::json::array();
    size_t count = 0;
    for (const auto &f : fibers) {
        io::json pts = io::json::array();
        for (size_t p : f.points)
            pts.push_back(b.points[p]);
        io::json classes = io::json::array();
        for (const auto &c : f.classes)
            classes.push_back(io::to_json(c, b));
        count += f.classes.size();
        fj.push_back({{"points", std::move(pts)},
                      {"representative", b.points[f.representative]},
                      {"isotype_count", f.isotype_count},
                      {"classes", std::move(classes)}});
    }
    io::json out{{"group", io::to_json(b.group)}, {"orbit_count", count}, {"fibers", fj}};
    try {
        out["minimal_isotropy"] = io::to_json(minimal_isotropy(b));
    } catch (const Error &e) {
        if (e.code() != Errc::model_inconsistency)
            throw;
        out["minimal_isotropy"] = nullptr;
        out["warnings"] = io::json::array({e.what()});
    }
    return {kExitOk, io::dump_canonical(out), {}};
}

inline RunResult run_bvp(const Command &cmd) {
    require(cmd.bc.has_value(), "--bc is required for bvp");
    require(cmd.count >= 1, "--count must be >= 1");
    const BoundaryPair bc = *cmd.bc;
    std::vector<int> sizes = cmd.sizes.empty() ? std::vector<int>{64, 128, 256} : cmd.sizes;
    std::sort(sizes.begin(), sizes.end());
    std::vector<double> reference;
    for (int k = 0; k < cmd.count; ++k)
        reference.push_back(analytic_interval_eigenvalue(bc, k));
    io::json table = io::json::array();
    std::vector<double> errors;
    for (int n : sizes) {
        const auto p = double_interval_bvp(n, bc);
        const auto ev = mixed_bvp_spectrum(p, cmd.count);
        double worst_rel = 0.0, worst_abs = 0.0;
        for (int k = 0; k < cmd.count; ++k) {
            const double err = std::abs(ev[k] - reference[k]);
            worst_abs = std::max(worst_abs, err);
            if (reference[k] > 0)
                worst_rel = std::max(worst_rel, err / reference[k]);
        }
        errors.push_back(worst_abs);
        table.push_back({{"n", n},
                         {"invariant_dim", p.expected_invariant_dim},
                         {"eigenvalues", ev},
                         {"max_abs_error", worst_abs},
                         {"max_rel_error", worst_rel}});
    }
    io::json orders = io::json::array();
    for (size_t i = 1; i < sizes.size(); ++i)
        orders.push_back(std::log(errors[i - 1] / errors[i]) /
                         std::log(static_cast<double>(sizes[i]) / sizes[i - 1]));
    std::string bcs{to_char(bc.first), ',', to_char(bc.second)};
    io::json out{{"scenario", "bvp"},
                 {"parameters", {{"bc", bcs}, {"count", cmd.count}, {"sizes", sizes}}},
                 {"reference", reference},
                 {"table", std::move(table)},
                 {"convergence_orders", std::move(orders)}};
    return {kExitOk, io::dump_canonical(out), {}};
}

inline RunResult run_sweep(const Command &cmd) {
    std::function<GridOperator(int)> family;
    if (cmd.scenario == "elliptic")
        family = elliptic_family;
    else if (cmd.scenario == "alpha-elliptic")
        family = alpha_elliptic_family;
    else if (cmd.scenario == "zero")
        family = zero_family;
    else
        fail(Errc::invalid_input, "unknown scenario '" + cmd.scenario + "'");
    const Group z2({2});
    const Character alpha = alpha_for(z2, cmd);
    const std::vector<int> sizes =
        cmd.sizes.empty() ? std::vector<int>{32, 64, 128} : cmd.sizes;
    const auto sweep = fredholm_proxy_sweep(family, alpha, sizes, cmd.k);
    io::json out = io::to_json(sweep);
    out.erase("k");
    out["scenario"] = cmd.scenario;
    out["parameters"] = {{"alpha", io::to_json(alpha)}, {"k", cmd.k}, {"sizes", sizes}};
    return {kExitOk, io::dump_canonical(out), {}};
}

} // namespace detail

inline RunResult run(const Command &cmd) {
    try {
        require(cmd.tol > 0, "--tol must be positive");
        switch (cmd.verb) {
        case Verb::check: return detail::run_check(cmd);
        case Verb::decompose: return detail::run_decompose(cmd);
        case Verb::induce: return detail::run_induce(cmd);
        case Verb::prim: return detail::run_prim(cmd);
        case Verb::bvp: return detail::run_bvp(cmd);
        case Verb::sweep: return detail::run_sweep(cmd);
        }
        fail(Errc::internal_inconsistency, "unhandled verb");
    } catch (const Error &e) {
        // Document errors carry the JSON pointer in their message.
        return {kExitError, {}, std::string("error: ") + e.what()};
    } catch (const std::exception &e) {
        return {kExitError, {}, std::string("error: ") + e.what()};
    }
}

} // namespace eqfred::cli
