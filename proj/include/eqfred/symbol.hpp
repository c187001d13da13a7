#pragma once

// Sampled cosphere bundle with an equivariant endomorphism bundle, the
// space X of (xi, rho) pairs, its alpha-part X^alpha, the Gamma-principal
// symbol blocks and the alpha-ellipticity decision.
//
// The continuous cosphere bundle is replaced by a finite Gamma-set of sample
// points. Every quantity here is pointwise in xi, so each sample is treated
// exactly; only the coverage of the manifold is approximate.

#include "group.hpp"
#include "linalg.hpp"
#include "rep.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace eqfred {

/// Tolerance for action/cocycle/unitarity checks on sample bundles.
inline constexpr double kBundleTol = 1e-10;

struct EquivariantSampleBundle {
    Group group;
    std::vector<std::string> points;
    /// Base-orbit label per point.
    std::vector<std::string> base;
    /// action[g][p]: index of g . p, g indexed by Group::index_of.
    std::vector<std::vector<int>> action;
    std::vector<int> fiber_dim;
    /// transport[g][p]: fiber_dim(g.p) x fiber_dim(p).
    std::vector<std::vector<Matrix>> transport;

    size_t size() const { return points.size(); }

    size_t point_index(const std::string &id) const {
        auto it = std::find(points.begin(), points.end(), id);
        require(it != points.end(), "unknown sample point '" + id + "'");
        return static_cast<size_t>(it - points.begin());
    }

    size_t act(const Element &g, size_t p) const {
        return static_cast<size_t>(action[group.index_of(g)][p]);
    }

    const Matrix &transport_at(const Element &g, size_t p) const {
        return transport[group.index_of(g)][p];
    }
};

struct Violation {
    std::string kind;
    std::string location;
    std::string detail;
};

struct ValidationResult {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks every structural invariant of a sample bundle and lists each
/// violation with its location. Never throws.
inline ValidationResult validate_bundle(const EquivariantSampleBundle &b) {
    ValidationResult res;
    auto add = [&](std::string kind, std::string loc, std::string detail) {
        res.violations.push_back({std::move(kind), std::move(loc), std::move(detail)});
    };
    const auto nG = static_cast<size_t>(b.group.order());
    const size_t nP = b.points.size();
    if (b.base.size() != nP)
        add("shape", "base", "one base label per point required");
    if (b.fiber_dim.size() != nP)
        add("shape", "fiber_dim", "one fiber dimension per point required");
    if (b.action.size() != nG)
        add("shape", "action", "one action row per group element required");
    if (b.transport.size() != nG)
        add("shape", "transport", "one transport row per group element required");
    {
        std::vector<std::string> sorted = b.points;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            add("shape", "points", "duplicate point id");
    }
    if (!res.ok())
        return res;
    const auto elems = b.group.elements();
    auto loc = [&](size_t g, size_t p) {
        return "g=(" + element_key(elems[g]) + "),point=" + b.points[p];
    };
    for (size_t p = 0; p < nP; ++p)
        if (b.fiber_dim[p] < 0)
            add("shape", "point=" + b.points[p], "negative fiber dimension");
    bool action_ok = true;
    for (size_t g = 0; g < nG; ++g) {
        if (b.action[g].size() != nP || b.transport[g].size() != nP) {
            add("shape", "g=(" + element_key(elems[g]) + ")",
                "action/transport row must cover every point");
            action_ok = false;
            continue;
        }
        std::vector<bool> hit(nP, false);
        for (size_t p = 0; p < nP; ++p) {
            const int q = b.action[g][p];
            if (q < 0 || static_cast<size_t>(q) >= nP) {
                add("action", loc(g, p), "image out of range");
                action_ok = false;
            } else if (hit[static_cast<size_t>(q)]) {
                add("action", loc(g, p), "action is not a bijection");
                action_ok = false;
            } else {
                hit[static_cast<size_t>(q)] = true;
            }
        }
    }
    if (!res.ok() || !action_ok)
        return res;
    const size_t id = b.group.index_of(b.group.identity());
    for (size_t p = 0; p < nP; ++p)
        if (static_cast<size_t>(b.action[id][p]) != p)
            add("identity", loc(id, p), "identity moves the point");
    for (size_t g = 0; g < nG; ++g)
        for (size_t h = 0; h < nG; ++h) {
            const size_t gh = b.group.index_of(b.group.add(elems[g], elems[h]));
            for (size_t p = 0; p < nP; ++p)
                if (b.action[gh][p] !=
                    b.action[g][static_cast<size_t>(b.action[h][p])])
                    add("action", loc(g, p),
                        "g.(h.xi) != (gh).xi for h=(" + element_key(elems[h]) + ")");
        }
    // Base labels must transform consistently.
    for (size_t g = 0; g < nG; ++g)
        for (size_t p = 0; p < nP; ++p)
            for (size_t q = p + 1; q < nP; ++q)
                if (b.base[p] == b.base[q] &&
                    b.base[static_cast<size_t>(b.action[g][p])] !=
                        b.base[static_cast<size_t>(b.action[g][q])])
                    add("base", loc(g, p),
                        "points sharing a base label are sent to different base labels");
    bool shapes_ok = true;
    for (size_t g = 0; g < nG; ++g)
        for (size_t p = 0; p < nP; ++p) {
            const Matrix &t = b.transport[g][p];
            const int rows = b.fiber_dim[static_cast<size_t>(b.action[g][p])];
            const int cols = b.fiber_dim[p];
            if (t.rows() != rows || t.cols() != cols) {
                add("shape", loc(g, p), "transport has wrong shape");
                shapes_ok = false;
                continue;
            }
            if (rows != cols) {
                add("fiber_dim", loc(g, p), "fiber dimension not constant on orbit");
                shapes_ok = false;
                continue;
            }
            if (residual_norm(t.adjoint() * t - Matrix::Identity(cols, cols)) >
                kBundleTol)
                add("unitarity", loc(g, p), "transport is not unitary");
        }
    if (!shapes_ok)
        return res;
    for (size_t g = 0; g < nG; ++g)
        for (size_t h = 0; h < nG; ++h) {
            const size_t gh = b.group.index_of(b.group.add(elems[g], elems[h]));
            for (size_t p = 0; p < nP; ++p) {
                const auto hp = static_cast<size_t>(b.action[h][p]);
                const Matrix lhs = b.transport[g][hp] * b.transport[h][p];
                if (residual_norm(lhs - b.transport[gh][p]) > kBundleTol)
                    add("cocycle", loc(g, p) + ",h=(" + element_key(elems[h]) + ")",
                        "transport(g, h.xi) transport(h, xi) != transport(gh, xi)");
            }
        }
    return res;
}

inline void require_valid(const EquivariantSampleBundle &b) {
    const auto res = validate_bundle(b);
    if (!res.ok()) {
        const auto &v = res.violations.front();
        fail(Errc::invalid_input, "invalid bundle (" + v.kind + " at " +
                                      v.location + "): " + v.detail);
    }
}

/// Stabilizer Gamma_xi of a sample point.
inline Subgroup isotropy(const EquivariantSampleBundle &b, size_t p) {
    require(p < b.size(), "isotropy: unknown point");
    std::set<Element> stab;
    for (const auto &g : b.group.elements())
        if (b.act(g, p) == p)
            stab.insert(g);
    return Subgroup::from_closed_set(b.group, std::move(stab));
}

inline Subgroup isotropy(const EquivariantSampleBundle &b, const std::string &id) {
    return isotropy(b, b.point_index(id));
}

/// The Gamma_xi-module E_xi given by transport over the stabilizer.
inline UnitaryRep fiber_rep(const EquivariantSampleBundle &b, size_t p) {
    Subgroup stab = isotropy(b, p);
    std::vector<Matrix> mats;
    for (const auto &g : stab.elements())
        mats.push_back(b.transport_at(g, p));
    return UnitaryRep(std::move(stab), b.fiber_dim[p], std::move(mats));
}

namespace detail {

inline Subgroup minimal_isotropy_unchecked(const EquivariantSampleBundle &b) {
    if (b.size() == 0)
        return subgroup_from_generators(b.group, {});
    std::vector<Subgroup> stabs;
    for (size_t p = 0; p < b.size(); ++p)
        stabs.push_back(isotropy(b, p));
    const auto smallest = std::min_element(
        stabs.begin(), stabs.end(),
        [](const Subgroup &x, const Subgroup &y) { return x.order() < y.order(); });
    for (size_t p = 0; p < stabs.size(); ++p)
        if (!smallest->is_subgroup_of(stabs[p]))
            fail(Errc::model_inconsistency,
                 "smallest stabilizer is not contained in the stabilizer of '" +
                     b.points[p] + "'");
    return *smallest;
}

} // namespace detail

/// Gamma_0: the stabilizer of least order, which must sit inside every
/// other stabilizer.
inline Subgroup minimal_isotropy(const EquivariantSampleBundle &b) {
    require_valid(b);
    return detail::minimal_isotropy_unchecked(b);
}

/// An element (xi, rho) of X: rho occurs in E_xi with the given multiplicity.
struct XPoint {
    size_t point = 0;
    SubgroupCharacter rho;
    int multiplicity = 0;

    bool operator==(const XPoint &o) const {
        return point == o.point && rho == o.rho;
    }
};

/// A Gamma-orbit of X; members sorted by point id, representative is the
/// member with the least id.
struct XOrbit {
    std::vector<XPoint> members;
    size_t representative = 0;

    const XPoint &rep() const { return members[representative]; }
};

using XSet = std::vector<XOrbit>;

inline size_t x_size(const XSet &x) {
    size_t n = 0;
    for (const auto &o : x)
        n += o.members.size();
    return n;
}

namespace detail {

/// The isotype of E_{g.xi} that transport(g, xi) carries rho into.
inline SubgroupCharacter transported_isotype(const EquivariantSampleBundle &b,
                                             const Element &g, size_t p,
                                             const SubgroupCharacter &rho,
                                             const UnitaryRep &source_rep,
                                             const UnitaryRep &target_rep) {
    const Matrix src = isotypical_projector(source_rep, rho);
    const Matrix &t = b.transport_at(g, p);
    std::vector<SubgroupCharacter> hits;
    for (const auto &chi : domain_characters(target_rep)) {
        const Matrix dst = isotypical_projector(target_rep, chi);
        if ((dst * t * src).norm() > 0.5)
            hits.push_back(chi);
    }
    if (hits.size() != 1)
        fail(Errc::internal_inconsistency,
             "transport does not identify a unique isotype at '" +
                 b.points[b.act(g, p)] + "'");
    return hits.front();
}

inline XSet build_X_unchecked(const EquivariantSampleBundle &b) {
    const size_t n = b.size();
    std::vector<UnitaryRep> reps;
    std::vector<std::vector<XPoint>> at(n);
    for (size_t p = 0; p < n; ++p) {
        reps.push_back(fiber_rep(b, p));
        for (auto &[chi, m] : decompose(reps.back()).entries)
            if (m > 0)
                at[p].push_back({p, chi, m});
    }
    std::vector<std::vector<bool>> seen(n);
    for (size_t p = 0; p < n; ++p)
        seen[p].assign(at[p].size(), false);

    auto locate = [&](size_t q, const SubgroupCharacter &chi) -> size_t {
        for (size_t i = 0; i < at[q].size(); ++i)
            if (at[q][i].rho == chi)
                return i;
        fail(Errc::internal_inconsistency, "transported isotype absent at '" +
                                               b.points[q] + "'");
    };

    XSet out;
    for (size_t p = 0; p < n; ++p)
        for (size_t i = 0; i < at[p].size(); ++i) {
            if (seen[p][i])
                continue;
            XOrbit orbit;
            for (const auto &g : b.group.elements()) {
                const size_t q = b.act(g, p);
                const auto chi = transported_isotype(b, g, p, at[p][i].rho, reps[p], reps[q]);
                const size_t j = locate(q, chi);
                if (seen[q][j])
                    continue;
                seen[q][j] = true;
                orbit.members.push_back(at[q][j]);
            }
            std::sort(orbit.members.begin(), orbit.members.end(),
                      [&](const XPoint &x, const XPoint &y) {
                          return b.points[x.point] < b.points[y.point];
                      });
            orbit.representative = 0;
            out.push_back(std::move(orbit));
        }
    std::sort(out.begin(), out.end(), [&](const XOrbit &x, const XOrbit &y) {
        const auto &px = b.points[x.rep().point];
        const auto &py = b.points[y.rep().point];
        if (px != py)
            return px < py;
        return x.rep().rho < y.rep().rho;
    });
    return out;
}

} // namespace detail

/// X_{M,E,Gamma}: all (xi, rho) with rho occurring in E_xi, grouped into
/// Gamma-orbits. Isotypes are carried along an orbit by transport.
inline XSet build_X(const EquivariantSampleBundle &b) {
    require_valid(b);
    return detail::build_X_unchecked(b);
}

/// X^alpha: the orbits whose rho is Gamma_0-associated to alpha.
inline XSet build_X_alpha(const XSet &x, const Character &alpha,
                          const Subgroup &gamma0) {
    XSet out;
    for (const auto &orbit : x)
        if (associated(alpha, orbit.rep().rho, gamma0))
            out.push_back(orbit);
    return out;
}

/// X = disjoint union over beta in dual(Gamma_0) of X^beta; only nonempty
/// parts appear as keys.
inline std::map<SubgroupCharacter, std::vector<XPoint>>
partition_by_beta(const XSet &x, const Subgroup &gamma0) {
    std::map<SubgroupCharacter, std::vector<XPoint>> parts;
    for (const auto &orbit : x)
        for (const auto &m : orbit.members) {
            require(gamma0.is_subgroup_of(m.rho.subgroup()),
                    "partition_by_beta: Gamma0 not inside an isotropy group");
            parts[SubgroupCharacter(gamma0, m.rho.representative())].push_back(m);
        }
    return parts;
}

/// A primitive-spectrum fiber over one orbit of sample points: the
/// X-orbits (primitive ideals) lying over it.
struct PrimFiber {
    std::vector<size_t> points;
    size_t representative = 0;
    std::vector<XOrbit> classes;
    /// Number of distinct isotypes of Gamma_xi in E_xi.
    int isotype_count = 0;
};

inline std::vector<PrimFiber> prim_enumerate(const EquivariantSampleBundle &b) {
    require_valid(b);
    const XSet x = detail::build_X_unchecked(b);
    std::vector<bool> done(b.size(), false);
    std::vector<PrimFiber> out;
    std::vector<size_t> order(b.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t i, size_t j) { return b.points[i] < b.points[j]; });
    for (size_t p : order) {
        if (done[p])
            continue;
        PrimFiber fiber;
        for (const auto &g : b.group.elements()) {
            const size_t q = b.act(g, p);
            if (!done[q]) {
                done[q] = true;
                fiber.points.push_back(q);
            }
        }
        std::sort(fiber.points.begin(), fiber.points.end(),
                  [&](size_t i, size_t j) { return b.points[i] < b.points[j]; });
        fiber.representative = fiber.points.front();
        for (const auto &orbit : x)
            if (std::find(fiber.points.begin(), fiber.points.end(),
                          orbit.rep().point) != fiber.points.end())
                fiber.classes.push_back(orbit);
        fiber.isotype_count = static_cast<int>(
            commutant_factors(fiber_rep(b, fiber.representative)).size());
        if (static_cast<int>(fiber.classes.size()) != fiber.isotype_count)
            fail(Errc::internal_inconsistency,
                 "primitive classes over '" + b.points[fiber.representative] +
                     "' do not match the commutant factor count");
        out.push_back(std::move(fiber));
    }
    return out;
}

// --- symbols ------------------------------------------------------------

/// An order-zero principal symbol sampled at each point: a square matrix
/// on the fiber.
struct SymbolField {
    EquivariantSampleBundle bundle;
    std::vector<Matrix> values;
};

/// max over (g, xi) of |sigma(g.xi) - T sigma(xi) T^*| / max(1, |sigma(xi)|).
inline double symbol_equivariance_residual(const SymbolField &s) {
    const auto &b = s.bundle;
    require(s.values.size() == b.size(), "symbol needs one value per point");
    for (size_t p = 0; p < b.size(); ++p)
        require(s.values[p].rows() == b.fiber_dim[p] &&
                    s.values[p].cols() == b.fiber_dim[p],
                "symbol value at '" + b.points[p] + "' has wrong shape");
    double worst = 0.0;
    for (const auto &g : b.group.elements())
        for (size_t p = 0; p < b.size(); ++p) {
            const Matrix &t = b.transport_at(g, p);
            const Matrix diff = s.values[b.act(g, p)] - t * s.values[p] * t.adjoint();
            worst = std::max(worst, diff.norm() / std::max(1.0, s.values[p].norm()));
        }
    return worst;
}

/// sigma^Gamma(xi, rho): sigma(xi) compressed to the rho-isotypical part of
/// E_xi in the deterministic isotypical basis.
inline Matrix gamma_symbol_eval(const SymbolField &s, const XPoint &x) {
    const auto &b = s.bundle;
    require(x.point < b.size(), "gamma_symbol_eval: unknown point");
    const UnitaryRep rep = fiber_rep(b, x.point);
    require(x.rho.subgroup() == rep.domain(),
            "gamma_symbol_eval: rho is not a character of the isotropy group");
    const Matrix basis = isotypical_basis(rep, x.rho);
    require(basis.cols() > 0, "gamma_symbol_eval: rho does not occur at '" +
                                  b.points[x.point] + "'");
    return basis.adjoint() * s.values[x.point] * basis;
}

struct CheckOptions {
    double tol = 1e-8;
    double equivariance_tol = 1e-8;
};

struct BlockEntry {
    std::string point;
    SubgroupCharacter rho;
    size_t orbit = 0;
    bool representative = false;
    int block_dim = 0;
    double min_singular_value = 0.0;
    double norm = 0.0;
    /// norm / min_singular_value; +inf for a singular block.
    double condition = 0.0;
    bool passes = false;
};

struct EllipticityReport {
    Character alpha;
    double tol = 0.0;
    Subgroup gamma0;
    std::vector<BlockEntry> entries;
    bool verdict = true;
    std::vector<std::string> warnings;
};

inline constexpr std::string_view kVacuousWarning =
    "vacuous: alpha-isotypical component not represented";

/// Decides alpha-ellipticity: every block sigma^Gamma(xi, rho) with
/// (xi, rho) in X^alpha must have smallest singular value at least
/// tol * max(1, |block|). Every orbit member is evaluated; the verdict uses
/// orbit representatives and is certified identical across each orbit.
inline EllipticityReport alpha_elliptic_check(const SymbolField &s,
                                              const Character &alpha,
                                              const CheckOptions &opts = {}) {
    const auto &b = s.bundle;
    require(opts.tol > 0, "tolerance must be positive");
    require(alpha.parent() == b.group, "alpha is not a character of the bundle's group");
    require_valid(b);
    const double residual = symbol_equivariance_residual(s);
    if (residual > opts.equivariance_tol) {
        std::ostringstream os;
        os << "symbol is not equivariant (residual " << residual << ")";
        fail(Errc::invalid_input, os.str());
    }

    EllipticityReport report;
    report.alpha = alpha;
    report.tol = opts.tol;
    report.gamma0 = detail::minimal_isotropy_unchecked(b);
    const XSet xa = build_X_alpha(detail::build_X_unchecked(b), alpha, report.gamma0);
    if (xa.empty())
        report.warnings.emplace_back(kVacuousWarning);

    for (size_t o = 0; o < xa.size(); ++o) {
        const auto &orbit = xa[o];
        bool rep_passes = true;
        std::vector<BlockEntry> entries;
        for (size_t i = 0; i < orbit.members.size(); ++i) {
            const auto &m = orbit.members[i];
            const Matrix block = gamma_symbol_eval(s, m);
            BlockEntry e;
            e.point = b.points[m.point];
            e.rho = m.rho;
            e.orbit = o;
            e.representative = i == orbit.representative;
            e.block_dim = static_cast<int>(block.rows());
            const Eigen::VectorXd sv = singular_values(block);
            e.norm = sv.size() ? sv(0) : 0.0;
            e.min_singular_value = sv.size() ? sv(sv.size() - 1) : 0.0;
            e.condition = e.min_singular_value > 0
                              ? e.norm / e.min_singular_value
                              : std::numeric_limits<double>::infinity();
            e.passes = e.min_singular_value >= opts.tol * std::max(1.0, e.norm);
            if (e.representative)
                rep_passes = e.passes;
            entries.push_back(std::move(e));
        }
        for (const auto &e : entries)
            if (e.passes != rep_passes)
                fail(Errc::internal_inconsistency,
                     "invertibility differs along the orbit of '" +
                         b.points[orbit.rep().point] + "'");
        report.verdict = report.verdict && rep_passes;
        report.entries.insert(report.entries.end(), entries.begin(), entries.end());
    }
    return report;
}

/// Pointwise invertibility of the full symbol (plain ellipticity).
inline bool pointwise_invertible(const SymbolField &s, double tol = 1e-8) {
    for (const auto &v : s.values) {
        const Eigen::VectorXd sv = singular_values(v);
        if (sv.size() && sv(sv.size() - 1) < tol * std::max(1.0, sv(0)))
            return false;
    }
    return true;
}

/// Reduces a symbol sigma : E_0 -> E_1 to the self-adjoint symbol
/// [[0, sigma^*], [sigma, 0]] on E_0 (+) E_1, which is invertible exactly
/// where sigma is.
inline SymbolField double_two_bundle(const EquivariantSampleBundle &source,
                                     const std::vector<int> &target_dim,
                                     const std::vector<std::vector<Matrix>> &target_transport,
                                     const std::vector<Matrix> &sigma) {
    const size_t n = source.size();
    require(target_dim.size() == n, "target fiber dimensions: one per point");
    require(target_transport.size() == source.transport.size(),
            "target transport: one row per group element");
    require(sigma.size() == n, "two-bundle symbol: one value per point");
    SymbolField out;
    out.bundle = source;
    for (size_t p = 0; p < n; ++p)
        out.bundle.fiber_dim[p] = source.fiber_dim[p] + target_dim[p];
    for (size_t g = 0; g < source.transport.size(); ++g) {
        require(target_transport[g].size() == n, "target transport row size");
        for (size_t p = 0; p < n; ++p) {
            const Matrix &t0 = source.transport[g][p];
            const Matrix &t1 = target_transport[g][p];
            Matrix t = Matrix::Zero(t0.rows() + t1.rows(), t0.cols() + t1.cols());
            t.topLeftCorner(t0.rows(), t0.cols()) = t0;
            t.bottomRightCorner(t1.rows(), t1.cols()) = t1;
            out.bundle.transport[g][p] = std::move(t);
        }
    }
    for (size_t p = 0; p < n; ++p) {
        const int d0 = source.fiber_dim[p];
        const int d1 = target_dim[p];
        require(sigma[p].rows() == d1 && sigma[p].cols() == d0,
                "two-bundle symbol at '" + source.points[p] + "' has wrong shape");
        Matrix v = Matrix::Zero(d0 + d1, d0 + d1);
        v.bottomLeftCorner(d1, d0) = sigma[p];
        v.topRightCorner(d0, d1) = sigma[p].adjoint();
        out.values.push_back(std::move(v));
    }
    return out;
}

} // namespace eqfred
