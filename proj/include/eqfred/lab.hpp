#pragma once

// Discretized Gamma-invariant operators on the circle, isotypical blocks,
// the refinement sweep used as a finite-grid stand-in for the Fredholm
// property, and interval boundary-value problems realized on doubled grids.
//
// Only bounded matrices are ever analysed. Order-two families can be brought
// to order zero with normalize_order_two; continuous Sobolev powers are never
// formed.

#include "group.hpp"
#include "linalg.hpp"
#include "rep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace eqfred {

enum class CircleSymmetry { rotation, reflection };

/// Z_m acting on n equispaced circle points: rotation by n/m steps, or
/// (m = 2) the reflection j -> -j.
struct CircleAction {
    CircleSymmetry kind = CircleSymmetry::reflection;
    int m = 2;
};

inline UnitaryRep circle_grid_rep(int n, const CircleAction &act) {
    require(n >= 1, "grid size must be positive");
    require(act.m >= 1, "group order must be positive");
    if (act.kind == CircleSymmetry::rotation)
        require(n % act.m == 0, "rotation order " + std::to_string(act.m) +
                                    " does not divide grid size " +
                                    std::to_string(n));
    else
        require(act.m == 2, "reflection generates Z_2 only");
    const Group G({act.m});
    std::vector<std::vector<int>> perm, sign;
    for (const auto &g : G.elements()) {
        const int k = g.residues[0];
        std::vector<int> p(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) {
            if (act.kind == CircleSymmetry::rotation)
                p[static_cast<size_t>(j)] = (j + k * (n / act.m)) % n;
            else
                p[static_cast<size_t>(j)] = k == 0 ? j : (n - j) % n;
        }
        perm.push_back(std::move(p));
        sign.emplace_back(static_cast<size_t>(n), 1);
    }
    return UnitaryRep::from_signed_permutations(Subgroup::whole(G), n, perm, sign);
}

/// Positive periodic second difference (2u_j - u_{j-1} - u_{j+1}) / h^2 on
/// n points of a circle of the given length.
inline Matrix periodic_laplacian(int n, double length = 2.0 * std::numbers::pi) {
    const double h = length / n;
    const double w = 1.0 / (h * h);
    Matrix l = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        l(j, j) += 2.0 * w;
        l(j, (j + 1) % n) -= w;
        l(j, (j + n - 1) % n) -= w;
    }
    return l;
}

enum class OperatorKind { shifted_laplacian, potential, composite };

struct OperatorSpec {
    OperatorKind kind = OperatorKind::shifted_laplacian;
    /// c in Delta + c.
    double shift = 1.0;
    /// V(theta), sampled at theta_j = 2 pi j / n.
    std::function<double(double)> potential;
};

struct GridOperator {
    int n = 0;
    Matrix matrix;
    UnitaryRep group_rep;
};

inline void require_invariant(const GridOperator &p) {
    const double r = equivariance_residual(p.group_rep, p.matrix);
    if (r > 1e-10) {
        std::ostringstream os;
        os << "operator does not commute with the group action (residual " << r
           << ")";
        fail(Errc::invalid_input, os.str());
    }
}

/// Delta + c, multiplication by V, or Delta + c + V on the circle grid.
inline GridOperator build_invariant_circle_operator(int n, const CircleAction &act,
                                                    const OperatorSpec &spec) {
    UnitaryRep rep = circle_grid_rep(n, act);
    Matrix m = Matrix::Zero(n, n);
    if (spec.kind != OperatorKind::potential)
        m = periodic_laplacian(n) + spec.shift * Matrix::Identity(n, n);
    if (spec.kind != OperatorKind::shifted_laplacian) {
        require(static_cast<bool>(spec.potential), "potential not provided");
        for (int j = 0; j < n; ++j)
            m(j, j) += spec.potential(2.0 * std::numbers::pi * j / n);
    }
    GridOperator op{n, std::move(m), std::move(rep)};
    require_invariant(op);
    return op;
}

/// pi_alpha(P): P compressed to the alpha-isotypical grid functions.
inline Matrix isotypical_block(const GridOperator &p, const Character &alpha) {
    require_invariant(p);
    const Matrix b = isotypical_basis(p.group_rep, alpha);
    return b.adjoint() * p.matrix * b;
}

/// P (Delta + 1)^{-1}: an order-two family brought to order zero.
inline GridOperator normalize_order_two(const GridOperator &p) {
    const Matrix shifted = periodic_laplacian(p.n) + Matrix::Identity(p.n, p.n);
    GridOperator out{p.n, p.matrix * shifted.partialPivLu().inverse(), p.group_rep};
    require_invariant(out);
    return out;
}

/// The elliptic reference family Delta + 1 on the reflection circle.
inline GridOperator elliptic_family(int n) {
    return build_invariant_circle_operator(
        n, {CircleSymmetry::reflection, 2}, {OperatorKind::shifted_laplacian, 1.0, {}});
}

/// a p_triv + p_sign with a(theta) = sin^2(theta): invertible (identity) on
/// the sign isotype, while the trivial-isotype block vanishes at the two
/// reflection fixed points theta = 0, pi.
inline GridOperator alpha_elliptic_family(int n) {
    UnitaryRep rep = circle_grid_rep(n, {CircleSymmetry::reflection, 2});
    const Group &G = rep.group();
    const Matrix p_triv = isotypical_projector(rep, Character(G, {0}));
    const Matrix p_sign = isotypical_projector(rep, Character(G, {1}));
    Matrix a = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        const double s = std::sin(2.0 * std::numbers::pi * j / n);
        a(j, j) = s * s;
    }
    GridOperator op{n, a * p_triv + p_sign, std::move(rep)};
    require_invariant(op);
    return op;
}

/// The zero operator on the reflection circle.
inline GridOperator zero_family(int n) {
    return GridOperator{n, Matrix::Zero(n, n),
                        circle_grid_rep(n, {CircleSymmetry::reflection, 2})};
}

// --- refinement sweep ---------------------------------------------------

enum class SweepVerdict { stable, degenerating, inconclusive };

inline std::string_view to_string(SweepVerdict v) {
    switch (v) {
    case SweepVerdict::stable:
        return "stable";
    case SweepVerdict::degenerating:
        return "degenerating";
    case SweepVerdict::inconclusive:
        return "inconclusive";
    }
    return "inconclusive";
}

/// Relative spread below which a sweep counts as bounded below.
inline constexpr double kStableSpread = 0.10;
/// Decay factor (first size to last) that counts as degeneration.
inline constexpr double kDegenerationFactor = 10.0;

struct RefinementSweep {
    int k = 4;
    /// (n, k-th smallest singular value of the alpha-block), by size.
    std::vector<std::pair<int, double>> table;
    SweepVerdict verdict = SweepVerdict::inconclusive;
};

inline SweepVerdict classify_sweep(const std::vector<std::pair<int, double>> &table) {
    if (table.empty())
        return SweepVerdict::inconclusive;
    double lo = table.front().second, hi = lo;
    for (const auto &[n, v] : table) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double first = table.front().second;
    const double last = table.back().second;
    if (hi <= 0.0 || last * kDegenerationFactor <= first)
        return SweepVerdict::degenerating;
    if (table.size() > 1 && (hi - lo) / hi < kStableSpread)
        return SweepVerdict::stable;
    return SweepVerdict::inconclusive;
}

/// k-th smallest singular value of the alpha-block across grid sizes.
/// The first k-1 values are discounted as a possible finite-dimensional
/// kernel. Sizes run as independent tasks; the table is ordered by size.
inline RefinementSweep fredholm_proxy_sweep(const std::function<GridOperator(int)> &family,
                                            const Character &alpha,
                                            std::vector<int> sizes, int k = 4) {
    require(k >= 1, "near-kernel discount k must be >= 1");
    require(!sizes.empty(), "sweep needs at least one grid size");
    std::sort(sizes.begin(), sizes.end());
    std::vector<std::future<double>> jobs;
    for (int n : sizes)
        jobs.push_back(std::async(std::launch::async, [&family, &alpha, n, k] {
            const Matrix block = isotypical_block(family(n), alpha);
            const Eigen::VectorXd s = singular_values(block);
            require(s.size() >= k, "alpha-block at n=" + std::to_string(n) +
                                       " is smaller than the discount k");
            return s(s.size() - k);
        }));
    RefinementSweep out;
    out.k = k;
    for (size_t i = 0; i < sizes.size(); ++i)
        out.table.emplace_back(sizes[i], jobs[i].get());
    out.verdict = classify_sweep(out.table);
    return out;
}

// --- doubled boundary-value problems -----------------------------------

enum class BoundaryCondition { dirichlet, neumann };

inline char to_char(BoundaryCondition bc) {
    return bc == BoundaryCondition::dirichlet ? 'D' : 'N';
}

using BoundaryPair = std::pair<BoundaryCondition, BoundaryCondition>;

/// The interval [0, pi] with vertex grid x_j = j pi / n, doubled along its
/// boundary so that boundary conditions become Z_2-equivariance. Equal
/// conditions on both ends give one Z_2 on a circle of 2n points; mixed
/// conditions give Z_2 x Z_2 on 4n points, the first factor being the
/// sign-twisted Dirichlet reflection.
struct DoubledProblem {
    int base_n = 0;
    BoundaryPair bc;
    int doubled_n = 0;
    double h = 0.0;
    Matrix laplacian;
    UnitaryRep rep;
    /// Doubled-grid indices of the unknowns of the single copy (grid points
    /// 0..n minus Dirichlet endpoints).
    std::vector<int> copy_unknowns;
    /// Dimension of the invariant subspace predicted by the boundary count.
    int expected_invariant_dim = 0;
};

inline DoubledProblem double_interval_bvp(int n, BoundaryPair bc) {
    require(n >= 4, "interval grid needs n >= 4");
    const bool mixed = bc.first != bc.second;
    const int big = mixed ? 4 * n : 2 * n;
    auto about_left = [big](int j) { return (big - j) % big; };
    auto about_right = [big, n](int j) { return ((2 * n - j) % big + big) % big; };

    Group G = mixed ? Group({2, 2}) : Group({2});
    std::vector<std::vector<int>> perm, sign;
    for (const auto &g : G.elements()) {
        std::vector<int> p(static_cast<size_t>(big)), s(static_cast<size_t>(big));
        for (int j = 0; j < big; ++j) {
            int t = j;
            int sg = 1;
            if (!mixed) {
                if (g.residues[0]) {
                    t = about_left(t);
                    if (bc.first == BoundaryCondition::dirichlet)
                        sg = -1;
                }
            } else {
                const bool left_is_dirichlet = bc.first == BoundaryCondition::dirichlet;
                // Apply the Neumann reflection, then the twisted Dirichlet one.
                if (g.residues[1])
                    t = left_is_dirichlet ? about_right(t) : about_left(t);
                if (g.residues[0]) {
                    t = left_is_dirichlet ? about_left(t) : about_right(t);
                    sg = -1;
                }
            }
            p[static_cast<size_t>(j)] = t;
            s[static_cast<size_t>(j)] = sg;
        }
        perm.push_back(std::move(p));
        sign.push_back(std::move(s));
    }

    std::vector<int> unknowns;
    for (int j = 0; j <= n; ++j) {
        if (j == 0 && bc.first == BoundaryCondition::dirichlet)
            continue;
        if (j == n && bc.second == BoundaryCondition::dirichlet)
            continue;
        unknowns.push_back(j);
    }
    const double h = std::numbers::pi / n;
    DoubledProblem out{
        n,
        bc,
        big,
        h,
        periodic_laplacian(big, big * h),
        UnitaryRep::from_signed_permutations(Subgroup::whole(G), big, perm, sign),
        unknowns,
        static_cast<int>(unknowns.size()),
    };
    if (equivariance_residual(out.rep, out.laplacian) > 1e-10)
        fail(Errc::internal_inconsistency, "doubled Laplacian is not invariant");
    return out;
}

/// Orthonormal basis of the fully invariant doubled grid functions.
inline Matrix invariant_basis(const DoubledProblem &p) {
    return isotypical_basis(p.rep, Character::trivial(p.rep.group()));
}

/// Rank of the restriction of invariant functions to the single copy's
/// unknowns; equals the invariant dimension when restriction is bijective.
inline int restriction_rank(const DoubledProblem &p) {
    const Matrix b = invariant_basis(p);
    Matrix r(static_cast<Eigen::Index>(p.copy_unknowns.size()), b.cols());
    for (size_t i = 0; i < p.copy_unknowns.size(); ++i)
        r.row(static_cast<Eigen::Index>(i)) = b.row(p.copy_unknowns[i]);
    return numeric_rank(r);
}

/// The k lowest eigenvalues of the doubled Laplacian on invariant
/// functions: the discrete mixed boundary-value spectrum.
inline std::vector<double> mixed_bvp_spectrum(const DoubledProblem &p, int k) {
    const Matrix b = invariant_basis(p);
    require(k >= 1 && k < b.cols(),
            "eigenvalue count must be below the invariant dimension " +
                std::to_string(b.cols()));
    const Matrix block = b.adjoint() * p.laplacian * b;
    Eigen::SelfAdjointEigenSolver<Matrix> es(block, Eigen::EigenvaluesOnly);
    std::vector<double> out;
    for (int i = 0; i < k; ++i)
        out.push_back(es.eigenvalues()(i));
    return out;
}

} // namespace eqfred
