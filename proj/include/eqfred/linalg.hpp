#pragma once

// Dense complex linear algebra helpers: rank decisions with an explicit
// indeterminacy band, deterministic orthonormal bases, norms.

#include "error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <tuple>
#include <utility>
#include <vector>

namespace eqfred {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Relative rank tolerance: singular values below kRankTol * max(1, s_max)
/// count as zero.
inline constexpr double kRankTol = 1e-8;
/// Values within this factor of the threshold are refused as ambiguous.
inline constexpr double kIndeterminateBand = 10.0;

inline Eigen::VectorXd singular_values(const Matrix &m) {
    if (m.size() == 0)
        return Eigen::VectorXd();
    if (std::min(m.rows(), m.cols()) <= 16)
        return Eigen::JacobiSVD<Matrix>(m).singularValues();
    return Eigen::BDCSVD<Matrix>(m).singularValues();
}

/// Spectral norm (largest singular value).
inline double op_norm(const Matrix &m) {
    if (m.size() == 0)
        return 0.0;
    return singular_values(m)(0);
}

inline double rank_threshold(double largest) {
    return kRankTol * std::max(1.0, largest);
}

inline bool in_indeterminate_band(double value, double threshold) {
    return value >= threshold / kIndeterminateBand &&
           value < threshold * kIndeterminateBand;
}

/// Numerical rank of `m` under the shared tolerance rule.
/// Throws numeric_indeterminate when a singular value sits too close to the
/// threshold to decide.
inline int numeric_rank(const Matrix &m) {
    const Eigen::VectorXd s = singular_values(m);
    if (s.size() == 0)
        return 0;
    const double thr = rank_threshold(s(0));
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (in_indeterminate_band(s(i), thr)) {
            std::ostringstream os;
            os << "singular value " << s(i) << " within a factor "
               << kIndeterminateBand << " of rank threshold " << thr;
            fail(Errc::numeric_indeterminate, os.str());
        }
        if (s(i) >= thr)
            ++rank;
    }
    return rank;
}

/// Orthonormal basis of the column space of `m` by Gram-Schmidt with
/// column pivoting. Pivot rule: largest residual norm, lowest column index
/// on ties. Re-orthogonalizes once per step. Stops when the largest
/// residual drops below the rank threshold (indeterminate band throws).
inline Matrix orthonormal_range(const Matrix &m) {
    const Eigen::Index n = m.rows();
    const Eigen::Index cols = m.cols();
    Matrix work = m;
    Matrix basis(n, std::min(n, cols));
    Eigen::VectorXd norms = work.colwise().norm().transpose();
    const double scale = norms.size() ? norms.maxCoeff() : 0.0;
    const double thr = rank_threshold(scale);
    std::vector<bool> used(static_cast<size_t>(cols), false);
    Eigen::Index rank = 0;
    while (rank < basis.cols()) {
        auto pick = [&] {
            Eigen::Index p = -1;
            double b = -1.0;
            for (Eigen::Index j = 0; j < cols; ++j) {
                if (!used[static_cast<size_t>(j)] && norms(j) > b) {
                    b = norms(j);
                    p = j;
                }
            }
            return std::pair{p, b};
        };
        auto [pivot, best] = pick();
        if (pivot < 0)
            break;
        // Downdated norms lose accuracy once they are small relative to the
        // originals; refresh them before making a rank decision.
        if (best < 1e-4 * std::max(1.0, scale)) {
            for (Eigen::Index j = 0; j < cols; ++j)
                if (!used[static_cast<size_t>(j)])
                    norms(j) = work.col(j).norm();
            std::tie(pivot, best) = pick();
        }
        best = work.col(pivot).norm();
        if (in_indeterminate_band(best, thr)) {
            std::ostringstream os;
            os << "residual column norm " << best
               << " within the indeterminate band of threshold " << thr;
            fail(Errc::numeric_indeterminate, os.str());
        }
        if (best < thr)
            break;
        Vector q = work.col(pivot) / best;
        if (rank > 0) {
            auto prev = basis.leftCols(rank);
            q -= prev * (prev.adjoint() * q);
            q.normalize();
        }
        basis.col(rank) = q;
        used[static_cast<size_t>(pivot)] = true;
        ++rank;
        // work -= q (q^* work)
        const Eigen::RowVectorXcd coeff = q.adjoint() * work;
        work.noalias() -= q * coeff;
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double c = std::abs(coeff(j));
            norms(j) = std::sqrt(std::max(0.0, norms(j) * norms(j) - c * c));
        }
        norms(pivot) = 0.0;
    }
    return basis.leftCols(rank);
}

/// Smallest singular value; 0 for an empty block.
inline double smallest_singular_value(const Matrix &m) {
    const Eigen::VectorXd s = singular_values(m);
    return s.size() ? s(s.size() - 1) : 0.0;
}

} // namespace eqfred
