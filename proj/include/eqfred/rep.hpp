#pragma once

// Finite-dimensional unitary representations of subgroups of a finite
// abelian group: isotypical projectors and bases, multiplicities,
// restriction to isotypical components, induction and the explicit
// Frobenius maps.

#include "group.hpp"
#include "linalg.hpp"

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace eqfred {

/// Tolerance for the homomorphism and unitarity checks on representations.
inline constexpr double kRepTol = 1e-10;
/// Commutator tolerance for accepting a matrix as equivariant.
inline constexpr double kEquivarianceTol = 1e-8;

/// Residual norm: operator norm for small matrices, Frobenius (an upper
/// bound) for large ones.
inline double residual_norm(const Matrix &m) {
    if (m.size() == 0)
        return 0.0;
    if (std::max(m.rows(), m.cols()) <= 32)
        return op_norm(m);
    return m.norm();
}

/// Kronecker product a (x) b.
inline Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
    return out;
}

/// A unitary representation of a subgroup H of Gamma (H may be all of
/// Gamma), stored as one matrix per element of H in H's canonical order.
class UnitaryRep {
public:
    UnitaryRep(Subgroup domain, int dim, std::vector<Matrix> matrices)
        : domain_(std::move(domain)), dim_(dim), matrices_(std::move(matrices)) {
        require(dim_ >= 0, "representation dimension must be nonnegative");
        require(matrices_.size() == domain_.elements().size(),
                "representation needs one matrix per group element");
        for (size_t i = 0; i < matrices_.size(); ++i)
            require(matrices_[i].rows() == dim_ && matrices_[i].cols() == dim_,
                    "representation matrix for (" +
                        element_key(domain_.elements()[i]) + ") has wrong shape");
        validate();
    }

    /// Representation on C^n where each element acts by a signed
    /// permutation: U(h) e_j = sign[h][j] e_{perm[h][j]}. Validated
    /// combinatorially, so large grid spaces stay cheap.
    static UnitaryRep from_signed_permutations(
        Subgroup domain, int dim, const std::vector<std::vector<int>> &perm,
        const std::vector<std::vector<int>> &sign) {
        const auto &elems = domain.elements();
        require(perm.size() == elems.size() && sign.size() == elems.size(),
                "signed permutation table size mismatch");
        const Group &G = domain.parent();
        for (size_t a = 0; a < elems.size(); ++a) {
            require(perm[a].size() == static_cast<size_t>(dim) &&
                        sign[a].size() == static_cast<size_t>(dim),
                    "signed permutation has wrong length");
            std::vector<bool> hit(static_cast<size_t>(dim), false);
            for (int j = 0; j < dim; ++j) {
                const int t = perm[a][static_cast<size_t>(j)];
                require(t >= 0 && t < dim && !hit[static_cast<size_t>(t)],
                        "not a permutation at (" + element_key(elems[a]) + ")");
                hit[static_cast<size_t>(t)] = true;
                const int s = sign[a][static_cast<size_t>(j)];
                require(s == 1 || s == -1, "signs must be +-1");
            }
        }
        for (size_t a = 0; a < elems.size(); ++a)
            for (size_t b = 0; b < elems.size(); ++b) {
                const size_t c = domain.position(G.add(elems[a], elems[b]));
                for (int j = 0; j < dim; ++j) {
                    const auto ju = static_cast<size_t>(j);
                    const int mid = perm[b][ju];
                    const auto mu = static_cast<size_t>(mid);
                    require(perm[a][mu] == perm[c][ju] &&
                                sign[a][mu] * sign[b][ju] == sign[c][ju],
                            "signed permutations are not a homomorphism at (" +
                                element_key(elems[a]) + ")(" +
                                element_key(elems[b]) + ")");
                }
            }
        std::vector<Matrix> mats;
        mats.reserve(elems.size());
        for (size_t a = 0; a < elems.size(); ++a) {
            Matrix m = Matrix::Zero(dim, dim);
            for (int j = 0; j < dim; ++j)
                m(perm[a][static_cast<size_t>(j)], j) =
                    static_cast<double>(sign[a][static_cast<size_t>(j)]);
            mats.push_back(std::move(m));
        }
        return UnitaryRep(std::move(domain), dim, std::move(mats), Trusted{});
    }

    const Subgroup &domain() const { return domain_; }
    const Group &group() const { return domain_.parent(); }
    int dim() const { return dim_; }
    const std::vector<Matrix> &matrices() const { return matrices_; }

    const Matrix &operator()(const Element &h) const {
        return matrices_[domain_.position(h)];
    }

private:
    friend UnitaryRep conjugation_rep(const UnitaryRep &);
    friend UnitaryRep induce(const UnitaryRep &, const Group &);

    // Skips validation; for constructions that preserve it by design.
    struct Trusted {};
    UnitaryRep(Subgroup domain, int dim, std::vector<Matrix> matrices, Trusted)
        : domain_(std::move(domain)), dim_(dim), matrices_(std::move(matrices)) {}

    void validate() const {
        const Group &G = domain_.parent();
        const auto &elems = domain_.elements();
        const Matrix id = Matrix::Identity(dim_, dim_);
        for (size_t a = 0; a < elems.size(); ++a) {
            const Matrix &u = matrices_[a];
            if (residual_norm(u.adjoint() * u - id) > kRepTol)
                fail(Errc::invalid_input, "representation matrix at (" +
                                              element_key(elems[a]) +
                                              ") is not unitary");
        }
        if (residual_norm((*this)(G.identity()) - id) > kRepTol)
            fail(Errc::invalid_input, "identity does not act trivially");
        for (size_t a = 0; a < elems.size(); ++a)
            for (size_t b = 0; b < elems.size(); ++b) {
                const Matrix &uab = (*this)(G.add(elems[a], elems[b]));
                if (residual_norm(matrices_[a] * matrices_[b] - uab) > kRepTol)
                    fail(Errc::invalid_input,
                         "representation is not a homomorphism at (" +
                             element_key(elems[a]) + ")(" +
                             element_key(elems[b]) + ")");
            }
    }

    Subgroup domain_;
    int dim_;
    std::vector<Matrix> matrices_;
};

// --- standard constructions -------------------------------------------

/// Left regular representation of G: U(g) e_x = e_{g+x}.
inline UnitaryRep regular_rep(const Group &G) {
    const auto elems = G.elements();
    const int n = G.order();
    std::vector<Matrix> mats;
    for (const auto &g : elems) {
        Matrix m = Matrix::Zero(n, n);
        for (const auto &x : elems)
            m(static_cast<Eigen::Index>(G.index_of(G.add(g, x))),
              static_cast<Eigen::Index>(G.index_of(x))) = 1.0;
        mats.push_back(std::move(m));
    }
    return UnitaryRep(Subgroup::whole(G), n, std::move(mats));
}

/// The one-dimensional H-module V_chi.
inline UnitaryRep character_rep(const Subgroup &H, const Character &chi) {
    std::vector<Matrix> mats;
    for (const auto &h : H.elements())
        mats.push_back(Matrix::Constant(1, 1, char_eval(chi, h)));
    return UnitaryRep(H, 1, std::move(mats));
}

inline UnitaryRep character_rep(const SubgroupCharacter &chi) {
    return character_rep(chi.subgroup(), chi.representative());
}

/// dim copies of the trivial representation.
inline UnitaryRep trivial_rep(const Subgroup &H, int dim) {
    return UnitaryRep(H, dim,
                      std::vector<Matrix>(H.elements().size(),
                                          Matrix::Identity(dim, dim)));
}

inline UnitaryRep direct_sum(const std::vector<UnitaryRep> &parts) {
    require(!parts.empty(), "direct_sum of nothing");
    const Subgroup &H = parts.front().domain();
    int dim = 0;
    for (const auto &p : parts) {
        require(p.domain() == H, "direct_sum: domains differ");
        dim += p.dim();
    }
    std::vector<Matrix> mats;
    for (size_t a = 0; a < H.elements().size(); ++a) {
        Matrix m = Matrix::Zero(dim, dim);
        Eigen::Index off = 0;
        for (const auto &p : parts) {
            m.block(off, off, p.dim(), p.dim()) = p.matrices()[a];
            off += p.dim();
        }
        mats.push_back(std::move(m));
    }
    return UnitaryRep(H, dim, std::move(mats));
}

/// H acting on End(C^d) = C^{d*d} (column-major vec) by conjugation.
inline UnitaryRep conjugation_rep(const UnitaryRep &beta) {
    std::vector<Matrix> mats;
    for (const auto &u : beta.matrices())
        mats.push_back(kron(u.conjugate(), u));
    return UnitaryRep(beta.domain(), beta.dim() * beta.dim(), std::move(mats),
                      UnitaryRep::Trusted{});
}

inline Matrix unvec(const Vector &v, Eigen::Index d) {
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

inline Vector vec(const Matrix &m) {
    return Eigen::Map<const Vector>(m.data(), m.size());
}

// --- isotypical projectors --------------------------------------------

/// p_chi = (1/|H|) sum_h conj(chi(h)) U(h), chi a character of the
/// parent group restricted to the representation's domain.
inline Matrix isotypical_projector(const UnitaryRep &rep, const Character &chi) {
    require(chi.parent() == rep.group(),
            "isotypical_projector: character of a different group");
    Matrix p = Matrix::Zero(rep.dim(), rep.dim());
    const auto &elems = rep.domain().elements();
    for (size_t a = 0; a < elems.size(); ++a)
        p += std::conj(char_eval(chi, elems[a])) * rep.matrices()[a];
    return p / static_cast<double>(elems.size());
}

inline Matrix isotypical_projector(const UnitaryRep &rep,
                                   const SubgroupCharacter &chi) {
    require(chi.subgroup() == rep.domain(),
            "isotypical_projector: character of a different subgroup");
    return isotypical_projector(rep, chi.representative());
}

/// Deterministic orthonormal basis of the chi-isotypical subspace.
template <class Chi>
Matrix isotypical_basis(const UnitaryRep &rep, const Chi &chi) {
    return orthonormal_range(isotypical_projector(rep, chi));
}

/// Characters of the representation's domain, in canonical order.
inline std::vector<SubgroupCharacter> domain_characters(const UnitaryRep &rep) {
    return characters_of_subgroup(rep.group(), rep.domain());
}

struct MultiplicityVector {
    Subgroup domain;
    int dim = 0;
    /// Every character of the domain, in canonical order, including zeros.
    std::vector<std::pair<SubgroupCharacter, int>> entries;

    int multiplicity(const SubgroupCharacter &chi) const {
        for (const auto &[c, m] : entries)
            if (c == chi)
                return m;
        fail(Errc::invalid_input, "character not in the domain's dual");
    }

    int multiplicity(const Character &chi) const {
        return multiplicity(SubgroupCharacter(domain, chi));
    }

    int total() const {
        int s = 0;
        for (const auto &e : entries)
            s += e.second;
        return s;
    }
};

/// Multiplicity of each character = rank of its isotypical projector.
inline MultiplicityVector decompose(const UnitaryRep &rep) {
    MultiplicityVector mv{rep.domain(), rep.dim(), {}};
    for (auto &chi : domain_characters(rep)) {
        const int r = numeric_rank(isotypical_projector(rep, chi));
        mv.entries.emplace_back(std::move(chi), r);
    }
    if (mv.total() != rep.dim()) {
        std::ostringstream os;
        os << "isotypical ranks sum to " << mv.total() << " but dim is "
           << rep.dim();
        fail(Errc::internal_inconsistency, os.str());
    }
    return mv;
}

// --- equivariant endomorphisms ----------------------------------------

/// Commutator residual max_h |T U(h) - U(h) T|, relative to max(1, |T|).
inline double equivariance_residual(const UnitaryRep &rep, const Matrix &t) {
    double worst = 0.0;
    const double scale = std::max(1.0, t.norm());
    for (const auto &u : rep.matrices())
        worst = std::max(worst, (t * u - u * t).norm() / scale);
    return worst;
}

class EquivariantEndomorphism {
public:
    EquivariantEndomorphism(UnitaryRep rep, Matrix matrix)
        : rep_(std::move(rep)), matrix_(std::move(matrix)) {
        require(matrix_.rows() == rep_.dim() && matrix_.cols() == rep_.dim(),
                "endomorphism shape does not match the representation");
        const double r = equivariance_residual(rep_, matrix_);
        if (r > kEquivarianceTol) {
            std::ostringstream os;
            os << "matrix does not commute with the group action (residual "
               << r << ")";
            fail(Errc::invalid_input, os.str());
        }
    }

    const UnitaryRep &rep() const { return rep_; }
    const Matrix &matrix() const { return matrix_; }

private:
    UnitaryRep rep_;
    Matrix matrix_;
};

/// pi_alpha(T): T compressed to the deterministic orthonormal basis of the
/// alpha-isotypical subspace.
template <class Chi>
Matrix pi_alpha_restrict(const EquivariantEndomorphism &t, const Chi &alpha) {
    const Matrix b = isotypical_basis(t.rep(), alpha);
    return b.adjoint() * t.matrix() * b;
}

// --- induction ----------------------------------------------------------

/// Lexicographically least representative of each coset of H, sorted.
inline std::vector<Element> coset_transversal(const Subgroup &H) {
    const Group &G = H.parent();
    std::vector<bool> covered(static_cast<size_t>(G.order()), false);
    std::vector<Element> reps;
    for (const auto &g : G.elements()) {
        if (covered[G.index_of(g)])
            continue;
        reps.push_back(g);
        for (const auto &h : H.elements())
            covered[G.index_of(G.add(g, h))] = true;
    }
    return reps;
}

/// Writes g = t_r + h with t_r in the transversal and h in H.
inline std::pair<size_t, Element> split_coset(const Subgroup &H,
                                              const std::vector<Element> &transversal,
                                              const Element &g) {
    const Group &G = H.parent();
    for (size_t r = 0; r < transversal.size(); ++r) {
        Element h = G.subtract(g, transversal[r]);
        if (H.contains(h))
            return {r, std::move(h)};
    }
    fail(Errc::internal_inconsistency, "element outside every coset");
}

/// Ind_H^Gamma(V) on V^(Gamma/H): block r holds t_r (x) V. The action is
/// g . (t_r (x) v) = t_{r'} (x) V(h) v where g + t_r = t_{r'} + h.
inline UnitaryRep induce(const UnitaryRep &v, const Group &gamma) {
    const Subgroup &H = v.domain();
    require(H.parent() == gamma, "induce: H is not a subgroup of Gamma");
    const auto transversal = coset_transversal(H);
    const auto blocks = static_cast<Eigen::Index>(transversal.size());
    const int d = v.dim();
    std::vector<Matrix> mats;
    for (const auto &g : gamma.elements()) {
        Matrix m = Matrix::Zero(blocks * d, blocks * d);
        for (Eigen::Index r = 0; r < blocks; ++r) {
            auto [rp, h] = split_coset(H, transversal,
                                       gamma.add(g, transversal[static_cast<size_t>(r)]));
            m.block(static_cast<Eigen::Index>(rp) * d, r * d, d, d) = v(h);
        }
        mats.push_back(std::move(m));
    }
    return UnitaryRep(Subgroup::whole(gamma), static_cast<int>(blocks) * d,
                      std::move(mats), UnitaryRep::Trusted{});
}

/// Phi(xi) = (1/|H|) sum_{g in Gamma} g (x)_{C[H]} xi for an H-invariant
/// xi; lands in Ind_H^Gamma(V)^Gamma.
inline Vector frobenius_invariant_map(const UnitaryRep &v, const Group &gamma,
                                      const Vector &xi) {
    const Subgroup &H = v.domain();
    require(H.parent() == gamma, "frobenius_invariant_map: H not in Gamma");
    require(xi.size() == v.dim(), "frobenius_invariant_map: vector size");
    const double scale = std::max(1.0, xi.norm());
    for (const auto &u : v.matrices())
        require((u * xi - xi).norm() <= kRepTol * scale,
                "frobenius_invariant_map: vector is not H-invariant");
    const auto transversal = coset_transversal(H);
    const int d = v.dim();
    Vector out = Vector::Zero(static_cast<Eigen::Index>(transversal.size()) * d);
    for (const auto &g : gamma.elements()) {
        auto [r, h] = split_coset(H, transversal, g);
        out.segment(static_cast<Eigen::Index>(r) * d, d) += v(h) * xi;
    }
    return out / static_cast<double>(H.order());
}

/// Phi(f)(x) = (1/|H|) sum_{g in Gamma} g (x)_{C[H]} f(g^{-1} x) for an
/// H-intertwiner f : Res(calH) -> V. Returns the matrix of the
/// Gamma-intertwiner calH -> Ind_H^Gamma(V).
inline Matrix frobenius_hom_map(const UnitaryRep &calH, const UnitaryRep &v,
                                const Matrix &f) {
    const Subgroup &H = v.domain();
    const Group &gamma = calH.group();
    require(calH.domain().is_whole_group(),
            "frobenius_hom_map: source must be a Gamma-representation");
    require(H.parent() == gamma, "frobenius_hom_map: H not in Gamma");
    require(f.rows() == v.dim() && f.cols() == calH.dim(),
            "frobenius_hom_map: map has wrong shape");
    const double scale = std::max(1.0, f.norm());
    for (const auto &h : H.elements())
        require((f * calH(h) - v(h) * f).norm() <= kRepTol * scale,
                "frobenius_hom_map: map does not intertwine the H-actions");
    const auto transversal = coset_transversal(H);
    const int d = v.dim();
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(transversal.size()) * d,
                              calH.dim());
    for (const auto &g : gamma.elements()) {
        auto [r, h] = split_coset(H, transversal, g);
        out.middleRows(static_cast<Eigen::Index>(r) * d, d) +=
            v(h) * f * calH(gamma.negate(g));
    }
    return out / static_cast<double>(H.order());
}

// --- commutant and the kernel/image of pi_alpha -------------------------

struct CommutantFactor {
    SubgroupCharacter chi;
    int multiplicity = 0;
};

/// Simple factors M_k(C) of the commutant: characters that occur, with
/// their multiplicities.
inline std::vector<CommutantFactor> commutant_factors(const UnitaryRep &rep) {
    std::vector<CommutantFactor> out;
    for (auto &[chi, m] : decompose(rep).entries)
        if (m > 0)
            out.push_back({chi, m});
    return out;
}

struct KerImSplit {
    std::vector<CommutantFactor> factors;
    /// Factor indices j with alpha|_H = beta_j (the image) and the rest.
    std::vector<size_t> image_factors;
    std::vector<size_t> kernel_factors;
    int predicted_image_dim = 0;
    int predicted_kernel_dim = 0;
    int computed_image_dim = 0;
    int computed_kernel_dim = 0;
    /// Rank of pi_alpha on each factor's span.
    std::vector<int> computed_factor_image_dims;
};

/// The operator on Ind_H^Gamma(beta) given by a Gamma-invariant element of
/// Ind_H^Gamma(End beta) (pointwise action on the transversal blocks).
inline Matrix induced_endomorphism(const Vector &phi, int d) {
    const Eigen::Index blocks = phi.size() / (static_cast<Eigen::Index>(d) * d);
    Matrix op = Matrix::Zero(blocks * d, blocks * d);
    for (Eigen::Index r = 0; r < blocks; ++r)
        op.block(r * d, r * d, d, d) =
            unvec(phi.segment(r * d * d, static_cast<Eigen::Index>(d) * d), d);
    return op;
}

/// Predicts ker/im of pi_alpha on Ind_H^Gamma(End beta)^Gamma factor by
/// factor, then confirms the prediction by evaluating pi_alpha on the
/// Frobenius image of a spanning set of End(beta)^H.
inline KerImSplit ker_im_pi_alpha(const Subgroup &H, const Group &gamma,
                                  const UnitaryRep &beta, const Character &alpha) {
    require(H.parent() == gamma, "ker_im_pi_alpha: H not in Gamma");
    require(beta.domain() == H, "ker_im_pi_alpha: beta is not an H-module");
    require(alpha.parent() == gamma, "ker_im_pi_alpha: alpha not in dual of Gamma");

    KerImSplit out;
    out.factors = commutant_factors(beta);
    for (size_t j = 0; j < out.factors.size(); ++j) {
        const int k2 = out.factors[j].multiplicity * out.factors[j].multiplicity;
        if (associated(alpha, out.factors[j].chi, H)) {
            out.image_factors.push_back(j);
            out.predicted_image_dim += k2;
        } else {
            out.kernel_factors.push_back(j);
            out.predicted_kernel_dim += k2;
        }
    }

    const int d = beta.dim();
    const UnitaryRep ind_beta = induce(beta, gamma);
    const UnitaryRep conj = conjugation_rep(beta);
    const UnitaryRep ind_end = induce(conj, gamma);
    const Matrix invariant_basis =
        isotypical_basis(conj, Character::trivial(gamma));
    const Matrix alpha_basis = isotypical_basis(ind_beta, alpha);

    std::vector<Vector> all_images;
    for (const auto &factor : out.factors) {
        const Matrix pj = isotypical_projector(beta, factor.chi);
        std::vector<Vector> span, images;
        for (Eigen::Index c = 0; c < invariant_basis.cols(); ++c) {
            const Matrix x = pj * unvec(invariant_basis.col(c), d) * pj;
            const Vector phi = frobenius_invariant_map(conj, gamma, vec(x));
            for (const auto &u : ind_end.matrices())
                if ((u * phi - phi).norm() > kEquivarianceTol * std::max(1.0, phi.norm()))
                    fail(Errc::internal_inconsistency,
                         "Frobenius image is not Gamma-invariant");
            const EquivariantEndomorphism op(ind_beta, induced_endomorphism(phi, d));
            const Matrix image =
                alpha_basis.adjoint() * op.matrix() * alpha_basis;
            span.push_back(vec(x));
            images.push_back(vec(image));
        }
        auto stack = [](const std::vector<Vector> &cols, Eigen::Index rows) {
            Matrix m(rows, static_cast<Eigen::Index>(cols.size()));
            for (size_t i = 0; i < cols.size(); ++i)
                m.col(static_cast<Eigen::Index>(i)) = cols[i];
            return m;
        };
        const int span_dim = numeric_rank(stack(span, static_cast<Eigen::Index>(d) * d));
        if (span_dim != factor.multiplicity * factor.multiplicity)
            fail(Errc::internal_inconsistency,
                 "factor span has unexpected dimension");
        const Eigen::Index img_rows = alpha_basis.cols() * alpha_basis.cols();
        out.computed_factor_image_dims.push_back(
            img_rows == 0 ? 0 : numeric_rank(stack(images, img_rows)));
        all_images.insert(all_images.end(), images.begin(), images.end());
    }

    const Eigen::Index img_rows = alpha_basis.cols() * alpha_basis.cols();
    if (img_rows > 0 && !all_images.empty()) {
        Matrix m(img_rows, static_cast<Eigen::Index>(all_images.size()));
        for (size_t i = 0; i < all_images.size(); ++i)
            m.col(static_cast<Eigen::Index>(i)) = all_images[i];
        out.computed_image_dim = numeric_rank(m);
    }
    int total = 0;
    for (const auto &f : out.factors)
        total += f.multiplicity * f.multiplicity;
    out.computed_kernel_dim = total - out.computed_image_dim;

    bool ok = out.computed_image_dim == out.predicted_image_dim &&
              out.computed_kernel_dim == out.predicted_kernel_dim;
    for (size_t j = 0; j < out.factors.size(); ++j) {
        const int k2 = out.factors[j].multiplicity * out.factors[j].multiplicity;
        const bool in_image =
            std::find(out.image_factors.begin(), out.image_factors.end(), j) !=
            out.image_factors.end();
        ok = ok && out.computed_factor_image_dims[j] == (in_image ? k2 : 0);
    }
    if (!ok) {
        std::ostringstream os;
        os << "predicted image dim " << out.predicted_image_dim
           << " / kernel dim " << out.predicted_kernel_dim << " but computed "
           << out.computed_image_dim << " / " << out.computed_kernel_dim;
        fail(Errc::internal_inconsistency, os.str());
    }
    return out;
}

} // namespace eqfred
