// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include "oracles.hpp"

#include <eqfred/cli.hpp>
#include <eqfred/eqfred.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

using namespace eqfred;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_s; // 0: no runtime bound
    std::function<Outcome()> run;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

// --- AC1 ----------------------------------------------------------------

Outcome projector_suite() {
    oracle::Rng rng(1001);
    const auto groups = oracle::group_orders_up_to(8);
    double worst = 0.0;
    for (int c = 0; c < 200; ++c) {
        const Group G(groups[static_cast<size_t>(c) % groups.size()]);
        const int d = std::uniform_int_distribution<int>(1, 8)(rng);
        const auto rep = oracle::random_rep(rng, Subgroup::whole(G), d);
        const auto chars = dual_characters(G);
        std::vector<Matrix> p;
        Matrix sum = Matrix::Zero(d, d);
        for (const auto &chi : chars) {
            p.push_back(isotypical_projector(rep, chi));
            sum += p.back();
            worst = std::max(worst, (p.back() * p.back() - p.back()).norm());
            worst = std::max(worst, (p.back().adjoint() - p.back()).norm());
        }
        for (size_t i = 0; i < p.size(); ++i)
            for (size_t j = i + 1; j < p.size(); ++j)
                worst = std::max(worst, (p[i] * p[j]).norm());
        worst = std::max(worst, (sum - Matrix::Identity(d, d)).norm());
    }
    return {worst <= 1e-10, "200 cases, max residual " + fmt(worst)};
}

// --- AC2 ----------------------------------------------------------------

Outcome induced_character_exhaustive() {
    long cases = 0, bad = 0;
    for (const auto &orders : oracle::group_orders_up_to(12)) {
        const Group G(orders);
        for (const auto &H : all_subgroups(G))
            for (const auto &chiV : characters_of_subgroup(G, H)) {
                ++cases;
                const auto mv = decompose(induce(character_rep(chiV), G));
                for (const auto &[chi, m] : mv.entries) {
                    const bool restricts = oracle::same_on(
                        H, chi.representative().exponents(), chiV.representative().exponents());
                    if (m != (restricts ? 1 : 0))
                        ++bad;
                }
            }
    }
    return {bad == 0, std::to_string(cases) + " (G, H, chi) triples, " +
                          std::to_string(bad) + " wrong multiplicities"};
}

// --- AC3 ----------------------------------------------------------------

Outcome frobenius_bijectivity() {
    oracle::Rng rng(1003);
    const auto groups = oracle::group_orders_up_to(8);
    int bad = 0;
    long total_dim = 0;
    for (int c = 0; c < 100; ++c) {
        const Group G(oracle::pick(rng, groups));
        const Subgroup H = oracle::pick(rng, all_subgroups(G));
        const auto calH = oracle::random_rep(rng, Subgroup::whole(G),
                                             std::uniform_int_distribution<int>(1, 4)(rng));
        const auto v = oracle::random_rep(rng, H, std::uniform_int_distribution<int>(1, 4)(rng));
        const auto ind = induce(v, G);

        std::vector<Matrix> res;
        for (const auto &h : H.elements())
            res.push_back(calH(h));
        const Matrix hom_h = oracle::intertwiner_space(res, v.matrices());
        const Matrix hom_g = oracle::intertwiner_space(calH.matrices(), ind.matrices());
        total_dim += hom_h.cols();
        if (hom_h.cols() != hom_g.cols()) {
            ++bad;
            continue;
        }
        if (hom_h.cols() == 0)
            continue;
        Matrix images(static_cast<Eigen::Index>(ind.dim()) * calH.dim(), hom_h.cols());
        for (Eigen::Index j = 0; j < hom_h.cols(); ++j) {
            // column-major vec of a dimV x dim calH matrix
            Matrix fm(v.dim(), calH.dim());
            for (int col = 0; col < calH.dim(); ++col)
                fm.col(col) = hom_h.col(j).segment(static_cast<Eigen::Index>(col) * v.dim(),
                                                   v.dim());
            const Matrix phi = frobenius_hom_map(calH, v, fm);
            images.col(j) = Eigen::Map<const Vector>(phi.data(), phi.size());
        }
        if (oracle::svd_rank(images) != hom_h.cols())
            ++bad;
    }
    return {bad == 0, "100 instances, total Hom dimension " + std::to_string(total_dim) + ", " +
                          std::to_string(bad) + " failures"};
}

// --- AC4 ----------------------------------------------------------------

Outcome ker_im_oracle() {
    oracle::Rng rng(1004);
    long cases = 0, bad = 0;
    std::string first_bad;
    for (const auto &orders : oracle::group_orders_up_to(8)) {
        const Group G(orders);
        const auto alphas = dual_characters(G);
        for (const auto &H : all_subgroups(G)) {
            const auto iso = characters_of_subgroup(G, H);
            const size_t n = iso.size();
            // subsets of at most 3 isotypes, each with multiplicity 1 or 2
            for (unsigned mask = 1; mask < (1u << n); ++mask) {
                std::vector<size_t> picked;
                for (size_t i = 0; i < n; ++i)
                    if (mask & (1u << i))
                        picked.push_back(i);
                if (picked.size() > 3)
                    continue;
                for (unsigned mult = 0; mult < (1u << picked.size()); ++mult) {
                    std::vector<std::vector<int>> chars;
                    std::vector<int> m(picked.size());
                    for (size_t k = 0; k < picked.size(); ++k) {
                        m[k] = (mult & (1u << k)) ? 2 : 1;
                        for (int r = 0; r < m[k]; ++r)
                            chars.push_back(iso[picked[k]].representative().exponents());
                    }
                    const int d = static_cast<int>(chars.size());
                    const auto beta =
                        oracle::rep_from_characters(H, chars, oracle::random_unitary(rng, d));
                    for (const auto &alpha : alphas) {
                        ++cases;
                        int want_im = 0, total = 0;
                        for (size_t k = 0; k < picked.size(); ++k) {
                            total += m[k] * m[k];
                            if (oracle::same_on(H, alpha.exponents(),
                                                iso[picked[k]].representative().exponents()))
                                want_im += m[k] * m[k];
                        }
                        try {
                            const auto s = ker_im_pi_alpha(H, G, beta, alpha);
                            if (s.computed_image_dim != want_im ||
                                s.computed_kernel_dim != total - want_im ||
                                s.predicted_image_dim != want_im ||
                                s.predicted_kernel_dim != total - want_im)
                                ++bad;
                        } catch (const Error &e) {
                            ++bad;
                            if (first_bad.empty())
                                first_bad = e.what();
                        }
                    }
                }
            }
        }
    }
    std::string detail = std::to_string(cases) + " (G, H, beta, alpha) cases, " +
                         std::to_string(bad) + " mismatches";
    if (!first_bad.empty())
        detail += " (" + first_bad + ")";
    return {bad == 0, detail};
}

// --- AC5 ----------------------------------------------------------------

/// Random bundle whose stabilizers all contain a common smallest one, so
/// that Gamma_0 exists.
eqfred::EquivariantSampleBundle nested_bundle(oracle::Rng &rng, const Group &G,
                                              std::vector<oracle::OrbitSpec> &orbits,
                                              bool force_free) {
    const auto subs = all_subgroups(G);
    const Subgroup s0 = force_free ? subgroup_from_generators(G, {}) : oracle::pick(rng, subs);
    std::vector<Subgroup> above;
    for (const auto &s : subs)
        if (s0.is_subgroup_of(s))
            above.push_back(s);
    orbits.clear();
    int points = 0;
    auto add = [&](const Subgroup &S) {
        const int d = std::uniform_int_distribution<int>(1, 4)(rng);
        orbits.push_back({S, oracle::random_rep(rng, S, d), coset_transversal(S)});
        points += S.index();
    };
    add(s0);
    const int want = std::uniform_int_distribution<int>(1, 4)(rng);
    for (int tries = 0; static_cast<int>(orbits.size()) < want && tries < 20; ++tries) {
        const Subgroup &S = oracle::pick(rng, above);
        if (points + S.index() <= 12)
            add(S);
    }
    return oracle::assemble_bundle(G, orbits);
}

Outcome prim_enumeration() {
    oracle::Rng rng(1005);
    const auto groups = oracle::group_orders_up_to(8);
    int bad = 0;
    size_t classes = 0;
    for (int c = 0; c < 50; ++c) {
        const Group G(oracle::pick(rng, groups));
        std::vector<oracle::OrbitSpec> orbits;
        auto b = nested_bundle(rng, G, orbits, false);
        oracle::randomize_frames(rng, b);

        const XSet x = build_X(b);
        int expected = 0;
        size_t offset = 0;
        for (const auto &o : orbits) {
            const int n = static_cast<int>(commutant_factors(fiber_rep(b, offset)).size());
            if (n != oracle::isotype_count(o.fiber))
                ++bad;
            expected += n;
            offset += o.transversal.size();
        }
        classes += x.size();
        if (static_cast<int>(x.size()) != expected)
            ++bad;

        const Subgroup g0 = minimal_isotropy(b);
        const auto parts = partition_by_beta(x, g0);
        std::set<std::pair<size_t, SubgroupCharacter>> seen;
        size_t count = 0;
        for (const auto &[beta, members] : parts)
            for (const auto &m : members) {
                ++count;
                seen.insert({m.point, m.rho});
                if (!oracle::same_on(g0, beta.representative().exponents(),
                                     m.rho.representative().exponents()))
                    ++bad;
            }
        std::set<std::pair<size_t, SubgroupCharacter>> all;
        for (const auto &o : x)
            for (const auto &m : o.members)
                all.insert({m.point, m.rho});
        if (count != x_size(x) || seen != all)
            ++bad;
    }
    return {bad == 0, "50 bundles, " + std::to_string(classes) + " classes in X/Gamma, " +
                          std::to_string(bad) + " failures"};
}

// --- AC6, AC7 -----------------------------------------------------------

const std::vector<int> kSweepSizes{32, 64, 128};

std::string describe(const RefinementSweep &s) {
    std::string out(to_string(s.verdict));
    out += " [";
    for (size_t i = 0; i < s.table.size(); ++i)
        out += (i ? ", " : "") + fmt(s.table[i].second);
    return out + "]";
}

Outcome elliptic_sweep() {
    const Group z2 = make_group({2});
    const auto triv = fredholm_proxy_sweep(elliptic_family, Character(z2, {0}), kSweepSizes);
    const auto sign = fredholm_proxy_sweep(elliptic_family, Character(z2, {1}), kSweepSizes);
    return {triv.verdict == SweepVerdict::stable && sign.verdict == SweepVerdict::stable,
            "trivial " + describe(triv) + ", sign " + describe(sign)};
}

Outcome separation_sweep() {
    const Group z2 = make_group({2});
    const auto triv =
        fredholm_proxy_sweep(alpha_elliptic_family, Character(z2, {0}), kSweepSizes);
    const auto sign =
        fredholm_proxy_sweep(alpha_elliptic_family, Character(z2, {1}), kSweepSizes);
    const bool drop = triv.table.back().second * 10.0 <= triv.table.front().second;
    return {triv.verdict == SweepVerdict::degenerating && drop &&
                sign.verdict == SweepVerdict::stable,
            "trivial " + describe(triv) + ", sign " + describe(sign)};
}

// --- AC8 ----------------------------------------------------------------

bool svd_invertible(const std::vector<Matrix> &values) {
    for (const auto &v : values) {
        Eigen::JacobiSVD<Matrix> svd(v);
        const auto &s = svd.singularValues();
        if (s.size() && s(s.size() - 1) < 1e-8 * std::max(1.0, s(0)))
            return false;
    }
    return true;
}

Outcome free_action_collapse() {
    oracle::Rng rng(1008);
    const auto groups = oracle::group_orders_up_to(8);
    int bad = 0, invertible = 0;
    for (int c = 0; c < 20; ++c) {
        const Group G(oracle::pick(rng, groups));
        std::vector<oracle::OrbitSpec> orbits;
        const auto b = nested_bundle(rng, G, orbits, true);
        auto s = oracle::random_symbol(rng, b, orbits, 0.3);
        oracle::randomize_frames(rng, s.bundle, &s.values);
        if (minimal_isotropy(s.bundle).order() != 1)
            ++bad;
        const bool plain = pointwise_invertible(s);
        if (plain != svd_invertible(s.values))
            ++bad;
        invertible += plain;
        for (const auto &alpha : dual_characters(G))
            if (alpha_elliptic_check(s, alpha).verdict != plain)
                ++bad;
    }
    return {bad == 0, "20 bundles (" + std::to_string(invertible) + " invertible), " +
                          std::to_string(bad) + " disagreements"};
}

// --- AC9 ----------------------------------------------------------------

Outcome mixed_bvp() {
    using BC = BoundaryCondition;
    const std::array<BoundaryPair, 3> cases{BoundaryPair{BC::dirichlet, BC::neumann},
                                            BoundaryPair{BC::dirichlet, BC::dirichlet},
                                            BoundaryPair{BC::neumann, BC::neumann}};
    const std::array<int, 3> sizes{64, 128, 256};
    bool pass = true;
    std::string detail;
    for (const auto &bc : cases) {
        std::array<double, 3> err{};
        double rel256 = 0.0;
        for (size_t i = 0; i < sizes.size(); ++i) {
            const auto ev = mixed_bvp_spectrum(double_interval_bvp(sizes[i], bc), 5);
            for (int k = 0; k < 5; ++k) {
                const double want = cli::analytic_interval_eigenvalue(bc, k);
                const double e = std::abs(ev[static_cast<size_t>(k)] - want);
                err[i] = std::max(err[i], e);
                if (sizes[i] == 256)
                    rel256 = std::max(rel256, e / std::max(want, 1.0));
            }
        }
        const double o1 = std::log2(err[0] / err[1]), o2 = std::log2(err[1] / err[2]);
        const bool ok = rel256 < 0.01 && std::abs(o1 - 2.0) <= 0.3 && std::abs(o2 - 2.0) <= 0.3;
        pass = pass && ok;
        detail += std::string(detail.empty() ? "" : "; ") + to_char(bc.first) + "," +
                  to_char(bc.second) + " rel " + fmt(rel256) + " orders " + fmt(o1) + "/" +
                  fmt(o2);
    }
    return {pass, detail};
}

// --- AC10 ---------------------------------------------------------------

std::string capture(const std::string &cmd, int &status) {
    std::string out;
    FILE *pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        status = -1;
        return out;
    }
    std::array<char, 4096> buf;
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        out.append(buf.data(), n);
    status = pclose(pipe);
    return out;
}

Outcome cli_determinism() {
    const std::string bin = EQFRED_CLI;
    const std::string fx = EQFRED_FIXTURES;
    const std::vector<std::string> runs{
        "check --input " + fx + "/identity_symbol.json --alpha 0",
        "check --input " + fx + "/fixed_point_diag01.json --alpha 0",
        "check --input " + fx + "/fixed_point_diag01.json --alpha 1",
        "decompose --input " + fx + "/regular_z3.json",
        "induce --input " + fx + "/induce_sign_z2_in_z4.json",
        "prim --input " + fx + "/identity_symbol.json",
        "prim --input " + fx + "/fixed_point_diag01.json",
        "bvp --bc D,N",
        "sweep --scenario alpha-elliptic --alpha 0",
    };
    int bad = 0;
    for (const auto &args : runs) {
        int s1 = 0, s2 = 0;
        const std::string a = capture(bin + " " + args + " 2>/dev/null", s1);
        const std::string b = capture(bin + " " + args + " 2>/dev/null", s2);
        if (a.empty() || a != b || s1 != s2) {
            ++bad;
            std::cerr << "  nondeterministic or empty: " << args << "\n";
        }
    }
    return {bad == 0, std::to_string(runs.size()) + " fixture runs, " + std::to_string(bad) +
                          " differing"};
}

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "projector suite", 10.0, projector_suite},
        {2, "induced multiplicities exhaustive |G| <= 12", 30.0, induced_character_exhaustive},
        {3, "Frobenius bijectivity", 0.0, frobenius_bijectivity},
        {4, "ker/im split of pi_alpha", 60.0, ker_im_oracle},
        {5, "Prim enumeration", 0.0, prim_enumeration},
        {6, "elliptic sweep stable", 0.0, elliptic_sweep},
        {7, "alpha-elliptic separation", 0.0, separation_sweep},
        {8, "free-action collapse", 0.0, free_action_collapse},
        {9, "mixed BVP eigenvalues", 30.0, mixed_bvp},
        {10, "CLI determinism", 0.0, cli_determinism},
    };
    int failed = 0;
    for (const auto &c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0 && secs > c.budget_s) {
            o.pass = false;
            o.detail += "; over the " + fmt(c.budget_s) + " s budget";
        }
        failed += !o.pass;
        std::cout << "AC" << c.id << (c.id < 10 ? "  " : " ") << (o.pass ? "PASS" : "FAIL")
                  << "  " << c.name << ": " << o.detail << " (" << fmt(secs) << " s)"
                  << std::endl;
    }
    std::cout << (criteria.size() - static_cast<size_t>(failed)) << "/" << criteria.size()
              << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
