#pragma once

// Finite abelian groups Z_{n_1} x ... x Z_{n_k}, their subgroups and
// characters. Everything that decides equality works on integer residues
// and exponents; complex values appear only in char_eval.

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <set>
#include <string>
#include <vector>

namespace eqfred {

/// A group element as a residue tuple, residue_j in [0, n_j).
struct Element {
    std::vector<int> residues;

    auto operator<=>(const Element &) const = default;
    bool operator==(const Element &) const = default;
};

/// Comma-joined residue tuple, the element key used in documents.
inline std::string element_key(const Element &g) {
    std::string out;
    for (size_t i = 0; i < g.residues.size(); ++i) {
        if (i)
            out += ',';
        out += std::to_string(g.residues[i]);
    }
    return out;
}

class Group {
public:
    Group() : orders_{1} {}

    explicit Group(std::vector<int> orders) : orders_(std::move(orders)) {
        require(!orders_.empty(), "group needs at least one cyclic factor");
        for (int n : orders_)
            require(n >= 1, "cyclic orders must be >= 1, got " +
                                std::to_string(n));
        order_ = 1;
        lcm_ = 1;
        for (int n : orders_) {
            order_ *= n;
            lcm_ = std::lcm(lcm_, static_cast<std::int64_t>(n));
        }
    }

    const std::vector<int> &orders() const { return orders_; }
    size_t rank() const { return orders_.size(); }
    int order() const { return order_; }
    /// Exponent of the group; all character phases are multiples of 1/lcm.
    std::int64_t exponent() const { return lcm_; }

    Element identity() const {
        return Element{std::vector<int>(orders_.size(), 0)};
    }

    bool contains(const Element &g) const {
        if (g.residues.size() != orders_.size())
            return false;
        for (size_t j = 0; j < orders_.size(); ++j)
            if (g.residues[j] < 0 || g.residues[j] >= orders_[j])
                return false;
        return true;
    }

    void check(const Element &g) const {
        require(contains(g), "element (" + element_key(g) +
                                 ") is not in the group");
    }

    /// Componentwise reduction of an arbitrary integer tuple.
    Element reduce(std::vector<int> r) const {
        require(r.size() == orders_.size(), "residue tuple has wrong length");
        for (size_t j = 0; j < r.size(); ++j) {
            r[j] %= orders_[j];
            if (r[j] < 0)
                r[j] += orders_[j];
        }
        return Element{std::move(r)};
    }

    Element add(const Element &a, const Element &b) const {
        std::vector<int> r(orders_.size());
        for (size_t j = 0; j < r.size(); ++j)
            r[j] = (a.residues[j] + b.residues[j]) % orders_[j];
        return Element{std::move(r)};
    }

    Element negate(const Element &a) const {
        std::vector<int> r(orders_.size());
        for (size_t j = 0; j < r.size(); ++j)
            r[j] = (orders_[j] - a.residues[j]) % orders_[j];
        return Element{std::move(r)};
    }

    Element subtract(const Element &a, const Element &b) const {
        return add(a, negate(b));
    }

    /// Position in the lexicographic enumeration (last factor fastest).
    size_t index_of(const Element &g) const {
        size_t idx = 0;
        for (size_t j = 0; j < orders_.size(); ++j)
            idx = idx * static_cast<size_t>(orders_[j]) +
                  static_cast<size_t>(g.residues[j]);
        return idx;
    }

    Element element_at(size_t idx) const {
        std::vector<int> r(orders_.size());
        for (size_t j = orders_.size(); j-- > 0;) {
            r[j] = static_cast<int>(idx % static_cast<size_t>(orders_[j]));
            idx /= static_cast<size_t>(orders_[j]);
        }
        return Element{std::move(r)};
    }

    /// All elements in lexicographic order of residue tuples.
    std::vector<Element> elements() const {
        std::vector<Element> out;
        out.reserve(static_cast<size_t>(order_));
        for (size_t i = 0; i < static_cast<size_t>(order_); ++i)
            out.push_back(element_at(i));
        return out;
    }

    bool operator==(const Group &o) const { return orders_ == o.orders_; }

private:
    std::vector<int> orders_;
    int order_ = 1;
    std::int64_t lcm_ = 1;
};

inline Group make_group(const std::vector<int> &orders) { return Group(orders); }

/// A subgroup stored as its full, sorted element list.
class Subgroup {
public:
    Subgroup() = default;

    const Group &parent() const { return parent_; }
    const std::vector<Element> &elements() const { return elements_; }
    int order() const { return static_cast<int>(elements_.size()); }
    int index() const { return parent_.order() / order(); }

    bool contains(const Element &g) const {
        return std::binary_search(elements_.begin(), elements_.end(), g);
    }

    bool is_subgroup_of(const Subgroup &other) const {
        if (!(parent_ == other.parent_))
            return false;
        return std::includes(other.elements_.begin(), other.elements_.end(),
                             elements_.begin(), elements_.end());
    }

    bool is_whole_group() const { return order() == parent_.order(); }
    bool is_trivial() const { return order() == 1; }

    /// Position of g within elements(); g must be a member.
    size_t position(const Element &g) const {
        auto it = std::lower_bound(elements_.begin(), elements_.end(), g);
        require(it != elements_.end() && *it == g,
                "element (" + element_key(g) + ") not in subgroup");
        return static_cast<size_t>(it - elements_.begin());
    }

    auto operator<=>(const Subgroup &o) const {
        if (auto c = parent_.orders() <=> o.parent_.orders(); c != 0)
            return c;
        return elements_ <=> o.elements_;
    }
    bool operator==(const Subgroup &o) const {
        return parent_ == o.parent_ && elements_ == o.elements_;
    }

    /// The whole group viewed as a subgroup of itself.
    static Subgroup whole(const Group &g) {
        Subgroup s;
        s.parent_ = g;
        s.elements_ = g.elements();
        return s;
    }

    /// Builds from an element set that is already known to be closed.
    static Subgroup from_closed_set(const Group &g, std::set<Element> elems) {
        Subgroup s;
        s.parent_ = g;
        s.elements_.assign(elems.begin(), elems.end());
        return s;
    }

private:
    Group parent_;
    std::vector<Element> elements_;
};

/// Smallest subgroup of G containing gens, in canonical sorted form.
inline Subgroup subgroup_from_generators(const Group &G,
                                         const std::vector<Element> &gens) {
    for (const auto &g : gens)
        G.check(g);
    std::set<Element> closed{G.identity()};
    std::vector<Element> frontier{G.identity()};
    while (!frontier.empty()) {
        std::vector<Element> next;
        for (const auto &x : frontier)
            for (const auto &g : gens) {
                Element y = G.add(x, g);
                if (closed.insert(y).second)
                    next.push_back(std::move(y));
            }
        frontier = std::move(next);
    }
    return Subgroup::from_closed_set(G, std::move(closed));
}

/// Every subgroup of G, sorted canonically. Intended for small groups.
inline std::vector<Subgroup> all_subgroups(const Group &G) {
    std::set<Subgroup> found{subgroup_from_generators(G, {})};
    std::vector<Subgroup> frontier(found.begin(), found.end());
    const auto elems = G.elements();
    while (!frontier.empty()) {
        std::vector<Subgroup> next;
        for (const auto &H : frontier)
            for (const auto &g : elems) {
                if (H.contains(g))
                    continue;
                std::vector<Element> gens = H.elements();
                gens.push_back(g);
                Subgroup K = subgroup_from_generators(G, gens);
                if (found.insert(K).second)
                    next.push_back(std::move(K));
            }
        frontier = std::move(next);
    }
    return {found.begin(), found.end()};
}

/// chi_a(g) = exp(2 pi i sum_j a_j g_j / n_j).
class Character {
public:
    Character() = default;

    Character(Group parent, std::vector<int> exponents)
        : parent_(std::move(parent)), exponents_(std::move(exponents)) {
        require(exponents_.size() == parent_.rank(),
                "character exponent tuple has wrong length");
        for (size_t j = 0; j < exponents_.size(); ++j)
            require(exponents_[j] >= 0 && exponents_[j] < parent_.orders()[j],
                    "character exponent out of range");
    }

    static Character trivial(const Group &G) {
        return Character(G, std::vector<int>(G.rank(), 0));
    }

    const Group &parent() const { return parent_; }
    const std::vector<int> &exponents() const { return exponents_; }

    /// Exact phase of chi(g) as an integer in [0, exponent()): the value is
    /// exp(2 pi i phase / exponent()).
    std::int64_t phase(const Element &g) const {
        const std::int64_t L = parent_.exponent();
        std::int64_t p = 0;
        for (size_t j = 0; j < exponents_.size(); ++j)
            p += static_cast<std::int64_t>(exponents_[j]) * g.residues[j] *
                 (L / parent_.orders()[j]);
        p %= L;
        return p;
    }

    Character operator*(const Character &o) const {
        require(parent_ == o.parent_, "character parent mismatch");
        std::vector<int> e(exponents_.size());
        for (size_t j = 0; j < e.size(); ++j)
            e[j] = (exponents_[j] + o.exponents_[j]) % parent_.orders()[j];
        return Character(parent_, std::move(e));
    }

    Character conj() const {
        std::vector<int> e(exponents_.size());
        for (size_t j = 0; j < e.size(); ++j)
            e[j] = (parent_.orders()[j] - exponents_[j]) % parent_.orders()[j];
        return Character(parent_, std::move(e));
    }

    bool is_trivial() const {
        return std::all_of(exponents_.begin(), exponents_.end(),
                           [](int a) { return a == 0; });
    }

    auto operator<=>(const Character &o) const {
        if (auto c = parent_.orders() <=> o.parent_.orders(); c != 0)
            return c;
        return exponents_ <=> o.exponents_;
    }
    bool operator==(const Character &o) const {
        return parent_ == o.parent_ && exponents_ == o.exponents_;
    }

private:
    Group parent_;
    std::vector<int> exponents_;
};

/// exp(2 pi i k / L), exact at multiples of a quarter turn.
inline std::complex<double> unit_root(std::int64_t k, std::int64_t L) {
    k %= L;
    if (k < 0)
        k += L;
    if ((4 * k) % L == 0) {
        switch ((4 * k) / L) {
        case 0:
            return {1.0, 0.0};
        case 1:
            return {0.0, 1.0};
        case 2:
            return {-1.0, 0.0};
        default:
            return {0.0, -1.0};
        }
    }
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(L);
    return {std::cos(angle), std::sin(angle)};
}

inline std::complex<double> char_eval(const Character &chi, const Element &g) {
    require(chi.parent().contains(g),
            "char_eval: element (" + element_key(g) +
                ") does not belong to the character's group");
    return unit_root(chi.phase(g), chi.parent().exponent());
}

/// All |G| characters, lexicographic in exponent tuples.
inline std::vector<Character> dual_characters(const Group &G) {
    std::vector<Character> out;
    out.reserve(static_cast<size_t>(G.order()));
    for (const auto &e : G.elements())
        out.emplace_back(G, e.residues);
    return out;
}

/// True iff chi(h) = 1 for every h in H.
inline bool annihilates(const Character &chi, const Subgroup &H) {
    return std::all_of(H.elements().begin(), H.elements().end(),
                       [&](const Element &h) { return chi.phase(h) == 0; });
}

/// Characters of G that are identically 1 on H (size |G|/|H|).
inline std::vector<Character> annihilator(const Group &G, const Subgroup &H) {
    require(H.parent() == G, "annihilator: subgroup of a different group");
    std::vector<Character> out;
    for (auto &chi : dual_characters(G))
        if (annihilates(chi, H))
            out.push_back(std::move(chi));
    return out;
}

/// True iff a and b restrict to the same character of H.
inline bool agree_on(const Character &a, const Character &b,
                     const Subgroup &H) {
    return std::all_of(H.elements().begin(), H.elements().end(),
                       [&](const Element &h) { return a.phase(h) == b.phase(h); });
}

/// A character of a subgroup H, stored as the annihilator coset of its
/// extensions to the parent group, represented by the lexicographically
/// least exponent tuple in that coset.
class SubgroupCharacter {
public:
    SubgroupCharacter() = default;

    /// Restriction of chi to H, canonicalized.
    SubgroupCharacter(Subgroup H, const Character &chi) : subgroup_(std::move(H)) {
        require(chi.parent() == subgroup_.parent(),
                "subgroup character: parent group mismatch");
        representative_ = chi;
        for (const auto &eta : annihilator(subgroup_.parent(), subgroup_)) {
            Character cand = chi * eta;
            if (cand < representative_)
                representative_ = std::move(cand);
        }
    }

    const Subgroup &subgroup() const { return subgroup_; }
    const Character &representative() const { return representative_; }

    bool contains(const Character &chi) const {
        return chi.parent() == subgroup_.parent() &&
               agree_on(chi, representative_, subgroup_);
    }

    std::complex<double> eval(const Element &h) const {
        require(subgroup_.contains(h), "element (" + element_key(h) +
                                           ") outside the subgroup");
        return char_eval(representative_, h);
    }

    auto operator<=>(const SubgroupCharacter &o) const {
        if (auto c = subgroup_ <=> o.subgroup_; c != 0)
            return c;
        return representative_ <=> o.representative_;
    }
    bool operator==(const SubgroupCharacter &o) const {
        return subgroup_ == o.subgroup_ && representative_ == o.representative_;
    }

private:
    Subgroup subgroup_;
    Character representative_;
};

/// The |H| characters of H, ordered by canonical representative.
inline std::vector<SubgroupCharacter> characters_of_subgroup(const Group &G,
                                                             const Subgroup &H) {
    require(H.parent() == G, "characters_of_subgroup: subgroup of another group");
    const auto perp = annihilator(G, H);
    std::vector<SubgroupCharacter> out;
    std::vector<bool> seen(static_cast<size_t>(G.order()), false);
    for (const auto &chi : dual_characters(G)) {
        const size_t idx = G.index_of(Element{chi.exponents()});
        if (seen[idx])
            continue;
        // chi is the least member of its coset, hence the canonical
        // representative.
        for (const auto &eta : perp)
            seen[G.index_of(Element{(chi * eta).exponents()})] = true;
        out.emplace_back(H, chi);
    }
    return out;
}

/// Gamma0-association: alpha and rho agree on every element of gamma0.
inline bool associated(const Character &alpha, const SubgroupCharacter &rho,
                       const Subgroup &gamma0) {
    require(alpha.parent() == rho.subgroup().parent(),
            "associated: parent group mismatch");
    require(gamma0.is_subgroup_of(rho.subgroup()),
            "associated: Gamma0 is not contained in rho's subgroup");
    return agree_on(alpha, rho.representative(), gamma0);
}

/// Restriction of a parent-group character to H.
inline SubgroupCharacter restrict_to(const Character &chi, const Subgroup &H) {
    return SubgroupCharacter(H, chi);
}

} // namespace eqfred
