#pragma once

// JSON documents: groups, representations, sample bundles with symbols,
// and the reports written by the command-line tool. Parse failures carry a
// JSON pointer into the offending document.

#include "group.hpp"
#include "lab.hpp"
#include "rep.hpp"
#include "symbol.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

namespace eqfred::io {

using json = nlohmann::json;

class DocumentError : public Error {
public:
    DocumentError(std::string pointer, const std::string &what)
        : Error(Errc::invalid_input, (pointer.empty() ? std::string("/") : pointer) +
                                         ": " + what),
          pointer_(std::move(pointer)) {}

    const std::string &pointer() const { return pointer_; }

private:
    std::string pointer_;
};

[[noreturn]] inline void doc_fail(const std::string &ptr, const std::string &what) {
    throw DocumentError(ptr, what);
}

inline std::string child(const std::string &ptr, const std::string &key) {
    std::string esc;
    for (char c : key) {
        if (c == '~')
            esc += "~0";
        else if (c == '/')
            esc += "~1";
        else
            esc += c;
    }
    return ptr + "/" + esc;
}

inline std::string child(const std::string &ptr, size_t i) {
    return ptr + "/" + std::to_string(i);
}

inline const json &member(const json &j, const std::string &ptr, const std::string &key) {
    if (!j.is_object())
        doc_fail(ptr, "expected an object");
    auto it = j.find(key);
    if (it == j.end())
        doc_fail(child(ptr, key), "missing required member");
    return *it;
}

inline int as_int(const json &j, const std::string &ptr) {
    if (!j.is_number_integer())
        doc_fail(ptr, "expected an integer");
    return j.get<int>();
}

inline double as_double(const json &j, const std::string &ptr) {
    if (!j.is_number())
        doc_fail(ptr, "expected a number");
    return j.get<double>();
}

inline std::vector<int> as_int_array(const json &j, const std::string &ptr) {
    if (!j.is_array())
        doc_fail(ptr, "expected an array of integers");
    std::vector<int> out;
    for (size_t i = 0; i < j.size(); ++i)
        out.push_back(as_int(j[i], child(ptr, i)));
    return out;
}

inline Group parse_group(const json &j, const std::string &ptr) {
    const auto orders = as_int_array(member(j, ptr, "orders"), child(ptr, "orders"));
    if (orders.empty())
        doc_fail(child(ptr, "orders"), "needs at least one cyclic order");
    for (size_t i = 0; i < orders.size(); ++i)
        if (orders[i] < 1)
            doc_fail(child(child(ptr, "orders"), i), "cyclic order must be >= 1");
    return Group(orders);
}

inline Element parse_element(const Group &G, const json &j, const std::string &ptr) {
    Element g{as_int_array(j, ptr)};
    if (!G.contains(g))
        doc_fail(ptr, "not an element of the group");
    return g;
}

inline Element parse_element_key(const Group &G, const std::string &key,
                                 const std::string &ptr) {
    std::vector<int> r;
    size_t pos = 0;
    while (pos <= key.size()) {
        const size_t comma = key.find(',', pos);
        const std::string part =
            key.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            size_t used = 0;
            r.push_back(std::stoi(part, &used));
            if (used != part.size())
                throw std::invalid_argument(part);
        } catch (const std::exception &) {
            doc_fail(ptr, "malformed element key '" + key + "'");
        }
        if (comma == std::string::npos)
            break;
        pos = comma + 1;
    }
    Element g{std::move(r)};
    if (!G.contains(g))
        doc_fail(ptr, "element key '" + key + "' is not in the group");
    return g;
}

inline Character parse_character(const Group &G, const json &j, const std::string &ptr) {
    const auto e = as_int_array(j, ptr);
    if (e.size() != G.rank())
        doc_fail(ptr, "character exponent tuple has wrong length");
    for (size_t i = 0; i < e.size(); ++i)
        if (e[i] < 0 || e[i] >= G.orders()[i])
            doc_fail(child(ptr, i), "exponent out of range");
    return Character(G, e);
}

/// Arrays of arrays of [re, im].
inline Matrix parse_matrix(const json &j, const std::string &ptr) {
    if (!j.is_array())
        doc_fail(ptr, "expected a matrix (array of rows)");
    const auto rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = -1;
    Matrix m;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto rp = child(ptr, static_cast<size_t>(r));
        const json &row = j[static_cast<size_t>(r)];
        if (!row.is_array())
            doc_fail(rp, "expected a row array");
        if (cols < 0) {
            cols = static_cast<Eigen::Index>(row.size());
            m.resize(rows, cols);
        } else if (static_cast<Eigen::Index>(row.size()) != cols) {
            doc_fail(rp, "ragged matrix row");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto cp = child(rp, static_cast<size_t>(c));
            const json &z = row[static_cast<size_t>(c)];
            if (!z.is_array() || z.size() != 2)
                doc_fail(cp, "expected a complex number [re, im]");
            m(r, c) = cplx(as_double(z[0], child(cp, 0)), as_double(z[1], child(cp, 1)));
        }
    }
    if (rows == 0)
        m.resize(0, 0);
    return m;
}

inline Subgroup parse_subgroup(const Group &G, const json &doc, const std::string &ptr) {
    auto it = doc.find("subgroup");
    if (it == doc.end())
        return Subgroup::whole(G);
    const auto sp = child(ptr, "subgroup");
    if (!it->is_array())
        doc_fail(sp, "expected an array of generators");
    std::vector<Element> gens;
    for (size_t i = 0; i < it->size(); ++i)
        gens.push_back(parse_element(G, (*it)[i], child(sp, i)));
    return subgroup_from_generators(G, gens);
}

/// {"group": {...}, "subgroup": [generators] (optional), "dim": d,
///  "matrices": {elementKey: matrix}}
inline UnitaryRep parse_rep(const json &doc, const std::string &ptr = "") {
    const Group G = parse_group(member(doc, ptr, "group"), child(ptr, "group"));
    Subgroup H = parse_subgroup(G, doc, ptr);
    const int dim = as_int(member(doc, ptr, "dim"), child(ptr, "dim"));
    if (dim < 0)
        doc_fail(child(ptr, "dim"), "dimension must be nonnegative");
    const auto mp = child(ptr, "matrices");
    const json &mats = member(doc, ptr, "matrices");
    if (!mats.is_object())
        doc_fail(mp, "expected an object keyed by element");
    std::map<Element, Matrix> table;
    for (const auto &[key, value] : mats.items()) {
        const auto kp = child(mp, key);
        Element g = parse_element_key(G, key, kp);
        if (!H.contains(g))
            doc_fail(kp, "element is outside the representation's subgroup");
        Matrix m = parse_matrix(value, kp);
        if (m.rows() != dim || m.cols() != dim)
            doc_fail(kp, "matrix is not dim x dim");
        table.emplace(std::move(g), std::move(m));
    }
    std::vector<Matrix> ordered;
    for (const auto &h : H.elements()) {
        auto it = table.find(h);
        if (it == table.end())
            doc_fail(child(mp, element_key(h)), "missing matrix for element");
        ordered.push_back(it->second);
    }
    try {
        return UnitaryRep(std::move(H), dim, std::move(ordered));
    } catch (const Error &e) {
        doc_fail(mp, e.what());
    }
}

namespace detail {

inline std::vector<std::vector<Matrix>>
parse_transport_table(const json &doc, const std::string &key, const Group &G,
                      const std::vector<std::string> &points,
                      const std::map<std::string, size_t> &index) {
    const auto tp = child("", key);
    const json &t = member(doc, "", key);
    if (!t.is_object())
        doc_fail(tp, "expected an object keyed by element");
    std::vector<std::vector<Matrix>> out(static_cast<size_t>(G.order()),
                                         std::vector<Matrix>(points.size()));
    std::vector<std::vector<bool>> have(static_cast<size_t>(G.order()),
                                        std::vector<bool>(points.size(), false));
    for (const auto &[gkey, row] : t.items()) {
        const auto gp = child(tp, gkey);
        const Element g = parse_element_key(G, gkey, gp);
        if (!row.is_object())
            doc_fail(gp, "expected an object keyed by point id");
        for (const auto &[pid, mat] : row.items()) {
            auto it = index.find(pid);
            if (it == index.end())
                doc_fail(child(gp, pid), "unknown point id");
            out[G.index_of(g)][it->second] = parse_matrix(mat, child(gp, pid));
            have[G.index_of(g)][it->second] = true;
        }
    }
    for (const auto &g : G.elements())
        for (size_t p = 0; p < points.size(); ++p)
            if (!have[G.index_of(g)][p])
                doc_fail(child(child(tp, element_key(g)), points[p]),
                         "missing transport matrix");
    return out;
}

inline std::vector<int> parse_dim_table(const json &doc, const std::string &key,
                                        const std::vector<std::string> &points) {
    const auto fp = child("", key);
    const json &f = member(doc, "", key);
    std::vector<int> out;
    for (const auto &p : points) {
        const int d = as_int(member(f, fp, p), child(fp, p));
        if (d < 0)
            doc_fail(child(fp, p), "fiber dimension must be nonnegative");
        out.push_back(d);
    }
    return out;
}

} // namespace detail

struct BundleDocument {
    EquivariantSampleBundle bundle;
    /// Present when the document carries a "symbol" member.
    std::optional<SymbolField> symbol;
};

/// {"group", "points", "base", "action", "fiber_dim", "transport",
///  "symbol"?}. A two-bundle symbol E_0 -> E_1 is given by adding
///  "target_fiber_dim" and "target_transport"; its matrices are then
///  d_1 x d_0 and it is reduced to a single-bundle symbol internally.
inline BundleDocument parse_bundle_document(const json &doc) {
    if (!doc.is_object())
        doc_fail("", "expected an object");
    BundleDocument out;
    auto &b = out.bundle;
    b.group = parse_group(member(doc, "", "group"), "/group");
    const json &pts = member(doc, "", "points");
    if (!pts.is_array())
        doc_fail("/points", "expected an array of ids");
    std::map<std::string, size_t> index;
    for (size_t i = 0; i < pts.size(); ++i) {
        std::string id;
        if (pts[i].is_string())
            id = pts[i].get<std::string>();
        else if (pts[i].is_number_integer())
            id = std::to_string(pts[i].get<long long>());
        else
            doc_fail(child("/points", i), "point id must be a string or integer");
        if (!index.emplace(id, i).second)
            doc_fail(child("/points", i), "duplicate point id");
        b.points.push_back(id);
    }
    const json &base = member(doc, "", "base");
    for (const auto &p : b.points) {
        const json &label = member(base, "/base", p);
        if (label.is_string())
            b.base.push_back(label.get<std::string>());
        else if (label.is_number_integer())
            b.base.push_back(std::to_string(label.get<long long>()));
        else
            doc_fail(child("/base", p), "base label must be a string or integer");
    }
    const json &act = member(doc, "", "action");
    if (!act.is_object())
        doc_fail("/action", "expected an object keyed by element");
    b.action.assign(static_cast<size_t>(b.group.order()), std::vector<int>(b.points.size(), -1));
    for (const auto &[gkey, row] : act.items()) {
        const auto gp = child("/action", gkey);
        const Element g = parse_element_key(b.group, gkey, gp);
        if (!row.is_object())
            doc_fail(gp, "expected an object mapping point ids");
        for (const auto &[pid, target] : row.items()) {
            auto it = index.find(pid);
            if (it == index.end())
                doc_fail(child(gp, pid), "unknown point id");
            std::string tid;
            if (target.is_string())
                tid = target.get<std::string>();
            else if (target.is_number_integer())
                tid = std::to_string(target.get<long long>());
            else
                doc_fail(child(gp, pid), "target must be a point id");
            auto jt = index.find(tid);
            if (jt == index.end())
                doc_fail(child(gp, pid), "unknown target point '" + tid + "'");
            b.action[b.group.index_of(g)][it->second] = static_cast<int>(jt->second);
        }
    }
    for (const auto &g : b.group.elements())
        for (size_t p = 0; p < b.points.size(); ++p)
            if (b.action[b.group.index_of(g)][p] < 0)
                doc_fail(child(child("/action", element_key(g)), b.points[p]),
                         "missing action entry");
    b.fiber_dim = detail::parse_dim_table(doc, "fiber_dim", b.points);
    b.transport = detail::parse_transport_table(doc, "transport", b.group, b.points, index);

    auto sym = doc.find("symbol");
    if (sym == doc.end())
        return out;
    std::vector<Matrix> values;
    for (const auto &p : b.points)
        values.push_back(parse_matrix(member(*sym, "/symbol", p), child("/symbol", p)));
    if (doc.contains("target_fiber_dim") || doc.contains("target_transport")) {
        const auto tdim = detail::parse_dim_table(doc, "target_fiber_dim", b.points);
        const auto ttrans =
            detail::parse_transport_table(doc, "target_transport", b.group, b.points, index);
        for (size_t p = 0; p < b.points.size(); ++p)
            if (values[p].rows() != tdim[p] || values[p].cols() != b.fiber_dim[p])
                doc_fail(child("/symbol", b.points[p]),
                         "two-bundle symbol must be target_dim x source_dim");
        out.symbol = double_two_bundle(b, tdim, ttrans, values);
    } else {
        for (size_t p = 0; p < b.points.size(); ++p)
            if (values[p].rows() != b.fiber_dim[p] || values[p].cols() != b.fiber_dim[p])
                doc_fail(child("/symbol", b.points[p]), "symbol must be fiber_dim x fiber_dim");
        out.symbol = SymbolField{b, std::move(values)};
    }
    return out;
}

// --- writers ------------------------------------------------------------

inline json to_json(const Element &g) { return g.residues; }

inline json to_json(const Group &G) { return json{{"orders", G.orders()}}; }

inline json to_json(const Subgroup &H) {
    json out = json::array();
    for (const auto &h : H.elements())
        out.push_back(h.residues);
    return out;
}

inline json to_json(const Character &chi) { return chi.exponents(); }

inline json to_json(const Matrix &m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        out.push_back(std::move(row));
    }
    return out;
}

inline json to_json(const UnitaryRep &rep) {
    json out{{"group", to_json(rep.group())}, {"dim", rep.dim()}};
    if (!rep.domain().is_whole_group())
        out["subgroup"] = to_json(rep.domain());
    json mats = json::object();
    for (size_t i = 0; i < rep.matrices().size(); ++i)
        mats[element_key(rep.domain().elements()[i])] = to_json(rep.matrices()[i]);
    out["matrices"] = std::move(mats);
    return out;
}

inline json to_json(const MultiplicityVector &mv) {
    json entries = json::array();
    for (const auto &[chi, m] : mv.entries)
        entries.push_back({{"character", to_json(chi.representative())}, {"multiplicity", m}});
    return json{{"group", to_json(mv.domain.parent())},
                {"subgroup", to_json(mv.domain)},
                {"dim", mv.dim},
                {"multiplicities", std::move(entries)}};
}

inline json to_json(const EllipticityReport &r) {
    json entries = json::array();
    for (const auto &e : r.entries)
        entries.push_back({{"point", e.point},
                           {"rho", to_json(e.rho.representative())},
                           {"isotropy", to_json(e.rho.subgroup())},
                           {"orbit", e.orbit},
                           {"representative", e.representative},
                           {"block_dim", e.block_dim},
                           {"min_singular_value", e.min_singular_value},
                           {"norm", e.norm},
                           {"condition", e.condition},
                           {"passes", e.passes}});
    json offending = json::array();
    for (const auto &e : r.entries)
        if (!e.passes && e.representative)
            offending.push_back({{"point", e.point}, {"rho", to_json(e.rho.representative())}});
    return json{{"alpha", to_json(r.alpha)},
                {"tolerance", r.tol},
                {"minimal_isotropy", to_json(r.gamma0)},
                {"entries", std::move(entries)},
                {"offending", std::move(offending)},
                {"verdict", r.verdict},
                {"warnings", r.warnings}};
}

inline json to_json(const XOrbit &o, const EquivariantSampleBundle &b) {
    json members = json::array();
    for (const auto &m : o.members)
        members.push_back(b.points[m.point]);
    return json{{"rho", to_json(o.rep().rho.representative())},
                {"isotropy", to_json(o.rep().rho.subgroup())},
                {"multiplicity", o.rep().multiplicity},
                {"members", std::move(members)},
                {"representative", b.points[o.rep().point]}};
}

inline json to_json(const RefinementSweep &s) {
    json table = json::array();
    for (const auto &[n, v] : s.table)
        table.push_back({{"n", n}, {"value", v}});
    return json{{"k", s.k}, {"table", std::move(table)},
                {"verdict", std::string(to_string(s.verdict))}};
}

namespace detail {

inline void format_number(std::string &out, double v) {
    if (!std::isfinite(v)) {
        out += "null";
        return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    if (s.find_first_of(".eE") == std::string::npos)
        s += ".0";
    out += s;
}

inline void dump(std::string &out, const json &j, int indent) {
    const std::string pad(static_cast<size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (const auto &[k, v] : j.items()) {
            if (!first)
                out += ",\n";
            first = false;
            out += inner + json(k).dump() + ": ";
            dump(out, v, indent + 1);
        }
        out += "\n" + pad + "}";
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        const bool scalars = std::all_of(j.begin(), j.end(), [](const json &e) {
            return e.is_primitive();
        });
        if (scalars) {
            out += "[";
            for (size_t i = 0; i < j.size(); ++i) {
                if (i)
                    out += ", ";
                dump(out, j[i], indent + 1);
            }
            out += "]";
            return;
        }
        out += "[\n";
        for (size_t i = 0; i < j.size(); ++i) {
            if (i)
                out += ",\n";
            out += inner;
            dump(out, j[i], indent + 1);
        }
        out += "\n" + pad + "]";
        return;
    }
    case json::value_t::number_float:
        format_number(out, j.get<double>());
        return;
    default:
        out += j.dump();
        return;
    }
}

} // namespace detail

/// Deterministic serialization: keys sorted, floats with 17 significant
/// digits, non-finite floats as null, trailing newline.
inline std::string dump_canonical(const json &j) {
    std::string out;
    detail::dump(out, j, 0);
    out += "\n";
    return out;
}

} // namespace eqfred::io
