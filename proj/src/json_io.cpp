#include "torcal/json_io.hpp"

#include <fstream>
#include <map>
#include <tuple>

namespace torcal {

namespace {

Rational rational_from_json(const Json& j) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_string()) return rational_from_string(j.get<std::string>());
    throw SchemaError("expected rational as integer or \"p/q\" string");
}

ZVec zvec_from_json(const Json& j, const char* what) {
    if (!j.is_array()) throw SchemaError(std::string(what) + ": expected array");
    ZVec v;
    for (const auto& e : j) {
        if (!e.is_number_integer()) throw SchemaError(std::string(what) + ": expected integers");
        v.push_back(e.get<long>());
    }
    return v;
}

// split one atom into (alpha, w) rows; w even is the plain Laurent part,
// w odd carries the extra |xi| factor
void atom_to_rows(const Atom& at,
                  std::map<std::pair<ZVec, long>, std::vector<Json>>& rows,
                  std::map<std::pair<ZVec, long>, std::optional<ConicRegion>>& cones) {
    auto push = [&](const ZVec& alpha, long w, const ExactScalar& c) {
        Json row = Json::array();
        for (long k : at.xmode) row.push_back(k);
        row.push_back(rational_to_string(c.re));
        row.push_back(rational_to_string(c.im));
        auto key = std::make_pair(alpha, w);
        rows[key].push_back(std::move(row));
        cones[key] = at.marker;
    };
    for (const auto& [alpha, c] : at.xi.L) push(alpha, 2L * at.xi.J, c);
    for (const auto& [alpha, c] : at.xi.M) push(alpha, 2L * at.xi.J - 1, c);
}

Json term_to_json(int dim, long degree, const std::vector<Atom>& atoms) {
    (void)dim;
    Json term;
    term["degree"] = degree;
    Json summands = Json::array();
    // group by (alpha, w, marker); separate marker groups must stay separate
    std::map<std::string, std::map<std::pair<ZVec, long>, std::vector<Json>>> by_marker_rows;
    std::map<std::string, std::optional<ConicRegion>> marker_of;
    for (const Atom& at : atoms) {
        std::string mk = at.marker ? at.marker->key() : std::string();
        std::map<std::pair<ZVec, long>, std::vector<Json>> rows;
        std::map<std::pair<ZVec, long>, std::optional<ConicRegion>> cones;
        atom_to_rows(at, rows, cones);
        for (auto& [key, rws] : rows)
            for (auto& r : rws) by_marker_rows[mk][key].push_back(std::move(r));
        marker_of[mk] = at.marker;
    }
    for (auto& [mk, groups] : by_marker_rows) {
        for (auto& [key, rws] : groups) {
            Json s;
            s["xmodes"] = Json::array();
            for (auto& r : rws) s["xmodes"].push_back(std::move(r));
            s["alpha"] = key.first;
            s["w"] = key.second;
            const auto& marker = marker_of[mk];
            if (marker) s["cone"] = cone_to_json(*marker);
            summands.push_back(std::move(s));
        }
    }
    term["summands"] = std::move(summands);
    return term;
}

Json entry_to_json(const PolyhomogeneousSymbol& s, long top) {
    Json entry;
    Json terms = Json::array();
    long floor_deg;
    if (s.tail.has_value())
        floor_deg = *s.tail + 1;
    else if (!s.terms.empty())
        floor_deg = s.terms.rbegin()->first;
    else
        floor_deg = top;
    if (floor_deg > top) floor_deg = top;
    for (long d = top; d >= floor_deg; --d) {
        auto it = s.terms.find(d);
        static const std::vector<Atom> none;
        terms.push_back(term_to_json(s.dim, d, it == s.terms.end() ? none : it->second));
    }
    entry["terms"] = std::move(terms);
    return entry;
}

PolyhomogeneousSymbol entry_from_json(const Json& j, int dim, long order,
                                      std::optional<long> tail) {
    PolyhomogeneousSymbol s = PolyhomogeneousSymbol::zero(dim);
    s.order = order;
    s.tail = tail;
    if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array())
        throw SchemaError("symbol entry: expected {\"terms\": [...]}");
    for (const auto& t : j["terms"]) {
        if (!t.contains("degree")) throw SchemaError("symbol term: missing degree");
        long degree = t["degree"].get<long>();
        if (!t.contains("summands") || !t["summands"].is_array())
            throw SchemaError("symbol term: missing summands");
        for (const auto& sm : t["summands"]) {
            ZVec alpha = zvec_from_json(sm.at("alpha"), "alpha");
            if (static_cast<int>(alpha.size()) != dim)
                throw SchemaError("alpha length does not match dim");
            long w = sm.at("w").get<long>();
            if (zvec_total(alpha) - w != degree)
                throw SchemaError("summand degree mismatch: |alpha| - w != degree");
            std::optional<ConicRegion> marker;
            if (sm.contains("cone")) marker = cone_from_json(sm["cone"], dim);
            if (!sm.contains("xmodes") || !sm["xmodes"].is_array())
                throw SchemaError("summand: missing xmodes");
            for (const auto& row : sm["xmodes"]) {
                if (!row.is_array() || row.size() != static_cast<size_t>(dim) + 2)
                    throw SchemaError("xmode row must hold k coords plus re, im");
                ZVec k(dim);
                for (int i = 0; i < dim; ++i) k[i] = row[i].get<long>();
                ExactScalar c(rational_from_json(row[dim]), rational_from_json(row[dim + 1]));
                if (c.is_zero()) continue;
                XiPart part;
                if (w % 2 == 0) {
                    part.J = static_cast<int>(w / 2);
                    part.L = laurent_monomial(alpha, c);
                } else {
                    part.J = static_cast<int>((w + 1) / 2);
                    part.M = laurent_monomial(alpha, c);
                }
                Atom at{k, marker, std::move(part)};
                s.terms[degree].push_back(std::move(at));
            }
        }
    }
    symbol_normalize(s);
    if (s.order < order) s.order = order;
    return s;
}

}  // namespace

Json symbol_to_json(const MatrixSymbol& m) {
    Json j;
    j["dim"] = m.dim;
    j["rank"] = m.size;
    long order = 0;
    bool first = true;
    std::optional<long> depth;
    for (const auto& e : m.entries) {
        if (first || e.order > order) order = e.order;
        first = false;
    }
    // depth = tracked levels below the common top; null when all entries exact
    std::optional<long> tail;
    bool any_tail = false;
    for (const auto& e : m.entries)
        if (e.tail.has_value()) {
            any_tail = true;
            if (!tail || *e.tail > *tail) tail = *e.tail;
        }
    if (any_tail) depth = order - *tail;
    j["order"] = order;
    if (depth)
        j["depth"] = *depth;
    else
        j["depth"] = nullptr;
    Json entries = Json::array();
    for (int r = 0; r < m.size; ++r) {
        Json row = Json::array();
        for (int c = 0; c < m.size; ++c) row.push_back(entry_to_json(m.at(r, c), order));
        entries.push_back(std::move(row));
    }
    j["entries"] = std::move(entries);
    return j;
}

MatrixSymbol symbol_from_json(const Json& j) {
    if (!j.is_object()) throw SchemaError("symbol: expected object");
    for (const char* key : {"dim", "rank", "order", "entries"})
        if (!j.contains(key)) throw SchemaError(std::string("symbol: missing ") + key);
    int dim = j["dim"].get<int>();
    int rank = j["rank"].get<int>();
    if (dim < 1 || dim > 8) throw SchemaError("symbol: dim out of range");
    if (rank < 1 || rank > 16) throw SchemaError("symbol: rank out of range");
    long order = j["order"].get<long>();
    std::optional<long> tail;
    if (j.contains("depth") && !j["depth"].is_null()) {
        long depth = j["depth"].get<long>();
        if (depth < 1) throw SchemaError("symbol: depth must be positive");
        tail = order - depth;
    }
    const Json& entries = j["entries"];
    if (!entries.is_array() || entries.size() != static_cast<size_t>(rank))
        throw SchemaError("symbol: entries shape mismatch");
    MatrixSymbol m = MatrixSymbol::zero_matrix(rank, dim);
    for (int r = 0; r < rank; ++r) {
        const Json& row = entries[r];
        if (!row.is_array() || row.size() != static_cast<size_t>(rank))
            throw SchemaError("symbol: entries shape mismatch");
        for (int c = 0; c < rank; ++c) m.at(r, c) = entry_from_json(row[c], dim, order, tail);
    }
    return m;
}

Json symbol_to_json(const PolyhomogeneousSymbol& s) {
    MatrixSymbol m;
    m.size = 1;
    m.dim = s.dim;
    m.entries = {s};
    return symbol_to_json(m);
}

PolyhomogeneousSymbol scalar_symbol_from_json(const Json& j) {
    MatrixSymbol m = symbol_from_json(j);
    if (m.size != 1) throw SchemaError("expected a rank-1 symbol");
    return m.entries[0];
}

Json cone_to_json(const ConicRegion& c) {
    Json j = Json::array();
    for (const auto& p : c.convex_pieces()) {
        Json piece;
        piece["rays"] = Json::array();
        for (const auto& r : p.rays) piece["rays"].push_back(r);
        piece["normals"] = Json::array();
        for (const auto& n : p.normals) piece["normals"].push_back(n);
        j.push_back(std::move(piece));
    }
    return j;
}

ConicRegion cone_from_json(const Json& j, int dim) {
    if (!j.is_array()) throw SchemaError("cone: expected array of pieces");
    std::vector<ConicRegion::ConvexPiece> pieces;
    for (const auto& pj : j) {
        ConicRegion::ConvexPiece p;
        if (pj.contains("rays"))
            for (const auto& r : pj["rays"]) p.rays.push_back(zvec_from_json(r, "cone ray"));
        if (pj.contains("normals"))
            for (const auto& n : pj["normals"])
                p.normals.push_back(zvec_from_json(n, "cone normal"));
        for (const auto& r : p.rays)
            if (static_cast<int>(r.size()) != dim) throw SchemaError("cone ray length mismatch");
        for (const auto& n : p.normals)
            if (static_cast<int>(n.size()) != dim)
                throw SchemaError("cone normal length mismatch");
        pieces.push_back(std::move(p));
    }
    try {
        return ConicRegion::from_pieces(dim, pieces);
    } catch (const ExactDomainError& e) {
        throw SchemaError(std::string("cone: ") + e.what());
    }
}

Json group_to_json(const GroupDescriptor& g) {
    Json j;
    if (const auto* f = std::get_if<FiniteCyclicDesc>(&g)) {
        j["kind"] = "finite_cyclic";
        j["order"] = f->order;
        j["translation"] = Json::array();
        for (const auto& r : f->translation) j["translation"].push_back(rational_to_string(r));
        j["matrix"] = Json::array();
        for (const auto& col : f->matrix_cols) j["matrix"].push_back(col);
    } else {
        const auto& c = std::get<CircleDesc>(g);
        j["kind"] = "circle";
        j["axes"] = c.axes;
    }
    return j;
}

GroupDescriptor group_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind")) throw SchemaError("group: missing kind");
    std::string kind = j["kind"].get<std::string>();
    if (kind == "finite_cyclic") {
        FiniteCyclicDesc d;
        d.order = j.value("order", 1);
        if (d.order < 1) throw SchemaError("group: order must be positive");
        if (j.contains("translation"))
            for (const auto& r : j["translation"]) d.translation.push_back(rational_from_json(r));
        if (j.contains("matrix"))
            for (const auto& col : j["matrix"])
                d.matrix_cols.push_back(zvec_from_json(col, "group matrix column"));
        return d;
    }
    if (kind == "circle") {
        CircleDesc d;
        if (!j.contains("axes")) throw SchemaError("group: circle needs axes");
        for (const auto& a : j["axes"]) d.axes.push_back(a.get<int>());
        return d;
    }
    throw SchemaError("group: unknown kind " + kind);
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw SchemaError("bad JSON in " + path + ": " + e.what());
    }
    return j;
}

void save_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ExactDomainError("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace torcal
