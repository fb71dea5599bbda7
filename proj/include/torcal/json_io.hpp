#pragma once

#include "json.hpp"
#include <stdexcept>

#include "torcal/symbol.hpp"

namespace torcal {

using Json = nlohmann::ordered_json;

// malformed input files; CLI surfaces these with a dedicated exit code
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// numeric-tolerance failures (fit residuals, trace cross-checks)
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Matrix symbol schema:
//   {"dim": n, "rank": r, "order": m, "depth": N|null,
//    "entries": [[{"terms": [{"degree": d,
//                             "summands": [{"xmodes": [[k..., "re", "im"], ...],
//                                           "alpha": [...], "w": w,
//                                           "cone": <cone>?}]}]}]]}
// Each summand is (trig polynomial) * xi^alpha * |xi|^{-w}; rationals are
// "p/q" strings; terms run from the order down to the truncation window with
// missing degrees given explicit zero entries.  depth = number of tracked
// homogeneity levels (null for exact symbols).
Json symbol_to_json(const MatrixSymbol& m);
MatrixSymbol symbol_from_json(const Json& j);

// scalar convenience wrappers (rank-1 matrices)
Json symbol_to_json(const PolyhomogeneousSymbol& s);
PolyhomogeneousSymbol scalar_symbol_from_json(const Json& j);

// cone schema: list of convex pieces {"rays": [[...]], "normals": [[...]]}
Json cone_to_json(const ConicRegion& c);
ConicRegion cone_from_json(const Json& j, int dim);

// group schema:
//   {"kind": "finite_cyclic", "order": q, "translation": ["p/q", ...],
//    "matrix": [[col0...], [col1...]]}
//   {"kind": "circle", "axes": [a...]}
Json group_to_json(const GroupDescriptor& g);
GroupDescriptor group_from_json(const Json& j);

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

}  // namespace torcal
