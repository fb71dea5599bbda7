#pragma once

#include <optional>

#include "torcal/microlocal.hpp"

namespace torcal {

// Sharp conic cutoff treated as a formal degree-0 idempotent: derivatives
// vanish, products with the complement piece vanish, and the error made by
// smoothing the jump is charged to the remainder tag instead of the
// expansion.
struct CutoffMarker {
    ConicRegion region;
    ConicRegion complement_region;

    static CutoffMarker from_region(const ConicRegion& r);
};

struct ParametrixResult {
    MatrixSymbol q;
    // left remainder 1 - q o p within the tracked window (the right one is
    // checked too but not stored)
    MatrixSymbol remainder;
    // top remainder degree visible on the certified cone, the unknown-window
    // bound when nothing is visible, nullopt when the remainder is exactly 0
    std::optional<long> remainder_order;
    // cone carrying remainder content of uncontrolled order
    ConicRegion remainder_tag;
    bool transversal = false;
};

// Two-sided parametrix of an elliptic symbol via the geometric series on
// 1 - q0 o p.  Both remainders vanish at retained degrees above -depth.
ParametrixResult neumann_parametrix(const MatrixSymbol& p, int depth);

// Parametrix of a transversally elliptic symbol on the cutoff region, which
// must be a conic neighbourhood of the transversal cotangent.  Off-region
// remainder content is tagged with cutoff.complement_region.
ParametrixResult transversal_parametrix(const MatrixSymbol& p, const GroupDescriptor& G,
                                        const CutoffMarker& cutoff, int depth);

// Make an invariant, transversally elliptic symbol elliptic by adding the
// cutoff-framed weight chi (1 + sum over acted axes of xi_a^2) chi to the
// diagonal.  Finite actions need no weight; the input is returned unchanged.
MatrixSymbol atiyah_completion(const MatrixSymbol& q, const GroupDescriptor& G,
                               const CutoffMarker& cutoff);

Json cutoff_to_json(const CutoffMarker& c);
CutoffMarker cutoff_from_json(const Json& j, int dim);
Json parametrix_to_json(const ParametrixResult& r);

}  // namespace torcal
