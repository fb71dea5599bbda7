#include "torcal/cone.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace torcal {

Dir dir_normalize(long x, long y) {
    if (x == 0 && y == 0) throw ExactDomainError("zero vector has no direction");
    long g = std::gcd(std::abs(x), std::abs(y));
    return Dir{x / g, y / g};
}

long dir_cross(const Dir& a, const Dir& b) { return a.x * b.y - a.y * b.x; }

namespace {

// 0 for the closed upper half starting at +x axis, 1 for the lower half
int dir_class(const Dir& d) { return (d.y > 0 || (d.y == 0 && d.x > 0)) ? 0 : 1; }

const Dir kAnchor{1, 0};

bool dir_leq(const Dir& a, const Dir& b) { return a == b || dir_less(a, b); }

// linear coordinate on the cut circle: two_pi lifts the anchor to the far end
struct Pos {
    Dir d;
    int two_pi = 0;
};

bool pos_eq(const Pos& a, const Pos& b) { return a.two_pi == b.two_pi && a.d == b.d; }

bool pos_less(const Pos& a, const Pos& b) {
    if (a.two_pi != b.two_pi) return a.two_pi < b.two_pi;
    if (a.two_pi == 1) return false;
    return dir_less(a.d, b.d);
}

bool pos_leq(const Pos& a, const Pos& b) { return pos_eq(a, b) || pos_less(a, b); }

struct Piece {
    Pos lo, hi;
};

// arcs are ccw sweeps lo..hi; split the ones passing the anchor into linear pieces
std::vector<Piece> to_pieces(const std::vector<Arc>& arcs) {
    std::vector<Piece> out;
    for (const Arc& a : arcs) {
        if (a.lo == a.hi) {
            out.push_back(Piece{{a.lo, 0}, {a.hi, 0}});
        } else if (dir_less(a.lo, a.hi)) {
            out.push_back(Piece{{a.lo, 0}, {a.hi, 0}});
        } else {
            // wrap arcs contain the anchor; cover both of its cut coordinates
            out.push_back(Piece{{a.lo, 0}, {kAnchor, 1}});
            if (!(a.hi == kAnchor)) {
                out.push_back(Piece{{kAnchor, 0}, {a.hi, 0}});
            } else {
                out.push_back(Piece{{kAnchor, 0}, {kAnchor, 0}});
            }
        }
    }
    return out;
}

// rebuild a canonical arc list from linear pieces on the cut circle
void rebuild_from_pieces(std::vector<Piece>& pieces, bool& full, std::vector<Arc>& arcs) {
    std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
        if (!pos_eq(a.lo, b.lo)) return pos_less(a.lo, b.lo);
        return pos_less(a.hi, b.hi);
    });
    std::vector<Piece> merged;
    for (const Piece& p : pieces) {
        if (!merged.empty() && pos_leq(p.lo, merged.back().hi)) {
            if (pos_less(merged.back().hi, p.hi)) merged.back().hi = p.hi;
        } else {
            merged.push_back(p);
        }
    }
    if (merged.empty()) return;
    // rejoin the two components touching through the anchor, if both reach it
    bool starts_at_zero = pos_eq(merged.front().lo, Pos{kAnchor, 0});
    bool ends_at_two_pi = pos_eq(merged.back().hi, Pos{kAnchor, 1});
    if (starts_at_zero && ends_at_two_pi) {
        if (merged.size() == 1) {
            full = true;
            return;
        }
        Piece first = merged.front();
        Piece last = merged.back();
        merged.erase(merged.begin());
        merged.pop_back();
        // the joined arc wraps; store true endpoints
        arcs.push_back(Arc{last.lo.d, first.hi.d});
    }
    for (const Piece& p : merged)
        arcs.push_back(Arc{p.lo.d, p.hi.two_pi == 1 ? kAnchor : p.hi.d});
    std::sort(arcs.begin(), arcs.end(),
              [](const Arc& a, const Arc& b) { return dir_less(a.lo, b.lo); });
}

}  // namespace

bool dir_less(const Dir& a, const Dir& b) {
    int ca = dir_class(a), cb = dir_class(b);
    if (ca != cb) return ca < cb;
    return dir_cross(a, b) > 0;
}

ConicRegion ConicRegion::empty(int dim) {
    ConicRegion r;
    r.dim_ = dim;
    return r;  // defaults are empty in every fragment
}

ConicRegion ConicRegion::full(int dim) {
    ConicRegion r;
    r.dim_ = dim;
    if (dim == 1) {
        r.ray_plus_ = r.ray_minus_ = true;
    } else if (dim == 2) {
        r.full_ = true;
    } else {
        r.full_ = true;
        r.high_dim_empty_ = false;
    }
    return r;
}

ConicRegion ConicRegion::half_lines(bool plus, bool minus) {
    ConicRegion r;
    r.dim_ = 1;
    r.ray_plus_ = plus;
    r.ray_minus_ = minus;
    return r;
}

ConicRegion ConicRegion::sector(const Dir& lo, const Dir& hi) {
    ConicRegion r;
    r.dim_ = 2;
    r.arcs_.push_back(Arc{lo, hi});
    r.normalize2();
    return r;
}

ConicRegion ConicRegion::ray(int dim, const ZVec& direction) {
    if (dim == 1) {
        if (direction[0] == 0) throw ExactDomainError("zero vector has no direction");
        return half_lines(direction[0] > 0, direction[0] < 0);
    }
    if (dim != 2) throw ExactDomainError("ray regions need dim <= 2");
    Dir d = dir_normalize(direction[0], direction[1]);
    return sector(d, d);
}

ConicRegion ConicRegion::coordinate_subspace(int dim, const std::vector<int>& zero_axes) {
    std::vector<int> ax = zero_axes;
    std::sort(ax.begin(), ax.end());
    ax.erase(std::unique(ax.begin(), ax.end()), ax.end());
    for (int a : ax)
        if (a < 0 || a >= dim) throw ExactDomainError("axis out of range");
    if (ax.empty()) return full(dim);
    if (static_cast<int>(ax.size()) == dim) return empty(dim);  // only the origin
    if (dim == 1) return empty(1);                              // covered above, defensive
    if (dim == 2) {
        // one axis vanishing leaves the other coordinate line
        int live = (ax[0] == 0) ? 1 : 0;
        ZVec plus = zvec_zero(2), minus = zvec_zero(2);
        plus[static_cast<size_t>(live)] = 1;
        minus[static_cast<size_t>(live)] = -1;
        return ray(2, plus).unite(ray(2, minus));
    }
    ConicRegion r;
    r.dim_ = dim;
    r.zero_axes_ = ax;
    r.high_dim_empty_ = false;
    return r;
}

bool ConicRegion::is_empty() const {
    if (dim_ == 1) return !ray_plus_ && !ray_minus_;
    if (dim_ == 2) return !full_ && arcs_.empty();
    return high_dim_empty_;
}

bool ConicRegion::is_full() const {
    if (dim_ == 1) return ray_plus_ && ray_minus_;
    if (dim_ == 2) return full_;
    return !high_dim_empty_ && full_;
}

void ConicRegion::normalize2() {
    if (full_) {
        arcs_.clear();
        return;
    }
    std::vector<Piece> pieces = to_pieces(arcs_);
    arcs_.clear();
    rebuild_from_pieces(pieces, full_, arcs_);
}

ConicRegion ConicRegion::intersect(const ConicRegion& o) const {
    if (dim_ != o.dim_) throw ExactDomainError("cone dimension mismatch");
    ConicRegion r;
    r.dim_ = dim_;
    if (dim_ == 1) {
        r.ray_plus_ = ray_plus_ && o.ray_plus_;
        r.ray_minus_ = ray_minus_ && o.ray_minus_;
        return r;
    }
    if (dim_ == 2) {
        if (full_) return o;
        if (o.full_) return *this;
        std::vector<Piece> pa = to_pieces(arcs_);
        std::vector<Piece> pb = to_pieces(o.arcs_);
        std::vector<Piece> clipped;
        for (const Piece& a : pa) {
            for (const Piece& b : pb) {
                Pos lo = pos_less(a.lo, b.lo) ? b.lo : a.lo;
                Pos hi = pos_less(a.hi, b.hi) ? a.hi : b.hi;
                if (pos_leq(lo, hi)) clipped.push_back(Piece{lo, hi});
            }
        }
        rebuild_from_pieces(clipped, r.full_, r.arcs_);
        return r;
    }
    if (is_empty() || o.is_empty()) return empty(dim_);
    if (is_full()) return o;
    if (o.is_full()) return *this;
    std::vector<int> ax = zero_axes_;
    ax.insert(ax.end(), o.zero_axes_.begin(), o.zero_axes_.end());
    return coordinate_subspace(dim_, ax);
}

ConicRegion ConicRegion::unite(const ConicRegion& o) const {
    if (dim_ != o.dim_) throw ExactDomainError("cone dimension mismatch");
    ConicRegion r;
    r.dim_ = dim_;
    if (dim_ == 1) {
        r.ray_plus_ = ray_plus_ || o.ray_plus_;
        r.ray_minus_ = ray_minus_ || o.ray_minus_;
        return r;
    }
    if (dim_ == 2) {
        if (full_ || o.full_) return full(2);
        r.arcs_ = arcs_;
        r.arcs_.insert(r.arcs_.end(), o.arcs_.begin(), o.arcs_.end());
        r.normalize2();
        return r;
    }
    if (is_empty()) return o;
    if (o.is_empty()) return *this;
    if (is_full() || o.is_full()) return full(dim_);
    if (zero_axes_ == o.zero_axes_) return *this;
    throw ExactDomainError("union outside supported high-dimension cone fragment");
}

ConicRegion ConicRegion::complement_closure() const {
    ConicRegion r;
    r.dim_ = dim_;
    if (dim_ == 1) {
        r.ray_plus_ = !ray_plus_;
        r.ray_minus_ = !ray_minus_;
        return r;
    }
    if (dim_ == 2) {
        if (full_) return empty(2);
        if (arcs_.empty()) return full(2);
        std::vector<Piece> pieces = to_pieces(arcs_);
        std::sort(pieces.begin(), pieces.end(),
                  [](const Piece& a, const Piece& b) { return pos_less(a.lo, b.lo); });
        std::vector<Piece> gaps;
        Pos cursor{kAnchor, 0};
        for (const Piece& p : pieces) {
            if (pos_less(cursor, p.lo)) gaps.push_back(Piece{cursor, p.lo});
            if (pos_less(cursor, p.hi)) cursor = p.hi;
        }
        if (pos_less(cursor, Pos{kAnchor, 1})) gaps.push_back(Piece{cursor, Pos{kAnchor, 1}});
        rebuild_from_pieces(gaps, r.full_, r.arcs_);
        return r;
    }
    if (is_empty()) return full(dim_);
    throw ExactDomainError("complement outside supported high-dimension cone fragment");
}

bool ConicRegion::contains(const ConicRegion& o) const { return intersect(o) == o; }

bool operator==(const ConicRegion& a, const ConicRegion& b) {
    if (a.dim_ != b.dim_) return false;
    if (a.dim_ == 1) return a.ray_plus_ == b.ray_plus_ && a.ray_minus_ == b.ray_minus_;
    if (a.dim_ == 2) return a.full_ == b.full_ && a.arcs_ == b.arcs_;
    return a.high_dim_empty_ == b.high_dim_empty_ && a.full_ == b.full_ &&
           a.zero_axes_ == b.zero_axes_;
}

bool ConicRegion::contains_lattice(const ZVec& k) const {
    if (zvec_is_zero(k)) return is_full();
    if (dim_ == 1) return k[0] > 0 ? ray_plus_ : ray_minus_;
    if (dim_ == 2) {
        if (full_) return true;
        Dir d = dir_normalize(k[0], k[1]);
        for (const Arc& a : arcs_) {
            if (a.lo == a.hi) {
                if (d == a.lo) return true;
            } else if (dir_less(a.lo, a.hi)) {
                if (dir_leq(a.lo, d) && dir_leq(d, a.hi)) return true;
            } else {
                if (dir_leq(a.lo, d) || dir_leq(d, a.hi)) return true;
            }
        }
        return false;
    }
    if (is_empty()) return false;
    if (is_full()) return true;
    for (int ax : zero_axes_)
        if (k[static_cast<size_t>(ax)] != 0) return false;
    return true;
}

ConicRegion ConicRegion::linear_image(const std::vector<ZVec>& cols) const {
    if (dim_ == 1) {
        long u = cols[0][0];
        if (u == 0) throw ExactDomainError("singular map on cones");
        if (u > 0) return *this;
        return half_lines(ray_minus_, ray_plus_);
    }
    if (dim_ != 2) throw ExactDomainError("linear_image outside supported cone fragment");
    if (full_ || arcs_.empty()) return *this;
    long det = cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1];
    if (det == 0) throw ExactDomainError("singular map on cones");
    auto map_dir = [&](const Dir& d) {
        long x = cols[0][0] * d.x + cols[1][0] * d.y;
        long y = cols[0][1] * d.x + cols[1][1] * d.y;
        return dir_normalize(x, y);
    };
    ConicRegion r;
    r.dim_ = 2;
    for (const Arc& a : arcs_) {
        Dir lo = map_dir(a.lo), hi = map_dir(a.hi);
        if (a.lo == a.hi) {
            r.arcs_.push_back(Arc{lo, lo});
        } else if (det > 0) {
            // orientation preserved: ccw sweeps stay ccw
            r.arcs_.push_back(Arc{lo, hi});
        } else {
            r.arcs_.push_back(Arc{hi, lo});
        }
    }
    r.normalize2();
    return r;
}

namespace {

ZVec dir_to_zvec(const Dir& d) { return ZVec{d.x, d.y}; }
ZVec rot90(const Dir& d) { return ZVec{-d.y, d.x}; }
ZVec rot270(const Dir& d) { return ZVec{d.y, -d.x}; }

}  // namespace

std::vector<ConicRegion::ConvexPiece> ConicRegion::convex_pieces() const {
    std::vector<ConvexPiece> out;
    if (is_empty()) return out;
    if (is_full()) {
        out.push_back(ConvexPiece{});
        return out;
    }
    if (dim_ == 1) {
        if (ray_plus_) out.push_back(ConvexPiece{{ZVec{1}}, {ZVec{1}}});
        if (ray_minus_) out.push_back(ConvexPiece{{ZVec{-1}}, {ZVec{-1}}});
        return out;
    }
    if (dim_ == 2) {
        for (const Arc& a : arcs_) {
            std::vector<Arc> parts;
            if (a.lo == a.hi) {
                parts.push_back(a);
            } else if (dir_cross(a.lo, a.hi) < 0) {
                // ccw angle above pi: split at the antipode of lo
                Dir anti = dir_normalize(-a.lo.x, -a.lo.y);
                parts.push_back(Arc{a.lo, anti});
                parts.push_back(Arc{anti, a.hi});
            } else {
                parts.push_back(a);
            }
            for (const Arc& p : parts) {
                ConvexPiece piece;
                piece.rays.push_back(dir_to_zvec(p.lo));
                if (p.lo == p.hi) {
                    // single ray: equality pair plus the forward half-plane
                    piece.normals.push_back(rot90(p.lo));
                    piece.normals.push_back(rot270(p.lo));
                    piece.normals.push_back(dir_to_zvec(p.lo));
                } else {
                    piece.rays.push_back(dir_to_zvec(p.hi));
                    piece.normals.push_back(rot90(p.lo));
                    piece.normals.push_back(rot270(p.hi));
                }
                out.push_back(std::move(piece));
            }
        }
        return out;
    }
    ConvexPiece piece;
    for (int ax : zero_axes_) {
        ZVec n = zvec_zero(dim_);
        n[static_cast<size_t>(ax)] = 1;
        piece.normals.push_back(n);
        n[static_cast<size_t>(ax)] = -1;
        piece.normals.push_back(n);
    }
    out.push_back(std::move(piece));
    return out;
}

ConicRegion ConicRegion::from_pieces(int dim, const std::vector<ConvexPiece>& pieces) {
    ConicRegion acc = empty(dim);
    for (const auto& p : pieces) {
        if (p.rays.empty() && p.normals.empty()) {
            acc = acc.unite(full(dim));
            continue;
        }
        if (dim == 1) {
            for (const ZVec& r : p.rays) acc = acc.unite(ray(1, r));
            if (p.rays.empty())
                for (const ZVec& n : p.normals) acc = acc.unite(ray(1, n));
            continue;
        }
        if (dim != 2) {
            // subspace pieces carry +- normal pairs per vanishing axis
            std::vector<int> axes;
            for (const ZVec& n : p.normals)
                for (size_t i = 0; i < n.size(); ++i)
                    if (n[i] != 0) axes.push_back(static_cast<int>(i));
            acc = acc.unite(coordinate_subspace(dim, axes));
            continue;
        }
        if (!p.rays.empty()) {
            Dir lo = dir_normalize(p.rays.front()[0], p.rays.front()[1]);
            Dir hi = p.rays.size() > 1 ? dir_normalize(p.rays.back()[0], p.rays.back()[1]) : lo;
            acc = acc.unite(sector(lo, hi));
        } else {
            ConicRegion half = full(2);
            for (const ZVec& n : p.normals) {
                Dir nd = dir_normalize(n[0], n[1]);
                Dir lo = dir_normalize(nd.y, -nd.x);
                Dir hi = dir_normalize(-nd.y, nd.x);
                half = half.intersect(sector(lo, hi));
            }
            acc = acc.unite(half);
        }
    }
    return acc;
}

std::string ConicRegion::key() const {
    std::ostringstream os;
    os << "d" << dim_;
    if (is_full()) {
        os << ":full";
        return os.str();
    }
    if (is_empty()) {
        os << ":empty";
        return os.str();
    }
    if (dim_ == 1) {
        os << ":" << (ray_plus_ ? "+" : "") << (ray_minus_ ? "-" : "");
    } else if (dim_ == 2) {
        for (const Arc& a : arcs_)
            os << ":[" << a.lo.x << "," << a.lo.y << ";" << a.hi.x << "," << a.hi.y << "]";
    } else {
        os << ":sub";
        for (int ax : zero_axes_) os << "," << ax;
    }
    return os.str();
}

// --- groups ----------------------------------------------------------------

int group_dim(const GroupDescriptor& g) {
    if (std::holds_alternative<CircleDesc>(g))
        return static_cast<int>(std::get<CircleDesc>(g).axes.size());
    return 0;
}

bool group_is_finite(const GroupDescriptor& g) {
    return std::holds_alternative<FiniteCyclicDesc>(g);
}

GroupElement group_identity(const GroupDescriptor& g) {
    return GroupElement{!group_is_finite(g), 0};
}

GroupElement group_multiply(const GroupDescriptor& g, const GroupElement& a,
                            const GroupElement& b) {
    if (group_is_finite(g)) {
        int q = std::get<FiniteCyclicDesc>(g).order;
        return GroupElement{false, ((a.power + b.power) % q + q) % q};
    }
    return GroupElement{true, 0};
}

GroupElement group_inverse(const GroupDescriptor& g, const GroupElement& a) {
    if (group_is_finite(g)) {
        int q = std::get<FiniteCyclicDesc>(g).order;
        return GroupElement{false, ((-a.power) % q + q) % q};
    }
    return GroupElement{true, 0};
}

std::vector<ZVec> identity_cols(int dim) {
    std::vector<ZVec> cols;
    for (int j = 0; j < dim; ++j) {
        ZVec c = zvec_zero(dim);
        c[static_cast<size_t>(j)] = 1;
        cols.push_back(c);
    }
    return cols;
}

std::vector<ZVec> matrix_multiply_cols(const std::vector<ZVec>& a, const std::vector<ZVec>& b,
                                       int dim) {
    std::vector<ZVec> out;
    for (int j = 0; j < dim; ++j) {
        ZVec c = zvec_zero(dim);
        for (int i = 0; i < dim; ++i) {
            long s = 0;
            for (int l = 0; l < dim; ++l)
                s += a[static_cast<size_t>(l)][static_cast<size_t>(i)] *
                     b[static_cast<size_t>(j)][static_cast<size_t>(l)];
            c[static_cast<size_t>(i)] = s;
        }
        out.push_back(c);
    }
    return out;
}

std::vector<ZVec> matrix_power_cols(const std::vector<ZVec>& cols, long p, int dim) {
    std::vector<ZVec> acc = identity_cols(dim);
    for (long i = 0; i < p; ++i) acc = matrix_multiply_cols(acc, cols, dim);
    return acc;
}

std::vector<ZVec> matrix_inverse_transpose_cols(const std::vector<ZVec>& cols, int dim) {
    if (dim == 1) {
        long d = cols[0][0];
        if (d != 1 && d != -1) throw ExactDomainError("matrix not unimodular");
        return cols;
    }
    if (dim != 2) throw ExactDomainError("matrix inverse only for dim <= 2");
    long a = cols[0][0], c = cols[0][1], b = cols[1][0], d = cols[1][1];
    long det = a * d - b * c;
    if (det != 1 && det != -1) throw ExactDomainError("matrix not unimodular");
    // inv = adj/det; columns of inv^T, det acts as its own reciprocal
    std::vector<ZVec> out = {ZVec{det * d, det * (-b)}, ZVec{det * (-c), det * a}};
    return out;
}

TorusMap group_element_map(const GroupDescriptor& g, int dim, const GroupElement& e) {
    TorusMap m;
    m.u_cols = identity_cols(dim);
    m.v.assign(static_cast<size_t>(dim), Rational(0));
    if (!group_is_finite(g)) return m;  // circle handles carry no fixed map
    const auto& fc = std::get<FiniteCyclicDesc>(g);
    long p = ((e.power % fc.order) + fc.order) % fc.order;
    if (!fc.matrix_cols.empty()) {
        m.u_cols = matrix_power_cols(fc.matrix_cols, p, dim);
    } else if (!fc.translation.empty()) {
        for (int i = 0; i < dim; ++i)
            m.v[static_cast<size_t>(i)] = fc.translation[static_cast<size_t>(i)] * p;
    }
    return m;
}

ConicRegion group_push_cone(const GroupDescriptor& g, const GroupElement& e,
                            const ConicRegion& c) {
    if (!group_is_finite(g)) return c;  // translations act trivially on covectors
    const auto& fc = std::get<FiniteCyclicDesc>(g);
    if (fc.matrix_cols.empty()) return c;
    long p = ((e.power % fc.order) + fc.order) % fc.order;
    auto u = matrix_power_cols(fc.matrix_cols, p, c.dim());
    // covectors transform by the inverse transpose
    return c.linear_image(matrix_inverse_transpose_cols(u, c.dim()));
}

ConicRegion transversal_cotangent(const GroupDescriptor& g, int dim) {
    if (group_is_finite(g)) return ConicRegion::full(dim);
    const auto& cd = std::get<CircleDesc>(g);
    return ConicRegion::coordinate_subspace(dim, cd.axes);
}

}  // namespace torcal
