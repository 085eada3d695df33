#include "henonlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace henonlab {

namespace {

double seg_point_dist(Point a, Point b, Point p) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

double seg_seg_dist(Point a0, Point a1, Point b0, Point b1) {
    double d = std::min(std::min(seg_point_dist(a0, a1, b0), seg_point_dist(a0, a1, b1)),
                        std::min(seg_point_dist(b0, b1, a0), seg_point_dist(b0, b1, a1)));
    return d;
}

bool seg_seg_intersect(Point a0, Point a1, Point b0, Point b1, Point& out) {
    const double rx = a1.x - a0.x, ry = a1.y - a0.y;
    const double sx = b1.x - b0.x, sy = b1.y - b0.y;
    const double den = rx * sy - ry * sx;
    if (den == 0.0) return false;
    const double qpx = b0.x - a0.x, qpy = b0.y - a0.y;
    const double t = (qpx * sy - qpy * sx) / den;
    const double u = (qpx * ry - qpy * rx) / den;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return false;
    out = {a0.x + t * rx, a0.y + t * ry};
    return true;
}

}  // namespace

Piece piece_from_points(std::vector<Point> pts, Word word, int height) {
    Piece p;
    p.boundary = std::move(pts);
    p.word = word;
    p.height = height;
    if (!p.boundary.empty()) {
        p.x_extent = {p.boundary[0].x, p.boundary[0].x};
        p.y_extent = {p.boundary[0].y, p.boundary[0].y};
        for (const Point& z : p.boundary) {
            p.x_extent.lo = std::min(p.x_extent.lo, z.x);
            p.x_extent.hi = std::max(p.x_extent.hi, z.x);
            p.y_extent.lo = std::min(p.y_extent.lo, z.y);
            p.y_extent.hi = std::max(p.y_extent.hi, z.y);
        }
        // midpoint deviation over gently turning triples; sharp turns are
        // genuine corners where the polyline is exact
        const size_t n = p.boundary.size();
        for (size_t i = 0; i + 2 < n; ++i) {
            const Point a = p.boundary[i], b = p.boundary[i + 1], c = p.boundary[i + 2];
            const double l1 = dist(a, b), l2 = dist(b, c);
            if (l1 == 0.0 || l2 == 0.0) continue;
            const double cosang = ((b.x - a.x) * (c.x - b.x) + (b.y - a.y) * (c.y - b.y)) / (l1 * l2);
            if (cosang < 0.55) continue;
            p.sagitta = std::max(p.sagitta, seg_point_dist(a, c, b));
        }
    }
    return p;
}

Piece piece_for_word(const RenormTower& tower, int height, const Word& w, int samples,
                     bool exact) {
    const int per_side = std::max(8, samples / 4);
    std::vector<Point> pts;
    pts.reserve(static_cast<size_t>(per_side) * 4);
    for (int i = 0; i < per_side; ++i) {
        const double t = -1.0 + 2.0 * i / per_side;
        pts.push_back({t, -1.0});
    }
    for (int i = 0; i < per_side; ++i) {
        const double t = -1.0 + 2.0 * i / per_side;
        pts.push_back({1.0, t});
    }
    for (int i = 0; i < per_side; ++i) {
        const double t = 1.0 - 2.0 * i / per_side;
        pts.push_back({t, 1.0});
    }
    for (int i = 0; i < per_side; ++i) {
        const double t = 1.0 - 2.0 * i / per_side;
        pts.push_back({-1.0, t});
    }
    for (Point& z : pts) z = tower.scope_word(height, w, z, exact);
    return piece_from_points(std::move(pts), w, height);
}

double piece_diam(const Piece& p) {
    double d = 0.0;
    for (size_t i = 0; i < p.boundary.size(); ++i)
        for (size_t j = i + 1; j < p.boundary.size(); ++j)
            d = std::max(d, dist(p.boundary[i], p.boundary[j]));
    return d;
}

double piece_dist(const Piece& a, const Piece& b) {
    const double gap_x = interval_gap(a.x_extent, b.x_extent);
    const double gap_y = interval_gap(a.y_extent, b.y_extent);
    const double lower = std::hypot(gap_x, gap_y);
    double d = std::numeric_limits<double>::infinity();
    const size_t na = a.boundary.size(), nb = b.boundary.size();
    for (size_t i = 0; i < na; ++i) {
        const Point a0 = a.boundary[i], a1 = a.boundary[(i + 1) % na];
        for (size_t j = 0; j < nb; ++j) {
            const Point b0 = b.boundary[j], b1 = b.boundary[(j + 1) % nb];
            d = std::min(d, seg_seg_dist(a0, a1, b0, b1));
        }
    }
    return std::max(d, lower);
}

double distance_to_boundary(const Piece& p, Point z) {
    double d = std::numeric_limits<double>::infinity();
    const size_t n = p.boundary.size();
    for (size_t i = 0; i < n; ++i)
        d = std::min(d, seg_point_dist(p.boundary[i], p.boundary[(i + 1) % n], z));
    return d;
}

double piece_area(const Piece& p) {
    double acc = 0.0;
    const size_t n = p.boundary.size();
    for (size_t i = 0; i < n; ++i) {
        const Point a = p.boundary[i], b = p.boundary[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    return 0.5 * std::fabs(acc);
}

bool piece_contains(const Piece& p, Point z, double tol) {
    if (p.boundary.size() < 3) return distance_to_boundary(p, z) <= tol;
    const double diam_scale = std::max(p.x_extent.length(), p.y_extent.length());
    if (piece_area(p) < 1e-6 * diam_scale * diam_scale)  // flat piece
        return distance_to_boundary(p, z) <= tol;
    if (distance_to_boundary(p, z) <= tol) return true;
    // ray casting, horizontal ray to +infinity
    bool inside = false;
    const size_t n = p.boundary.size();
    for (size_t i = 0; i < n; ++i) {
        const Point a = p.boundary[i], b = p.boundary[(i + 1) % n];
        if ((a.y > z.y) != (b.y > z.y)) {
            const double xi = a.x + (z.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (xi > z.x) inside = !inside;
        }
    }
    return inside;
}

bool horizontal_overlap(const Piece& a, const Piece& b) {
    return a.x_extent.intersects(b.x_extent);
}

const Piece& Boxing::at(const Word& w) const {
    auto it = pieces.find(w);
    if (it == pieces.end()) throw Error("boxing has no piece for word " + w.str());
    return it->second;
}

Boxing canonical_boxing(const RenormTower& tower, int depth, int samples) {
    if (depth < 1) throw Error("canonical_boxing: depth >= 1");
    if (tower.depth() <= depth)
        throw InsufficientDepth("canonical_boxing: tower depth must exceed boxing depth");
    Boxing b;
    b.depth = depth;
    b.kind = BoxingKind::Canonical;
    b.alphabet = tower.alphabet;
    const int p = b.alphabet.p;
    for (int L = 1; L <= depth; ++L) {
        std::vector<int> w(static_cast<size_t>(L), 0);
        while (true) {
            Word word(w, b.alphabet);
            b.pieces.emplace(word, piece_for_word(tower, 0, word, samples));
            size_t i = 0;
            while (i < w.size() && ++w[i] == p) w[i++] = 0;
            if (i == w.size()) break;
        }
    }
    return b;
}

namespace {

// same-length cyclic successor (mod p^L odometer); boxing axiom (B1) is a
// fixed-length statement, the full-carry word wraps to 0^L
Word cyclic_successor(const Word& w) {
    if (!w.all_equal(w.alphabet().p - 1)) return w.successor();
    return Word::zeros(w.length(), w.alphabet());
}

}  // namespace

BoxingAxioms check_boxing(const RenormTower& tower, const Boxing& boxing, double tol) {
    BoxingAxioms ax;
    ax.b1 = ax.b2 = ax.b3 = ax.b4 = true;
    const HenonLikeMap& F = tower.level(boxing.height);
    const int p = boxing.alphabet.p;

    // interior samples of Psi^w(B); boundary-on-boundary comparisons would be
    // limited by polyline sagitta instead of the geometry itself
    auto interior_samples = [&](const Word& w) {
        std::vector<Point> pts;
        for (int i = 1; i < 5; ++i)
            for (int j = 1; j < 5; ++j)
                pts.push_back(tower.scope_word(boxing.height, w,
                                               {-1.0 + 0.4 * i, -1.0 + 0.4 * j}));
        return pts;
    };

    for (const auto& [w, piece] : boxing.pieces) {
        const std::vector<Point> inner = interior_samples(w);
        // (B1)
        const Word next = cyclic_successor(w);
        if (boxing.has(next)) {
            const Piece& target = boxing.at(next);
            const double tol1 = std::max(tol, 3.0 * target.sagitta);
            for (const Point& z : inner) {
                const Point img = F.apply(z);
                if (!piece_contains(target, img, tol1)) {
                    ax.b1 = false;
                    ax.worst_b1 = std::max(ax.worst_b1, distance_to_boundary(target, img));
                }
            }
        }
        // (B3)
        if (w.length() >= 2) {
            std::vector<int> parent(w.letters().begin(), w.letters().end() - 1);
            const Piece& par = boxing.at(Word(parent, boxing.alphabet));
            const double tol3 = std::max(tol, 3.0 * par.sagitta);
            for (const Point& z : inner) {
                if (!piece_contains(par, z, tol3)) {
                    ax.b3 = false;
                    ax.worst_b3 = std::max(ax.worst_b3, distance_to_boundary(par, z));
                }
            }
        }
        // (B4): Cantor points with addresses extending w
        if (w.length() + 2 <= tower.depth() - 1) {
            const double tol4 = std::max(tol, 3.0 * piece.sagitta);
            for (int s = 0; s < p; ++s) {
                const Point z = tower.cantor_point(boxing.height, w.append(s));
                if (!piece_contains(piece, z, tol4)) {
                    ax.b4 = false;
                    ax.worst_b4 = std::max(ax.worst_b4, distance_to_boundary(piece, z));
                }
            }
        }
    }
    // (B2)
    for (const auto& [w, piece] : boxing.pieces) {
        for (const auto& [v, other] : boxing.pieces) {
            if (w.length() != v.length() || w == v) continue;
            if (piece_dist(piece, other) <= 0.0) ax.b2 = false;
        }
    }
    return ax;
}

GeometryReport geometry_report(const Boxing& boxing) {
    if (boxing.depth < 2) throw Error("geometry_report: depth >= 2 required");
    GeometryReport rep;
    const int p = boxing.alphabet.p;
    std::map<int, DepthStats> stats;

    for (const auto& [w, piece] : boxing.pieces) {
        if (w.length() >= boxing.depth) continue;
        const double parent_diam = piece_diam(piece);
        std::vector<double> child_diam(static_cast<size_t>(p));
        for (int s = 0; s < p; ++s) child_diam[static_cast<size_t>(s)] = piece_diam(boxing.at(w.append(s)));

        const int d = w.length() + 1;
        auto& st = stats[d];
        if (st.depth == 0) {
            st.depth = d;
            st.min_ratio = std::numeric_limits<double>::infinity();
            st.min_child_frac = std::numeric_limits<double>::infinity();
        }
        for (int s = 0; s < p; ++s) {
            ChildRow cr{w, s, child_diam[static_cast<size_t>(s)] / parent_diam};
            rep.children.push_back(cr);
            st.min_child_frac = std::min(st.min_child_frac, cr.frac);
            st.max_child_frac = std::max(st.max_child_frac, cr.frac);
            for (int t = 0; t < p; ++t) {
                if (s == t) continue;
                SiblingRow row;
                row.parent = w;
                row.child_a = s;
                row.child_b = t;
                row.diam_a = child_diam[static_cast<size_t>(s)];
                row.dist = piece_dist(boxing.at(w.append(s)), boxing.at(w.append(t)));
                row.ratio = row.dist > 0.0 ? row.diam_a / row.dist
                                           : std::numeric_limits<double>::infinity();
                rep.siblings.push_back(row);
                st.min_ratio = std::min(st.min_ratio, row.ratio);
                st.max_ratio = std::max(st.max_ratio, row.ratio);
            }
        }
    }
    for (const auto& [d, st] : stats) rep.per_depth.push_back(st);
    return rep;
}

Boxing intersect_with_canonical(const Boxing& boxing, const Boxing& canonical) {
    if (boxing.depth != canonical.depth)
        throw Error("intersect_with_canonical: depth mismatch");
    Boxing out;
    out.depth = boxing.depth;
    out.height = boxing.height;
    out.kind = BoxingKind::Custom;
    out.alphabet = boxing.alphabet;

    for (const auto& [w, piece] : boxing.pieces) {
        if (w.length() < 2) {
            out.pieces.emplace(w, piece);
            continue;
        }
        std::vector<int> parent_letters(w.letters().begin(), w.letters().end() - 1);
        const Piece& parent = canonical.at(Word(parent_letters, boxing.alphabet));

        // fast path: child already inside its canonical parent
        const double clip_tol = 3.0 * parent.sagitta + 1e-12;
        bool all_inside = true;
        for (const Point& z : piece.boundary)
            if (!piece_contains(parent, z, clip_tol)) {
                all_inside = false;
                break;
            }
        if (all_inside) {
            out.pieces.emplace(w, piece);
            continue;
        }
        // clipped point set: child boundary inside the parent plus parent
        // boundary inside the child; adequate for dist/diam at sampling
        // resolution
        std::vector<Point> pts;
        for (const Point& z : piece.boundary)
            if (piece_contains(parent, z, clip_tol)) pts.push_back(z);
        for (const Point& z : parent.boundary)
            if (piece_contains(piece, z, 3.0 * piece.sagitta + 1e-12)) pts.push_back(z);
        // boundary crossings catch thin intersections holding no vertices
        const size_t nc = piece.boundary.size(), np = parent.boundary.size();
        for (size_t i = 0; i < nc; ++i) {
            const Point a0 = piece.boundary[i], a1 = piece.boundary[(i + 1) % nc];
            for (size_t j = 0; j < np; ++j) {
                Point cross;
                if (seg_seg_intersect(a0, a1, parent.boundary[j], parent.boundary[(j + 1) % np],
                                      cross))
                    pts.push_back(cross);
            }
        }
        if (pts.empty()) throw EmptyIntersection(w.str());
        out.pieces.emplace(w, piece_from_points(std::move(pts), w, piece.height));
    }
    return out;
}

}  // namespace henonlab
