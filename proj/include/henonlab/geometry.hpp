#pragma once

#include <unordered_map>
#include <vector>

#include "henonlab/core.hpp"
#include "henonlab/henon.hpp"
#include "henonlab/words.hpp"

namespace henonlab {

// Planar piece: the image of the boundary of B under a scope composition,
// kept as a sampled closed polyline. Metrics (dist, diam, containment) are
// computed on samples and segments at the stored resolution.
struct Piece {
    std::vector<Point> boundary;  // closed polyline, last->first edge implicit
    Interval x_extent;
    Interval y_extent;
    Word word;
    int height = 0;
    double sagitta = 0.0;  // polyline resolution: midpoint-to-chord deviation

    bool empty() const { return boundary.empty(); }
};

Piece piece_from_points(std::vector<Point> pts, Word word, int height);
Piece piece_for_word(const RenormTower& tower, int height, const Word& w, int samples = 256,
                     bool exact = false);

double piece_diam(const Piece& p);
double piece_dist(const Piece& a, const Piece& b);  // min segment-to-segment distance
// point inside the polyline, or within tol of it (flat pieces fall back to
// the distance test)
bool piece_contains(const Piece& p, Point z, double tol);
double distance_to_boundary(const Piece& p, Point z);
// shoelace area; near zero for degenerate (curve) pieces
double piece_area(const Piece& p);

bool horizontal_overlap(const Piece& a, const Piece& b);

enum class BoxingKind { Canonical, Custom };

struct Boxing {
    std::unordered_map<Word, Piece, WordHash> pieces;
    int depth = 0;
    int height = 0;
    BoxingKind kind = BoxingKind::Canonical;
    Alphabet alphabet{2};

    const Piece& at(const Word& w) const;
    bool has(const Word& w) const { return pieces.count(w) > 0; }
};

// Pieces Psi^w(B) for all |w| <= depth; requires tower depth > boxing depth.
Boxing canonical_boxing(const RenormTower& tower, int depth, int samples = 256);

struct BoxingAxioms {
    // (B1) F(B^w) inside B^{w+1} (cyclic successor at fixed length);
    // (B2) same-length disjointness; (B3) children inside the parent;
    // (B4) Cantor cylinder points inside their piece.
    bool b1 = false, b2 = false, b3 = false, b4 = false;
    double worst_b1 = 0.0;  // most negative containment margin seen
    double worst_b3 = 0.0;
    double worst_b4 = 0.0;
    bool all() const { return b1 && b2 && b3 && b4; }
};

BoxingAxioms check_boxing(const RenormTower& tower, const Boxing& boxing, double tol = 1e-8);

struct SiblingRow {
    Word parent;
    int child_a = 0, child_b = 0;
    double diam_a = 0.0;
    double dist = 0.0;
    double ratio = 0.0;  // diam_a / dist
};

struct ChildRow {
    Word parent;
    int child = 0;
    double frac = 0.0;  // diam(child) / diam(parent)
};

struct DepthStats {
    int depth = 0;
    double min_ratio = 0.0, max_ratio = 0.0;          // sibling diam/dist family
    double min_child_frac = 0.0, max_child_frac = 0.0;  // child/parent diam family
};

struct GeometryReport {
    std::vector<SiblingRow> siblings;
    std::vector<ChildRow> children;
    std::vector<DepthStats> per_depth;
};

GeometryReport geometry_report(const Boxing& boxing);

// Lemma-style sharpening: hat pieces B^w cap B_can^{parent}; distances cannot
// shrink and diameters cannot grow. Throws EmptyIntersection when a custom
// piece misses its canonical parent.
Boxing intersect_with_canonical(const Boxing& boxing, const Boxing& canonical);

}  // namespace henonlab
