#include "doctest.h"

#include <cmath>

#include "henonlab/geometry.hpp"
#include "henonlab/unimodal.hpp"

using namespace henonlab;

namespace {
const FixedPointResult& fstar() {
    static FixedPointResult r = solve_fixed_point(40, 1e-9);
    return r;
}

const RenormTower& degenerate_tower() {
    static RenormTower t = build_tower(embed_unimodal(fstar().fstar), 9);
    return t;
}

const RenormTower& thick_tower() {
    static RenormTower t = build_tower(tune_renormalizable(0.08, EpsShape::PureY, 11).map, 10);
    return t;
}

Word cyclic_succ(const Word& w) {
    if (!w.all_equal(w.alphabet().p - 1)) return w.successor();
    return Word::zeros(w.length(), w.alphabet());
}

Piece square_piece(double lo, double hi, Word w) {
    std::vector<Point> pts;
    const int per = 16;
    for (int i = 0; i < per; ++i) pts.push_back({lo + (hi - lo) * i / per, lo});
    for (int i = 0; i < per; ++i) pts.push_back({hi, lo + (hi - lo) * i / per});
    for (int i = 0; i < per; ++i) pts.push_back({hi - (hi - lo) * i / per, hi});
    for (int i = 0; i < per; ++i) pts.push_back({lo, hi - (hi - lo) * i / per});
    return piece_from_points(std::move(pts), w, 0);
}

// middle-thirds toy boxing: word w maps to the square I_w x I_w
Boxing thirds_boxing(int depth) {
    Boxing b;
    b.depth = depth;
    b.kind = BoxingKind::Custom;
    b.alphabet = Alphabet{2};
    for (int L = 1; L <= depth; ++L) {
        std::vector<int> w(static_cast<size_t>(L), 0);
        while (true) {
            double lo = 0.0, hi = 1.0;
            for (int pos = 0; pos < L; ++pos) {
                const double third = (hi - lo) / 3.0;
                if (w[static_cast<size_t>(pos)] == 0)
                    hi = lo + third;
                else
                    lo = hi - third;
            }
            Word word(w, b.alphabet);
            b.pieces.emplace(word, square_piece(lo, hi, word));
            size_t i = 0;
            while (i < w.size() && ++w[i] == 2) w[i++] = 0;
            if (i == w.size()) break;
        }
    }
    return b;
}
}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("horizontal overlap on extents") {
    Piece a = square_piece(0.0, 1.0, Word({0}, Alphabet{2}));
    Piece b = square_piece(2.0, 3.0, Word({1}, Alphabet{2}));
    CHECK(horizontal_overlap(a, a));   // identical pieces
    CHECK(!horizontal_overlap(a, b));  // x-extents [0,1] vs [2,3]
    // shared vertical line at x = 1: closed extents overlap
    Piece c = square_piece(1.0, 2.0, Word({1}, Alphabet{2}));
    CHECK(horizontal_overlap(a, c));
    CHECK(horizontal_overlap(c, a));  // symmetric
}

TEST_CASE("canonical boxing: piece count and axioms on a thickened tower") {
    const RenormTower& t = thick_tower();
    Boxing box = canonical_boxing(t, 4, 256);
    int count = 0;
    for (const auto& [w, p] : box.pieces)
        if (w.length() == 4) ++count;
    CHECK(count == 16);  // p^depth

    BoxingAxioms ax = check_boxing(t, box, 1e-8);
    CHECK(ax.b1);
    CHECK(ax.b2);
    CHECK(ax.b3);
    CHECK(ax.b4);

    // depth 1: two disjoint pieces
    const Piece& p0 = box.at(Word({0}, box.alphabet));
    const Piece& p1 = box.at(Word({1}, box.alphabet));
    CHECK(piece_dist(p0, p1) > 0.0);
}

TEST_CASE("degenerate boxing: pieces sit over the 1-D cylinders") {
    const RenormTower& t = degenerate_tower();
    Boxing box = canonical_boxing(t, 5, 1024);
    CylinderFamily1D fam = cylinders_1d(fstar().fstar, 6);

    for (const auto& [w, piece] : box.pieces) {
        // y-extent of the piece is the cylinder J^w
        const Interval& Jw = fam.at(w);
        CHECK(std::fabs(piece.y_extent.lo - Jw.lo) < 1e-6);
        CHECK(std::fabs(piece.y_extent.hi - Jw.hi) < 1e-6);
        // x-extent is the cylinder of the same-length successor
        const Interval& Jn = fam.at(cyclic_succ(w));
        CHECK(std::fabs(piece.x_extent.lo - Jn.lo) < 1e-6);
        CHECK(std::fabs(piece.x_extent.hi - Jn.hi) < 1e-6);
        // flat pieces for every word with a nonzero letter
        if (!w.all_equal(0)) {
            const double scale = std::max(piece.x_extent.length(), piece.y_extent.length());
            CHECK(piece_area(piece) < 1e-4 * scale * scale);
        }
    }
}

TEST_CASE("degenerate boxing reproduces the 1-D a priori ratios") {
    const RenormTower& t = degenerate_tower();
    Boxing box = canonical_boxing(t, 6, 512);
    CylinderFamily1D fam = cylinders_1d(fstar().fstar, 6);
    AprioriReport rep = apriori_report(fam);

    // child/parent and sibling ratios measured through piece y-extents
    double k0 = 1.0, k1 = 0.0, L = 1.0;
    for (const auto& [w, piece] : box.pieces) {
        if (w.length() >= box.depth) continue;
        const double parent = piece.y_extent.length();
        double child[2];
        for (int s = 0; s < 2; ++s) {
            child[s] = box.at(w.append(s)).y_extent.length();
            k0 = std::min(k0, child[s] / parent);
            k1 = std::max(k1, child[s] / parent);
        }
        L = std::max({L, child[0] / child[1], child[1] / child[0]});
    }
    CHECK(k0 == doctest::Approx(rep.k0).epsilon(1e-6));
    CHECK(k1 == doctest::Approx(rep.k1).epsilon(1e-6));
    CHECK(L == doctest::Approx(rep.L).epsilon(1e-6));
}

TEST_CASE("geometry report: exact self-similar toy boxing") {
    Boxing box = thirds_boxing(4);
    GeometryReport rep = geometry_report(box);
    REQUIRE(!rep.siblings.empty());
    const double r0 = rep.siblings[0].ratio;
    for (const SiblingRow& row : rep.siblings) CHECK(row.ratio == doctest::Approx(r0).epsilon(1e-9));
    for (const ChildRow& row : rep.children) CHECK(row.frac == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    for (const DepthStats& st : rep.per_depth) {
        CHECK(st.min_ratio == doctest::Approx(st.max_ratio).epsilon(1e-9));
    }
}

TEST_CASE("geometry report: thickened canonical boxing sanity") {
    const RenormTower& t = thick_tower();
    Boxing box = canonical_boxing(t, 3, 256);
    GeometryReport rep = geometry_report(box);
    for (const SiblingRow& row : rep.siblings) {
        CHECK(row.dist >= 0.0);
        CHECK(row.ratio >= 0.0);
    }
    for (const ChildRow& row : rep.children) {
        CHECK(row.frac > 0.0);
        CHECK(row.frac < 1.0);  // diam(child) < diam(parent)
    }
    CHECK_THROWS_AS(geometry_report(canonical_boxing(t, 1, 64)), Error);
}

TEST_CASE("intersection with canonical: idempotence and sharpening") {
    const RenormTower& t = thick_tower();
    Boxing canon = canonical_boxing(t, 3, 256);

    // canonical cap canonical is itself
    Boxing same = intersect_with_canonical(canon, canon);
    for (const auto& [w, piece] : canon.pieces) {
        const Piece& hat = same.at(w);
        CHECK(hat.boundary.size() == piece.boundary.size());
        CHECK(piece_diam(hat) == doctest::Approx(piece_diam(piece)).epsilon(1e-12));
    }

    // inflate pieces 1.2x about their centroids, then clip back; run on the
    // exact synthetic boxing where the clipped sets are resolvable
    Boxing toy = thirds_boxing(3);
    Boxing inflated = toy;
    for (auto& [w, piece] : inflated.pieces) {
        double cx = 0.0, cy = 0.0;
        for (const Point& z : piece.boundary) cx += z.x, cy += z.y;
        cx /= static_cast<double>(piece.boundary.size());
        cy /= static_cast<double>(piece.boundary.size());
        std::vector<Point> pts;
        for (const Point& z : piece.boundary)
            pts.push_back({cx + 1.2 * (z.x - cx), cy + 1.2 * (z.y - cy)});
        piece = piece_from_points(std::move(pts), w, piece.height);
    }
    Boxing hat = intersect_with_canonical(inflated, toy);
    for (const auto& [w, piece] : inflated.pieces) {
        if (w.length() < 2) continue;
        const Piece& clipped = hat.at(w);
        CHECK(piece_diam(clipped) <= piece_diam(piece) + 1e-12);
        // shrunk back inside the parent
        const std::vector<int> letters(w.letters().begin(), w.letters().end() - 1);
        const Piece& parent = toy.at(Word(letters, toy.alphabet));
        CHECK(clipped.x_extent.lo >= parent.x_extent.lo - 1e-9);
        CHECK(clipped.x_extent.hi <= parent.x_extent.hi + 1e-9);
    }
    // Lemma 3.3 monotonicity on sibling pairs: distances may only grow
    for (const auto& [w, piece] : inflated.pieces) {
        if (w.length() >= inflated.depth) continue;
        const double d_before = piece_dist(inflated.at(w.append(0)), inflated.at(w.append(1)));
        const double d_after = piece_dist(hat.at(w.append(0)), hat.at(w.append(1)));
        CHECK(d_after >= d_before - 1e-12);
    }

    // a far-away custom piece misses its canonical parent
    Boxing broken = canon;
    const Word bad({1, 1}, canon.alphabet);
    broken.pieces.at(bad) = square_piece(5.0, 6.0, bad);
    CHECK_THROWS_AS(intersect_with_canonical(broken, canon), EmptyIntersection);
}

}  // TEST_SUITE
