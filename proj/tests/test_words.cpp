#include "doctest.h"

#include <random>

#include "henonlab/words.hpp"

using namespace henonlab;

TEST_SUITE("words") {

TEST_CASE("successor: three cases of the adding machine") {
    Alphabet p2{2};
    CHECK(Word({0, 1, 1}, p2).successor() == Word({1, 1, 1}, p2));
    CHECK(Word({1, 0, 1}, p2).successor() == Word({0, 1, 1}, p2));
    // full carry deepens by one: (1,1) -> (0,0,1)
    CHECK(Word({1, 1}, p2).successor() == Word({0, 0, 1}, p2));

    Alphabet p3{3};
    CHECK(Word({2, 1}, p3).successor() == Word({0, 2}, p3));
    CHECK(Word({2, 2}, p3).successor() == Word({0, 0, 1}, p3));
}

TEST_CASE("word_index: least-significant-first radix value") {
    Alphabet p2{2}, p3{3};
    CHECK(Word({0, 0}, p2).index() == 0);
    CHECK(Word({1, 0, 1}, p2).index() == 5);
    CHECK(Word({2, 1}, p3).index() == 5);
}

TEST_CASE("orbit: k successors") {
    Alphabet p2{2};
    auto o = orbit(Word({0, 0}, p2), 4);
    REQUIRE(o.size() == 5);
    CHECK(o[0] == Word({0, 0}, p2));
    CHECK(o[1] == Word({1, 0}, p2));
    CHECK(o[2] == Word({0, 1}, p2));
    CHECK(o[3] == Word({1, 1}, p2));
    CHECK(o[4] == Word({0, 0, 1}, p2));

    auto single = orbit(Word({1, 0, 1}, p2), 0);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == Word({1, 0, 1}, p2));

    auto carry = orbit(Word({1, 1}, p2), 1);
    REQUIRE(carry.size() == 2);
    CHECK(carry[1] == Word({0, 0, 1}, p2));
}

TEST_CASE("index increments by one below the full-carry word") {
    std::mt19937_64 rng(20260810);
    for (int trial = 0; trial < 200; ++trial) {
        const int p = 2 + static_cast<int>(rng() % 3);
        const int L = 1 + static_cast<int>(rng() % 8);
        std::vector<int> letters(static_cast<size_t>(L));
        for (auto& v : letters) v = static_cast<int>(rng() % static_cast<unsigned>(p));
        Word w(letters, Alphabet{p});
        if (w.all_equal(p - 1)) continue;
        CHECK(w.successor().index() == w.index() + 1);
        CHECK(w.successor().length() == w.length());
    }
}

TEST_CASE("p^L successors of the zero word reach 0^L.1") {
    for (int p = 2; p <= 3; ++p) {
        for (int L = 1; L <= 5; ++L) {
            Word w = Word::zeros(L, Alphabet{p});
            long steps = 1;
            for (int i = 0; i < L; ++i) steps *= p;
            for (long i = 0; i < steps; ++i) w = w.successor();
            CHECK(w.length() == L + 1);
            CHECK(w.index() == static_cast<std::uint64_t>(steps));  // 0^L.1
        }
    }
}

TEST_CASE("letters stay inside the alphabet under iteration") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const int p = 2 + static_cast<int>(rng() % 4);
        const int L = 1 + static_cast<int>(rng() % 6);
        std::vector<int> letters(static_cast<size_t>(L));
        for (auto& v : letters) v = static_cast<int>(rng() % static_cast<unsigned>(p));
        Word w(letters, Alphabet{p});
        for (int i = 0; i < 50; ++i) {
            w = w.successor();
            for (int v : w.letters()) {
                CHECK(v >= 0);
                CHECK(v < p);
            }
        }
    }
}

TEST_CASE("string round trip") {
    Alphabet p3{3};
    Word w({2, 0, 1}, p3);
    CHECK(w.str() == "2.0.1");
    CHECK(Word::parse("2.0.1", p3) == w);
}

}  // TEST_SUITE
