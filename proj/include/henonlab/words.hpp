#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "henonlab/core.hpp"

namespace henonlab {

// Alphabet W = {0, ..., p-1} for stationary combinatorics of period p.
struct Alphabet {
    int p = 2;
};

// Finite word over W, stored least-significant-first: the carry of the
// adding machine runs over letters[0].
class Word {
public:
    Word() = default;
    Word(std::vector<int> letters, Alphabet alphabet);

    static Word zeros(int length, Alphabet alphabet);
    // Parse the compact "w0.w1..." rendering used in all file outputs.
    static Word parse(const std::string& s, Alphabet alphabet);

    // Adding machine "+1 with carry". The all-(p-1) word of length L maps to
    // 0^L . 1 of length L+1 (depth grows by one under a full carry).
    Word successor() const;

    // Least-significant-first radix-p value; injective on fixed length.
    std::uint64_t index() const;

    Word prepend(int letter) const;
    Word append(int letter) const;
    Word concat(const Word& tail) const;

    bool all_equal(int letter) const;
    int length() const { return static_cast<int>(letters_.size()); }
    int letter(int i) const { return letters_[static_cast<size_t>(i)]; }
    const std::vector<int>& letters() const { return letters_; }
    const Alphabet& alphabet() const { return alphabet_; }

    std::string str() const;

    bool operator==(const Word& o) const { return letters_ == o.letters_ && alphabet_.p == o.alphabet_.p; }

private:
    std::vector<int> letters_;
    Alphabet alphabet_;
};

// [w0, successor(w0), ..., successor^k(w0)]; k+1 entries.
std::vector<Word> orbit(const Word& w0, int k);

struct WordHash {
    size_t operator()(const Word& w) const {
        size_t h = 1469598103934665603ull;
        for (int v : w.letters()) {
            h ^= static_cast<size_t>(v) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h ^ (static_cast<size_t>(w.length()) << 32);
    }
};

}  // namespace henonlab
