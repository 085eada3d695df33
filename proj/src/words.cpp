#include "henonlab/words.hpp"

#include <sstream>

namespace henonlab {

Word::Word(std::vector<int> letters, Alphabet alphabet)
    : letters_(std::move(letters)), alphabet_(alphabet) {
    if (alphabet_.p < 2) throw Error("Alphabet requires p >= 2");
    for (int v : letters_)
        if (v < 0 || v >= alphabet_.p) throw Error("word letter outside alphabet");
}

Word Word::zeros(int length, Alphabet alphabet) {
    return Word(std::vector<int>(static_cast<size_t>(length), 0), alphabet);
}

Word Word::parse(const std::string& s, Alphabet alphabet) {
    std::vector<int> letters;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, '.'))
        if (!tok.empty()) letters.push_back(std::stoi(tok));
    return Word(std::move(letters), alphabet);
}

Word Word::successor() const {
    const int p = alphabet_.p;
    std::vector<int> out = letters_;
    for (size_t k = 0; k < out.size(); ++k) {
        if (out[k] != p - 1) {
            out[k] += 1;
            return Word(std::move(out), alphabet_);
        }
        out[k] = 0;
    }
    // full carry: 0^L . 1
    out.push_back(1);
    return Word(std::move(out), alphabet_);
}

std::uint64_t Word::index() const {
    std::uint64_t v = 0, base = 1;
    for (int letter : letters_) {
        v += base * static_cast<std::uint64_t>(letter);
        base *= static_cast<std::uint64_t>(alphabet_.p);
    }
    return v;
}

Word Word::prepend(int letter) const {
    std::vector<int> out;
    out.reserve(letters_.size() + 1);
    out.push_back(letter);
    out.insert(out.end(), letters_.begin(), letters_.end());
    return Word(std::move(out), alphabet_);
}

Word Word::append(int letter) const {
    std::vector<int> out = letters_;
    out.push_back(letter);
    return Word(std::move(out), alphabet_);
}

Word Word::concat(const Word& tail) const {
    std::vector<int> out = letters_;
    out.insert(out.end(), tail.letters_.begin(), tail.letters_.end());
    return Word(std::move(out), alphabet_);
}

bool Word::all_equal(int letter) const {
    for (int v : letters_)
        if (v != letter) return false;
    return !letters_.empty();
}

std::string Word::str() const {
    std::string s;
    for (size_t i = 0; i < letters_.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(letters_[i]);
    }
    return s;
}

std::vector<Word> orbit(const Word& w0, int k) {
    std::vector<Word> out;
    out.reserve(static_cast<size_t>(k) + 1);
    out.push_back(w0);
    for (int i = 0; i < k; ++i) out.push_back(out.back().successor());
    return out;
}

}  // namespace henonlab
