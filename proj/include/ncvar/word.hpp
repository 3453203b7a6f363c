#pragma once

#include "context.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace ncvar {

using MultiIndex = std::vector<int>;

inline int mi_order(const MultiIndex& s) {
    return std::accumulate(s.begin(), s.end(), 0);
}

inline MultiIndex mi_zero(int n) { return MultiIndex(static_cast<size_t>(n), 0); }

inline MultiIndex mi_bump(MultiIndex s, int i) {
    s.at(static_cast<size_t>(i)) += 1;
    return s;
}

// One jet letter: generator `gen` (1-based) of family `fam`, carrying the
// derivative multi-index `sigma` (length = base_dim of the session).
struct Letter {
    Family fam = Family::A;
    int gen = 1;
    MultiIndex sigma;

    bool odd() const { return family_odd(fam); }
    int order() const { return mi_order(sigma); }
};

inline bool operator==(const Letter& x, const Letter& y) {
    return x.fam == y.fam && x.gen == y.gen && x.sigma == y.sigma;
}

// Total letter order: parity first (odd < even), then family, generator,
// derivative order, then the multi-index lexicographically.
inline std::strong_ordering letter_cmp(const Letter& x, const Letter& y) {
    if (x.odd() != y.odd()) return x.odd() ? std::strong_ordering::less : std::strong_ordering::greater;
    if (x.fam != y.fam) return x.fam <=> y.fam;
    if (x.gen != y.gen) return x.gen <=> y.gen;
    if (x.order() != y.order()) return x.order() <=> y.order();
    if (x.sigma != y.sigma) return x.sigma < y.sigma ? std::strong_ordering::less : std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

inline bool letter_less(const Letter& x, const Letter& y) {
    return letter_cmp(x, y) == std::strong_ordering::less;
}

// A word in the free unital algebra; the empty word is the unit.
struct OpenWord {
    std::vector<Letter> letters;

    OpenWord() = default;
    explicit OpenWord(std::vector<Letter> ls) : letters(std::move(ls)) {}

    size_t size() const { return letters.size(); }
    bool empty() const { return letters.empty(); }
    bool odd() const { return (odd_count() & 1) != 0; }
    int odd_count() const {
        int c = 0;
        for (const auto& l : letters)
            if (l.odd()) ++c;
        return c;
    }
    int count(Family f) const {
        int c = 0;
        for (const auto& l : letters)
            if (l.fam == f) ++c;
        return c;
    }
    int total_order() const {
        int c = 0;
        for (const auto& l : letters) c += l.order();
        return c;
    }
};

inline bool operator==(const OpenWord& x, const OpenWord& y) { return x.letters == y.letters; }

// Word order: shorter first, then letterwise by the letter order.
inline std::strong_ordering word_cmp(const OpenWord& x, const OpenWord& y) {
    if (x.size() != y.size()) return x.size() <=> y.size();
    for (size_t i = 0; i < x.size(); ++i) {
        auto c = letter_cmp(x.letters[i], y.letters[i]);
        if (c != std::strong_ordering::equal) return c;
    }
    return std::strong_ordering::equal;
}

struct WordLess {
    bool operator()(const OpenWord& x, const OpenWord& y) const {
        return word_cmp(x, y) == std::strong_ordering::less;
    }
};

inline OpenWord word_concat(const OpenWord& x, const OpenWord& y) {
    OpenWord r = x;
    r.letters.insert(r.letters.end(), y.letters.begin(), y.letters.end());
    return r;
}

// Sign picked up when the front letter moves past the rest of the word.
inline int rotate_once_sign(const OpenWord& w) {
    if (w.size() < 2) return 1;
    if (!w.letters.front().odd()) return 1;
    int odd_rest = w.odd_count() - 1;
    return (odd_rest & 1) ? -1 : 1;
}

inline OpenWord rotate_once(const OpenWord& w) {
    if (w.size() < 2) return w;
    OpenWord r;
    r.letters.assign(w.letters.begin() + 1, w.letters.end());
    r.letters.push_back(w.letters.front());
    return r;
}

// Rotate t steps to the left, tracking the Koszul sign.
inline std::pair<OpenWord, int> rotate_by(const OpenWord& w, int t) {
    OpenWord cur = w;
    int sign = 1;
    for (int k = 0; k < t; ++k) {
        sign *= rotate_once_sign(cur);
        cur = rotate_once(cur);
    }
    return {cur, sign};
}

// Least rotation of w together with the sign to reach it. Sign 0 means the
// least rotation is reachable with both signs, so the necklace vanishes.
inline std::pair<OpenWord, int> canonical_rotation(const OpenWord& w) {
    const size_t L = w.size();
    if (L < 2) return {w, 1};
    OpenWord best = w;
    int best_sign = 1;
    bool ambiguous = false;
    OpenWord cur = w;
    int sign = 1;
    for (size_t t = 1; t < L; ++t) {
        sign *= rotate_once_sign(cur);
        cur = rotate_once(cur);
        auto c = word_cmp(cur, best);
        if (c == std::strong_ordering::less) {
            best = cur;
            best_sign = sign;
            ambiguous = false;
        } else if (c == std::strong_ordering::equal && sign != best_sign) {
            ambiguous = true;
        }
    }
    if (ambiguous) return {best, 0};
    return {best, best_sign};
}

// Graded-commutative canonical form: sort letters, tracking the sign of
// odd-odd transpositions; a repeated odd letter kills the word.
inline std::pair<OpenWord, int> canonical_sorted(const OpenWord& w) {
    OpenWord r = w;
    auto& v = r.letters;
    int sign = 1;
    for (size_t i = 1; i < v.size(); ++i) {
        Letter key = v[i];
        size_t j = i;
        while (j > 0 && letter_less(key, v[j - 1])) {
            if (key.odd() && v[j - 1].odd()) sign = -sign;
            v[j] = v[j - 1];
            --j;
        }
        v[j] = key;
    }
    for (size_t i = 1; i < v.size(); ++i)
        if (v[i].odd() && v[i] == v[i - 1]) return {r, 0};
    return {r, sign};
}

// Mode-aware canonical form of an open word (identity when noncommutative).
inline std::pair<OpenWord, int> canonical_open(const Context& ctx, const OpenWord& w) {
    if (ctx.commutative) return canonical_sorted(w);
    return {w, 1};
}

// Mode-aware canonical form of a cyclic word.
inline std::pair<OpenWord, int> canonical_cyclic(const Context& ctx, const OpenWord& w) {
    if (ctx.commutative) return canonical_sorted(w);
    return canonical_rotation(w);
}

} // namespace ncvar
