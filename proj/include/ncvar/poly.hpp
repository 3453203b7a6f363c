#pragma once

#include "word.hpp"

#include <map>
#include <optional>

namespace ncvar {

using TermMap = std::map<OpenWord, Rat, WordLess>;

namespace detail {

inline void map_accumulate(TermMap& m, const OpenWord& w, const Rat& c) {
    if (c == 0) return;
    auto it = m.find(w);
    if (it == m.end()) {
        m.emplace(w, c);
    } else {
        it->second += c;
        if (it->second == 0) m.erase(it);
    }
}

inline void check_word(const Context& ctx, const OpenWord& w) {
    for (const auto& l : w.letters) {
        if (l.gen < 1 || l.gen > ctx.gens) throw error("letter generator out of range");
        if (static_cast<int>(l.sigma.size()) != ctx.base_dim)
            throw error("letter multi-index does not match the base dimension");
        for (int k : l.sigma)
            if (k < 0) throw error("negative derivative order");
    }
}

} // namespace detail

enum class Parity { Zero, Even, Odd, Mixed };

// Polynomial in the free unital algebra over the jet letters. Keys are kept
// canonical for the session mode (sorted with Koszul signs when commutative).
struct DiffPoly {
    TermMap terms;

    bool is_zero() const { return terms.empty(); }

    void add_term(const Context& ctx, const OpenWord& w, const Rat& c) {
        if (c == 0) return;
        detail::check_word(ctx, w);
        auto [cw, s] = canonical_open(ctx, w);
        if (s == 0) return;
        detail::map_accumulate(terms, cw, c * s);
    }

    DiffPoly& operator+=(const DiffPoly& o) {
        for (const auto& [w, c] : o.terms) detail::map_accumulate(terms, w, c);
        return *this;
    }
    DiffPoly& operator-=(const DiffPoly& o) {
        for (const auto& [w, c] : o.terms) detail::map_accumulate(terms, w, -c);
        return *this;
    }
    DiffPoly& operator*=(const Rat& r) {
        if (r == 0) {
            terms.clear();
            return *this;
        }
        for (auto& [w, c] : terms) c *= r;
        return *this;
    }

    friend DiffPoly operator+(DiffPoly x, const DiffPoly& y) { return x += y; }
    friend DiffPoly operator-(DiffPoly x, const DiffPoly& y) { return x -= y; }
    friend DiffPoly operator*(DiffPoly x, const Rat& r) { return x *= r; }
    friend DiffPoly operator*(const Rat& r, DiffPoly x) { return x *= r; }
    friend DiffPoly operator-(DiffPoly x) { return x *= Rat(-1); }
    friend bool operator==(const DiffPoly& x, const DiffPoly& y) { return x.terms == y.terms; }
};

// Cyclic-word polynomial: keys are canonical necklace representatives.
struct CyclicPoly {
    TermMap terms;

    bool is_zero() const { return terms.empty(); }

    void add_term(const Context& ctx, const OpenWord& w, const Rat& c) {
        if (c == 0) return;
        detail::check_word(ctx, w);
        auto [cw, s] = canonical_cyclic(ctx, w);
        if (s == 0) return;
        detail::map_accumulate(terms, cw, c * s);
    }

    CyclicPoly& operator+=(const CyclicPoly& o) {
        for (const auto& [w, c] : o.terms) detail::map_accumulate(terms, w, c);
        return *this;
    }
    CyclicPoly& operator-=(const CyclicPoly& o) {
        for (const auto& [w, c] : o.terms) detail::map_accumulate(terms, w, -c);
        return *this;
    }
    CyclicPoly& operator*=(const Rat& r) {
        if (r == 0) {
            terms.clear();
            return *this;
        }
        for (auto& [w, c] : terms) c *= r;
        return *this;
    }

    friend CyclicPoly operator+(CyclicPoly x, const CyclicPoly& y) { return x += y; }
    friend CyclicPoly operator-(CyclicPoly x, const CyclicPoly& y) { return x -= y; }
    friend CyclicPoly operator*(CyclicPoly x, const Rat& r) { return x *= r; }
    friend CyclicPoly operator*(const Rat& r, CyclicPoly x) { return x *= r; }
    friend CyclicPoly operator-(CyclicPoly x) { return x *= Rat(-1); }
    friend bool operator==(const CyclicPoly& x, const CyclicPoly& y) { return x.terms == y.terms; }
};

inline DiffPoly poly_zero() { return {}; }

inline DiffPoly poly_const(const Context& ctx, const Rat& c) {
    DiffPoly p;
    p.add_term(ctx, OpenWord{}, c);
    return p;
}

inline DiffPoly poly_word(const Context& ctx, const OpenWord& w, const Rat& c = 1) {
    DiffPoly p;
    p.add_term(ctx, w, c);
    return p;
}

inline DiffPoly poly_letter(const Context& ctx, const Letter& l, const Rat& c = 1) {
    return poly_word(ctx, OpenWord{{l}}, c);
}

inline DiffPoly poly_concat(const Context& ctx, const DiffPoly& x, const DiffPoly& y) {
    DiffPoly r;
    for (const auto& [wx, cx] : x.terms)
        for (const auto& [wy, cy] : y.terms) r.add_term(ctx, word_concat(wx, wy), cx * cy);
    return r;
}

// Trace closure: pass to cyclic words.
inline CyclicPoly close(const Context& ctx, const DiffPoly& p) {
    CyclicPoly r;
    for (const auto& [w, c] : p.terms) r.add_term(ctx, w, c);
    return r;
}

template <class Poly>
inline Parity parity_of(const Poly& p) {
    if (p.terms.empty()) return Parity::Zero;
    bool first = true, odd = false;
    for (const auto& [w, c] : p.terms) {
        if (first) {
            odd = w.odd();
            first = false;
        } else if (w.odd() != odd) {
            return Parity::Mixed;
        }
    }
    return odd ? Parity::Odd : Parity::Even;
}

// Count of letters of family f, when uniform across terms.
template <class Poly>
inline std::optional<int> uniform_count(const Poly& p, Family f) {
    std::optional<int> r;
    for (const auto& [w, c] : p.terms) {
        int k = w.count(f);
        if (!r)
            r = k;
        else if (*r != k)
            return std::nullopt;
    }
    // the zero polynomial is homogeneous of every count
    if (!r) r = 0;
    return r;
}

template <class Poly>
inline int max_total_order(const Poly& p) {
    int r = 0;
    for (const auto& [w, c] : p.terms) r = std::max(r, w.total_order());
    return r;
}

} // namespace ncvar
