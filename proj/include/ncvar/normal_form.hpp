#pragma once

#include "derivative.hpp"

#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

namespace ncvar {

// Grade of a cyclic word: the multiset of (family, generator) labels plus the
// coordinate-wise sum of all derivative multi-indices. Total derivatives map
// one grade into another, so reduction can work grade by grade.
struct GradeKey {
    std::vector<std::pair<Family, int>> letters;
    MultiIndex total;

    friend bool operator<(const GradeKey& x, const GradeKey& y) {
        if (x.letters != y.letters) return x.letters < y.letters;
        return x.total < y.total;
    }
    friend bool operator==(const GradeKey& x, const GradeKey& y) {
        return x.letters == y.letters && x.total == y.total;
    }
};

inline GradeKey grade_of(const Context& ctx, const OpenWord& w) {
    GradeKey k;
    k.total = mi_zero(ctx.base_dim);
    for (const auto& l : w.letters) {
        k.letters.emplace_back(l.fam, l.gen);
        for (int i = 0; i < ctx.base_dim; ++i) k.total[static_cast<size_t>(i)] += l.sigma[static_cast<size_t>(i)];
    }
    std::sort(k.letters.begin(), k.letters.end());
    return k;
}

namespace detail {

inline void compositions(int total, int parts, std::vector<int>& cur,
                         std::vector<std::vector<int>>& out) {
    if (parts == 0) {
        if (total == 0) out.push_back(cur);
        return;
    }
    for (int v = 0; v <= total; ++v) {
        cur.push_back(v);
        compositions(total - v, parts - 1, cur, out);
        cur.pop_back();
    }
}

inline std::vector<std::vector<int>> compositions(int total, int parts) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    compositions(total, parts, cur, out);
    return out;
}

} // namespace detail

// All distinct canonical necklaces in the given grade.
inline std::vector<OpenWord> enumerate_necklaces(const Context& ctx, const GradeKey& key) {
    std::map<OpenWord, bool, WordLess> seen;
    const int L = static_cast<int>(key.letters.size());
    if (L == 0) {
        if (mi_order(key.total) == 0) return {OpenWord{}};
        return {};
    }
    std::vector<std::vector<std::vector<int>>> per_coord;
    per_coord.reserve(static_cast<size_t>(ctx.base_dim));
    for (int i = 0; i < ctx.base_dim; ++i)
        per_coord.push_back(detail::compositions(key.total[static_cast<size_t>(i)], L));

    std::vector<std::pair<Family, int>> arr = key.letters;
    std::sort(arr.begin(), arr.end());
    do {
        std::vector<size_t> pick(static_cast<size_t>(ctx.base_dim), 0);
        while (true) {
            OpenWord w;
            w.letters.reserve(static_cast<size_t>(L));
            for (int p = 0; p < L; ++p) {
                Letter l;
                l.fam = arr[static_cast<size_t>(p)].first;
                l.gen = arr[static_cast<size_t>(p)].second;
                l.sigma = mi_zero(ctx.base_dim);
                for (int i = 0; i < ctx.base_dim; ++i)
                    l.sigma[static_cast<size_t>(i)] = per_coord[static_cast<size_t>(i)][pick[static_cast<size_t>(i)]][static_cast<size_t>(p)];
                w.letters.push_back(std::move(l));
            }
            auto [cw, s] = canonical_cyclic(ctx, w);
            if (s != 0) seen.emplace(cw, true);

            int i = 0;
            for (; i < ctx.base_dim; ++i) {
                if (++pick[static_cast<size_t>(i)] < per_coord[static_cast<size_t>(i)].size()) break;
                pick[static_cast<size_t>(i)] = 0;
            }
            if (i == ctx.base_dim) break;
        }
    } while (std::next_permutation(arr.begin(), arr.end()));

    std::vector<OpenWord> out;
    out.reserve(seen.size());
    for (const auto& [w, _] : seen) out.push_back(w);
    return out;
}

using EchelonRows = std::map<OpenWord, TermMap, WordLess>;

namespace detail {

// Subtract echelon multiples until no term of x is a pivot.
inline void reduce_by_echelon(TermMap& x, const EchelonRows& ech) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [w, c] : x) {
            auto it = ech.find(w);
            if (it == ech.end()) continue;
            Rat f = c;
            for (const auto& [rw, rc] : it->second) map_accumulate(x, rw, -f * rc);
            changed = true;
            break;
        }
    }
}

inline void echelon_insert(EchelonRows& ech, TermMap row) {
    reduce_by_echelon(row, ech);
    if (row.empty()) return;
    Rat lead = row.begin()->second;
    for (auto& [w, c] : row) c /= lead;
    OpenWord pivot = row.begin()->first;
    ech.emplace(std::move(pivot), std::move(row));
}

inline std::string grade_cache_key(const Context& ctx, const GradeKey& key) {
    std::ostringstream os;
    os << (ctx.commutative ? 'c' : 'n') << ctx.base_dim << '|';
    for (const auto& [f, g] : key.letters) os << static_cast<int>(f) << ':' << g << ',';
    os << '|';
    for (int v : key.total) os << v << ',';
    return os.str();
}

// Echelonized span of the total-derivative image inside one grade. Memoized:
// the rows depend only on (mode, base_dim, grade).
inline const EchelonRows& image_echelon(const Context& ctx, const GradeKey& key) {
    static std::map<std::string, EchelonRows> cache;
    static std::mutex mu;
    std::string ck = grade_cache_key(ctx, key);
    std::lock_guard<std::mutex> lock(mu);
    auto hit = cache.find(ck);
    if (hit != cache.end()) return hit->second;

    EchelonRows ech;
    for (int i = 0; i < ctx.base_dim; ++i) {
        if (key.total[static_cast<size_t>(i)] == 0) continue;
        GradeKey sub = key;
        sub.total[static_cast<size_t>(i)] -= 1;
        for (const auto& v : enumerate_necklaces(ctx, sub)) {
            CyclicPoly gen;
            gen.add_term(ctx, v, 1);
            CyclicPoly img = total_derivative(ctx, gen, i);
            if (!img.is_zero()) echelon_insert(ech, img.terms);
        }
    }
    return cache.emplace(std::move(ck), std::move(ech)).first->second;
}

} // namespace detail

// Canonical representative of a cyclic polynomial modulo total derivatives:
// exact gradewise Gaussian reduction against the image span.
inline CyclicPoly normal_form_poly(const Context& ctx, const CyclicPoly& p) {
    std::map<GradeKey, TermMap> by_grade;
    for (const auto& [w, c] : p.terms) by_grade[grade_of(ctx, w)].emplace(w, c);

    CyclicPoly out;
    for (auto& [key, part] : by_grade) {
        detail::reduce_by_echelon(part, detail::image_echelon(ctx, key));
        for (const auto& [w, c] : part) detail::map_accumulate(out.terms, w, c);
    }
    return out;
}

// A functional is a cyclic polynomial stored in normal form; equality of
// functionals is equality of representatives.
struct Functional {
    CyclicPoly value;

    bool is_zero() const { return value.is_zero(); }

    Functional& operator+=(const Functional& o) {
        value += o.value;
        return *this;
    }
    Functional& operator-=(const Functional& o) {
        value -= o.value;
        return *this;
    }
    Functional& operator*=(const Rat& r) {
        value *= r;
        return *this;
    }
    friend Functional operator+(Functional x, const Functional& y) { return x += y; }
    friend Functional operator-(Functional x, const Functional& y) { return x -= y; }
    friend Functional operator*(Functional x, const Rat& r) { return x *= r; }
    friend Functional operator*(const Rat& r, Functional x) { return x *= r; }
    friend bool operator==(const Functional& x, const Functional& y) { return x.value == y.value; }
};

inline Functional normal_form(const Context& ctx, const CyclicPoly& p) {
    return Functional{normal_form_poly(ctx, p)};
}

inline bool equivalent_mod_image(const Context& ctx, const CyclicPoly& x, const CyclicPoly& y) {
    return normal_form_poly(ctx, x - y).is_zero();
}

} // namespace ncvar
