#pragma once

#include "poly.hpp"

#include <vector>

namespace ncvar {

// Tuple of polynomial components, one per generator of a family.
using Tuple = std::vector<DiffPoly>;

inline Tuple tuple_zero(const Context& ctx) {
    return Tuple(static_cast<size_t>(ctx.gens));
}

inline bool tuple_is_zero(const Tuple& t) {
    for (const auto& p : t)
        if (!p.is_zero()) return false;
    return true;
}

inline Parity tuple_parity(const Tuple& t) {
    Parity r = Parity::Zero;
    for (const auto& p : t) {
        Parity q = parity_of(p);
        if (q == Parity::Zero) continue;
        if (q == Parity::Mixed) return Parity::Mixed;
        if (r == Parity::Zero)
            r = q;
        else if (r != q)
            return Parity::Mixed;
    }
    return r;
}

inline Tuple tuple_add(const Tuple& x, const Tuple& y) {
    if (x.size() != y.size()) throw error("tuple size mismatch");
    Tuple r = x;
    for (size_t i = 0; i < r.size(); ++i) r[i] += y[i];
    return r;
}

inline Tuple tuple_sub(const Tuple& x, const Tuple& y) {
    if (x.size() != y.size()) throw error("tuple size mismatch");
    Tuple r = x;
    for (size_t i = 0; i < r.size(); ++i) r[i] -= y[i];
    return r;
}

inline Tuple tuple_scale(Tuple x, const Rat& c) {
    for (auto& p : x) p *= c;
    return x;
}

// Total derivative in direction i (0-based). Coefficients carry no explicit
// base dependence, so D_i is the pure Leibniz letter shift.
inline void total_derivative_word_into(const Context& ctx, DiffPoly& out, const OpenWord& w,
                                       const Rat& c, int i) {
    for (size_t k = 0; k < w.size(); ++k) {
        OpenWord d = w;
        d.letters[k].sigma = mi_bump(d.letters[k].sigma, i);
        out.add_term(ctx, d, c);
    }
}

inline DiffPoly total_derivative(const Context& ctx, const DiffPoly& p, int i) {
    if (i < 0 || i >= ctx.base_dim) throw error("derivative direction out of range");
    DiffPoly r;
    for (const auto& [w, c] : p.terms) total_derivative_word_into(ctx, r, w, c, i);
    return r;
}

// Well-defined on necklaces: the Leibniz expansion of a rotation differs by a
// rotation (checked by the property suite).
inline CyclicPoly total_derivative(const Context& ctx, const CyclicPoly& p, int i) {
    if (i < 0 || i >= ctx.base_dim) throw error("derivative direction out of range");
    CyclicPoly r;
    for (const auto& [w, c] : p.terms) {
        DiffPoly d;
        total_derivative_word_into(ctx, d, w, c, i);
        r += close(ctx, d);
    }
    return r;
}

inline DiffPoly d_multi(const Context& ctx, DiffPoly p, const MultiIndex& s) {
    if (static_cast<int>(s.size()) != ctx.base_dim) throw error("multi-index length mismatch");
    for (int i = 0; i < ctx.base_dim; ++i)
        for (int k = 0; k < s[static_cast<size_t>(i)]; ++k) p = total_derivative(ctx, p, i);
    return p;
}

namespace detail {

inline void check_characteristic(const Context& ctx, const Tuple& phi) {
    if (static_cast<int>(phi.size()) != ctx.gens) throw error("characteristic has wrong number of components");
    if (tuple_parity(phi) == Parity::Mixed) throw error("characteristic has mixed parity");
}

} // namespace detail

namespace detail {

// Unchecked core of the evolutionary derivation; see `evolutionary` below.
inline DiffPoly evolutionary_any(const Context& ctx, Family target, const Tuple& phi,
                                 const DiffPoly& p) {
    detail::check_characteristic(ctx, phi);
    Parity pp = tuple_parity(phi);
    if (pp == Parity::Zero || p.is_zero()) return {};
    bool der_odd = (pp == Parity::Odd) != family_odd(target);

    DiffPoly result;
    for (const auto& [w, c] : p.terms) {
        bool prefix_odd = false;
        for (size_t idx = 0; idx < w.size(); ++idx) {
            const Letter& l = w.letters[idx];
            if (l.fam == target) {
                const DiffPoly& comp = phi[static_cast<size_t>(l.gen - 1)];
                if (!comp.is_zero()) {
                    DiffPoly ins = d_multi(ctx, comp, l.sigma);
                    OpenWord pre, post;
                    pre.letters.assign(w.letters.begin(), w.letters.begin() + static_cast<long>(idx));
                    post.letters.assign(w.letters.begin() + static_cast<long>(idx) + 1, w.letters.end());
                    Rat f = c;
                    if (der_odd && prefix_odd) f = -f;
                    for (const auto& [iw, ic] : ins.terms)
                        result.add_term(ctx, word_concat(word_concat(pre, iw), post), f * ic);
                }
            }
            if (l.odd()) prefix_odd = !prefix_odd;
        }
    }
    return result;
}

inline CyclicPoly evolutionary_any(const Context& ctx, Family target, const Tuple& phi,
                                   const CyclicPoly& p) {
    detail::check_characteristic(ctx, phi);
    CyclicPoly r;
    for (const auto& [w, c] : p.terms) {
        DiffPoly rep = poly_word(ctx, w, c);
        r += close(ctx, evolutionary_any(ctx, target, phi, rep));
    }
    return r;
}

inline void guard_even_target(Family target, const Tuple& phi) {
    if (family_odd(target)) return;
    for (const auto& comp : phi)
        for (const auto& [w, c] : comp.terms)
            if (w.count(Family::B) > 0)
                throw error("odd-family letters in a characteristic over an even family: "
                            "use the odd-field interface");
}

} // namespace detail

// Evolutionary derivation with target family `target` and characteristic
// `phi`: replaces each letter target^j_sigma by D^sigma(phi[j]), with the
// Koszul sign of carrying the derivation past the prefix. A characteristic of
// odd parity over an even family is only admitted as half of an odd field.
inline DiffPoly evolutionary(const Context& ctx, Family target, const Tuple& phi, const DiffPoly& p) {
    detail::guard_even_target(target, phi);
    return detail::evolutionary_any(ctx, target, phi, p);
}

inline CyclicPoly evolutionary(const Context& ctx, Family target, const Tuple& phi, const CyclicPoly& p) {
    detail::guard_even_target(target, phi);
    return detail::evolutionary_any(ctx, target, phi, p);
}

enum class Side { Left, Right };

// One component of the one-sided variational derivative of a cyclic density:
// each occurrence of fam^gen_sigma is rotated to the chosen end, removed, and
// the remaining word picks up (-1)^{|sigma|} D^sigma.
inline DiffPoly variational_component(const Context& ctx, const CyclicPoly& F, Family fam, int gen,
                                      Side side) {
    DiffPoly r;
    for (const auto& [w, c] : F.terms) {
        for (size_t idx = 0; idx < w.size(); ++idx) {
            const Letter& l = w.letters[idx];
            if (l.fam != fam || l.gen != gen) continue;
            auto [rw, s] =
                rotate_by(w, side == Side::Right ? static_cast<int>(idx) + 1 : static_cast<int>(idx));
            OpenWord u;
            if (side == Side::Right)
                u.letters.assign(rw.letters.begin(), rw.letters.end() - 1);
            else
                u.letters.assign(rw.letters.begin() + 1, rw.letters.end());
            Rat f = c * s;
            if (mi_order(l.sigma) & 1) f = -f;
            r += d_multi(ctx, poly_word(ctx, u, f), l.sigma);
        }
    }
    return r;
}

inline Tuple variational_derivative(const Context& ctx, const CyclicPoly& F, Family fam, Side side) {
    Tuple r;
    r.reserve(static_cast<size_t>(ctx.gens));
    for (int j = 1; j <= ctx.gens; ++j) r.push_back(variational_component(ctx, F, fam, j, side));
    return r;
}

} // namespace ncvar
