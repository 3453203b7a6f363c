#pragma once

#include "coupling.hpp"

#include <optional>

namespace ncvar {

// Degree-homogeneous functional: every word carries exactly `degree` odd
// letters. Degree 0 are plain functionals of the even family. `normalized`
// optionally caches the extracted multilinear operator; when present it must
// re-expand to `body` exactly.
struct Multivector {
    int degree = 0;
    Functional body;
    std::optional<DiffOperator> normalized;

    bool is_zero() const { return body.is_zero(); }
    friend bool operator==(const Multivector& x, const Multivector& y) {
        if (x.is_zero() && y.is_zero()) return true;
        return x.degree == y.degree && x.body == y.body;
    }
};

inline Multivector multivector_from_density(const Context& ctx, const CyclicPoly& c) {
    auto k = uniform_count(c, Family::B);
    if (!k) throw error("density is not homogeneous in the odd family");
    Functional nf = normal_form(ctx, c);
    return Multivector{nf.is_zero() ? 0 : *k, std::move(nf)};
}

inline Multivector mv_scale(Multivector x, const Rat& r) {
    x.body *= r;
    if (x.body.is_zero()) x.degree = 0;
    return x;
}

inline Multivector mv_add(const Multivector& x, const Multivector& y) {
    if (x.is_zero()) return y;
    if (y.is_zero()) return x;
    if (x.degree != y.degree) throw error("multivector degrees differ");
    Multivector r{x.degree, x.body + y.body};
    if (r.body.is_zero()) r.degree = 0;
    return r;
}

inline Multivector mv_sub(const Multivector& x, const Multivector& y) {
    return mv_add(x, mv_scale(y, -1));
}

// Extract the (k-1)-linear operator of a degree-k multivector: rotate each
// odd occurrence to the front, undress it by parts, and read the remaining
// odd letters as argument slots in reading order. The (k-1)! factor makes
// the expansion round-trip exact.
inline DiffOperator normalize_to_operator(const Context& ctx, const Multivector& xi) {
    if (xi.degree < 1) throw error("operator extraction needs degree >= 1");
    const int k = xi.degree;
    DiffOperator R;
    R.arity = k - 1;
    const Rat fact = factorial(k - 1);
    for (const auto& [w, c] : xi.body.value.terms) {
        for (size_t idx = 0; idx < w.size(); ++idx) {
            if (w.letters[idx].fam != Family::B) continue;
            auto [rw, s] = rotate_by(w, static_cast<int>(idx));
            const Letter lead = rw.letters.front();
            std::vector<OpAtom> atoms;
            atoms.reserve(rw.size() - 1);
            int slot = 0;
            for (size_t p = 1; p < rw.size(); ++p) {
                const Letter& l = rw.letters[p];
                if (l.fam == Family::B)
                    atoms.push_back(OpAtom::mk_slot(slot++, l.gen, l.sigma));
                else
                    atoms.push_back(OpAtom::mk_letter(l));
            }
            Rat f = c * s * fact;
            if (mi_order(lead.sigma) & 1) f = -f;
            for (auto& der : detail::derive_atoms_multi(ctx, atoms, lead.sigma)) {
                OpTerm t;
                t.coeff = f;
                t.row = lead.gen;
                t.atoms = std::move(der);
                R.terms.push_back(std::move(t));
            }
        }
    }
    canonicalize_terms(R);
    return R;
}

// Fill the cached normalized pair; the round-trip invariant is checked by
// the caller-facing expansion below.
inline const DiffOperator& ensure_normalized(const Context& ctx, Multivector& xi) {
    if (!xi.normalized) xi.normalized = normalize_to_operator(ctx, xi);
    return *xi.normalized;
}

inline Tuple odd_generator_tuple(const Context& ctx) {
    Tuple b;
    for (int j = 1; j <= ctx.gens; ++j)
        b.push_back(poly_letter(ctx, Letter{Family::B, j, mi_zero(ctx.base_dim)}));
    return b;
}

// Rebuild the degree-k body <b, A(b,...,b)>/k! from a (k-1)-linear operator.
inline Multivector multivector_from_operator(const Context& ctx, int k, const DiffOperator& A) {
    if (k < 1 || A.arity != k - 1) throw error("operator arity must be degree - 1");
    Tuple b = odd_generator_tuple(ctx);
    Tuple Ab = apply_operator(ctx, A, std::vector<Tuple>(static_cast<size_t>(k - 1), b));
    CyclicPoly acc;
    for (int j = 0; j < ctx.gens; ++j)
        acc += close(ctx, poly_concat(ctx, b[static_cast<size_t>(j)], Ab[static_cast<size_t>(j)]));
    Rat kf = factorial(k);
    acc *= Rat(1) / kf;
    return multivector_from_density(ctx, acc);
}

inline int permutation_sign(const std::vector<int>& perm) {
    int inv = 0;
    for (size_t i = 0; i < perm.size(); ++i)
        for (size_t j = i + 1; j < perm.size(); ++j)
            if (perm[i] > perm[j]) ++inv;
    return (inv & 1) ? -1 : 1;
}

// Value of a degree-k multivector on k covector tuples: the shuffle-averaged
// coupling with the extracted operator.
inline Functional evaluate(const Context& ctx, const Multivector& xi, const std::vector<Tuple>& ps) {
    if (static_cast<int>(ps.size()) != xi.degree) throw error("evaluate needs exactly degree covectors");
    if (xi.degree == 0) return xi.body;
    const int k = xi.degree;
    DiffOperator A = normalize_to_operator(ctx, xi);
    std::vector<int> perm(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) perm[static_cast<size_t>(i)] = i;
    Functional acc;
    do {
        std::vector<Tuple> rest;
        rest.reserve(static_cast<size_t>(k - 1));
        for (int i = 1; i < k; ++i) rest.push_back(ps[static_cast<size_t>(perm[static_cast<size_t>(i)])]);
        Functional term = couple(ctx, ps[static_cast<size_t>(perm[0])], apply_operator(ctx, A, rest));
        acc += permutation_sign(perm) == 1 ? term : term * Rat(-1);
    } while (std::next_permutation(perm.begin(), perm.end()));
    Rat kf = factorial(k);
    return acc * (Rat(1) / kf);
}

// Shifted-graded bracket of multivectors through the one-sided variational
// pairs: the even-family derivative of one factor couples to the odd-family
// derivative of the other across the cyclic seam.
inline Multivector schouten(const Context& ctx, const Multivector& xi, const Multivector& eta) {
    CyclicPoly acc;
    for (int j = 1; j <= ctx.gens; ++j) {
        DiffPoly ra = variational_component(ctx, xi.body.value, Family::A, j, Side::Right);
        DiffPoly lb = variational_component(ctx, eta.body.value, Family::B, j, Side::Left);
        DiffPoly rb = variational_component(ctx, xi.body.value, Family::B, j, Side::Right);
        DiffPoly la = variational_component(ctx, eta.body.value, Family::A, j, Side::Left);
        acc += close(ctx, poly_concat(ctx, ra, lb));
        acc -= close(ctx, poly_concat(ctx, rb, la));
    }
    Multivector r = multivector_from_density(ctx, acc);
    if (!r.is_zero() && r.degree != xi.degree + eta.degree - 1)
        throw error("bracket degree mismatch");
    return r;
}

// Odd evolutionary field of a multivector, acting on both families.
struct OddField {
    Tuple phi_a;
    Tuple phi_b;
    int parity = 0; // parity of the derivation mod 2
};

inline OddField odd_field(const Context& ctx, const Multivector& xi) {
    OddField q;
    q.phi_b = variational_derivative(ctx, xi.body.value, Family::A, Side::Right);
    q.phi_a = tuple_scale(variational_derivative(ctx, xi.body.value, Family::B, Side::Right), -1);
    q.parity = ((xi.degree - 1) % 2 + 2) % 2;
    return q;
}

inline DiffPoly apply_field(const Context& ctx, const OddField& q, const DiffPoly& p) {
    return detail::evolutionary_any(ctx, Family::A, q.phi_a, p) +
           detail::evolutionary_any(ctx, Family::B, q.phi_b, p);
}

inline CyclicPoly apply_field(const Context& ctx, const OddField& q, const CyclicPoly& p) {
    return detail::evolutionary_any(ctx, Family::A, q.phi_a, p) +
           detail::evolutionary_any(ctx, Family::B, q.phi_b, p);
}

inline Tuple apply_field(const Context& ctx, const OddField& q, const Tuple& t) {
    Tuple r;
    r.reserve(t.size());
    for (const auto& comp : t) r.push_back(apply_field(ctx, q, comp));
    return r;
}

// Graded commutator of two odd fields, as a field.
inline OddField field_commutator(const Context& ctx, const OddField& q1, const OddField& q2) {
    const Rat s = (q1.parity && q2.parity) ? -1 : 1;
    OddField r;
    r.phi_a = tuple_sub(apply_field(ctx, q1, q2.phi_a), tuple_scale(apply_field(ctx, q2, q1.phi_a), s));
    r.phi_b = tuple_sub(apply_field(ctx, q1, q2.phi_b), tuple_scale(apply_field(ctx, q2, q1.phi_b), s));
    r.parity = (q1.parity + q2.parity) % 2;
    return r;
}

} // namespace ncvar
