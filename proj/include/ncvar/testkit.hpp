#pragma once

#include "multivector.hpp"
#include "poisson.hpp"

#include <functional>
#include <random>
#include <string>

namespace ncvar::testkit {

// Deterministic sampling profile; identical GenSpec gives identical streams
// on every platform (the engine is the standard-specified mt19937_64 and all
// range reduction is plain modulo).
struct GenSpec {
    std::uint64_t seed = 1;
    int max_len = 3;
    int max_order = 2;
    int max_b = 2;
    int gens = 1;
    int base_dim = 1;
    bool commutative = false;

    Context context() const { return Context(gens, base_dim, commutative); }
};

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next(std::uint64_t bound) { return bound ? eng_() % bound : 0; }
    int range(int lo, int hi) { return lo + static_cast<int>(next(static_cast<std::uint64_t>(hi - lo + 1))); }
    Rat coeff() {
        int v = range(-3, 3);
        return Rat(v == 0 ? 1 : v);
    }

  private:
    std::mt19937_64 eng_;
};

inline MultiIndex random_sigma(Rng& rng, const GenSpec& spec, int budget) {
    MultiIndex s = mi_zero(spec.base_dim);
    int total = rng.range(0, std::min(spec.max_order, budget));
    for (int u = 0; u < total; ++u) s[static_cast<size_t>(rng.range(0, spec.base_dim - 1))] += 1;
    return s;
}

inline Letter random_letter(Rng& rng, const GenSpec& spec, bool odd, int order_budget) {
    Letter l;
    l.fam = odd ? Family::B : Family::A;
    l.gen = rng.range(1, spec.gens);
    l.sigma = random_sigma(rng, spec, order_budget);
    return l;
}

inline OpenWord random_word(Rng& rng, const GenSpec& spec, int b_count, int len) {
    OpenWord w;
    std::vector<int> parity_slots(static_cast<size_t>(len), 0);
    for (int i = 0; i < b_count; ++i) parity_slots[static_cast<size_t>(i)] = 1;
    for (int i = len - 1; i > 0; --i)
        std::swap(parity_slots[static_cast<size_t>(i)], parity_slots[rng.next(static_cast<std::uint64_t>(i + 1))]);
    int budget = spec.max_order;
    for (int i = 0; i < len; ++i) {
        Letter l = random_letter(rng, spec, parity_slots[static_cast<size_t>(i)] != 0, budget);
        budget -= l.order();
        w.letters.push_back(std::move(l));
    }
    return w;
}

// Random density with uniform odd-letter count per term.
inline CyclicPoly random_density_deg(Rng& rng, const GenSpec& spec, int b_degree, int nterms = 2) {
    Context ctx = spec.context();
    CyclicPoly p;
    int guard = 0;
    while (p.is_zero() && guard++ < 32) {
        for (int t = 0; t < nterms; ++t) {
            int len = rng.range(std::max(1, b_degree), std::max(1, spec.max_len));
            if (len < b_degree) len = b_degree;
            p.add_term(ctx, random_word(rng, spec, b_degree, len), rng.coeff());
        }
    }
    return p;
}

inline CyclicPoly random_density(Rng& rng, const GenSpec& spec, int nterms = 2) {
    int k = rng.range(0, std::min(spec.max_b, spec.max_len));
    return random_density_deg(rng, spec, k, nterms);
}

inline CyclicPoly random_density(const GenSpec& spec, int nterms = 2) {
    Rng rng(spec.seed);
    return random_density(rng, spec, nterms);
}

inline Multivector random_multivector(Rng& rng, const GenSpec& spec, int k) {
    Context ctx = spec.context();
    return multivector_from_density(ctx, random_density_deg(rng, spec, k));
}

// Tuple of even-family words (no odd letters).
inline Tuple random_even_tuple(Rng& rng, const GenSpec& spec, int nterms = 2) {
    Context ctx = spec.context();
    Tuple t;
    for (int j = 0; j < spec.gens; ++j) {
        DiffPoly p;
        for (int q = 0; q < nterms; ++q)
            p.add_term(ctx, random_word(rng, spec, 0, rng.range(1, std::max(1, spec.max_len))),
                       rng.coeff());
        t.push_back(std::move(p));
    }
    return t;
}

// Random linear operator with even-family coefficient words.
inline DiffOperator random_operator(Rng& rng, const GenSpec& spec, int nterms = 2) {
    Context ctx = spec.context();
    DiffOperator A;
    A.arity = 1;
    for (int t = 0; t < nterms; ++t) {
        OpTerm term;
        term.coeff = rng.coeff();
        term.row = rng.range(1, spec.gens);
        int ulen = rng.range(0, 1);
        int vlen = rng.range(0, 1);
        int budget = spec.max_order;
        for (int i = 0; i < ulen; ++i) {
            Letter l = random_letter(rng, spec, false, budget);
            budget -= l.order();
            term.atoms.push_back(OpAtom::mk_letter(std::move(l)));
        }
        MultiIndex tau = random_sigma(rng, spec, budget);
        budget -= mi_order(tau);
        term.atoms.push_back(OpAtom::mk_slot(0, rng.range(1, spec.gens), std::move(tau)));
        for (int i = 0; i < vlen; ++i) {
            Letter l = random_letter(rng, spec, false, budget);
            budget -= l.order();
            term.atoms.push_back(OpAtom::mk_letter(std::move(l)));
        }
        A.terms.push_back(std::move(term));
    }
    canonicalize_terms(A);
    return A;
}

// Reinterpret a noncommutative value under graded-commutative canonical form.
inline DiffPoly commutative_projection(const Context& comm_ctx, const DiffPoly& p) {
    if (!comm_ctx.commutative) throw error("projection target must be a commutative context");
    DiffPoly r;
    for (const auto& [w, c] : p.terms) r.add_term(comm_ctx, w, c);
    return r;
}

inline CyclicPoly commutative_projection(const Context& comm_ctx, const CyclicPoly& p) {
    if (!comm_ctx.commutative) throw error("projection target must be a commutative context");
    CyclicPoly r;
    for (const auto& [w, c] : p.terms) r.add_term(comm_ctx, w, c);
    return r;
}

inline Tuple commutative_projection(const Context& comm_ctx, const Tuple& t) {
    Tuple r;
    r.reserve(t.size());
    for (const auto& p : t) r.push_back(commutative_projection(comm_ctx, p));
    return r;
}

inline Multivector commutative_projection(const Context& comm_ctx, const Multivector& m) {
    return multivector_from_density(comm_ctx, commutative_projection(comm_ctx, m.body.value));
}

namespace detail {

inline Int int_factorial(int k) {
    Int r = 1;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

// D^sigma(w) by direct multinomial distribution of derivative units over the
// letters; intentionally avoids the repeated-Leibniz code path.
inline void multinomial_derivative(const Context& ctx, const OpenWord& w, const MultiIndex& sigma,
                                   const Rat& coeff, DiffPoly& out) {
    const int L = static_cast<int>(w.size());
    if (L == 0) {
        if (mi_order(sigma) == 0) out.add_term(ctx, w, coeff);
        return;
    }
    // per coordinate, all ways to split sigma[d] into L nonnegative parts
    std::vector<std::vector<std::vector<int>>> splits;
    for (int d = 0; d < ctx.base_dim; ++d) {
        std::vector<std::vector<int>> acc;
        std::vector<int> cur;
        std::function<void(int, int)> rec = [&](int left, int parts) {
            if (parts == 0) {
                if (left == 0) acc.push_back(cur);
                return;
            }
            for (int v = 0; v <= left; ++v) {
                cur.push_back(v);
                rec(left - v, parts - 1);
                cur.pop_back();
            }
        };
        rec(sigma[static_cast<size_t>(d)], L);
        splits.push_back(std::move(acc));
    }
    std::vector<size_t> pick(static_cast<size_t>(ctx.base_dim), 0);
    while (true) {
        Int mult = 1;
        for (int d = 0; d < ctx.base_dim; ++d) {
            Int m = int_factorial(sigma[static_cast<size_t>(d)]);
            for (int part : splits[static_cast<size_t>(d)][pick[static_cast<size_t>(d)]])
                m /= int_factorial(part);
            mult *= m;
        }
        OpenWord dw = w;
        for (int pos = 0; pos < L; ++pos)
            for (int d = 0; d < ctx.base_dim; ++d)
                dw.letters[static_cast<size_t>(pos)].sigma[static_cast<size_t>(d)] +=
                    splits[static_cast<size_t>(d)][pick[static_cast<size_t>(d)]][static_cast<size_t>(pos)];
        out.add_term(ctx, dw, coeff * Rat(mult));

        int d = 0;
        for (; d < ctx.base_dim; ++d) {
            if (++pick[static_cast<size_t>(d)] < splits[static_cast<size_t>(d)].size()) break;
            pick[static_cast<size_t>(d)] = 0;
        }
        if (d == ctx.base_dim) break;
    }
}

// Fresh sign tracker for moving letter `from` of `w` to the front/back by
// stepwise transpositions (independent of word.hpp's rotate_by).
struct Extraction {
    OpenWord rest;
    Letter picked;
    int sign = 1;
};

inline Extraction extract_to_back(const OpenWord& w, size_t at) {
    Extraction e;
    e.picked = w.letters[at];
    e.sign = 1;
    // rotate the whole word so that `at` lands at the back: each single-step
    // rotation moves the current front letter past the remainder
    OpenWord cur = w;
    size_t steps = (at + 1) % w.size();
    for (size_t s = 0; s < steps; ++s) {
        bool front_odd = cur.letters.front().odd();
        int odd_rest = cur.odd_count() - (front_odd ? 1 : 0);
        if (front_odd && (odd_rest & 1)) e.sign = -e.sign;
        std::rotate(cur.letters.begin(), cur.letters.begin() + 1, cur.letters.end());
    }
    e.rest.letters.assign(cur.letters.begin(), cur.letters.end() - 1);
    return e;
}

inline Extraction extract_to_front(const OpenWord& w, size_t at) {
    Extraction e;
    e.picked = w.letters[at];
    e.sign = 1;
    OpenWord cur = w;
    for (size_t s = 0; s < at; ++s) {
        bool front_odd = cur.letters.front().odd();
        int odd_rest = cur.odd_count() - (front_odd ? 1 : 0);
        if (front_odd && (odd_rest & 1)) e.sign = -e.sign;
        std::rotate(cur.letters.begin(), cur.letters.begin() + 1, cur.letters.end());
    }
    e.rest.letters.assign(cur.letters.begin() + 1, cur.letters.end());
    return e;
}

} // namespace detail

// Occurrence-pairing oracle for the bracket: every (even-in-xi, odd-in-eta)
// and (odd-in-xi, even-in-eta) occurrence pair is cut out, the remainders are
// derived by explicit multinomial distribution, concatenated, and re-closed.
inline Multivector bruteforce_bracket(const Context& ctx, const Multivector& xi,
                                      const Multivector& eta) {
    CyclicPoly acc;
    for (const auto& [w1, c1] : xi.body.value.terms) {
        for (const auto& [w2, c2] : eta.body.value.terms) {
            for (size_t i1 = 0; i1 < w1.size(); ++i1) {
                const Letter& l1 = w1.letters[i1];
                if (l1.fam != Family::A && l1.fam != Family::B) continue;
                auto e1 = detail::extract_to_back(w1, i1);
                for (size_t i2 = 0; i2 < w2.size(); ++i2) {
                    const Letter& l2 = w2.letters[i2];
                    Family other = l1.fam == Family::A ? Family::B : Family::A;
                    if (l2.fam != other || l2.gen != l1.gen) continue;
                    auto e2 = detail::extract_to_front(w2, i2);
                    Rat f = c1 * c2 * e1.sign * e2.sign;
                    if ((mi_order(l1.sigma) + mi_order(l2.sigma)) & 1) f = -f;
                    if (l1.fam == Family::B) f = -f;
                    DiffPoly d1, d2;
                    detail::multinomial_derivative(ctx, e1.rest, l1.sigma, 1, d1);
                    detail::multinomial_derivative(ctx, e2.rest, l2.sigma, 1, d2);
                    for (const auto& [u, cu] : d1.terms)
                        for (const auto& [v, cv] : d2.terms)
                            acc.add_term(ctx, word_concat(u, v), f * cu * cv);
                }
            }
        }
    }
    return multivector_from_density(ctx, acc);
}

// Defect of the shifted-graded Jacobi identity for the production bracket.
inline Multivector jacobi_defect(const Context& ctx, const Multivector& xi, const Multivector& eta,
                                 const Multivector& om) {
    Multivector lhs = schouten(ctx, xi, schouten(ctx, eta, om));
    Multivector r1 = schouten(ctx, schouten(ctx, xi, eta), om);
    Multivector r2 = schouten(ctx, eta, schouten(ctx, xi, om));
    int k = xi.degree, l = eta.degree;
    Rat s = (((k - 1) % 2 != 0) && ((l - 1) % 2 != 0)) ? -1 : 1;
    return mv_sub(lhs, mv_add(r1, mv_scale(r2, s)));
}

struct SelftestReport {
    int cases = 0;
    int failures = 0;
    std::string first_failure;
    bool ok() const { return failures == 0; }
};

// Randomized cross-validation of the kernel against the independent oracles.
inline SelftestReport selftest(std::uint64_t seed, int cases) {
    SelftestReport rep;
    Rng rng(seed);
    for (int i = 0; i < cases; ++i) {
        rep.cases += 1;
        GenSpec spec;
        spec.seed = seed + static_cast<std::uint64_t>(i);
        spec.gens = rng.range(1, 2);
        spec.max_len = 3;
        spec.max_order = 2;
        Context ctx = spec.context();
        std::string what;
        bool good = true;
        try {
            switch (i % 4) {
                case 0: {
                    what = "bracket oracle";
                    Multivector a = random_multivector(rng, spec, rng.range(0, 2));
                    Multivector b = random_multivector(rng, spec, rng.range(0, 2));
                    good = schouten(ctx, a, b) == bruteforce_bracket(ctx, a, b);
                    break;
                }
                case 1: {
                    what = "adjoint coupling";
                    DiffOperator A = random_operator(rng, spec);
                    Tuple p1 = random_even_tuple(rng, spec);
                    Tuple p2 = random_even_tuple(rng, spec);
                    good = couple(ctx, p1, apply_operator(ctx, A, p2)) ==
                           couple(ctx, p2, apply_operator(ctx, adjoint(ctx, A), p1));
                    break;
                }
                case 2: {
                    what = "euler exactness";
                    CyclicPoly f = random_density(rng, spec);
                    CyclicPoly df = total_derivative(ctx, f, 0);
                    good = tuple_is_zero(variational_derivative(ctx, df, Family::A, Side::Right)) &&
                           tuple_is_zero(variational_derivative(ctx, df, Family::B, Side::Right));
                    break;
                }
                case 3: {
                    what = "commutative projection";
                    GenSpec cspec = spec;
                    cspec.commutative = true;
                    Context cctx = cspec.context();
                    Multivector a = random_multivector(rng, spec, rng.range(0, 2));
                    Multivector b = random_multivector(rng, spec, rng.range(0, 2));
                    Multivector nc = schouten(ctx, a, b);
                    Multivector pr = schouten(cctx, commutative_projection(cctx, a),
                                              commutative_projection(cctx, b));
                    good = commutative_projection(cctx, nc) == pr;
                    break;
                }
            }
        } catch (const std::exception& ex) {
            good = false;
            what += std::string(": ") + ex.what();
        }
        if (!good) {
            rep.failures += 1;
            if (rep.first_failure.empty())
                rep.first_failure = "case " + std::to_string(i) + " (" + what + ")";
        }
    }
    return rep;
}

} // namespace ncvar::testkit
