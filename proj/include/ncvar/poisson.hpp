#pragma once

#include "multivector.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace ncvar {

struct not_skew_error : error {
    DiffOperator defect;
    explicit not_skew_error(DiffOperator d)
        : error("operator is not skew-adjoint"), defect(std::move(d)) {}
};

inline void require_skew(const Context& ctx, const DiffOperator& A) {
    if (A.arity != 1) throw error("Poisson candidate must be a linear operator");
    validate_operator(ctx, A);
    DiffOperator defect = skew_defect(ctx, A);
    if (!op_is_zero(ctx, defect)) throw not_skew_error(std::move(defect));
}

inline void require_even_functional(const Context& ctx, const Functional& H) {
    (void)ctx;
    for (const auto& [w, c] : H.value.terms)
        if (w.count(Family::B) > 0) throw error("Hamiltonian must be free of odd letters");
}

// The candidate bivector pi = <b, A(b)>/2 of a verified skew-adjoint operator.
inline Multivector bivector_of(const Context& ctx, const DiffOperator& A) {
    require_skew(ctx, A);
    for (const auto& t : A.terms)
        for (const auto& a : t.atoms)
            if (a.kind == OpAtom::Kind::Letter && a.letter.fam != Family::A)
                throw error("operator coefficients must lie in the even family");
    return multivector_from_operator(ctx, 2, A);
}

inline Tuple hamiltonian_flow(const Context& ctx, const DiffOperator& A, const Functional& H) {
    require_even_functional(ctx, H);
    return apply_operator(ctx, A, variational_derivative(ctx, H.value, Family::A, Side::Right));
}

// {H1, H2}_A = <dH1/da, A(dH2/da)>.
inline Functional poisson_bracket(const Context& ctx, const Functional& H1, const Functional& H2,
                                  const DiffOperator& A) {
    require_even_functional(ctx, H1);
    require_even_functional(ctx, H2);
    Tuple d1 = variational_derivative(ctx, H1.value, Family::A, Side::Right);
    Tuple d2 = variational_derivative(ctx, H2.value, Family::A, Side::Right);
    return couple(ctx, d1, apply_operator(ctx, A, d2));
}

// Cyclic sum of {{Hi, Hj}, Hk}; identically zero iff the bracket obeys the
// Jacobi identity on these arguments.
inline Functional jacobiator(const Context& ctx, const Functional& H1, const Functional& H2,
                             const Functional& H3, const DiffOperator& A) {
    const Functional* hs[3] = {&H1, &H2, &H3};
    Functional acc;
    for (int r = 0; r < 3; ++r) {
        const Functional& hi = *hs[r];
        const Functional& hj = *hs[(r + 1) % 3];
        const Functional& hk = *hs[(r + 2) % 3];
        Functional inner = poisson_bracket(ctx, hi, hj, A);
        Tuple flow = hamiltonian_flow(ctx, A, hk);
        acc += normal_form(ctx, evolutionary(ctx, Family::A, flow, inner.value));
    }
    return acc;
}

struct PoissonVerdict {
    enum class Outcome { Hamiltonian, NotHamiltonian, Inconclusive };
    enum class Route { Master, Involutive };

    Outcome outcome = Outcome::Inconclusive;
    Route route = Route::Master;
    Multivector residual;          // [[pi, pi]] on the master route
    std::optional<Tuple> witness;  // solving tuple on the involutive route
    int order_bound_used = -1;

    bool hamiltonian() const { return outcome == Outcome::Hamiltonian; }
};

// Master-equation route: A is Hamiltonian iff [[pi, pi]] vanishes exactly.
inline PoissonVerdict check_master(const Context& ctx, const DiffOperator& A) {
    Multivector pi = bivector_of(ctx, A);
    PoissonVerdict v;
    v.route = PoissonVerdict::Route::Master;
    v.residual = schouten(ctx, pi, pi);
    v.outcome = v.residual.is_zero() ? PoissonVerdict::Outcome::Hamiltonian
                                     : PoissonVerdict::Outcome::NotHamiltonian;
    return v;
}

namespace detail {

inline void enumerate_multi_indices(int n, int budget, MultiIndex& cur, int coord,
                                    std::vector<MultiIndex>& out) {
    if (coord == n) {
        out.push_back(cur);
        return;
    }
    for (int v = 0; v <= budget; ++v) {
        cur[static_cast<size_t>(coord)] = v;
        enumerate_multi_indices(n, budget - v, cur, coord + 1, out);
    }
    cur[static_cast<size_t>(coord)] = 0;
}

inline std::vector<MultiIndex> multi_indices_upto(int n, int budget) {
    std::vector<MultiIndex> out;
    MultiIndex cur = mi_zero(n);
    enumerate_multi_indices(n, budget, cur, 0, out);
    return out;
}

// Words containing exactly one P1 letter, one P2 letter, and up to a_budget
// even-family letters, with total derivative order at most order_budget.
inline std::vector<OpenWord> bilinear_ansatz_words(const Context& ctx, int a_budget,
                                                   int order_budget) {
    std::vector<OpenWord> out;
    std::map<OpenWord, bool, WordLess> seen;
    for (int t = 0; t <= a_budget; ++t) {
        const int L = t + 2;
        std::vector<Letter> word;
        // positions of the two marked letters among L slots
        std::function<void(int, bool, bool, int)> rec = [&](int pos, bool used1, bool used2,
                                                            int order_left) {
            if (pos == L) {
                if (used1 && used2) {
                    auto [cw, s] = canonical_open(ctx, OpenWord{word});
                    if (s != 0 && !seen.count(cw)) {
                        seen.emplace(cw, true);
                        out.push_back(cw);
                    }
                }
                return;
            }
            auto push = [&](Family f, int g, const MultiIndex& sg, bool u1, bool u2) {
                word.push_back(Letter{f, g, sg});
                rec(pos + 1, u1, u2, order_left - mi_order(sg));
                word.pop_back();
            };
            for (const auto& sg : multi_indices_upto(ctx.base_dim, order_left)) {
                for (int g = 1; g <= ctx.gens; ++g) {
                    if (!used1) push(Family::P1, g, sg, true, used2);
                    if (!used2) push(Family::P2, g, sg, used1, true);
                    push(Family::A, g, sg, used1, used2);
                }
            }
        };
        rec(0, false, false, order_budget);
        if (static_cast<long>(out.size()) > 200000) throw error("involutivity ansatz too large");
    }
    return out;
}

struct SparseSolve {
    bool consistent = true;
    std::vector<Rat> solution; // particular solution, free variables zero
};

// Exact Gaussian elimination on sparse rows; returns a particular solution.
inline SparseSolve solve_sparse(std::vector<std::map<int, Rat>>& rows, std::vector<Rat>& rhs,
                                int ncols) {
    std::map<int, std::pair<std::map<int, Rat>, Rat>> ech;
    SparseSolve res;
    for (size_t r = 0; r < rows.size(); ++r) {
        auto row = std::move(rows[r]);
        Rat b = std::move(rhs[r]);
        while (!row.empty()) {
            auto lead = row.begin()->first;
            auto hit = ech.find(lead);
            if (hit == ech.end()) break;
            Rat f = row.begin()->second;
            for (const auto& [cc, cv] : hit->second.first) {
                auto it = row.find(cc);
                Rat nv = (it == row.end() ? Rat(0) : it->second) - f * cv;
                if (nv == 0) {
                    if (it != row.end()) row.erase(it);
                } else {
                    row[cc] = nv;
                }
            }
            b -= f * hit->second.second;
        }
        if (row.empty()) {
            if (b != 0) {
                res.consistent = false;
                return res;
            }
            continue;
        }
        Rat lead = row.begin()->second;
        for (auto& [cc, cv] : row) cv /= lead;
        b /= lead;
        int pc = row.begin()->first;
        ech.emplace(pc, std::make_pair(std::move(row), std::move(b)));
    }
    res.solution.assign(static_cast<size_t>(ncols), Rat(0));
    for (auto it = ech.rbegin(); it != ech.rend(); ++it) {
        Rat v = it->second.second;
        for (const auto& [cc, cv] : it->second.first)
            if (cc != it->first) v -= cv * res.solution[static_cast<size_t>(cc)];
        res.solution[static_cast<size_t>(it->first)] = v;
    }
    return res;
}

} // namespace detail

struct InvolutiveOptions {
    std::optional<int> order_bound;
    bool lifted_covectors = false;
};

// Involutivity route: the commutator of two formal flows A(p1), A(p2) must be
// a flow A(q) again. Searches for q by exact linear algebra over a bilinear
// word ansatz bounded in derivative order.
inline PoissonVerdict check_involutive(const Context& ctx, const DiffOperator& A,
                                       InvolutiveOptions opt = {}) {
    require_skew(ctx, A);
    Tuple p1, p2;
    for (int j = 1; j <= ctx.gens; ++j) {
        p1.push_back(poly_letter(ctx, Letter{Family::P1, j, mi_zero(ctx.base_dim)}));
        p2.push_back(poly_letter(ctx, Letter{Family::P2, j, mi_zero(ctx.base_dim)}));
    }
    Tuple f1 = apply_operator(ctx, A, p1);
    Tuple f2 = apply_operator(ctx, A, p2);

    Tuple c = tuple_zero(ctx);
    for (int i = 0; i < ctx.gens; ++i)
        c[static_cast<size_t>(i)] = evolutionary(ctx, Family::A, f1, f2[static_cast<size_t>(i)]) -
                                    evolutionary(ctx, Family::A, f2, f1[static_cast<size_t>(i)]);
    if (opt.lifted_covectors) {
        Tuple l2 = apply_operator(ctx, A, apply_operator(ctx, adjoint(ctx, linearize(ctx, f1)), p2));
        Tuple l1 = apply_operator(ctx, A, apply_operator(ctx, adjoint(ctx, linearize(ctx, f2)), p1));
        c = tuple_add(c, tuple_sub(l2, l1));
    }

    PoissonVerdict v;
    v.route = PoissonVerdict::Route::Involutive;
    if (tuple_is_zero(c)) {
        v.outcome = PoissonVerdict::Outcome::Hamiltonian;
        v.witness = tuple_zero(ctx);
        v.order_bound_used = 0;
        return v;
    }

    int order_c = 0, a_budget = 0;
    for (const auto& comp : c) {
        order_c = std::max(order_c, max_total_order(comp));
        for (const auto& [w, cc] : comp.terms) a_budget = std::max(a_budget, w.count(Family::A));
    }
    const int bound = opt.order_bound.value_or(order_c + 2);
    v.order_bound_used = bound;

    std::vector<OpenWord> words = detail::bilinear_ansatz_words(ctx, a_budget, bound);
    const int ncols = static_cast<int>(words.size()) * ctx.gens;

    // Equations keyed by (component, word); columns are A applied to basis tuples.
    std::map<std::pair<int, OpenWord>,
             std::map<int, Rat>,
             decltype([](const std::pair<int, OpenWord>& x, const std::pair<int, OpenWord>& y) {
                 if (x.first != y.first) return x.first < y.first;
                 return word_cmp(x.second, y.second) == std::strong_ordering::less;
             })>
        eqs;
    for (int j = 0; j < ctx.gens; ++j)
        for (size_t wi = 0; wi < words.size(); ++wi) {
            Tuple basis = tuple_zero(ctx);
            basis[static_cast<size_t>(j)] = poly_word(ctx, words[wi], 1);
            Tuple img = apply_operator(ctx, A, basis);
            int col = j * static_cast<int>(words.size()) + static_cast<int>(wi);
            for (int i = 0; i < ctx.gens; ++i)
                for (const auto& [w, cc] : img[static_cast<size_t>(i)].terms)
                    eqs[{i, w}][col] = cc;
        }
    for (int i = 0; i < ctx.gens; ++i)
        for (const auto& [w, cc] : c[static_cast<size_t>(i)].terms) eqs[{i, w}]; // ensure the row exists

    std::vector<std::map<int, Rat>> rows;
    std::vector<Rat> rhs;
    rows.reserve(eqs.size());
    for (auto& [key, row] : eqs) {
        const auto& comp = c[static_cast<size_t>(key.first)];
        auto it = comp.terms.find(key.second);
        rhs.push_back(it == comp.terms.end() ? Rat(0) : it->second);
        rows.push_back(std::move(row));
    }

    auto sol = detail::solve_sparse(rows, rhs, ncols);
    if (sol.consistent) {
        Tuple q = tuple_zero(ctx);
        for (int j = 0; j < ctx.gens; ++j)
            for (size_t wi = 0; wi < words.size(); ++wi) {
                const Rat& x = sol.solution[static_cast<size_t>(j) * words.size() + wi];
                if (x != 0) q[static_cast<size_t>(j)].add_term(ctx, words[wi], x);
            }
        v.outcome = PoissonVerdict::Outcome::Hamiltonian;
        v.witness = std::move(q);
        return v;
    }
    v.outcome = bound < order_c ? PoissonVerdict::Outcome::Inconclusive
                                : PoissonVerdict::Outcome::NotHamiltonian;
    return v;
}

} // namespace ncvar
