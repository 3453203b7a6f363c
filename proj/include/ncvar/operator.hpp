#pragma once

#include "normal_form.hpp"

#include <vector>

namespace ncvar {

// Element of an operator word: either a fixed jet letter or an argument slot.
// A slot stands for D^tau applied to component `comp` of argument `slot`.
struct OpAtom {
    enum class Kind { Letter, Slot } kind = Kind::Letter;
    Letter letter;
    int slot = 0;
    int comp = 1;
    MultiIndex tau;

    static OpAtom mk_letter(Letter l) {
        OpAtom a;
        a.kind = Kind::Letter;
        a.letter = std::move(l);
        return a;
    }
    static OpAtom mk_slot(int slot, int comp, MultiIndex tau) {
        OpAtom a;
        a.kind = Kind::Slot;
        a.slot = slot;
        a.comp = comp;
        a.tau = std::move(tau);
        return a;
    }
};

inline bool operator==(const OpAtom& x, const OpAtom& y) {
    if (x.kind != y.kind) return false;
    if (x.kind == OpAtom::Kind::Letter) return x.letter == y.letter;
    return x.slot == y.slot && x.comp == y.comp && x.tau == y.tau;
}

inline bool atom_less(const OpAtom& x, const OpAtom& y) {
    if (x.kind != y.kind) return x.kind < y.kind;
    if (x.kind == OpAtom::Kind::Letter) return letter_less(x.letter, y.letter);
    if (x.slot != y.slot) return x.slot < y.slot;
    if (x.comp != y.comp) return x.comp < y.comp;
    return x.tau < y.tau;
}

inline bool atoms_less(const std::vector<OpAtom>& x, const std::vector<OpAtom>& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] == y[i]) continue;
        return atom_less(x[i], y[i]);
    }
    return false;
}

struct OpTerm {
    Rat coeff;
    int row = 1; // output component, 1-based
    std::vector<OpAtom> atoms;
};

// Multilinear matrix differential operator: each term contributes to one
// output component and contains exactly one slot per argument.
struct DiffOperator {
    int arity = 1;
    std::vector<OpTerm> terms;
};

inline void canonicalize_terms(DiffOperator& A) {
    std::sort(A.terms.begin(), A.terms.end(), [](const OpTerm& x, const OpTerm& y) {
        if (x.row != y.row) return x.row < y.row;
        return atoms_less(x.atoms, y.atoms);
    });
    std::vector<OpTerm> merged;
    for (auto& t : A.terms) {
        if (!merged.empty() && merged.back().row == t.row && merged.back().atoms == t.atoms)
            merged.back().coeff += t.coeff;
        else
            merged.push_back(std::move(t));
    }
    std::erase_if(merged, [](const OpTerm& t) { return t.coeff == 0; });
    A.terms = std::move(merged);
}

inline void validate_operator(const Context& ctx, const DiffOperator& A) {
    for (const auto& t : A.terms) {
        if (t.row < 1 || t.row > ctx.gens) throw error("operator row out of range");
        std::vector<int> cnt(static_cast<size_t>(A.arity), 0);
        for (const auto& a : t.atoms) {
            if (a.kind != OpAtom::Kind::Slot) continue;
            if (a.slot < 0 || a.slot >= A.arity) throw error("operator slot index out of range");
            if (a.comp < 1 || a.comp > ctx.gens) throw error("operator slot component out of range");
            cnt[static_cast<size_t>(a.slot)] += 1;
        }
        for (int c : cnt)
            if (c != 1) throw error("operator term is not multilinear (each slot must occur once)");
    }
}

inline Tuple apply_operator(const Context& ctx, const DiffOperator& A, const std::vector<Tuple>& args) {
    if (static_cast<int>(args.size()) != A.arity) throw error("operator arity mismatch");
    for (const auto& t : args)
        if (static_cast<int>(t.size()) != ctx.gens) throw error("argument tuple has wrong size");
    Tuple out = tuple_zero(ctx);
    for (const auto& term : A.terms) {
        DiffPoly acc = poly_const(ctx, term.coeff);
        for (const auto& a : term.atoms) {
            if (acc.is_zero()) break;
            if (a.kind == OpAtom::Kind::Letter) {
                acc = poly_concat(ctx, acc, poly_letter(ctx, a.letter));
            } else {
                acc = poly_concat(
                    ctx, acc,
                    d_multi(ctx, args[static_cast<size_t>(a.slot)][static_cast<size_t>(a.comp - 1)], a.tau));
            }
        }
        out[static_cast<size_t>(term.row - 1)] += acc;
    }
    return out;
}

inline Tuple apply_operator(const Context& ctx, const DiffOperator& A, const Tuple& arg) {
    return apply_operator(ctx, A, std::vector<Tuple>{arg});
}

namespace detail {

inline bool atom_odd(const OpAtom& a, bool slots_odd) {
    if (a.kind == OpAtom::Kind::Letter) return a.letter.odd();
    return slots_odd;
}

inline bool atoms_odd(const std::vector<OpAtom>& v, size_t from, bool slots_odd) {
    bool o = false;
    for (size_t i = from; i < v.size(); ++i)
        if (atom_odd(v[i], slots_odd)) o = !o;
    return o;
}

// Single Leibniz step of D_i over an atom word.
inline std::vector<std::vector<OpAtom>> derive_atoms_once(const std::vector<OpAtom>& atoms, int i) {
    std::vector<std::vector<OpAtom>> out;
    for (size_t k = 0; k < atoms.size(); ++k) {
        std::vector<OpAtom> d = atoms;
        if (d[k].kind == OpAtom::Kind::Letter)
            d[k].letter.sigma = mi_bump(d[k].letter.sigma, i);
        else
            d[k].tau = mi_bump(d[k].tau, i);
        out.push_back(std::move(d));
    }
    return out;
}

inline std::vector<std::vector<OpAtom>> derive_atoms_multi(const Context& ctx,
                                                           const std::vector<OpAtom>& atoms,
                                                           const MultiIndex& s) {
    std::vector<std::vector<OpAtom>> cur{atoms};
    for (int i = 0; i < ctx.base_dim; ++i) {
        for (int k = 0; k < s[static_cast<size_t>(i)]; ++k) {
            std::vector<std::vector<OpAtom>> next;
            for (const auto& v : cur)
                for (auto& d : derive_atoms_once(v, i)) next.push_back(std::move(d));
            cur = std::move(next);
        }
    }
    return cur;
}

} // namespace detail

inline DiffOperator op_add(const DiffOperator& A, const DiffOperator& B) {
    if (A.arity != B.arity) throw error("operator arity mismatch");
    DiffOperator R = A;
    R.terms.insert(R.terms.end(), B.terms.begin(), B.terms.end());
    canonicalize_terms(R);
    return R;
}

inline DiffOperator op_scale(DiffOperator A, const Rat& c) {
    if (c == 0) {
        A.terms.clear();
        return A;
    }
    for (auto& t : A.terms) t.coeff *= c;
    return A;
}

// Structural zero test: apply to inert formal letters, one family per slot.
inline bool op_is_zero(const Context& ctx, const DiffOperator& A) {
    if (A.arity > 4) throw error("zero test supports at most 4 slots");
    std::vector<Tuple> args;
    for (int s = 0; s < A.arity; ++s) {
        Tuple t;
        for (int j = 1; j <= ctx.gens; ++j)
            t.push_back(poly_letter(ctx, Letter{slot_family(s), j, mi_zero(ctx.base_dim)}));
        args.push_back(std::move(t));
    }
    return tuple_is_zero(apply_operator(ctx, A, args));
}

inline bool op_equal(const Context& ctx, const DiffOperator& A, const DiffOperator& B) {
    if (A.arity != B.arity) return false;
    return op_is_zero(ctx, op_add(A, op_scale(B, -1)));
}

// Formal adjoint of a linear operator: transpose the matrix entry, flip the
// argument to the other side, and integrate the slot derivatives by parts.
inline DiffOperator adjoint(const Context& ctx, const DiffOperator& A) {
    if (A.arity != 1) throw error("adjoint requires a linear operator");
    validate_operator(ctx, A);
    DiffOperator R;
    R.arity = 1;
    for (const auto& term : A.terms) {
        size_t si = 0;
        while (term.atoms[si].kind != OpAtom::Kind::Slot) ++si;
        const OpAtom& slot = term.atoms[si];
        std::vector<OpAtom> u(term.atoms.begin(), term.atoms.begin() + static_cast<long>(si));
        std::vector<OpAtom> v(term.atoms.begin() + static_cast<long>(si) + 1, term.atoms.end());

        bool u_odd = detail::atoms_odd(u, 0, false);
        bool v_odd = detail::atoms_odd(v, 0, false);
        Rat f = term.coeff;
        if (mi_order(slot.tau) & 1) f = -f;
        if (u_odd && v_odd) f = -f;

        std::vector<OpAtom> base = v;
        base.push_back(OpAtom::mk_slot(0, term.row, mi_zero(ctx.base_dim)));
        base.insert(base.end(), u.begin(), u.end());

        for (auto& atoms : detail::derive_atoms_multi(ctx, base, slot.tau)) {
            OpTerm t;
            t.coeff = f;
            t.row = slot.comp;
            t.atoms = std::move(atoms);
            R.terms.push_back(std::move(t));
        }
    }
    canonicalize_terms(R);
    return R;
}

// Linearization of an even tuple along the even family: the Frechet-type
// operator whose application reproduces the evolutionary action.
inline DiffOperator linearize(const Context& ctx, const Tuple& phi) {
    if (static_cast<int>(phi.size()) != ctx.gens) throw error("tuple has wrong number of components");
    Parity pp = tuple_parity(phi);
    if (pp == Parity::Mixed) throw error("linearize requires homogeneous parity");
    DiffOperator R;
    R.arity = 1;
    for (int i = 0; i < ctx.gens; ++i) {
        for (const auto& [w, c] : phi[static_cast<size_t>(i)].terms) {
            for (size_t idx = 0; idx < w.size(); ++idx) {
                const Letter& l = w.letters[idx];
                if (l.fam != Family::A) continue;
                OpTerm t;
                t.coeff = c;
                t.row = i + 1;
                for (size_t p = 0; p < idx; ++p) t.atoms.push_back(OpAtom::mk_letter(w.letters[p]));
                t.atoms.push_back(OpAtom::mk_slot(0, l.gen, l.sigma));
                for (size_t p = idx + 1; p < w.size(); ++p) t.atoms.push_back(OpAtom::mk_letter(w.letters[p]));
                R.terms.push_back(std::move(t));
            }
        }
    }
    canonicalize_terms(R);
    return R;
}

inline DiffOperator skew_defect(const Context& ctx, const DiffOperator& A) {
    return op_add(A, adjoint(ctx, A));
}

inline bool is_skew_adjoint(const Context& ctx, const DiffOperator& A) {
    return op_is_zero(ctx, skew_defect(ctx, A));
}

// Cyclic adjoint of the (k-1)-linear operator of a k-vector: transport the
// circle so the old first argument leads, undress it by parts, and shift the
// remaining arguments around; carries the global reordering sign (-1)^(k-1).
inline DiffOperator cyclic_adjoint(const Context& ctx, const DiffOperator& A) {
    if (A.arity < 1) throw error("cyclic adjoint requires arity >= 1");
    validate_operator(ctx, A);
    const int km1 = A.arity;
    DiffOperator R;
    R.arity = km1;
    for (const auto& term : A.terms) {
        std::vector<OpAtom> E;
        E.reserve(term.atoms.size() + 1);
        E.push_back(OpAtom::mk_slot(km1, term.row, mi_zero(ctx.base_dim)));
        E.insert(E.end(), term.atoms.begin(), term.atoms.end());

        int sign = ((km1 % 2) == 0) ? 1 : -1; // (-1)^(k-1), k = km1+1
        while (!(E.front().kind == OpAtom::Kind::Slot && E.front().slot == 0)) {
            bool front_odd = detail::atom_odd(E.front(), true);
            bool rest_odd = detail::atoms_odd(E, 1, true);
            if (front_odd && rest_odd) sign = -sign;
            std::rotate(E.begin(), E.begin() + 1, E.end());
        }

        OpAtom lead = E.front();
        std::vector<OpAtom> rest(E.begin() + 1, E.end());
        Rat f = term.coeff * sign;
        if (mi_order(lead.tau) & 1) f = -f;

        for (auto& atoms : detail::derive_atoms_multi(ctx, rest, lead.tau)) {
            for (auto& a : atoms)
                if (a.kind == OpAtom::Kind::Slot) a.slot = (a.slot == km1) ? km1 - 1 : a.slot - 1;
            OpTerm t;
            t.coeff = f;
            t.row = lead.comp;
            t.atoms = std::move(atoms);
            R.terms.push_back(std::move(t));
        }
    }
    canonicalize_terms(R);
    return R;
}

} // namespace ncvar
