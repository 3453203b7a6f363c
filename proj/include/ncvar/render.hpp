#pragma once

#include "multivector.hpp"
#include "poisson.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace ncvar {

inline std::string render_letter(const Context& ctx, const Letter& l) {
    std::string s = family_name(l.fam);
    if (ctx.gens > 1) s += std::to_string(l.gen);
    if (ctx.base_dim == 1) {
        if (l.sigma[0] > 0) {
            s += "_";
            s += std::to_string(l.sigma[0]);
        }
    } else if (l.order() > 0) {
        s += "^(";
        for (int i = 0; i < ctx.base_dim; ++i) {
            if (i) s += ",";
            s += std::to_string(l.sigma[static_cast<size_t>(i)]);
        }
        s += ")";
    }
    return s;
}

inline std::string render_word(const Context& ctx, const OpenWord& w) {
    if (w.empty()) return "1";
    std::string s;
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) s += "*";
        s += render_letter(ctx, w.letters[i]);
    }
    return s;
}

namespace detail {

inline std::string render_terms(const Context& ctx, const TermMap& terms, bool cyclic) {
    if (terms.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [w, c] : terms) {
        if (!first) s += " + ";
        first = false;
        std::string wp = cyclic ? "tr(" + render_word(ctx, w) + ")" : render_word(ctx, w);
        if (c == 1)
            s += wp;
        else if (!cyclic && w.empty())
            s += rat_string(c);
        else
            s += rat_string(c) + " " + wp;
    }
    return s;
}

} // namespace detail

inline std::string render(const Context& ctx, const DiffPoly& p) {
    return detail::render_terms(ctx, p.terms, false);
}
inline std::string render(const Context& ctx, const CyclicPoly& p) {
    return detail::render_terms(ctx, p.terms, true);
}
inline std::string render(const Context& ctx, const Functional& f) { return render(ctx, f.value); }
inline std::string render(const Context& ctx, const Multivector& m) { return render(ctx, m.body); }

inline std::string render(const Context& ctx, const Tuple& t) {
    std::string s;
    for (size_t i = 0; i < t.size(); ++i) {
        if (i) s += "; ";
        s += render(ctx, t[static_cast<size_t>(i)]);
    }
    return s;
}

// Operator text: slot s rendered through its name, derivatives as nested D[i].
inline std::string render_operator(const Context& ctx, const DiffOperator& A,
                                   const std::vector<std::string>& slots) {
    if (static_cast<int>(slots.size()) < A.arity) throw error("not enough slot names");
    std::ostringstream os;
    for (int r = 1; r <= ctx.gens; ++r) {
        if (r > 1) os << "; ";
        bool first = true;
        bool any = false;
        for (const auto& t : A.terms) {
            if (t.row != r) continue;
            any = true;
            if (!first) os << " + ";
            first = false;
            std::string s;
            for (size_t i = 0; i < t.atoms.size(); ++i) {
                if (i) s += "*";
                const OpAtom& a = t.atoms[i];
                if (a.kind == OpAtom::Kind::Letter) {
                    s += render_letter(ctx, a.letter);
                } else {
                    std::string core = slots[static_cast<size_t>(a.slot)];
                    if (ctx.gens > 1) core += std::to_string(a.comp);
                    for (int d = ctx.base_dim; d >= 1; --d)
                        for (int k = 0; k < a.tau[static_cast<size_t>(d - 1)]; ++k)
                            core = "D[" + std::to_string(d) + "](" + core + ")";
                    s += core;
                }
            }
            if (t.atoms.empty()) s = "1";
            if (t.coeff == 1)
                os << s;
            else
                os << rat_string(t.coeff) << " " << s;
        }
        if (!any) os << "0";
    }
    return os.str();
}

} // namespace ncvar
