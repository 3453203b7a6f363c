#pragma once

#include "operator.hpp"

#include <cctype>
#include <string>
#include <vector>

namespace ncvar {

struct parse_error : error {
    size_t position;
    parse_error(const std::string& msg, size_t pos)
        : error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

// Either an open polynomial or a trace-closed one; a source string commits to
// one of the two shapes.
struct ParsedExpr {
    bool cyclic = false;
    DiffPoly open;
    CyclicPoly closed;
};

namespace detail {

// Recursive-descent parser over the expression grammar. Slot names (for
// operator entry) parse as letters of the auxiliary slot families.
class Parser {
  public:
    Parser(const Context& ctx, std::string src, std::vector<std::string> slots)
        : ctx_(ctx), src_(std::move(src)), slots_(std::move(slots)) {}

    ParsedExpr parse_expression() {
        ParsedExpr r;
        bool saw_tr = false, saw_open = false;
        DiffPoly open;
        CyclicPoly closed;
        int sign = 1;
        skip_ws();
        if (peek() == '+' || peek() == '-') {
            // a leading sign belongs to the first term
        }
        while (true) {
            parse_term(sign, open, closed, saw_tr, saw_open);
            skip_ws();
            char c = peek();
            if (c == '+') {
                ++pos_;
                sign = 1;
            } else if (c == '-') {
                ++pos_;
                sign = -1;
            } else {
                break;
            }
        }
        skip_ws();
        if (pos_ != src_.size()) throw parse_error("unexpected trailing input", pos_);
        if (saw_tr && saw_open)
            throw parse_error("cannot mix tr(...) terms with open terms in one expression", pos_);
        r.cyclic = saw_tr;
        r.open = std::move(open);
        r.closed = std::move(closed);
        return r;
    }

  private:
    const Context& ctx_;
    std::string src_;
    std::vector<std::string> slots_;
    size_t pos_ = 0;

    char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    void expect(char c) {
        skip_ws();
        if (peek() != c) throw parse_error(std::string("expected '") + c + "'", pos_);
        ++pos_;
    }

    bool at_number() {
        skip_ws();
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c))) return true;
        if ((c == '-' || c == '+') && pos_ + 1 < src_.size() &&
            std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))
            return true;
        return false;
    }

    Int parse_int() {
        skip_ws();
        size_t start = pos_;
        if (peek() == '-' || peek() == '+') ++pos_;
        if (!std::isdigit(static_cast<unsigned char>(peek()))) throw parse_error("expected integer", pos_);
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        return Int(src_.substr(start, pos_ - start));
    }

    int parse_small_int() {
        Int v = parse_int();
        if (v < 0 || v > 1000000) throw parse_error("index out of range", pos_);
        return static_cast<int>(v);
    }

    Rat parse_rational() {
        Int num = parse_int();
        skip_ws();
        if (peek() == '/') {
            size_t save = pos_;
            ++pos_;
            if (at_number()) {
                Int den = parse_int();
                if (den == 0) throw parse_error("zero denominator", pos_);
                return Rat(num, den);
            }
            pos_ = save;
        }
        return Rat(num);
    }

    std::string parse_ident() {
        skip_ws();
        size_t start = pos_;
        while (std::isalnum(static_cast<unsigned char>(peek()))) ++pos_;
        if (start == pos_) throw parse_error("expected a name", pos_);
        return src_.substr(start, pos_ - start);
    }

    // Resolve an identifier to (family, generator). Slot names take priority:
    // exact match first, then slot name + component digits when gens > 1.
    std::pair<Family, int> resolve_name(const std::string& id, size_t at) {
        for (size_t s = 0; s < slots_.size(); ++s)
            if (id == slots_[s]) return {slot_family(static_cast<int>(s)), 1};
        if (ctx_.gens > 1) {
            for (size_t s = 0; s < slots_.size(); ++s) {
                const std::string& nm = slots_[s];
                if (id.size() > nm.size() && id.compare(0, nm.size(), nm) == 0) {
                    bool digits = true;
                    for (size_t i = nm.size(); i < id.size(); ++i)
                        if (!std::isdigit(static_cast<unsigned char>(id[i]))) digits = false;
                    if (digits) {
                        int g = std::stoi(id.substr(nm.size()));
                        if (g < 1 || g > ctx_.gens) throw parse_error("unknown generator '" + id + "'", at);
                        return {slot_family(static_cast<int>(s)), g};
                    }
                }
            }
        }
        if (id.empty()) throw parse_error("expected a name", at);
        Family fam;
        if (id[0] == 'a')
            fam = Family::A;
        else if (id[0] == 'b')
            fam = Family::B;
        else
            throw parse_error("unknown name '" + id + "'", at);
        if (id.size() == 1) {
            if (ctx_.gens != 1)
                throw parse_error("bare '" + id + "' needs a generator index when gens > 1", at);
            return {fam, 1};
        }
        for (size_t i = 1; i < id.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(id[i])))
                throw parse_error("unknown name '" + id + "'", at);
        int g = std::stoi(id.substr(1));
        if (g < 1 || g > ctx_.gens) throw parse_error("unknown generator '" + id + "'", at);
        return {fam, g};
    }

    // factor := jet | 'tr(' expr ')' | '(' expr ')' | 'D[' i '](' expr ')' | '1'
    DiffPoly parse_factor(bool& is_tr, CyclicPoly& closed_out) {
        skip_ws();
        size_t at = pos_;
        if (peek() == '(') {
            ++pos_;
            DiffPoly inner = parse_open_sum();
            expect(')');
            return inner;
        }
        std::string id = parse_ident();
        if (id == "1") return poly_const(ctx_, 1);
        if (id == "tr") {
            expect('(');
            DiffPoly inner = parse_open_sum();
            expect(')');
            is_tr = true;
            closed_out = close(ctx_, inner);
            return {};
        }
        if (id == "D") {
            expect('[');
            int dir = parse_small_int();
            expect(']');
            if (dir < 1 || dir > ctx_.base_dim) throw parse_error("derivative index out of range", at);
            expect('(');
            DiffPoly inner = parse_open_sum();
            expect(')');
            return total_derivative(ctx_, inner, dir - 1);
        }
        auto [fam, gen] = resolve_name(id, at);
        MultiIndex sigma = mi_zero(ctx_.base_dim);
        skip_ws();
        if (peek() == '_') {
            if (ctx_.base_dim != 1)
                throw parse_error("subscript derivative syntax requires base dimension 1", pos_);
            ++pos_;
            sigma[0] = parse_small_int();
        } else if (peek() == '^') {
            ++pos_;
            expect('(');
            for (int i = 0; i < ctx_.base_dim; ++i) {
                if (i) expect(',');
                sigma[static_cast<size_t>(i)] = parse_small_int();
            }
            expect(')');
        }
        return poly_letter(ctx_, Letter{fam, gen, std::move(sigma)});
    }

    // open sum: like the top level but tr is forbidden
    DiffPoly parse_open_sum() {
        DiffPoly acc;
        int sign = 1;
        while (true) {
            acc += parse_open_term(sign);
            skip_ws();
            char c = peek();
            if (c == '+') {
                ++pos_;
                sign = 1;
            } else if (c == '-') {
                ++pos_;
                sign = -1;
            } else {
                break;
            }
        }
        return acc;
    }

    DiffPoly parse_open_term(int sign) {
        Rat coeff = sign;
        skip_ws();
        bool had_number = false;
        if (at_number()) {
            coeff *= parse_rational();
            had_number = true;
            skip_ws();
            if (peek() == '*') ++pos_;
        }
        skip_ws();
        if (!is_factor_start()) {
            if (had_number) return poly_const(ctx_, coeff);
            throw parse_error("expected a factor", pos_);
        }
        DiffPoly acc = poly_const(ctx_, coeff);
        while (true) {
            bool dummy_tr = false;
            CyclicPoly dummy;
            size_t at = pos_;
            DiffPoly f = parse_factor(dummy_tr, dummy);
            if (dummy_tr) throw parse_error("tr(...) cannot appear inside a product or parentheses", at);
            acc = poly_concat(ctx_, acc, f);
            skip_ws();
            if (peek() == '*') {
                ++pos_;
                continue;
            }
            break;
        }
        return acc;
    }

    bool is_factor_start() {
        skip_ws();
        char c = peek();
        return c == '(' || std::isalnum(static_cast<unsigned char>(c));
    }

    void parse_term(int sign, DiffPoly& open, CyclicPoly& closed, bool& saw_tr, bool& saw_open) {
        Rat coeff = sign;
        skip_ws();
        bool had_number = false;
        if (at_number()) {
            coeff *= parse_rational();
            had_number = true;
            skip_ws();
            if (peek() == '*') ++pos_;
        }
        skip_ws();
        if (!is_factor_start()) {
            if (had_number) {
                open.add_term(ctx_, OpenWord{}, coeff);
                saw_open = true;
                return;
            }
            throw parse_error("expected a factor", pos_);
        }
        // peek for a tr factor: it must be the entire factor part of the term
        size_t save = pos_;
        bool is_tr = false;
        CyclicPoly closed_part;
        DiffPoly first = parse_factor(is_tr, closed_part);
        if (is_tr) {
            skip_ws();
            if (peek() == '*') throw parse_error("tr(...) cannot be multiplied by further factors", pos_);
            closed += closed_part * coeff;
            saw_tr = true;
            return;
        }
        pos_ = save;
        DiffPoly acc = poly_const(ctx_, coeff);
        while (true) {
            bool dummy_tr = false;
            CyclicPoly dummy;
            size_t at = pos_;
            DiffPoly f = parse_factor(dummy_tr, dummy);
            if (dummy_tr) throw parse_error("tr(...) cannot appear inside a product", at);
            acc = poly_concat(ctx_, acc, f);
            skip_ws();
            if (peek() == '*') {
                ++pos_;
                continue;
            }
            break;
        }
        open += acc;
        saw_open = true;
    }
};

inline std::vector<std::string> split_top_level(const std::string& src, char sep) {
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (char c : src) {
        if (c == '(' || c == '[') ++depth;
        if (c == ')' || c == ']') --depth;
        if (c == sep && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

} // namespace detail

inline ParsedExpr parse_expression(const Context& ctx, const std::string& src,
                                   const std::vector<std::string>& slots = {}) {
    detail::Parser p(ctx, src, slots);
    return p.parse_expression();
}

inline DiffPoly parse_open(const Context& ctx, const std::string& src,
                           const std::vector<std::string>& slots = {}) {
    ParsedExpr e = parse_expression(ctx, src, slots);
    if (e.cyclic) throw error("expected an open expression, got tr(...)");
    return e.open;
}

inline CyclicPoly parse_cyclic(const Context& ctx, const std::string& src) {
    ParsedExpr e = parse_expression(ctx, src);
    if (!e.cyclic) {
        if (e.open.is_zero()) return {};
        throw error("expected a tr(...) expression");
    }
    return e.closed;
}

// Tuple: one component per generator, separated by ';'.
inline Tuple parse_tuple(const Context& ctx, const std::string& src,
                         const std::vector<std::string>& slots = {}) {
    auto parts = detail::split_top_level(src, ';');
    if (static_cast<int>(parts.size()) != ctx.gens)
        throw error("expected " + std::to_string(ctx.gens) + " ';'-separated components");
    Tuple t;
    for (const auto& part : parts) t.push_back(parse_open(ctx, part, slots));
    return t;
}

// Operator entry: rows separated by ';', each linear in every slot name.
inline DiffOperator parse_operator(const Context& ctx, const std::string& src,
                                   const std::vector<std::string>& slots) {
    if (slots.empty() || slots.size() > 4) throw error("between 1 and 4 slot names required");
    for (const auto& nm : slots) {
        if (nm.empty()) throw error("empty slot name");
        if (nm == "tr" || nm == "D" || nm == "1" || nm[0] == 'a' || nm[0] == 'b')
            throw error("slot name '" + nm + "' shadows reserved syntax");
    }
    auto rows = detail::split_top_level(src, ';');
    if (static_cast<int>(rows.size()) != ctx.gens)
        throw error("expected " + std::to_string(ctx.gens) + " ';'-separated operator rows");
    DiffOperator A;
    A.arity = static_cast<int>(slots.size());
    for (int r = 0; r < ctx.gens; ++r) {
        DiffPoly row = parse_open(ctx, rows[static_cast<size_t>(r)], slots);
        for (const auto& [w, c] : row.terms) {
            OpTerm t;
            t.coeff = c;
            t.row = r + 1;
            for (const auto& l : w.letters) {
                if (l.fam == Family::A || l.fam == Family::B) {
                    t.atoms.push_back(OpAtom::mk_letter(l));
                } else {
                    int slot = static_cast<int>(l.fam) - static_cast<int>(Family::P1);
                    t.atoms.push_back(OpAtom::mk_slot(slot, l.gen, l.sigma));
                }
            }
            A.terms.push_back(std::move(t));
        }
    }
    canonicalize_terms(A);
    validate_operator(ctx, A);
    return A;
}

} // namespace ncvar
