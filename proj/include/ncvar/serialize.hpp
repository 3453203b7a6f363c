#pragma once

#include "poisson.hpp"
#include "render.hpp"

#include <json.hpp>

#include <string>

namespace ncvar {

using Json = nlohmann::ordered_json;

inline const char* poly_schema() { return "ncvar-poly/1"; }
inline const char* op_schema() { return "ncvar-op/1"; }

inline Json letter_to_json(const Letter& l) {
    Json j;
    j["family"] = family_name(l.fam);
    j["generator"] = l.gen;
    j["sigma"] = l.sigma;
    return j;
}

inline Letter letter_from_json(const Context& ctx, const Json& j) {
    Letter l;
    std::string f = j.at("family").get<std::string>();
    bool found = false;
    for (Family fam : {Family::A, Family::B, Family::P1, Family::P2, Family::P3, Family::P4})
        if (f == family_name(fam)) {
            l.fam = fam;
            found = true;
        }
    if (!found) throw error("unknown letter family '" + f + "'");
    l.gen = j.at("generator").get<int>();
    if (l.gen < 1 || l.gen > ctx.gens) throw error("generator index out of range");
    l.sigma = j.at("sigma").get<MultiIndex>();
    if (static_cast<int>(l.sigma.size()) != ctx.base_dim) throw error("sigma length mismatch");
    for (int v : l.sigma)
        if (v < 0) throw error("negative derivative order");
    return l;
}

namespace detail {

inline Json terms_to_json(const Context& ctx, const TermMap& terms, const char* kind) {
    Json j;
    j["schema"] = poly_schema();
    j["kind"] = kind;
    j["gens"] = ctx.gens;
    j["base_dim"] = ctx.base_dim;
    j["commutative"] = ctx.commutative;
    Json ts = Json::array();
    for (const auto& [w, c] : terms) {
        Json t;
        t["coeff"] = rat_string(c);
        Json ls = Json::array();
        for (const auto& l : w.letters) ls.push_back(letter_to_json(l));
        t["letters"] = std::move(ls);
        ts.push_back(std::move(t));
    }
    j["terms"] = std::move(ts);
    return j;
}

inline Rat rat_from_string(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(Int(s));
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    if (den == 0) throw error("zero denominator");
    return Rat(num, den);
}

} // namespace detail

inline Json serialize(const Context& ctx, const DiffPoly& p) {
    return detail::terms_to_json(ctx, p.terms, "open");
}
inline Json serialize(const Context& ctx, const CyclicPoly& p) {
    return detail::terms_to_json(ctx, p.terms, "cyclic");
}
inline Json serialize(const Context& ctx, const Functional& f) { return serialize(ctx, f.value); }

inline Json serialize(const Context& ctx, const DiffOperator& A) {
    Json j;
    j["schema"] = op_schema();
    j["gens"] = ctx.gens;
    j["base_dim"] = ctx.base_dim;
    j["commutative"] = ctx.commutative;
    j["arity"] = A.arity;
    Json ts = Json::array();
    for (const auto& t : A.terms) {
        Json jt;
        jt["coeff"] = rat_string(t.coeff);
        jt["row"] = t.row;
        Json atoms = Json::array();
        for (const auto& a : t.atoms) {
            Json ja;
            if (a.kind == OpAtom::Kind::Letter) {
                ja["letter"] = letter_to_json(a.letter);
            } else {
                ja["slot"] = a.slot;
                ja["comp"] = a.comp;
                ja["tau"] = a.tau;
            }
            atoms.push_back(std::move(ja));
        }
        jt["atoms"] = std::move(atoms);
        ts.push_back(std::move(jt));
    }
    j["terms"] = std::move(ts);
    return j;
}

struct DeserializedPoly {
    Context ctx;
    bool cyclic = false;
    DiffPoly open;
    CyclicPoly closed;
};

inline DeserializedPoly deserialize_poly(const Json& j) {
    if (j.at("schema").get<std::string>() != poly_schema()) throw error("unsupported schema");
    DeserializedPoly r;
    r.ctx = Context(j.at("gens").get<int>(), j.at("base_dim").get<int>(),
                    j.at("commutative").get<bool>());
    std::string kind = j.at("kind").get<std::string>();
    if (kind != "open" && kind != "cyclic") throw error("unknown polynomial kind");
    r.cyclic = kind == "cyclic";
    for (const auto& t : j.at("terms")) {
        Rat c = detail::rat_from_string(t.at("coeff").get<std::string>());
        OpenWord w;
        for (const auto& jl : t.at("letters")) w.letters.push_back(letter_from_json(r.ctx, jl));
        if (r.cyclic)
            r.closed.add_term(r.ctx, w, c);
        else
            r.open.add_term(r.ctx, w, c);
    }
    return r;
}

inline DiffOperator deserialize_operator(const Context& ctx, const Json& j) {
    if (j.at("schema").get<std::string>() != op_schema()) throw error("unsupported schema");
    DiffOperator A;
    A.arity = j.at("arity").get<int>();
    for (const auto& jt : j.at("terms")) {
        OpTerm t;
        t.coeff = detail::rat_from_string(jt.at("coeff").get<std::string>());
        t.row = jt.at("row").get<int>();
        for (const auto& ja : jt.at("atoms")) {
            if (ja.contains("letter")) {
                t.atoms.push_back(OpAtom::mk_letter(letter_from_json(ctx, ja.at("letter"))));
            } else {
                MultiIndex tau = ja.at("tau").get<MultiIndex>();
                if (static_cast<int>(tau.size()) != ctx.base_dim) throw error("tau length mismatch");
                t.atoms.push_back(
                    OpAtom::mk_slot(ja.at("slot").get<int>(), ja.at("comp").get<int>(), std::move(tau)));
            }
        }
        A.terms.push_back(std::move(t));
    }
    canonicalize_terms(A);
    validate_operator(ctx, A);
    return A;
}

} // namespace ncvar
