// Multivectors: operator normalization, evaluation, the odd bracket, Q-fields.

#include <catch2/catch_amalgamated.hpp>

#include <ncvar/ncvar.hpp>

using namespace ncvar;

namespace {

const Context NC(1, 1, false);

Letter A0(MultiIndex s = {0}) { return Letter{Family::A, 1, std::move(s)}; }
Letter B0(MultiIndex s = {0}) { return Letter{Family::B, 1, std::move(s)}; }

DiffPoly P(const Context& ctx, std::vector<Letter> ls) {
    return poly_word(ctx, OpenWord{std::move(ls)});
}

CyclicPoly C(const Context& ctx, std::vector<Letter> ls) {
    return close(ctx, poly_word(ctx, OpenWord{std::move(ls)}));
}

Multivector MV(const Context& ctx, const CyclicPoly& c) { return multivector_from_density(ctx, c); }

DiffOperator op1(const Context& ctx, const std::string& src) {
    return parse_operator(ctx, src, {"p"});
}

} // namespace

TEST_CASE("densities must be homogeneous in the odd family") {
    CyclicPoly mixed = C(NC, {B0(), A0()});
    mixed += C(NC, {A0(), A0()});
    REQUIRE_THROWS_AS(MV(NC, mixed), error);
    REQUIRE(MV(NC, C(NC, {B0(), A0()})).degree == 1);
    REQUIRE(MV(NC, C(NC, {A0(), A0()})).degree == 0);
    REQUIRE(MV(NC, C(NC, {B0(), B0({1})})).degree == 2);
}

TEST_CASE("the quadratic odd density of the derivative extracts to the derivative") {
    CyclicPoly half = C(NC, {B0(), B0({1})});
    half *= Rat(1, 2);
    Multivector pi = MV(NC, half);
    DiffOperator A = normalize_to_operator(NC, pi);
    REQUIRE(op_equal(NC, A, op1(NC, "D[1](p)")));
}

TEST_CASE("the commutator bivector extracts to the commutator") {
    DiffOperator A = op1(NC, "a*p - p*a");
    Multivector pi = bivector_of(NC, A);
    CyclicPoly expect = C(NC, {B0(), B0(), A0()});
    expect *= Rat(-1);
    REQUIRE(pi.body.value == expect);
    DiffOperator back = normalize_to_operator(NC, pi);
    REQUIRE(op_equal(NC, back, A));
}

TEST_CASE("operator extraction round-trips the density") {
    std::vector<CyclicPoly> samples = {
        C(NC, {B0(), B0({1})}),
        C(NC, {B0(), B0(), A0()}),
        C(NC, {B0(), A0(), B0({1}), A0({1})}),
        C(NC, {B0(), B0({1}), B0({2})}),
    };
    for (const auto& c : samples) {
        Multivector xi = MV(NC, c);
        if (xi.is_zero()) continue;
        DiffOperator A = normalize_to_operator(NC, xi);
        Multivector back = multivector_from_operator(NC, xi.degree, A);
        REQUIRE(back == xi);
    }
}

TEST_CASE("evaluation of a bivector matches the coupling with its operator") {
    for (const char* src : {"D[1](p)", "a*p - p*a"}) {
        DiffOperator A = op1(NC, src);
        Multivector pi = bivector_of(NC, A);
        std::vector<Tuple> ps = {
            Tuple{P(NC, {A0({1})})},
            Tuple{P(NC, {A0(), A0()})},
        };
        for (const auto& p1 : ps)
            for (const auto& p2 : ps) {
                Functional lhs = evaluate(NC, pi, {p1, p2});
                Functional rhs = couple(NC, p1, apply_operator(NC, A, p2));
                REQUIRE(lhs == rhs);
            }
    }
}

TEST_CASE("evaluation is graded-alternating in the covectors") {
    DiffOperator A = op1(NC, "D[1](p)");
    Multivector pi = bivector_of(NC, A);
    Tuple p1{P(NC, {A0()})};
    Tuple p2{P(NC, {A0(), A0()})};
    Functional f12 = evaluate(NC, pi, {p1, p2});
    Functional f21 = evaluate(NC, pi, {p2, p1});
    REQUIRE(f12 == mv_scale(Multivector{0, f21, std::nullopt}, Rat(-1)).body);
    // equal even covectors annihilate a bivector
    REQUIRE(evaluate(NC, pi, {p1, p1}).is_zero());
}

TEST_CASE("degree-zero evaluation returns the functional itself") {
    Multivector h = MV(NC, C(NC, {A0(), A0()}));
    Functional v = evaluate(NC, h, {});
    REQUIRE(v == h.body);
}

TEST_CASE("one-vector bracket reproduces the commutator of characteristics") {
    // [[<b a^2>, <b a^3>]] = -<b a^4>
    Multivector xi = MV(NC, C(NC, {B0(), A0(), A0()}));
    Multivector eta = MV(NC, C(NC, {B0(), A0(), A0(), A0()}));
    Multivector br = schouten(NC, xi, eta);
    CyclicPoly expect = C(NC, {B0(), A0(), A0(), A0(), A0()});
    expect *= Rat(-1);
    REQUIRE(br.degree == 1);
    REQUIRE(br.body.value == expect);
}

TEST_CASE("one-vector bracket matches the evolutionary commutator oracle") {
    std::vector<DiffPoly> phis = {
        P(NC, {A0(), A0()}),
        P(NC, {A0({1})}),
        P(NC, {A0(), A0({1})}),
    };
    for (const auto& f1 : phis)
        for (const auto& f2 : phis) {
            CyclicPoly x = close(NC, poly_concat(NC, P(NC, {B0()}), f1));
            CyclicPoly y = close(NC, poly_concat(NC, P(NC, {B0()}), f2));
            Multivector br = schouten(NC, MV(NC, x), MV(NC, y));
            DiffPoly comm = evolutionary(NC, Family::A, Tuple{f1}, f2) -
                            evolutionary(NC, Family::A, Tuple{f2}, f1);
            comm *= Rat(-1);
            Functional oracle = normal_form(NC, close(NC, poly_concat(NC, P(NC, {B0()}), comm)));
            REQUIRE(br.body == oracle);
        }
}

TEST_CASE("bracket of functionals of even letters only vanishes") {
    Multivector h1 = MV(NC, C(NC, {A0(), A0()}));
    Multivector h2 = MV(NC, C(NC, {A0(), A0(), A0()}));
    REQUIRE(schouten(NC, h1, h2).is_zero());
}

TEST_CASE("bracket degree adds and drops one") {
    Multivector pi = MV(NC, mv_scale(MV(NC, C(NC, {B0(), B0({1})})), Rat(1, 2)).body.value);
    Multivector xi = MV(NC, C(NC, {B0(), A0(), A0()}));
    Multivector br = schouten(NC, pi, xi);
    REQUIRE((br.is_zero() || br.degree == 2));
}

TEST_CASE("graded symmetry of the bracket") {
    std::vector<Multivector> xs = {
        MV(NC, C(NC, {B0(), A0(), A0()})),          // k=1
        MV(NC, C(NC, {B0(), B0({1}), A0()})),       // k=2
        MV(NC, C(NC, {A0(), A0(), A0()})),          // k=0
        MV(NC, C(NC, {B0(), B0({1}), B0({2})})),    // k=3
    };
    for (const auto& x : xs)
        for (const auto& y : xs) {
            Multivector lhs = schouten(NC, x, y);
            Multivector rhs = schouten(NC, y, x);
            int k = x.degree, l = y.degree;
            int s = (((k - 1) * (l - 1)) % 2 == 0) ? 1 : -1;
            // shifted-graded symmetry: [[x,y]] = -(-1)^((k-1)(l-1)) [[y,x]]
            Multivector expect = mv_scale(rhs, Rat(-s));
            REQUIRE(lhs == expect);
        }
}

TEST_CASE("odd field of a one-vector carries the signed characteristic") {
    // orientation fixed by the bracket correspondence [Q,Q'] = Q'' below:
    // the even-family flow is minus the odd-side derivative, the odd-family
    // flow is the even-side derivative
    Multivector xi = MV(NC, C(NC, {B0(), A0(), A0()}));
    OddField q = odd_field(NC, xi);
    REQUIRE(q.parity == 0);
    DiffPoly mphi = P(NC, {A0(), A0()});
    mphi *= Rat(-1);
    REQUIRE(q.phi_a[0] == mphi);
    DiffPoly expect = P(NC, {B0(), A0()});
    expect += P(NC, {A0(), B0()});
    REQUIRE(q.phi_b[0] == expect);
}

TEST_CASE("field commutator represents the bracket on probe densities") {
    std::vector<Multivector> pairs = {
        MV(NC, C(NC, {B0(), A0(), A0()})),
        MV(NC, C(NC, {B0(), A0(), A0(), A0()})),
    };
    const Multivector& xi = pairs[0];
    const Multivector& eta = pairs[1];
    Multivector br = schouten(NC, xi, eta);
    OddField q1 = odd_field(NC, xi);
    OddField q2 = odd_field(NC, eta);
    OddField qb = odd_field(NC, br);
    OddField qc = field_commutator(NC, q1, q2);

    std::vector<CyclicPoly> probes = {
        C(NC, {B0(), A0()}),
        C(NC, {A0(), A0()}),
        C(NC, {B0(), B0({1})}),
        C(NC, {B0(), A0({1}), A0()}),
    };
    for (const auto& w : probes) {
        Functional lhs = normal_form(NC, apply_field(NC, qc, w));
        Functional rhs = normal_form(NC, apply_field(NC, qb, w));
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("multi-generator bracket keeps the generator pairing diagonal") {
    Context ctx(2, 1, false);
    Letter b1{Family::B, 1, {0}}, a1{Family::A, 1, {0}}, b2{Family::B, 2, {0}}, a2{Family::A, 2, {0}};
    // xi = <b1 a1^2>, eta = <b2 a2^2>: disjoint generators commute
    Multivector xi = MV(ctx, close(ctx, poly_word(ctx, OpenWord{{b1, a1, a1}})));
    Multivector eta = MV(ctx, close(ctx, poly_word(ctx, OpenWord{{b2, a2, a2}})));
    REQUIRE(schouten(ctx, xi, eta).is_zero());
    // crossed: xi = <b1 a2>, eta = <b2 a1^2> do interact
    Multivector xi2 = MV(ctx, close(ctx, poly_word(ctx, OpenWord{{b1, a2, a2}})));
    Multivector eta2 = MV(ctx, close(ctx, poly_word(ctx, OpenWord{{b2, a1}})));
    REQUIRE(!schouten(ctx, xi2, eta2).is_zero());
}
