// Text and structured-document frontend: parse, render, round-trips.

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

} // namespace

TEST_CASE("parsing the basic grammar") {
    REQUIRE(parse_cyclic(NC, "tr(a*a*a)") == C(NC, {A0(), A0(), A0()}));
    REQUIRE(parse_open(NC, "a_2") == P(NC, {A0({2})}));
    REQUIRE(parse_cyclic(NC, "tr(b*D[1](b))") == C(NC, {B0(), B0({1})}));
    REQUIRE(parse_open(NC, "1/2 a") == P(NC, {A0()}) * Rat(1, 2));
    REQUIRE(parse_open(NC, "-3 a + a*a") == P(NC, {A0()}) * Rat(-3) + P(NC, {A0(), A0()}));
    REQUIRE(parse_open(NC, "5") == poly_const(NC, 5));
    REQUIRE(parse_cyclic(NC, "0").is_zero());
    REQUIRE(parse_open(NC, "a - a").is_zero());
    // D distributes over sums and is iterated by nesting
    REQUIRE(parse_open(NC, "D[1](a*a)") == P(NC, {A0({1}), A0()}) + P(NC, {A0(), A0({1})}));
    REQUIRE(parse_open(NC, "D[1](D[1](a))") == P(NC, {A0({2})}));
}

TEST_CASE("parsing multiple generators and base dimensions") {
    Context ctx(2, 1, false);
    Letter a1{Family::A, 1, {0}}, a2{Family::A, 2, {0}}, b2{Family::B, 2, {0}};
    REQUIRE(parse_open(ctx, "a1*a2") == poly_word(ctx, OpenWord{{a1, a2}}));
    REQUIRE(parse_open(ctx, "b2_3") == poly_letter(ctx, Letter{Family::B, 2, {3}}));
    REQUIRE_THROWS_AS(parse_open(ctx, "a"), parse_error);
    REQUIRE_THROWS_AS(parse_open(ctx, "a3"), parse_error);

    Context ctx2(1, 2, false);
    REQUIRE(parse_open(ctx2, "a^(1,2)") == poly_letter(ctx2, Letter{Family::A, 1, {1, 2}}));
    REQUIRE_THROWS_AS(parse_open(ctx2, "a_1"), parse_error);
    (void)b2;
}

TEST_CASE("parse errors carry positions and reasons") {
    REQUIRE_THROWS_AS(parse_open(NC, "a +"), parse_error);
    REQUIRE_THROWS_AS(parse_open(NC, "c"), parse_error);
    REQUIRE_THROWS_AS(parse_cyclic(NC, "tr(tr(a))"), parse_error);
    REQUIRE_THROWS_AS(parse_open(NC, "tr(a)*a"), parse_error);
    REQUIRE_THROWS_AS(parse_open(NC, "D[3](a)"), parse_error);
    try {
        parse_open(NC, "a + %");
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        REQUIRE(e.position == 4);
    }
}

TEST_CASE("rendering canonical text") {
    REQUIRE(render(NC, C(NC, {A0(), A0({1})})) == "tr(a*a_1)");
    REQUIRE(render(NC, CyclicPoly{}) == "0");
    CyclicPoly m = C(NC, {B0(), A0(), A0(), A0(), A0()});
    m *= Rat(-1);
    REQUIRE(render(NC, m) == "-1 tr(b*a*a*a*a)");
    REQUIRE(render(NC, P(NC, {A0(), A0()}) * Rat(3)) == "3 a*a");
    REQUIRE(render(NC, poly_const(NC, Rat(7, 2))) == "7/2");
    Context ctx2(1, 2, false);
    REQUIRE(render(ctx2, poly_letter(ctx2, Letter{Family::A, 1, {1, 2}})) == "a^(1,2)");
}

TEST_CASE("text round-trip is the identity on canonical values") {
    std::vector<std::string> sources = {
        "tr(a*a_1)",
        "-1 tr(b*a*a*a*a)",
        "tr(b*b_1) + 2 tr(a*a*a)",
        "-3/2 a_2 + a*a",
        "0",
    };
    for (const auto& src : sources) {
        ParsedExpr e = parse_expression(NC, src);
        if (e.cyclic)
            REQUIRE(render(NC, e.closed) == src);
        else
            REQUIRE(render(NC, e.open) == src);
    }
}

TEST_CASE("operator text round-trip") {
    std::vector<std::string> sources = {
        "D[1](p)",
        "a*p + -1 p*a",
        "a*D[1](p)*a_1",
        "b*p*b_1",
    };
    for (const auto& src : sources) {
        DiffOperator A = parse_operator(NC, src, {"p"});
        std::string txt = render_operator(NC, A, {"p"});
        DiffOperator B = parse_operator(NC, txt, {"p"});
        REQUIRE(op_equal(NC, A, B));
        REQUIRE(render_operator(NC, B, {"p"}) == txt);
    }
}

TEST_CASE("multi-slot and multi-row operators parse and render") {
    Context ctx(2, 1, false);
    DiffOperator A = parse_operator(ctx, "a1*D[1](p2); p1*a2", {"p"});
    REQUIRE(A.arity == 1);
    std::string txt = render_operator(ctx, A, {"p"});
    DiffOperator B = parse_operator(ctx, txt, {"p"});
    REQUIRE(op_equal(ctx, A, B));

    DiffOperator T = parse_operator(NC, "p*D[1](q)", {"p", "q"});
    REQUIRE(T.arity == 2);
    Tuple r = apply_operator(NC, T, {Tuple{P(NC, {A0()})}, Tuple{P(NC, {A0(), A0()})}});
    DiffPoly expect = P(NC, {A0(), A0({1}), A0()});
    expect += P(NC, {A0(), A0(), A0({1})});
    REQUIRE(r[0] == expect);
}

TEST_CASE("operator parsing rejects misuse") {
    REQUIRE_THROWS_AS(parse_operator(NC, "p*p", {"p"}), error);
    REQUIRE_THROWS_AS(parse_operator(NC, "a*a", {"p"}), error);
    REQUIRE_THROWS_AS(parse_operator(NC, "tr(p*a)", {"p"}), error);
    REQUIRE_THROWS_AS(parse_operator(NC, "q", {"p"}), parse_error);
    REQUIRE_THROWS_AS(parse_operator(NC, "p; p", {"p"}), error);
}

TEST_CASE("structured documents round-trip open polynomials") {
    DiffPoly p = P(NC, {A0(), B0({1})}) * Rat(5, 3) + P(NC, {A0({2})}) * Rat(-2);
    Json j = serialize(NC, p);
    REQUIRE(j["schema"] == "ncvar-poly/1");
    REQUIRE(j["kind"] == "open");
    DeserializedPoly d = deserialize_poly(j);
    REQUIRE(!d.cyclic);
    REQUIRE(d.open == p);
    REQUIRE(serialize(d.ctx, d.open).dump() == j.dump());
}

TEST_CASE("structured documents round-trip cyclic polynomials") {
    CyclicPoly c = C(NC, {B0(), B0({1})});
    c += C(NC, {A0(), A0(), A0()}) * Rat(1, 7);
    Json j = serialize(NC, c);
    REQUIRE(j["kind"] == "cyclic");
    DeserializedPoly d = deserialize_poly(j);
    REQUIRE(d.cyclic);
    REQUIRE(d.closed == c);
    REQUIRE(serialize(d.ctx, d.closed).dump() == j.dump());
}

TEST_CASE("structured documents round-trip operators") {
    for (const char* src : {"D[1](p)", "a*D[1](p) + b*p*b_1", "a*p - p*a"}) {
        DiffOperator A = parse_operator(NC, src, {"p"});
        Json j = serialize(NC, A);
        REQUIRE(j["schema"] == "ncvar-op/1");
        DiffOperator B = deserialize_operator(NC, j);
        REQUIRE(op_equal(NC, A, B));
        REQUIRE(serialize(NC, B).dump() == j.dump());
    }
}

TEST_CASE("structured documents reject foreign schemas") {
    Json j;
    j["schema"] = "ncvar-poly/2";
    REQUIRE_THROWS_AS(deserialize_poly(j), error);
}

TEST_CASE("tuples parse componentwise") {
    Context ctx(2, 1, false);
    Tuple t = parse_tuple(ctx, "a1; a2*a2");
    REQUIRE(t.size() == 2);
    Letter a2{Family::A, 2, {0}};
    REQUIRE(t[1] == poly_word(ctx, OpenWord{{a2, a2}}));
    REQUIRE_THROWS_AS(parse_tuple(ctx, "a1"), error);
    REQUIRE_THROWS_AS(parse_tuple(ctx, "tr(a1); a2"), error);
}

TEST_CASE("renderer separates tuple components") {
    Context ctx(2, 1, false);
    Tuple t = parse_tuple(ctx, "a1; 0");
    REQUIRE(render(ctx, t) == "a1; 0");
}
