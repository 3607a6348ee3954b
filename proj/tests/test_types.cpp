#include <doctest.h>

#include <random>

#include "foldreg/types.hpp"

using namespace foldreg;

namespace {
Type bit() { return Type::coprod(Type::unit(), Type::unit()); }
}  // namespace

TEST_CASE("pretty printing and grades") {
    Type s = Type::var("Σ");
    CHECK(to_string(Type::list(s)) == "Σ*");
    CHECK(to_string(Type::bang(Type::prod(s, Type::list(s)))) == "!(Σ × Σ*)");
    CHECK(grade(bangs(3, s)) == 3);
    CHECK(grade(Type::prod(Type::bang(s), Type::list(bangs(2, s)))) == 2);
    CHECK(grade(Type::list(s)) == 0);
    int stripped = 0;
    CHECK(unbang(bangs(2, s), &stripped) == s);
    CHECK(stripped == 2);
}

TEST_CASE("finite types number their elements densely") {
    Type t = Type::prod(finite_type(3), bit());
    REQUIRE(is_finite(t));
    CHECK(finite_size(t) == 6);
    LeafIdSource ids;
    for (std::size_t i = 0; i < 6; ++i) CHECK(finite_index(finite_element(t, i, ids), t) == i);
    CHECK_FALSE(is_finite(Type::list(bit())));
}

TEST_CASE("dnf check") {
    CHECK(is_dnf(Type::coprod(Type::prod(Type::unit(), Type::unit()), Type::unit())));
    CHECK_FALSE(is_dnf(Type::prod(bit(), Type::unit())));
    CHECK_FALSE(is_dnf(Type::bang(bit())));
}

TEST_CASE("serialize and parse round-trip") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        Type t = random_type(rng, 3, true);
        LeafIdSource a;
        Value v = random_value(t, rng, 12, a);
        REQUIRE(typecheck_value(v, t));
        std::string text = serialize(v, t);
        LeafIdSource b;
        Value w = parse_value(text, t, b);
        CHECK(same_shape(v, w));
        CHECK(serialize(w, t) == text);
    }
}

TEST_CASE("parse errors carry a position") {
    Type t = Type::list(bit());
    try {
        parse_value("[<(),", t);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.position() == 5);
    }
    CHECK_THROWS_AS(parse_value("[<()] x", t), ParseError);
}

TEST_CASE("total load falls back to the default value") {
    Type t = Type::list(bit());
    LeafIdSource ids;
    Value v = load_total("garbage", t, ids);
    LeafIdSource ids2;
    CHECK(same_shape(v, default_value(t, ids2)));
    LeafIdSource ids3;
    CHECK(serialize(load_total("[>()]", t, ids3), t) == "[>()]");
}

TEST_CASE("random_sized_value fixes the outer length") {
    std::mt19937_64 rng(3);
    LeafIdSource ids;
    Type t = Type::bang(Type::list(Type::prod(bit(), Type::list(bit()))));
    for (std::size_t n : {0u, 1u, 7u, 30u}) {
        Value v = random_sized_value(t, n, rng, ids);
        CHECK(v.inner().items().size() == n);
        CHECK(typecheck_value(v, t));
    }
}

TEST_CASE("renumber gives fresh ids left to right") {
    LeafIdSource ids(100);
    Value v = Value::seq({Value::unit(7), Value::inl(Value::unit(3))});
    Value w = renumber(v, ids);
    CHECK(leaf_ids(w) == std::vector<LeafId>{100, 101});
    CHECK(same_shape(v, w));
    CHECK(v != w);
    CHECK(leaf_count(w) == 2);
}
