#include <doctest.h>

#include <random>

#include "foldreg/structures.hpp"

using namespace foldreg;

namespace {
Type bit() { return Type::coprod(Type::unit(), Type::unit()); }

std::vector<std::string> names(const Vocabulary& v) {
    std::vector<std::string> out;
    for (const auto& s : v.symbols()) out.push_back(s.name + "/" + std::to_string(s.arity));
    return out;
}
}  // namespace

TEST_CASE("vocabulary of lists and pairs") {
    Type l = Type::list(bit());
    CHECK(names(vocab_of(l)) == std::vector<std::string>{"ord[]/2", "tag[E]/1"});
    CHECK(names(pair_vocab(vocab_of(l), vocab_of(bit()))) ==
          std::vector<std::string>{"side[]/1", "ord[L]/2", "tag[LE]/1", "tag[R]/0"});
    CHECK(prefix_name("ord[E]", 'L') == "ord[LE]");
}

TEST_CASE("encoding a list") {
    Type l = Type::list(bit());
    Value v = Value::seq({Value::inl(Value::unit(1)), Value::inr(Value::unit(2)), Value::inl(Value::unit(3))});
    Structure s = encode(v, l);
    CHECK(s.universe() == std::vector<ElemId>{1, 2, 3});
    int ord = s.vocab().find("ord[]"), tag = s.vocab().find("tag[E]");
    CHECK(s.holds(ord, {1, 3}));
    CHECK(s.holds(ord, {2, 2}));
    CHECK_FALSE(s.holds(ord, {3, 1}));
    CHECK(s.holds(tag, {1}));
    CHECK_FALSE(s.holds(tag, {2}));
    CHECK(decode(s, l) == v);
}

TEST_CASE("items with an empty universe cannot be encoded") {
    Type t = Type::list(Type::list(bit()));
    CHECK_THROWS_AS(encode(Value::seq({Value::seq({})}), t), EncodeError);
    CHECK_NOTHROW(encode(Value::seq({}), t));
}

TEST_CASE("decoding rejects structures outside the image") {
    Type l = Type::list(bit());
    Structure s(vocab_of(l));
    s.add_element(1);
    s.add_element(2);
    s.add_tuple("ord[]", {1, 1});
    s.add_tuple("ord[]", {2, 2});
    CHECK_THROWS_AS(decode(s, l), NotInImage);
}

TEST_CASE("encode and decode round-trip on random values") {
    std::mt19937_64 rng(5);
    int done = 0;
    while (done < 100) {
        Type t = random_type(rng, 3, true);
        LeafIdSource ids;
        Value v = random_value(t, rng, 10, ids);
        Structure s;
        try {
            s = encode(v, t);
        } catch (const EncodeError&) {
            continue;
        }
        CHECK(decode(s, t) == v);
        CHECK(parse_dump(dump(s)) == s);
        ++done;
    }
}

TEST_CASE("pairing and restriction") {
    Type l = Type::list(bit());
    Structure a = encode(Value::seq({Value::inl(Value::unit(1))}), l);
    Structure b = encode(Value::seq({Value::inr(Value::unit(2))}), l);
    Structure p = pair_structures(a, b);
    CHECK(p.vocab() == pair_vocab(a.vocab(), b.vocab()));
    CHECK(p.holds(p.vocab().find("side[]"), {1}));
    CHECK_FALSE(p.holds(p.vocab().find("side[]"), {2}));
    CHECK(decode(p, Type::prod(l, l)) == Value::pair(decode(a, l), decode(b, l)));
    CHECK_THROWS(pair_structures(a, a));

    Structure g = encode(Value::bang(Value::seq({Value::inl(Value::unit(4))})), Type::bang(l));
    CHECK(g.grade(4) == 1);
    CHECK(restrict(g, 1).universe_size() == 1);
    CHECK(restrict(g, 2).universe_size() == 0);
}
