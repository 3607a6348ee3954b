#include <doctest.h>

#include <random>

#include "foldreg/fold_stream.hpp"
#include "foldreg/qf_logic.hpp"

using namespace foldreg;

namespace {
Type bit() { return Type::coprod(Type::unit(), Type::unit()); }

Structure random_structure(const Type& t, std::mt19937_64& rng, std::size_t len) {
    LeafIdSource ids;
    return encode(random_sized_value(t, len, rng, ids), t);
}
}  // namespace

TEST_CASE("formula text round-trip") {
    for (const char* text : {"ord[](x1, x2)", "side[](x1) & ~tag[R]()", "x1=x2 | ord[L](x2,x1)", "T"}) {
        Formula f = parse_formula(text);
        CHECK(to_string(parse_formula(to_string(f))) == to_string(f));
    }
    CHECK(max_var(parse_formula("ord[](x1, x3)")) == 2);
    CHECK_THROWS_AS(parse_formula("ord[](x1"), ParseError);
}

TEST_CASE("builders fold constants") {
    CHECK(Formula::conj(Formula::truth(), Formula::atom("p", {})).is(FormulaKind::Atom));
    CHECK(Formula::disj(Formula::truth(), Formula::atom("p", {})).is(FormulaKind::True));
    CHECK(Formula::negate(Formula::falsity()).is(FormulaKind::True));
}

TEST_CASE("formula evaluation treats absent elements as false") {
    Type l = Type::list(bit());
    Structure s = encode(Value::seq({Value::inl(Value::unit(1)), Value::inr(Value::unit(2))}), l);
    Formula f = parse_formula("ord[](x1, x2)");
    CHECK(eval_formula(f, s, {ElemId{1}, ElemId{2}}));
    CHECK_FALSE(eval_formula(f, s, {ElemId{2}, ElemId{1}}));
    CHECK_FALSE(eval_formula(f, s, {ElemId{1}, std::nullopt}));
    CHECK_FALSE(eval_formula(Formula::eq(0, 1), s, {std::nullopt, std::nullopt}));
}

TEST_CASE("interpretation text round-trip") {
    for (const auto& d : delta_suite()) {
        QfInterp f = parse_interp(print_interp(d.delta));
        CHECK(print_interp(f) == print_interp(d.delta));
    }
}

TEST_CASE("identity and composition") {
    std::mt19937_64 rng(2);
    for (const auto& e : endo_suite()) {
        for (int i = 0; i < 20; ++i) {
            Structure s = random_structure(e.type, rng, rng() % 8);
            CHECK(apply_interp(identity_interp(s.vocab()), s) == s);
            CHECK(apply_interp(compose_interp(e.f, e.f), s) == apply_interp(e.f, apply_interp(e.f, s)));
        }
    }
}

TEST_CASE("reverse interpretation decodes to the reversed list") {
    const auto suite = endo_suite();
    const QfInterp& rev = suite.front().f;
    Type l = Type::list(bit());
    Value v = Value::seq({Value::inl(Value::unit(1)), Value::inr(Value::unit(2)), Value::inr(Value::unit(3))});
    Value r = Value::seq({Value::inr(Value::unit(3)), Value::inr(Value::unit(2)), Value::inl(Value::unit(1))});
    CHECK(decode(apply_interp(rev, encode(v, l)), l) == r);
}

TEST_CASE("theory transition commutes with applying the interpretation") {
    std::mt19937_64 rng(9);
    for (const auto& e : endo_suite()) {
        for (int i = 0; i < 50; ++i) {
            Structure s = random_structure(e.type, rng, rng() % 6);
            auto u = s.universe();
            Assignment tuple;
            for (int j = 0; j < 2; ++j) {
                if (u.empty() || rng() % 5 == 0)
                    tuple.push_back(std::nullopt);
                else
                    tuple.push_back(u[rng() % u.size()]);
            }
            CHECK(theory_transition(e.f, theory_of(s, tuple)) == theory_of(apply_interp(e.f, s), tuple));
        }
    }
}

TEST_CASE("pair theory agrees with the pair structure") {
    std::mt19937_64 rng(4);
    Type l = Type::list(bit());
    for (int i = 0; i < 50; ++i) {
        LeafIdSource ids;
        Structure a = encode(random_sized_value(l, 1 + rng() % 4, rng, ids), l);
        Structure b = encode(random_sized_value(l, 1 + rng() % 4, rng, ids), l);
        Structure p = pair_structures(a, b);
        auto ua = a.universe(), ub = b.universe();
        ElemId x = ua[rng() % ua.size()], y = ub[rng() % ub.size()], z = ua[rng() % ua.size()];
        AtomicTheory left = theory_of(a, {x, z}), right = theory_of(b, {y});
        CHECK(pair_theory(left, right, {Side::Left, Side::Right, Side::Left}) == theory_of(p, {x, y, z}));
    }
}

TEST_CASE("validation rejects unknown relations") {
    QfInterp f = identity_interp(vocab_of(Type::list(bit())));
    f.defs[0] = parse_formula("nope[](x1, x2)");
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);
}
