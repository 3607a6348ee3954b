#include <doctest.h>

#include <map>
#include <random>

#include "foldreg/eval.hpp"
#include "foldreg/stdlib.hpp"

using namespace foldreg;

namespace {
const SystemFlavor qf{Flavor::QuantifierFree, false};
const SystemFlavor poly{Flavor::Polyregular, false};

Type digits() { return finite_type(3); }
}  // namespace

TEST_CASE("evaluating primes") {
    Type l = Type::list(digits());
    Value v = parse_value("[<(),><(),>>()]", l);
    CHECK(serialize(eval(Term::prime("reverse", {digits()}), v, qf), l) == "[>>(),><(),<()]");
    Value ll = parse_value("[[<()],[],[>>(),<()]]", Type::list(l));
    CHECK(serialize(eval(Term::prime("concat", {digits()}), ll, qf), l) == "[<(),>>(),<()]");
}

TEST_CASE("evaluation checks its input") {
    CHECK_THROWS_AS(eval(Term::prime("reverse", {digits()}), Value::unit(1), qf), std::invalid_argument);
    CHECK_THROWS_AS(eval(Term::prime("absorb", {digits()}), Value::unit(1), qf), TypeErrorException);
}

TEST_CASE("provenance of copied leaves") {
    Type l = Type::list(digits());
    LeafIdSource ids;
    Value v = parse_value("[<(),><()]", l, ids);
    EvalTrace tr = eval_traced(Term::prime("reverse", {digits()}), v, qf);
    for (const auto& [out, origin] : tr.leaf_origin) {
        REQUIRE(origin.has_value());
        CHECK((*origin == 1 || *origin == 2));
    }
    CHECK(canonical_output(tr) == Value::seq({Value::inr(Value::inl(Value::unit(2))), Value::inl(Value::unit(1))}));
}

TEST_CASE("created leaves have no origin") {
    Type s = digits();
    LeafIdSource ids;
    Value v = finite_element(s, 0, ids);
    EvalTrace tr = eval_traced(Term::prime("const-unit", {s}), v, poly);
    REQUIRE(tr.leaf_origin.size() == 1);
    CHECK_FALSE(tr.leaf_origin.begin()->second.has_value());
    CHECK(canonical_output(tr) == Value::unit(0));
}

TEST_CASE("growth of squaring and duplication") {
    std::vector<std::size_t> sizes;
    for (std::size_t n = 5; n <= 30; n += 5) sizes.push_back(n);
    const auto& sq = catalog_entry("squaring");
    GrowthFit g = growth_profile(sq.weak_term(), sq.flavor, sizes, 1);
    CHECK(g.degree == 2);
    CHECK(g.slope == doctest::Approx(2).epsilon(0.1));
    const auto& dup = catalog_entry("duplicate");
    CHECK(growth_profile(dup.weak_term(), dup.flavor, sizes, 1).degree == 1);
    CHECK_THROWS(growth_profile(dup.weak_term(), dup.flavor, {5, 6}, 1));
}

TEST_CASE("unchecked evaluation agrees with checked") {
    const auto& d = catalog_entry("split");
    std::mt19937_64 rng(8);
    for (int i = 0; i < 10; ++i) {
        LeafIdSource ids;
        Value v = d.sample(rng() % 8, rng, ids);
        CHECK(eval_unchecked(d.weak_term(), v) == eval(d.weak_term(), v, poly));
    }
}

TEST_CASE("growth of reverse and of a constant") {
    std::vector<std::size_t> sizes;
    for (std::size_t n = 5; n <= 50; n += 5) sizes.push_back(n);
    Type s = Type::var("Σ");
    CHECK(growth_profile(Term::prime("reverse", {s}), qf, sizes, 2).degree == 1);
    CHECK(growth_profile(Term::prime("const-unit", {Type::list(s)}), poly, sizes, 2).degree == 0);
}

TEST_CASE("duplicate copies every input leaf twice") {
    const auto& d = catalog_entry("duplicate");
    std::mt19937_64 rng(13);
    for (int i = 0; i < 20; ++i) {
        LeafIdSource ids;
        Value in = d.sample(rng() % 15, rng, ids);
        EvalTrace tr = eval_traced(d.weak_term(), in, d.flavor);
        std::map<LeafId, int> preimages;
        for (const auto& [out, origin] : tr.leaf_origin) {
            REQUIRE(origin.has_value());
            ++preimages[*origin];
        }
        CHECK(preimages.size() == leaf_count(in));
        for (const auto& [leaf, n] : preimages) CHECK(n == 2);
    }
}

TEST_CASE("outputs have the inferred codomain") {
    std::mt19937_64 rng(14);
    for (const auto& d : catalog()) {
        Term t = d.weak_term();
        FunctionType ft = type_of(t, d.flavor);
        for (int i = 0; i < 5; ++i) {
            LeafIdSource ids;
            CHECK_MESSAGE(typecheck_value(eval(t, d.sample(rng() % 10, rng, ids), d.flavor), ft.cod), d.name);
        }
    }
}

TEST_CASE("a fold is its step applied letter by letter") {
    std::mt19937_64 rng(15);
    std::size_t folds = 0;
    for (const auto& d : catalog()) {
        if (!d.term.is(TermKind::SafeFold)) continue;
        ++folds;
        const Term& init = d.term.child(0);
        const Term& step = d.term.child(1);
        for (int i = 0; i < 10; ++i) {
            LeafIdSource ids;
            std::size_t n = rng() % 21;
            Value in = random_sized_value(type_of(d.term, d.flavor).dom, n, rng, ids);
            Value unit = Value::unit(ids.next());
            Value inner = in;
            for (int j = 0; j < d.term.k(); ++j) {
                unit = Value::bang(unit);
                inner = inner.inner();
            }
            Value state = eval_unchecked(init, unit);
            for (const Value& b : inner.items()) state = eval_unchecked(step, Value::pair(state, b));
            CHECK_MESSAGE(same_shape(eval(d.term, in, d.flavor), state), d.name);
        }
    }
    CHECK(folds >= 3);
}
