#include <doctest.h>

#include <random>

#include "foldreg/calculus.hpp"
#include "foldreg/eval.hpp"
#include "foldreg/stdlib.hpp"

using namespace foldreg;

namespace {
const SystemFlavor qf{Flavor::QuantifierFree, false};
const SystemFlavor poly{Flavor::Polyregular, false};
const SystemFlavor linear{Flavor::Linear, false};

Type sigma() { return Type::var("Σ"); }
}  // namespace

TEST_CASE("flavor names") {
    CHECK(parse_flavor("qf") == qf);
    CHECK(parse_flavor("linear+trees") == SystemFlavor{Flavor::Linear, true});
    CHECK_FALSE(parse_flavor("exotic").has_value());
}

TEST_CASE("prime types") {
    CHECK(to_string(type_of(Term::prime("reverse", {sigma()}), qf)) == "Σ* -> Σ*");
    CHECK(to_string(type_of(Term::prime("concat", {sigma()}), qf)) == "(Σ*)* -> Σ*");
    Term t = seq({Term::prime("reverse", {sigma()}), Term::prime("reverse", {sigma()})});
    CHECK(to_string(type_of(t, qf)) == "Σ* -> Σ*");
}

TEST_CASE("type errors") {
    TypeResult unknown = infer_type(Term::prime("teleport", {sigma()}), poly);
    REQUIRE_FALSE(unknown.ok());
    CHECK(unknown.error().kind == TypeErrorKind::UnknownPrime);

    Term bad = Term::compose(Term::prime("reverse", {sigma()}), Term::prime("concat", {sigma()}));
    TypeResult mismatch = infer_type(bad, qf);
    REQUIRE_FALSE(mismatch.ok());
    CHECK(mismatch.error().kind == TypeErrorKind::DomainMismatch);

    TypeResult absorb_qf = infer_type(Term::prime("absorb", {sigma()}), qf);
    REQUIRE_FALSE(absorb_qf.ok());
    CHECK(absorb_qf.error().kind == TypeErrorKind::FlavorViolation);
    CHECK(infer_type(Term::prime("absorb", {sigma()}), poly).ok());
    CHECK_FALSE(infer_type(Term::prime("absorb", {sigma()}), linear).ok());
    CHECK(infer_type(Term::prime("lin-absorb", {sigma()}), linear).ok());
    CHECK_THROWS_AS(type_of(bad, qf), TypeErrorException);
}

TEST_CASE("upgrade only at the root") {
    Term f = catalog_entry("list_destructor").weak_term();
    CHECK(infer_type(f, poly).ok());
    Term nested = Term::compose(Term::prime("reverse", {sigma()}), f);
    CHECK_FALSE(infer_type(nested, poly).ok());
}

TEST_CASE("fold grade violations") {
    for (int k = 0; k <= 3; ++k) {
        for (const Term& t : {fold_duplication(k), fold_tail(k)}) {
            TypeResult r = infer_type(t, poly);
            REQUIRE_FALSE(r.ok());
            CHECK(r.error().kind == TypeErrorKind::GradeViolation);
        }
    }
}

TEST_CASE("term text round-trip") {
    for (const auto& d : catalog()) {
        Term t = d.weak_term();
        CHECK(parse_term(print_term(t)) == t);
    }
    CHECK_THROWS_AS(parse_term("(compose (prime reverse Σ)"), ParseError);
    CHECK_THROWS_AS(parse_term("(prime reverse (bogus 1))"), ParseError);
}

TEST_CASE("dnf isomorphism") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 100; ++i) {
        Type t = random_type(rng, 3, true);
        DnfIso iso = to_dnf(t);
        CHECK(is_dnf(iso.type));
        LeafIdSource ids;
        Value v = random_value(t, rng, 10, ids);
        Value there = eval(iso.forward, v, poly);
        CHECK(typecheck_value(there, iso.type));
        CHECK(eval(iso.backward, there, poly) == v);
    }
}

TEST_CASE("make_weak records the level") {
    Term t = catalog_entry("squaring").weak_term();
    CHECK(weak_level(t) == 3);
    CHECK(weak_level(Term::prime("reverse", {sigma()})) == 0);
}
