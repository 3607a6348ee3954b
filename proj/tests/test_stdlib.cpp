#include <doctest.h>

#include "foldreg/stdlib.hpp"

using namespace foldreg;

TEST_CASE("every catalog entry typechecks and matches its reference") {
    for (const auto& d : catalog()) {
        CHECK_MESSAGE(infer_type(d.weak_term(), d.flavor).ok(), d.name);
        DerivationReport r = check_derivation(d, 30, 12, 5);
        CHECK_MESSAGE(r.passed, d.name << ": " << r.error);
    }
}

TEST_CASE("worked examples") {
    for (const auto& g : run_goldens()) CHECK_MESSAGE(g.passed(), g.name << " gave " << g.actual);
}

TEST_CASE("catalog lookup") {
    CHECK(catalog_entry("split").weak_k == 8);
    CHECK_THROWS_AS(catalog_entry("no-such-entry"), std::out_of_range);
}

TEST_CASE("linear entries become polyregular") {
    const auto& d = catalog_entry("duplicate");
    Term p = linear_to_poly(d.weak_term());
    CHECK_FALSE(infer_type(d.weak_term(), SystemFlavor{Flavor::Polyregular, false}).ok());
    CHECK(infer_type(p, SystemFlavor{Flavor::Polyregular, false}).ok());
}

TEST_CASE("finite functions") {
    Type s3 = finite_type(3);
    Term f = finite_fun(s3, s3, [](std::size_t i) { return (i + 1) % 3; });
    for (std::size_t i = 0; i < 3; ++i) {
        LeafIdSource ids;
        Value v = finite_element(s3, i, ids);
        CHECK(finite_index(eval(f, v, SystemFlavor{Flavor::QuantifierFree, false}), s3) == (i + 1) % 3);
    }
}

TEST_CASE("quantifier-free entries keep their type under the polyregular checker") {
    const SystemFlavor poly{Flavor::Polyregular, false};
    for (const auto& d : catalog()) {
        if (d.flavor.base != Flavor::QuantifierFree) continue;
        TypeResult r = infer_type(d.weak_term(), poly);
        REQUIRE_MESSAGE(r.ok(), d.name);
        CHECK(r.type() == type_of(d.weak_term(), d.flavor));
    }
}

TEST_CASE("linear entries are accepted as polyregular once absorption is unrestricted") {
    for (const auto& d : catalog()) {
        if (d.flavor.base != Flavor::Linear) continue;
        SystemFlavor poly{Flavor::Polyregular, d.flavor.trees};
        TypeResult r = infer_type(linear_to_poly(d.weak_term()), poly);
        REQUIRE_MESSAGE(r.ok(), d.name);
        CHECK(r.type() == type_of(d.weak_term(), d.flavor));
    }
}

TEST_CASE("linear entries stay within their output bound") {
    std::mt19937_64 rng(16);
    for (const auto& d : catalog()) {
        if (d.flavor.base != Flavor::Linear) continue;
        REQUIRE(d.linear_bound > 0);
        Term t = d.weak_term();
        for (std::size_t n : {10u, 100u, 1000u, 10000u}) {
            LeafIdSource ids;
            Value in = d.sample(n, rng, ids);
            double out = static_cast<double>(leaf_count(eval_unchecked(t, in)));
            CHECK_MESSAGE(out <= d.linear_bound * static_cast<double>(leaf_count(in)), d.name << " at " << n);
        }
    }
}
