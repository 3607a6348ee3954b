#include <doctest.h>

#include <cmath>
#include <random>

#include "foldreg/fold_stream.hpp"

using namespace foldreg;

TEST_CASE("stream fold matches the naive fold on the suite") {
    std::mt19937_64 rng(31);
    for (const auto& d : delta_suite()) {
        for (int i = 0; i < 15; ++i) {
            FoldInstance inst = random_instance(d, rng() % 20, rng);
            StreamStats st;
            Structure s = stream_fold(inst, &st, 2);
            CHECK_MESSAGE(s == naive_fold(inst), d.name);
            CHECK_NOTHROW(decode(s, d.state));
        }
    }
}

TEST_CASE("snoc builds the list of letters") {
    SuiteDelta snoc = delta_suite().front();
    REQUIRE(snoc.name == "snoc");
    LeafIdSource ids;
    FoldInstance inst{snoc.delta, encode(Value::seq({}), snoc.state), {}};
    std::vector<Value> letters;
    for (int i = 0; i < 5; ++i) {
        Value u = Value::unit(ids.next());
        letters.push_back(i % 2 ? Value::inl(u) : Value::inr(u));
        inst.letters.push_back(encode(letters.back(), snoc.letter));
    }
    CHECK(decode(stream_fold(inst), snoc.state) == Value::seq(letters));
}

TEST_CASE("mixed tuple theory matches the final structure") {
    std::mt19937_64 rng(7);
    SuiteDelta d = delta_suite()[3];
    FoldInstance inst = random_instance(d, 6, rng);
    Structure final_ = naive_fold(inst);
    for (ElemId x : final_.universe()) {
        for (ElemId y : final_.universe()) {
            std::size_t ix = 0, iy = 0;
            for (std::size_t t = 0; t < inst.letters.size(); ++t) {
                if (inst.letters[t].contains(x)) ix = t + 1;
                if (inst.letters[t].contains(y)) iy = t + 1;
            }
            CHECK(mixed_tuple_theory(inst, {{ix, x}, {iy, y}}) == theory_of(final_, {x, y}));
        }
    }
}

TEST_CASE("validation") {
    std::mt19937_64 rng(1);
    SuiteDelta d = delta_suite().front();
    FoldInstance inst = random_instance(d, 3, rng);
    inst.letters.push_back(inst.letters.front());
    CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
    FoldInstance other = random_instance(delta_suite()[3], 2, rng);
    other.delta = d.delta;
    CHECK_THROWS_AS(other.validate(), VocabularyMismatch);
}

TEST_CASE("iteration equals repeated application") {
    std::mt19937_64 rng(12);
    for (const auto& e : endo_suite()) {
        for (int i = 0; i < 10; ++i) {
            LeafIdSource ids;
            Structure s = encode(random_sized_value(e.type, rng() % 6, rng, ids), e.type);
            std::uint64_t n = rng() % 13;
            Structure direct = s;
            for (std::uint64_t j = 0; j < n; ++j) direct = apply_interp(e.f, direct);
            CHECK(iterate_qf(e.f, s, n) == direct);
        }
    }
}

TEST_CASE("powers use logarithmically many compositions") {
    const auto suite = endo_suite();
    const auto& e = suite[2];
    LeafIdSource ids;
    std::mt19937_64 rng(3);
    Structure s = encode(random_sized_value(e.type, 4, rng, ids), e.type);
    IterateStats st;
    Structure r = iterate_qf(e.f, s, 1000000, &st);
    CHECK(st.compositions <= static_cast<std::size_t>(2 * std::log2(1e6)));
    CHECK(r == s);  // reverse and flip has period 2
}

TEST_CASE("theory transforms form a monoid") {
    const auto suite = endo_suite();
    const auto& e = suite.front();
    TheoryTable table(e.f, 1);
    LeafIdSource ids;
    std::mt19937_64 rng(4);
    Structure s = encode(random_sized_value(e.type, 3, rng, ids), e.type);
    std::vector<int> seeds;
    for (ElemId x : s.universe()) seeds.push_back(table.intern(theory_of(s, {x})));
    TheoryTransform f = TheoryTransform::of(table, seeds);
    TheoryTransform id = TheoryTransform::identity(f.size());
    CHECK(f.then(id) == f);
    CHECK(id.then(f) == f);
    CHECK(f.then(f).then(f) == f.then(f.then(f)));
    CHECK(f.power(5) == f.then(f).then(f).then(f).then(f));
}
