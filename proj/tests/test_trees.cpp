#include <doctest.h>

#include <random>

#include "foldreg/eval.hpp"
#include "foldreg/trees.hpp"

using namespace foldreg;

namespace {
Type label() { return finite_type(2); }
}  // namespace

TEST_CASE("tree shape helpers") {
    Value a = Value::inl(Value::unit(1)), b = Value::inr(Value::unit(2));
    Value t = tree_node(tree_node(Value::leaf(), a, Value::leaf()), b, Value::leaf());
    CHECK(tree_size(t) == 2);
    CHECK(tree_depth(t) == 2);
    CHECK(infix_labels(t) == std::vector<Value>{a, b});
    Value comb = left_comb(Value::seq({a, b}));
    CHECK(tree_size(comb) == 2);
    CHECK(infix_labels(comb) == std::vector<Value>{a, b});
}

TEST_CASE("hole plugging") {
    Value a = Value::inl(Value::unit(1));
    Value ctx = hole_right(Value::leaf(), a);
    Value t = replace_hole(ctx, Value::leaf());
    CHECK(t == tree_node(Value::leaf(), a, Value::leaf()));
    CHECK(replace_hole(Value::seq({}), t) == t);
}

TEST_CASE("composition is coherent with replacement") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 100; ++i) {
        LeafIdSource ids;
        Value c1 = random_context(label(), rng() % 4, 4, rng, ids);
        Value c2 = random_context(label(), rng() % 4, 4, rng, ids);
        Value t = random_tree(label(), rng() % 6, rng, ids);
        CHECK(replace_hole(compose_contexts(c1, c2), t) == replace_hole(c1, replace_hole(c2, t)));
    }
}

TEST_CASE("wilke primes agree with the direct versions") {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 50; ++i) {
        LeafIdSource ids;
        Value c1 = random_context(label(), rng() % 4, 4, rng, ids);
        Value c2 = random_context(label(), rng() % 4, 4, rng, ids);
        Value t = random_tree(label(), rng() % 6, rng, ids);
        CHECK(wilke(WilkeOp::ReplaceHole, Value::pair(c1, t), label()) == replace_hole(c1, t));
        CHECK(wilke(WilkeOp::ComposeContexts, Value::pair(c1, c2), label()) == compose_contexts(c1, c2));
    }
    CHECK_THROWS_AS(wilke(WilkeOp::ReplaceHole, Value::unit(1), label()), std::invalid_argument);
}

TEST_CASE("random trees have the requested size") {
    std::mt19937_64 rng(1);
    LeafIdSource ids;
    for (std::size_t n : {0u, 1u, 10u, 60u}) CHECK(tree_size(random_tree(label(), n, rng, ids)) == n);
}
