#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "foldreg/calculus.hpp"
#include "foldreg/types.hpp"

namespace foldreg {

// Contexts are lists of steps from the root down to the hole. A step
// inl (t, a) is a node labelled a with left subtree t and the hole on the
// right; inr (a, t) has the hole on the left.

enum class WilkeOp { Construct, ReplaceHole, ComposeContexts, CreateContext };

std::string to_string(WilkeOp op);
PrimeOp prime_of(WilkeOp op);

// Checks args against the prime's domain for the given label type, then
// applies it. Throws std::invalid_argument on a type mismatch.
Value wilke(WilkeOp op, const Value& args, const Type& label);

// Direct versions without type checks.
Value tree_node(const Value& left, const Value& label, const Value& right);
Value replace_hole(const Value& context, const Value& tree);
Value compose_contexts(const Value& outer, const Value& inner);
Value hole_right(const Value& left_tree, const Value& label);
Value hole_left(const Value& label, const Value& right_tree);

std::size_t tree_size(const Value& t);   // internal nodes
std::size_t tree_depth(const Value& t);  // 0 for a leaf
// Labels in document (infix) order.
std::vector<Value> infix_labels(const Value& t);

// [a1..an] becomes the comb whose i-th node has the (i-1)-th comb on the left
// and a leaf on the right.
Value left_comb(const Value& list);

Value random_tree(const Type& label, std::size_t nodes, std::mt19937_64& rng, LeafIdSource& ids);
Value random_context(const Type& label, std::size_t steps, std::size_t max_subtree, std::mt19937_64& rng,
                     LeafIdSource& ids);

}  // namespace foldreg
