#include "foldreg/trees.hpp"

#include <algorithm>
#include <stdexcept>

#include "foldreg/eval.hpp"

namespace foldreg {

std::string to_string(WilkeOp op) {
    switch (op) {
    case WilkeOp::Construct: return "tree-cons";
    case WilkeOp::ReplaceHole: return "replace-hole";
    case WilkeOp::ComposeContexts: return "ctx-compose";
    case WilkeOp::CreateContext: return "ctx-create";
    }
    return "?";
}

PrimeOp prime_of(WilkeOp op) {
    switch (op) {
    case WilkeOp::Construct: return PrimeOp::TreeCons;
    case WilkeOp::ReplaceHole: return PrimeOp::ReplaceHole;
    case WilkeOp::ComposeContexts: return PrimeOp::CtxCompose;
    case WilkeOp::CreateContext: return PrimeOp::CtxCreate;
    }
    return PrimeOp::TreeCons;
}

Value wilke(WilkeOp op, const Value& args, const Type& label) {
    Term t = Term::prime(to_string(op), {label});
    FunctionType ft = type_of(t, SystemFlavor{Flavor::QuantifierFree, true});
    if (!typecheck_value(args, ft.dom))
        throw std::invalid_argument(to_string(op) + ": arguments do not have type " + to_string(ft.dom));
    return eval_unchecked(t, args);
}

Value tree_node(const Value& left, const Value& label, const Value& right) {
    return Value::node(left, label, right);
}

Value replace_hole(const Value& context, const Value& tree) {
    Value cur = tree;
    const auto& steps = context.items();
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        const Value& p = it->inner();
        if (it->is(ValueKind::InL)) cur = Value::node(p.first(), p.second(), cur);
        else cur = Value::node(cur, p.first(), p.second());
    }
    return cur;
}

Value compose_contexts(const Value& outer, const Value& inner) {
    std::vector<Value> steps = outer.items();
    steps.insert(steps.end(), inner.items().begin(), inner.items().end());
    return Value::seq(std::move(steps));
}

Value hole_right(const Value& left_tree, const Value& label) {
    return Value::seq({Value::inl(Value::pair(left_tree, label))});
}

Value hole_left(const Value& label, const Value& right_tree) {
    return Value::seq({Value::inr(Value::pair(label, right_tree))});
}

std::size_t tree_size(const Value& t) {
    std::size_t n = 0;
    std::vector<const Value*> stack{&t};
    while (!stack.empty()) {
        const Value* v = stack.back();
        stack.pop_back();
        if (!v->is(ValueKind::Node)) continue;
        ++n;
        stack.push_back(&v->left());
        stack.push_back(&v->right());
    }
    return n;
}

std::size_t tree_depth(const Value& t) {
    std::size_t best = 0;
    std::vector<std::pair<const Value*, std::size_t>> stack{{&t, 0}};
    while (!stack.empty()) {
        auto [v, d] = stack.back();
        stack.pop_back();
        if (!v->is(ValueKind::Node)) {
            best = std::max(best, d);
            continue;
        }
        stack.push_back({&v->left(), d + 1});
        stack.push_back({&v->right(), d + 1});
    }
    return best;
}

std::vector<Value> infix_labels(const Value& t) {
    std::vector<Value> out;
    std::vector<const Value*> stack;
    const Value* cur = &t;
    while (cur->is(ValueKind::Node) || !stack.empty()) {
        while (cur->is(ValueKind::Node)) {
            stack.push_back(cur);
            cur = &cur->left();
        }
        const Value* n = stack.back();
        stack.pop_back();
        out.push_back(n->label());
        cur = &n->right();
    }
    return out;
}

Value left_comb(const Value& list) {
    Value t = Value::leaf();
    for (const auto& a : list.items()) t = Value::node(t, a, Value::leaf());
    return t;
}

Value random_tree(const Type& label, std::size_t nodes, std::mt19937_64& rng, LeafIdSource& ids) {
    return random_sized_value(Type::tree(label), nodes, rng, ids);
}

Value random_context(const Type& label, std::size_t steps, std::size_t max_subtree, std::mt19937_64& rng,
                     LeafIdSource& ids) {
    std::vector<Value> out;
    std::uniform_int_distribution<std::size_t> size(0, max_subtree);
    for (std::size_t i = 0; i < steps; ++i) {
        bool right_hole = std::uniform_int_distribution<int>(0, 1)(rng) == 0;
        Value sub = random_tree(label, size(rng), rng, ids);
        Value a = random_value(label, rng, 2, ids);
        out.push_back(right_hole ? Value::inl(Value::pair(sub, a)) : Value::inr(Value::pair(a, sub)));
    }
    return Value::seq(std::move(out));
}

}  // namespace foldreg
