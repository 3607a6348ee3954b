#include "foldreg/types.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace foldreg {

struct Type::Node {
    TypeKind kind;
    std::vector<Type> kids;
    std::string name;
};

Type::Type() : node_(std::make_shared<const Node>(Node{TypeKind::Unit, {}, {}})) {}

Type Type::zero() { return Type(std::make_shared<const Node>(Node{TypeKind::Zero, {}, {}})); }
Type Type::unit() { return Type(); }
Type Type::prod(Type l, Type r) {
    return Type(std::make_shared<const Node>(Node{TypeKind::Prod, {std::move(l), std::move(r)}, {}}));
}
Type Type::coprod(Type l, Type r) {
    return Type(std::make_shared<const Node>(Node{TypeKind::CoProd, {std::move(l), std::move(r)}, {}}));
}
Type Type::list(Type e) { return Type(std::make_shared<const Node>(Node{TypeKind::List, {std::move(e)}, {}})); }
Type Type::bang(Type e) { return Type(std::make_shared<const Node>(Node{TypeKind::Bang, {std::move(e)}, {}})); }
Type Type::tree(Type e) { return Type(std::make_shared<const Node>(Node{TypeKind::Tree, {std::move(e)}, {}})); }
Type Type::var(std::string name) {
    return Type(std::make_shared<const Node>(Node{TypeKind::Var, {}, std::move(name)}));
}

TypeKind Type::kind() const { return node_->kind; }
const Type& Type::left() const {
    assert(node_->kids.size() == 2);
    return node_->kids[0];
}
const Type& Type::right() const {
    assert(node_->kids.size() == 2);
    return node_->kids[1];
}
const Type& Type::inner() const {
    assert(node_->kids.size() == 1);
    return node_->kids[0];
}
const std::string& Type::name() const { return node_->name; }

bool operator==(const Type& a, const Type& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_->kind != b.node_->kind || a.node_->name != b.node_->name) return false;
    const auto& ka = a.node_->kids;
    const auto& kb = b.node_->kids;
    if (ka.size() != kb.size()) return false;
    for (std::size_t i = 0; i < ka.size(); ++i)
        if (!(ka[i] == kb[i])) return false;
    return true;
}

int grade(const Type& t) {
    switch (t.kind()) {
    case TypeKind::Zero:
    case TypeKind::Unit:
    case TypeKind::Var: return 0;
    case TypeKind::Prod:
    case TypeKind::CoProd: return std::max(grade(t.left()), grade(t.right()));
    case TypeKind::List:
    case TypeKind::Tree: return grade(t.inner());
    case TypeKind::Bang: return 1 + grade(t.inner());
    }
    return 0;
}

Type bangs(int k, Type t) {
    for (int i = 0; i < k; ++i) t = Type::bang(std::move(t));
    return t;
}

Type unbang(const Type& t, int* count) {
    int n = 0;
    const Type* cur = &t;
    while (cur->is(TypeKind::Bang)) {
        cur = &cur->inner();
        ++n;
    }
    if (count) *count = n;
    return *cur;
}

namespace {

// Precedence levels: 1 coproduct, 2 product, 3 prefix bang, 4 postfix star, 5 atom.
int level(const Type& t) {
    switch (t.kind()) {
    case TypeKind::CoProd: return 1;
    case TypeKind::Prod: return 2;
    case TypeKind::Bang: return 3;
    case TypeKind::List: return 4;
    default: return 5;
    }
}

void print(std::ostream& os, const Type& t, int min_level) {
    const bool paren = level(t) < min_level;
    if (paren) os << '(';
    switch (t.kind()) {
    case TypeKind::Zero: os << '0'; break;
    case TypeKind::Unit: os << '1'; break;
    case TypeKind::Var: os << t.name(); break;
    case TypeKind::Prod:
        print(os, t.left(), 3);
        os << " × ";
        print(os, t.right(), 2);
        break;
    case TypeKind::CoProd:
        print(os, t.left(), 2);
        os << " + ";
        print(os, t.right(), 1);
        break;
    case TypeKind::List:
        print(os, t.inner(), 5);
        os << '*';
        break;
    case TypeKind::Bang:
        os << '!';
        // !(Σ*) keeps its parentheses so it is not read as (!Σ)*.
        print(os, t.inner(), t.inner().is(TypeKind::List) ? 5 : 3);
        break;
    case TypeKind::Tree:
        os << "T(";
        print(os, t.inner(), 0);
        os << ')';
        break;
    }
    if (paren) os << ')';
}

}  // namespace

std::string to_string(const Type& t) {
    std::ostringstream os;
    print(os, t, 0);
    return os.str();
}

std::string to_string(const FunctionType& f) { return to_string(f.dom) + " -> " + to_string(f.cod); }

std::string to_sexpr(const Type& t) {
    switch (t.kind()) {
    case TypeKind::Zero: return "(zero)";
    case TypeKind::Unit: return "(unit)";
    case TypeKind::Var: return t.name();
    case TypeKind::Prod: return "(prod " + to_sexpr(t.left()) + " " + to_sexpr(t.right()) + ")";
    case TypeKind::CoProd: return "(coprod " + to_sexpr(t.left()) + " " + to_sexpr(t.right()) + ")";
    case TypeKind::List: return "(list " + to_sexpr(t.inner()) + ")";
    case TypeKind::Bang: return "(bang " + to_sexpr(t.inner()) + ")";
    case TypeKind::Tree: return "(tree " + to_sexpr(t.inner()) + ")";
    }
    return {};
}

bool is_dnf(const Type& t) {
    switch (t.kind()) {
    case TypeKind::Prod:
        if (t.left().is(TypeKind::CoProd) || t.right().is(TypeKind::CoProd)) return false;
        return is_dnf(t.left()) && is_dnf(t.right());
    case TypeKind::CoProd: return is_dnf(t.left()) && is_dnf(t.right());
    case TypeKind::Bang:
        if (t.inner().is(TypeKind::CoProd)) return false;
        return is_dnf(t.inner());
    case TypeKind::List:
    case TypeKind::Tree: return is_dnf(t.inner());
    default: return true;
    }
}

bool has_var(const Type& t) {
    switch (t.kind()) {
    case TypeKind::Var: return true;
    case TypeKind::Prod:
    case TypeKind::CoProd: return has_var(t.left()) || has_var(t.right());
    case TypeKind::List:
    case TypeKind::Bang:
    case TypeKind::Tree: return has_var(t.inner());
    default: return false;
    }
}

Type context_type(const Type& label) {
    const Type tr = Type::tree(label);
    return Type::list(Type::coprod(Type::prod(tr, label), Type::prod(label, tr)));
}

Type right_coprod(const std::vector<Type>& parts) {
    if (parts.empty()) return Type::zero();
    Type acc = parts.back();
    for (std::size_t i = parts.size() - 1; i-- > 0;) acc = Type::coprod(parts[i], acc);
    return acc;
}

Type right_prod(const std::vector<Type>& parts) {
    if (parts.empty()) return Type::unit();
    Type acc = parts.back();
    for (std::size_t i = parts.size() - 1; i-- > 0;) acc = Type::prod(parts[i], acc);
    return acc;
}

Type finite_type(int n) {
    if (n <= 0) return Type::zero();
    return right_coprod(std::vector<Type>(static_cast<std::size_t>(n), Type::unit()));
}

// ---------------------------------------------------------------- values

struct Value::Node {
    ValueKind kind;
    LeafId id;
    std::vector<Value> kids;
};

Value::Value() : node_(std::make_shared<const Node>(Node{ValueKind::Unit, 0, {}})) {}

Value Value::zero() { return Value(std::make_shared<const Node>(Node{ValueKind::Zero, 0, {}})); }
Value Value::unit(LeafId id) { return Value(std::make_shared<const Node>(Node{ValueKind::Unit, id, {}})); }
Value Value::pair(Value a, Value b) {
    return Value(std::make_shared<const Node>(Node{ValueKind::Pair, 0, {std::move(a), std::move(b)}}));
}
Value Value::inl(Value a) { return Value(std::make_shared<const Node>(Node{ValueKind::InL, 0, {std::move(a)}})); }
Value Value::inr(Value a) { return Value(std::make_shared<const Node>(Node{ValueKind::InR, 0, {std::move(a)}})); }
Value Value::seq(std::vector<Value> items) {
    return Value(std::make_shared<const Node>(Node{ValueKind::Seq, 0, std::move(items)}));
}
Value Value::bang(Value a) { return Value(std::make_shared<const Node>(Node{ValueKind::Bang, 0, {std::move(a)}})); }
Value Value::leaf() { return Value(std::make_shared<const Node>(Node{ValueKind::Leaf, 0, {}})); }
Value Value::node(Value l, Value label, Value r) {
    return Value(
        std::make_shared<const Node>(Node{ValueKind::Node, 0, {std::move(l), std::move(label), std::move(r)}}));
}

ValueKind Value::kind() const { return node_->kind; }
LeafId Value::id() const { return node_->id; }
const Value& Value::first() const { return node_->kids.at(0); }
const Value& Value::second() const { return node_->kids.at(1); }
const Value& Value::inner() const { return node_->kids.at(0); }
const std::vector<Value>& Value::items() const { return node_->kids; }
const Value& Value::left() const { return node_->kids.at(0); }
const Value& Value::label() const { return node_->kids.at(1); }
const Value& Value::right() const { return node_->kids.at(2); }

namespace {

template <bool WithIds>
bool equal_impl(const Value& a, const Value& b) {
    if (a.kind() != b.kind()) return false;
    if (a.kind() == ValueKind::Unit) return !WithIds || a.id() == b.id();
    const auto& ka = a.items();
    const auto& kb = b.items();
    if (ka.size() != kb.size()) return false;
    for (std::size_t i = 0; i < ka.size(); ++i)
        if (!equal_impl<WithIds>(ka[i], kb[i])) return false;
    return true;
}

}  // namespace

bool operator==(const Value& a, const Value& b) { return a.node_ == b.node_ || equal_impl<true>(a, b); }
bool same_shape(const Value& a, const Value& b) { return equal_impl<false>(a, b); }

namespace {

void collect_ids(const Value& v, std::vector<LeafId>& out) {
    if (v.is(ValueKind::Unit)) {
        out.push_back(v.id());
        return;
    }
    for (const auto& k : v.items()) collect_ids(k, out);
}

}  // namespace

std::vector<LeafId> leaf_ids(const Value& v) {
    std::vector<LeafId> out;
    collect_ids(v, out);
    return out;
}

std::size_t leaf_count(const Value& v) {
    if (v.is(ValueKind::Unit)) return 1;
    std::size_t n = 0;
    for (const auto& k : v.items()) n += leaf_count(k);
    return n;
}

Value renumber(const Value& v, LeafIdSource& ids) {
    switch (v.kind()) {
    case ValueKind::Zero:
    case ValueKind::Leaf: return v;
    case ValueKind::Unit: return Value::unit(ids.next());
    case ValueKind::Pair: {
        Value a = renumber(v.first(), ids);
        return Value::pair(std::move(a), renumber(v.second(), ids));
    }
    case ValueKind::InL: return Value::inl(renumber(v.inner(), ids));
    case ValueKind::InR: return Value::inr(renumber(v.inner(), ids));
    case ValueKind::Bang: return Value::bang(renumber(v.inner(), ids));
    case ValueKind::Seq: {
        std::vector<Value> items;
        items.reserve(v.items().size());
        for (const auto& it : v.items()) items.push_back(renumber(it, ids));
        return Value::seq(std::move(items));
    }
    case ValueKind::Node: {
        Value l = renumber(v.left(), ids);
        Value a = renumber(v.label(), ids);
        return Value::node(std::move(l), std::move(a), renumber(v.right(), ids));
    }
    }
    return v;
}

bool typecheck_value(const Value& v, const Type& t) {
    switch (t.kind()) {
    case TypeKind::Var: return true;
    case TypeKind::Zero: return v.is(ValueKind::Zero);
    case TypeKind::Unit: return v.is(ValueKind::Unit);
    case TypeKind::Prod:
        return v.is(ValueKind::Pair) && typecheck_value(v.first(), t.left()) && typecheck_value(v.second(), t.right());
    case TypeKind::CoProd:
        if (v.is(ValueKind::InL)) return typecheck_value(v.inner(), t.left());
        if (v.is(ValueKind::InR)) return typecheck_value(v.inner(), t.right());
        return false;
    case TypeKind::List:
        if (!v.is(ValueKind::Seq)) return false;
        return std::all_of(v.items().begin(), v.items().end(),
                           [&](const Value& it) { return typecheck_value(it, t.inner()); });
    case TypeKind::Bang: return v.is(ValueKind::Bang) && typecheck_value(v.inner(), t.inner());
    case TypeKind::Tree: {
        // Iterative along the right spine keeps deep right combs cheap on the stack.
        const Value* cur = &v;
        while (cur->is(ValueKind::Node)) {
            if (!typecheck_value(cur->left(), t) || !typecheck_value(cur->label(), t.inner())) return false;
            cur = &cur->right();
        }
        return cur->is(ValueKind::Leaf);
    }
    }
    return false;
}

// ---------------------------------------------------------------- text form

ParseError::ParseError(std::size_t pos, const std::string& msg)
    : std::runtime_error("at position " + std::to_string(pos) + ": " + msg), pos_(pos) {}

namespace {

void write(std::ostream& os, const Value& v) {
    switch (v.kind()) {
    case ValueKind::Zero: os << '0'; break;
    case ValueKind::Unit: os << "()"; break;
    case ValueKind::Pair:
        os << '(';
        write(os, v.first());
        os << ',';
        write(os, v.second());
        os << ')';
        break;
    case ValueKind::InL:
        os << '<';
        write(os, v.inner());
        break;
    case ValueKind::InR:
        os << '>';
        write(os, v.inner());
        break;
    case ValueKind::Bang:
        os << '!';
        write(os, v.inner());
        break;
    case ValueKind::Seq: {
        os << '[';
        bool first = true;
        for (const auto& it : v.items()) {
            if (!first) os << ',';
            first = false;
            write(os, it);
        }
        os << ']';
        break;
    }
    case ValueKind::Leaf: os << '.'; break;
    case ValueKind::Node:
        os << '(';
        write(os, v.left());
        os << ' ';
        write(os, v.label());
        os << ' ';
        write(os, v.right());
        os << ')';
        break;
    }
}

class ValueParser {
public:
    ValueParser(std::string_view s, LeafIdSource& ids) : s_(s), ids_(ids) {}

    Value parse_all(const Type& t) {
        Value v = parse(t);
        skip();
        if (pos_ != s_.size()) fail("trailing input after value");
        return v;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
    LeafIdSource& ids_;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

    void skip() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r'))
            ++pos_;
    }
    char peek() {
        skip();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    void expect(char c, const Type& t) {
        if (peek() != c)
            fail(std::string("expected '") + c + "' in a value of type " + to_string(t) + found());
        ++pos_;
    }
    std::string found() const {
        if (pos_ >= s_.size()) return ", found end of input";
        return std::string(", found '") + s_[pos_] + "'";
    }

    Value parse_unit(const Type& t) {
        char c = peek();
        if (c == '1') {
            ++pos_;
            return Value::unit(ids_.next());
        }
        expect('(', t);
        expect(')', t);
        return Value::unit(ids_.next());
    }

    Value parse(const Type& t) {
        switch (t.kind()) {
        case TypeKind::Unit: return parse_unit(t);
        case TypeKind::Zero: expect('0', t); return Value::zero();
        case TypeKind::Prod: {
            expect('(', t);
            Value a = parse(t.left());
            expect(',', t);
            Value b = parse(t.right());
            expect(')', t);
            return Value::pair(std::move(a), std::move(b));
        }
        case TypeKind::CoProd: {
            char c = peek();
            if (c == '<') {
                ++pos_;
                return Value::inl(parse(t.left()));
            }
            if (c == '>') {
                ++pos_;
                return Value::inr(parse(t.right()));
            }
            fail("expected '<' or '>' in a value of type " + to_string(t) + found());
        }
        case TypeKind::List: {
            expect('[', t);
            std::vector<Value> items;
            if (peek() == ']') {
                ++pos_;
                return Value::seq({});
            }
            for (;;) {
                items.push_back(parse(t.inner()));
                char c = peek();
                if (c == ',') {
                    ++pos_;
                    continue;
                }
                if (c == ']') {
                    ++pos_;
                    break;
                }
                fail("expected ',' or ']' in a value of type " + to_string(t) + found());
            }
            return Value::seq(std::move(items));
        }
        case TypeKind::Bang: expect('!', t); return Value::bang(parse(t.inner()));
        case TypeKind::Tree: {
            if (peek() == '.') {
                ++pos_;
                return Value::leaf();
            }
            expect('(', t);
            Value l = parse(t);
            Value a = parse(t.inner());
            Value r = parse(t);
            expect(')', t);
            return Value::node(std::move(l), std::move(a), std::move(r));
        }
        case TypeKind::Var: return parse_untyped(t);
        }
        fail("unsupported type");
    }

    Value parse_untyped(const Type& t) {
        char c = peek();
        switch (c) {
        case '1': ++pos_; return Value::unit(ids_.next());
        case '0': ++pos_; return Value::zero();
        case '<': ++pos_; return Value::inl(parse_untyped(t));
        case '>': ++pos_; return Value::inr(parse_untyped(t));
        case '!': ++pos_; return Value::bang(parse_untyped(t));
        case '.': ++pos_; return Value::leaf();
        case '[': {
            ++pos_;
            std::vector<Value> items;
            if (peek() == ']') {
                ++pos_;
                return Value::seq({});
            }
            for (;;) {
                items.push_back(parse_untyped(t));
                char d = peek();
                if (d == ',') {
                    ++pos_;
                    continue;
                }
                if (d == ']') {
                    ++pos_;
                    break;
                }
                fail("expected ',' or ']'" + found());
            }
            return Value::seq(std::move(items));
        }
        case '(': {
            ++pos_;
            if (peek() == ')') {
                ++pos_;
                return Value::unit(ids_.next());
            }
            Value a = parse_untyped(t);
            if (peek() == ',') {
                ++pos_;
                Value b = parse_untyped(t);
                expect(')', t);
                return Value::pair(std::move(a), std::move(b));
            }
            Value label = parse_untyped(t);
            Value r = parse_untyped(t);
            expect(')', t);
            return Value::node(std::move(a), std::move(label), std::move(r));
        }
        default: fail("expected a value of type " + to_string(t) + found());
        }
    }
};

}  // namespace

std::string serialize(const Value& v) {
    std::ostringstream os;
    write(os, v);
    return os.str();
}

std::string serialize(const Value& v, const Type& t) {
    if (!typecheck_value(v, t)) throw std::invalid_argument("value does not inhabit " + to_string(t));
    return serialize(v);
}

Value parse_value(std::string_view text, const Type& t, LeafIdSource& ids) {
    return ValueParser(text, ids).parse_all(t);
}

Value parse_value(std::string_view text, const Type& t) {
    LeafIdSource ids;
    return parse_value(text, t, ids);
}

Value default_value(const Type& t, LeafIdSource& ids) {
    switch (t.kind()) {
    case TypeKind::Zero: return Value::zero();
    case TypeKind::Unit:
    case TypeKind::Var: return Value::unit(ids.next());
    case TypeKind::Prod: {
        Value a = default_value(t.left(), ids);
        return Value::pair(std::move(a), default_value(t.right(), ids));
    }
    case TypeKind::CoProd: return Value::inl(default_value(t.left(), ids));
    case TypeKind::List: return Value::seq({});
    case TypeKind::Bang: return Value::bang(default_value(t.inner(), ids));
    case TypeKind::Tree: return Value::leaf();
    }
    return Value::zero();
}

Value load_total(std::string_view text, const Type& t, LeafIdSource& ids) {
    LeafIdSource attempt = ids;
    try {
        Value v = parse_value(text, t, attempt);
        ids = attempt;
        return v;
    } catch (const ParseError&) {
        return default_value(t, ids);
    }
}

// ---------------------------------------------------------------- random

namespace {

std::size_t min_leaves(const Type& t) {
    switch (t.kind()) {
    case TypeKind::Unit:
    case TypeKind::Var: return 1;
    case TypeKind::Prod: return min_leaves(t.left()) + min_leaves(t.right());
    case TypeKind::CoProd: return std::min(min_leaves(t.left()), min_leaves(t.right()));
    case TypeKind::Bang: return min_leaves(t.inner());
    default: return 0;
    }
}

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Value gen(const Type& t, std::mt19937_64& rng, std::size_t budget, LeafIdSource& ids);

Value gen_tree(const Type& t, std::size_t nodes, std::mt19937_64& rng, std::size_t label_budget,
               LeafIdSource& ids) {
    if (nodes == 0) return Value::leaf();
    const std::size_t left = uniform(rng, 0, nodes - 1);
    Value l = gen_tree(t, left, rng, label_budget, ids);
    Value a = gen(t.inner(), rng, label_budget, ids);
    Value r = gen_tree(t, nodes - 1 - left, rng, label_budget, ids);
    return Value::node(std::move(l), std::move(a), std::move(r));
}

Value gen(const Type& t, std::mt19937_64& rng, std::size_t budget, LeafIdSource& ids) {
    switch (t.kind()) {
    case TypeKind::Zero: return Value::zero();
    case TypeKind::Unit:
    case TypeKind::Var: return Value::unit(ids.next());
    case TypeKind::Prod: {
        const std::size_t half = budget / 2;
        Value a = gen(t.left(), rng, half, ids);
        return Value::pair(std::move(a), gen(t.right(), rng, budget - half, ids));
    }
    case TypeKind::CoProd: {
        bool go_left = uniform(rng, 0, 1) == 0;
        const bool left_ok = min_leaves(t.left()) <= budget;
        const bool right_ok = min_leaves(t.right()) <= budget;
        if (go_left && !left_ok && right_ok) go_left = false;
        if (!go_left && !right_ok && left_ok) go_left = true;
        return go_left ? Value::inl(gen(t.left(), rng, budget, ids)) : Value::inr(gen(t.right(), rng, budget, ids));
    }
    case TypeKind::Bang: return Value::bang(gen(t.inner(), rng, budget, ids));
    case TypeKind::List: {
        const std::size_t per = std::max<std::size_t>(1, min_leaves(t.inner()) + 1);
        const std::size_t max_len = std::min<std::size_t>(budget / per, 12);
        const std::size_t n = uniform(rng, 0, max_len);
        std::vector<Value> items;
        items.reserve(n);
        const std::size_t share = n ? std::max<std::size_t>(per, budget / n) : 0;
        for (std::size_t i = 0; i < n; ++i) items.push_back(gen(t.inner(), rng, share, ids));
        return Value::seq(std::move(items));
    }
    case TypeKind::Tree: {
        const std::size_t per = std::max<std::size_t>(1, min_leaves(t.inner()) + 1);
        const std::size_t n = uniform(rng, 0, std::min<std::size_t>(budget / per, 12));
        return gen_tree(t, n, rng, per, ids);
    }
    }
    return Value::zero();
}

}  // namespace

Value random_value(const Type& t, std::mt19937_64& rng, std::size_t max_leaves, LeafIdSource& ids) {
    return gen(t, rng, max_leaves, ids);
}

Value random_sized_value(const Type& t, std::size_t length, std::mt19937_64& rng, LeafIdSource& ids) {
    switch (t.kind()) {
    case TypeKind::Bang: return Value::bang(random_sized_value(t.inner(), length, rng, ids));
    case TypeKind::Prod: {
        Value a = random_sized_value(t.left(), length, rng, ids);
        return Value::pair(std::move(a), gen(t.right(), rng, 2, ids));
    }
    case TypeKind::List: {
        std::vector<Value> items;
        items.reserve(length);
        const std::size_t per = std::max<std::size_t>(1, min_leaves(t.inner()));
        for (std::size_t i = 0; i < length; ++i) items.push_back(gen(t.inner(), rng, per, ids));
        return Value::seq(std::move(items));
    }
    case TypeKind::Tree: return gen_tree(t, length, rng, std::max<std::size_t>(1, min_leaves(t.inner())), ids);
    default: return gen(t, rng, length, ids);
    }
}

Type random_type(std::mt19937_64& rng, int depth, bool allow_bang) {
    if (depth <= 0) return uniform(rng, 0, 5) == 0 ? Type::zero() : Type::unit();
    switch (uniform(rng, 0, allow_bang ? 5 : 4)) {
    case 0: return Type::unit();
    case 1: {
        Type a = random_type(rng, depth - 1, allow_bang);
        return Type::prod(std::move(a), random_type(rng, depth - 1, allow_bang));
    }
    case 2:
    case 3: {
        Type a = random_type(rng, depth - 1, allow_bang);
        return Type::coprod(std::move(a), random_type(rng, depth - 1, allow_bang));
    }
    case 4: return Type::list(random_type(rng, depth - 1, allow_bang));
    default: return Type::bang(random_type(rng, depth - 1, allow_bang));
    }
}

// ---------------------------------------------------------------- finite

bool is_finite(const Type& t) {
    switch (t.kind()) {
    case TypeKind::Zero:
    case TypeKind::Unit: return true;
    case TypeKind::Prod:
    case TypeKind::CoProd: return is_finite(t.left()) && is_finite(t.right());
    case TypeKind::Bang: return is_finite(t.inner());
    default: return false;
    }
}

std::size_t finite_size(const Type& t) {
    switch (t.kind()) {
    case TypeKind::Zero:
    case TypeKind::Unit: return 1;
    case TypeKind::Prod: return finite_size(t.left()) * finite_size(t.right());
    case TypeKind::CoProd: return finite_size(t.left()) + finite_size(t.right());
    case TypeKind::Bang: return finite_size(t.inner());
    default: throw std::invalid_argument("type is not finite: " + to_string(t));
    }
}

std::size_t finite_index(const Value& v, const Type& t) {
    switch (t.kind()) {
    case TypeKind::Zero:
    case TypeKind::Unit: return 0;
    case TypeKind::Prod: return finite_index(v.first(), t.left()) * finite_size(t.right()) + finite_index(v.second(), t.right());
    case TypeKind::CoProd:
        if (v.is(ValueKind::InL)) return finite_index(v.inner(), t.left());
        return finite_size(t.left()) + finite_index(v.inner(), t.right());
    case TypeKind::Bang: return finite_index(v.inner(), t.inner());
    default: throw std::invalid_argument("no element index in type " + to_string(t));
    }
}

Value finite_element(const Type& t, std::size_t index, LeafIdSource& ids) {
    switch (t.kind()) {
    case TypeKind::Zero: return Value::zero();
    case TypeKind::Unit: return Value::unit(ids.next());
    case TypeKind::Prod: {
        const std::size_t r = finite_size(t.right());
        Value a = finite_element(t.left(), index / r, ids);
        return Value::pair(std::move(a), finite_element(t.right(), index % r, ids));
    }
    case TypeKind::CoProd: {
        const std::size_t l = finite_size(t.left());
        if (index < l) return Value::inl(finite_element(t.left(), index, ids));
        return Value::inr(finite_element(t.right(), index - l, ids));
    }
    case TypeKind::Bang: return Value::bang(finite_element(t.inner(), index, ids));
    default: throw std::invalid_argument("no element index in type " + to_string(t));
    }
}

}  // namespace foldreg
