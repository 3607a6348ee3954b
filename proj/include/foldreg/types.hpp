#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace foldreg {

enum class TypeKind { Zero, Unit, Prod, CoProd, List, Bang, Tree, Var };

// Immutable graded list type. Copies share structure.
class Type {
public:
    Type();  // Unit

    static Type zero();
    static Type unit();
    static Type prod(Type left, Type right);
    static Type coprod(Type left, Type right);
    static Type list(Type elem);
    static Type bang(Type inner);
    static Type tree(Type label);
    // Opaque type atom, written with a bare symbol such as Σ.
    static Type var(std::string name);

    TypeKind kind() const;
    const Type& left() const;
    const Type& right() const;
    // Child of a List, Bang or Tree node.
    const Type& inner() const;
    const std::string& name() const;

    bool is(TypeKind k) const { return kind() == k; }

    friend bool operator==(const Type& a, const Type& b);
    friend bool operator!=(const Type& a, const Type& b) { return !(a == b); }

private:
    struct Node;
    explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

struct FunctionType {
    Type dom;
    Type cod;
    friend bool operator==(const FunctionType&, const FunctionType&) = default;
};

int grade(const Type& t);
Type bangs(int k, Type t);
// Strips up to k leading bangs; returns the number actually stripped via count.
Type unbang(const Type& t, int* count = nullptr);

// Pretty form: 1, 0, A × B, A + B, Σ*, !Σ, T(Σ).
std::string to_string(const Type& t);
std::string to_string(const FunctionType& f);
// S-expression form used by term files.
std::string to_sexpr(const Type& t);

// No Prod or Bang node has a CoProd child.
bool is_dnf(const Type& t);
bool has_var(const Type& t);

// The context type (TΣ × Σ + Σ × TΣ)*.
Type context_type(const Type& label);

// Right-nested coproduct of n units, n >= 1.
Type finite_type(int n);
Type right_coprod(const std::vector<Type>& parts);
Type right_prod(const std::vector<Type>& parts);

// ---------------------------------------------------------------- values

using LeafId = std::uint64_t;

enum class ValueKind { Zero, Unit, Pair, InL, InR, Seq, Bang, Leaf, Node };

class Value {
public:
    Value();  // unit leaf with id 0

    static Value zero();
    static Value unit(LeafId id);
    static Value pair(Value first, Value second);
    static Value inl(Value inner);
    static Value inr(Value inner);
    static Value seq(std::vector<Value> items);
    static Value bang(Value inner);
    static Value leaf();
    static Value node(Value left, Value label, Value right);

    ValueKind kind() const;
    LeafId id() const;
    const Value& first() const;
    const Value& second() const;
    // Child of InL, InR, Bang.
    const Value& inner() const;
    const std::vector<Value>& items() const;
    const Value& left() const;
    const Value& label() const;
    const Value& right() const;

    bool is(ValueKind k) const { return kind() == k; }

    // Exact equality, leaf ids included.
    friend bool operator==(const Value& a, const Value& b);
    friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

private:
    struct Node;
    explicit Value(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

// Equality up to leaf renaming.
bool same_shape(const Value& a, const Value& b);
std::vector<LeafId> leaf_ids(const Value& v);
std::size_t leaf_count(const Value& v);

class LeafIdSource {
public:
    explicit LeafIdSource(LeafId first = 1) : next_(first) {}
    LeafId next() { return next_++; }
    LeafId peek() const { return next_; }

private:
    LeafId next_;
};

// Copy of v with fresh leaf ids in left-to-right order.
Value renumber(const Value& v, LeafIdSource& ids);

bool typecheck_value(const Value& v, const Type& t);

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t pos, const std::string& msg);
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

std::string serialize(const Value& v);
// Checks typecheck_value first; throws std::invalid_argument otherwise.
std::string serialize(const Value& v, const Type& t);
Value parse_value(std::string_view text, const Type& t, LeafIdSource& ids);
Value parse_value(std::string_view text, const Type& t);
// Total variant: ill-formatted text maps to default_value(t).
Value load_total(std::string_view text, const Type& t, LeafIdSource& ids);
Value default_value(const Type& t, LeafIdSource& ids);

// Random inhabitant; list lengths bounded so the value stays near max_leaves.
Value random_value(const Type& t, std::mt19937_64& rng, std::size_t max_leaves, LeafIdSource& ids);
// Random inhabitant of t with exactly `length` items in the outermost list
// (looking through bangs); other lists are short.
Value random_sized_value(const Type& t, std::size_t length, std::mt19937_64& rng, LeafIdSource& ids);
Type random_type(std::mt19937_64& rng, int depth, bool allow_bang);

// Finite types (no lists, trees, vars). Elements are numbered in mixed radix:
// inl block first, then inr; for products the first component varies slowest.
bool is_finite(const Type& t);
std::size_t finite_size(const Type& t);
std::size_t finite_index(const Value& v, const Type& t);
Value finite_element(const Type& t, std::size_t index, LeafIdSource& ids);

}  // namespace foldreg
