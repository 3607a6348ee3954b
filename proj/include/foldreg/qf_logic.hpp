#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "foldreg/structures.hpp"

namespace foldreg {

enum class FormulaKind { True, False, Atom, Eq, Not, And, Or };

// Quantifier-free formula. Variables are 0-based internally and print as x1, x2, ...
class Formula {
public:
    Formula();  // true

    static Formula truth();
    static Formula falsity();
    static Formula atom(std::string relation, std::vector<int> vars);
    static Formula eq(int a, int b);
    // The builders below fold boolean constants and flatten nested connectives.
    static Formula negate(Formula f);
    static Formula conj(std::vector<Formula> parts);
    static Formula disj(std::vector<Formula> parts);
    static Formula conj(Formula a, Formula b) { return conj(std::vector<Formula>{std::move(a), std::move(b)}); }
    static Formula disj(Formula a, Formula b) { return disj(std::vector<Formula>{std::move(a), std::move(b)}); }

    FormulaKind kind() const;
    const std::string& relation() const;
    const std::vector<int>& vars() const;
    const std::vector<Formula>& children() const;

    bool is(FormulaKind k) const { return kind() == k; }

private:
    struct Node;
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

std::string to_string(const Formula& f);
Formula parse_formula(std::string_view text);
// Largest variable index used, or -1.
int max_var(const Formula& f);
// Replaces every atom R(xs) by atom_map(R, xs) and every equality by eq_map.
Formula substitute(const Formula& f,
                   const std::function<Formula(const std::string&, const std::vector<int>&)>& atom_map,
                   const std::function<Formula(int, int)>& eq_map);
// Renames variables: variable i becomes vars[i].
Formula rename_vars(const Formula& f, const std::vector<int>& vars);

// Formula with relation names resolved against a vocabulary, evaluated against
// any oracle providing atom(rel, args) and eq(a, b).
class CompiledFormula {
public:
    CompiledFormula() = default;
    CompiledFormula(const Formula& f, const Vocabulary& vocab);

    template <class Oracle>
    bool eval(const Oracle& o) const {
        return eval_at(root_, o);
    }

private:
    struct Node {
        FormulaKind kind;
        int rel = -1;
        std::vector<int> args;
        std::vector<int> kids;
    };
    std::vector<Node> nodes_;
    int root_ = -1;

    int add(const Formula& f, const Vocabulary& vocab);

    template <class Oracle>
    bool eval_at(int i, const Oracle& o) const {
        const Node& n = nodes_[static_cast<std::size_t>(i)];
        switch (n.kind) {
        case FormulaKind::True: return true;
        case FormulaKind::False: return false;
        case FormulaKind::Atom: return o.atom(n.rel, n.args);
        case FormulaKind::Eq: return o.eq(n.args[0], n.args[1]);
        case FormulaKind::Not: return !eval_at(n.kids[0], o);
        case FormulaKind::And:
            for (int k : n.kids)
                if (!eval_at(k, o)) return false;
            return true;
        case FormulaKind::Or:
            for (int k : n.kids)
                if (eval_at(k, o)) return true;
            return false;
        }
        return false;
    }
};

using Assignment = std::vector<std::optional<ElemId>>;

// Atoms touching an absent element are false, as is equality with one.
bool eval_formula(const Formula& f, const Structure& s, const Assignment& assignment);

struct QfInterp {
    Vocabulary in_vocab;
    Vocabulary out_vocab;
    Formula universe;
    std::vector<Formula> defs;  // aligned with out_vocab

    // Throws std::invalid_argument when a formula leaves in_vocab or its arity.
    void validate() const;
    const Formula& def(const std::string& name) const;
};

QfInterp identity_interp(const Vocabulary& v);
Structure apply_interp(const QfInterp& f, const Structure& s);
// Runs first, then second.
QfInterp compose_interp(const QfInterp& first, const QfInterp& second);

std::string print_interp(const QfInterp& f);
QfInterp parse_interp(const std::string& text);

// ---------------------------------------------------------------- theories

// Bit positions of an atomic theory for a fixed vocabulary and arity k:
// nullary relations first, then for each relation of arity m >= 1 the k^m
// index tuples in lexicographic order.
class TheoryLayout {
public:
    TheoryLayout(Vocabulary vocab, int arity);

    const Vocabulary& vocab() const { return vocab_; }
    int arity() const { return arity_; }
    std::size_t bit_count() const { return bits_; }
    std::size_t atom_bit(int rel, const int* indices) const;
    std::size_t nullary_bit(int rel) const { return offsets_[static_cast<std::size_t>(rel)]; }

private:
    Vocabulary vocab_;
    int arity_;
    std::vector<std::size_t> offsets_;
    std::size_t bits_ = 0;
};

using LayoutPtr = std::shared_ptr<const TheoryLayout>;

class AtomicTheory {
public:
    AtomicTheory() = default;
    AtomicTheory(LayoutPtr layout, std::vector<std::int8_t> rep, std::vector<std::uint8_t> bits);

    const TheoryLayout& layout() const { return *layout_; }
    const LayoutPtr& layout_ptr() const { return layout_; }
    int arity() const { return static_cast<int>(rep_.size()); }
    bool present(int i) const { return rep_[static_cast<std::size_t>(i)] >= 0; }
    // Least index naming the same element, or -1 when absent.
    int rep(int i) const { return rep_[static_cast<std::size_t>(i)]; }
    bool same(int i, int j) const { return present(i) && rep(i) == rep(j); }
    bool nullary(int rel) const { return bits_[layout_->nullary_bit(rel)] != 0; }
    bool atom(int rel, const std::vector<int>& indices) const;
    bool bit(std::size_t b) const { return bits_[b] != 0; }
    const std::vector<std::int8_t>& reps() const { return rep_; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }
    std::string key() const;

    friend bool operator==(const AtomicTheory& a, const AtomicTheory& b) {
        return a.rep_ == b.rep_ && a.bits_ == b.bits_ && a.layout_->vocab() == b.layout_->vocab();
    }
    friend bool operator!=(const AtomicTheory& a, const AtomicTheory& b) { return !(a == b); }

private:
    LayoutPtr layout_;
    std::vector<std::int8_t> rep_;
    std::vector<std::uint8_t> bits_;
};

// Elements missing from the structure count as absent.
AtomicTheory theory_of(const Structure& s, const Assignment& tuple);
AtomicTheory theory_of(const Structure& s, const Assignment& tuple, const LayoutPtr& layout);

// Compiled form of an interpretation for repeated symbolic evaluation.
class TheoryStep {
public:
    explicit TheoryStep(const QfInterp& f);
    AtomicTheory apply(const AtomicTheory& th) const;
    LayoutPtr layout(int arity) const;
    const QfInterp& interp() const { return f_; }

private:
    QfInterp f_;
    CompiledFormula universe_;
    std::vector<CompiledFormula> defs_;
    mutable std::mutex mu_;
    mutable std::unordered_map<int, LayoutPtr> layouts_;
};

AtomicTheory theory_transition(const QfInterp& f, const AtomicTheory& th);

enum class Side : std::uint8_t { Left, Right };

// Theory of the concatenated tuple in the pair structure. sides[i] says which
// tuple the i-th index is drawn from; relative order within a side is kept.
AtomicTheory pair_theory(const AtomicTheory& left, const AtomicTheory& right, const std::vector<Side>& sides);
AtomicTheory pair_theory(const AtomicTheory& left, const AtomicTheory& right, const std::vector<Side>& sides,
                         const LayoutPtr& out_layout);

// ---------------------------------------------------------------- restriction

class NotDnf : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Restriction {
    Type type;
    QfInterp projection;
};

// The type of the elements satisfying a one-variable formula, together with
// the interpretation keeping exactly those elements.
Restriction type_restriction(const Type& t, const Formula& phi);

}  // namespace foldreg
