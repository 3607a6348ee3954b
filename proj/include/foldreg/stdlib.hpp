#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "foldreg/calculus.hpp"
#include "foldreg/eval.hpp"
#include "foldreg/types.hpp"

namespace foldreg {

// How check_derivation compares a term's output with the reference.
//   Exact: output leaves are mapped to the input leaf they were copied from
//          (created leaves to id 0) and compared with ==.
//   Shape: same_shape, for entries whose outputs are finite values.
enum class Compare { Exact, Shape };

struct NamedDerivation {
    std::string name;
    std::string summary;
    Term term;  // of type !^weak_k dom -> cod
    SystemFlavor flavor;
    int weak_k = 0;
    Type domain;  // dom without the weak bangs
    std::function<Value(const Value&)> reference;
    Compare compare = Compare::Exact;
    InputGenerator generator;  // empty: random_sized_value(domain, size)
    double linear_bound = 0;   // output leaves <= bound * input leaves, Linear entries

    Term weak_term() const { return make_weak(term, weak_k, flavor); }
    Value sample(std::size_t size, std::mt19937_64& rng, LeafIdSource& ids) const;
};

// Leaves created during evaluation show up as id 0.
Value canonical_output(const EvalTrace& trace);

// ---------------------------------------------------------------- building blocks

Term bang_n(int n, Term f);
// !A -> A. Absorption then projection, or linear absorption for Linear.
Term down(const Type& a, Flavor flavor);
// 1 -> A*
Term empty_from_unit(const Type& a);
// !^k (A*) -> (!^k A)*
Term push_list(int k, const Type& a);
// (B + C) × A -> B × A + C × A
Term distr_left(const Type& a, const Type& b, const Type& c);
// The element with the given index of a tree of coproducts over units.
Term inject(const Type& flat, std::size_t index);
// Every function between finite types; each element of the target must be
// buildable from the units of the matching source summand.
Term finite_fun(const Type& from, const Type& to, const std::function<std::size_t(std::size_t)>& f);

// A function together with the bangs its input needs.
struct WeakStage {
    Term term;
    int k = 0;
};
// Composition of weak functions; the result needs the sum of the levels.
WeakStage weak_seq(const std::vector<WeakStage>& stages);
// map for a weak function !^k A -> B, giving !^k (A*) -> B*.
WeakStage weak_list_map(const WeakStage& f, const Type& a);

// ---------------------------------------------------------------- entries

NamedDerivation prime_entry(const std::string& name, std::vector<Type> params, const Type& domain,
                            std::function<Value(const Value&)> reference);
NamedDerivation group_mult(std::size_t order, const std::function<std::size_t(std::size_t, std::size_t)>& mult,
                           std::size_t identity);
NamedDerivation finite_fun_entry(const Type& from, const Type& to, const std::function<std::size_t(std::size_t)>& f);
// Accepts over letters 0..sigma-1 with states 0..states-1, state 0 initial.
NamedDerivation dfa(std::size_t states, std::size_t sigma, const std::vector<std::vector<std::size_t>>& delta,
                    const std::vector<bool>& accepting);
// delta[q][a] = (next state, output letter)
NamedDerivation mealy(std::size_t states, std::size_t sigma, std::size_t gamma,
                      const std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& delta);
NamedDerivation list_destructor(const Type& sigma);
NamedDerivation prefixes_rev(const Type& sigma);
NamedDerivation prefixes_plain(const Type& sigma);
NamedDerivation split(const Type& sigma);
NamedDerivation block(const Type& sigma, const Type& gamma);
NamedDerivation square_underline(const Type& tau);
NamedDerivation squaring(const Type& sigma);
// Reduced flavor: !Γ* -> Σ* from f : Γ -> Σ.
NamedDerivation weak_map(const Term& f, const Type& from, const Type& to, std::function<Value(const Value&)> ref);
NamedDerivation reduced_reverse(const Type& sigma);
NamedDerivation linear_duplicate(const Type& sigma);
NamedDerivation linear_reverse(const Type& sigma);
NamedDerivation linear_identity(const Type& sigma);
NamedDerivation tree_infix(const Type& sigma);
NamedDerivation tree_size(const Type& sigma);

std::vector<NamedDerivation> catalog();
// Throws std::out_of_range.
const NamedDerivation& catalog_entry(const std::string& name);

struct DerivationReport {
    std::string name;
    bool passed = false;
    std::size_t trials = 0;
    std::string error;  // type error or first counterexample
};

DerivationReport check_derivation(const NamedDerivation& d, std::size_t trials, std::size_t max_size,
                                  std::uint64_t seed = 0);

// Replaces every linear absorption by absorption followed by dropping the bang.
Term linear_to_poly(const Term& t);

// ---------------------------------------------------------------- goldens

struct GoldenResult {
    std::string name;
    std::string input;
    std::string expected;
    std::string actual;
    bool passed() const { return expected == actual; }
};
std::vector<GoldenResult> run_goldens();

// ---------------------------------------------------------------- ill-typed folds

// Folding 1^n |-> 1^2n with the state at k bangs.
Term fold_duplication(int k);
// Folding increment / decrement on the integers as 1* + 1*.
Term fold_tail(int k);

}  // namespace foldreg
