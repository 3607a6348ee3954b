#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "foldreg/qf_logic.hpp"
#include "foldreg/sst.hpp"
#include "foldreg/structures.hpp"

namespace foldreg {

// A fold of delta : Γ × Σ -> Γ started at b0 and fed the letters in order.
// Element ids must be distinct across b0 and all letters.
struct FoldInstance {
    QfInterp delta;
    Structure b0;
    std::vector<Structure> letters;

    // Throws VocabularyMismatch or std::invalid_argument.
    void validate() const;
};

Structure naive_fold(const FoldInstance& inst);

struct StreamStats {
    std::size_t tuples = 0;           // tracked candidate tuples
    std::size_t transitions = 0;      // theory transitions actually computed
    std::size_t cache_hits = 0;       // steps answered from the empty-letter cache
    std::size_t distinct_theories = 0;
    std::size_t state_bits = 0;       // size of one per-tuple state
};

// Same result as naive_fold, without building the intermediate structures.
// threads = 0 picks the hardware concurrency.
Structure stream_fold(const FoldInstance& inst, StreamStats* stats = nullptr, unsigned threads = 0);

// An element of the fold: index 0 is b0, index i >= 1 is the i-th letter.
struct Candidate {
    std::size_t index;
    ElemId id;
};

// Theory of the tuple in the final structure of the fold. Throws
// std::out_of_range when an element is missing at its index.
AtomicTheory mixed_tuple_theory(const FoldInstance& inst, const std::vector<Candidate>& tuple);

// ---------------------------------------------------------------- iteration

// Interned theories of one arity under an endo-interpretation.
class TheoryTable {
public:
    TheoryTable(const QfInterp& f, int arity);

    int arity() const { return arity_; }
    int intern(const AtomicTheory& th);
    const AtomicTheory& at(int id) const { return theories_[static_cast<std::size_t>(id)]; }
    std::size_t size() const { return theories_.size(); }
    // Image of a theory under one application of f; interned lazily.
    int step(int id);
    const TheoryStep& interp() const { return *step_; }

private:
    std::shared_ptr<TheoryStep> step_;
    int arity_;
    std::unordered_map<std::string, int> index_;
    std::vector<AtomicTheory> theories_;
    std::vector<int> next_;
};

// Total map on a closed set of theories in a table. Composition is
// left-to-right: (a.then(b))(x) = b(a(x)).
class TheoryTransform {
public:
    static TheoryTransform identity(std::size_t n);
    // One application of f on the closure of seeds; extends the table.
    static TheoryTransform of(TheoryTable& table, const std::vector<int>& seeds);

    TheoryTransform then(const TheoryTransform& next) const;
    // counts the compositions performed when ops is non-null.
    TheoryTransform power(std::uint64_t n, std::size_t* ops = nullptr) const;
    int operator()(int theory) const { return map_.at(static_cast<std::size_t>(theory)); }
    std::size_t size() const { return map_.size(); }
    const std::vector<int>& map() const { return map_; }

    friend bool operator==(const TheoryTransform&, const TheoryTransform&) = default;

private:
    std::vector<int> map_;
};

struct IterateStats {
    std::size_t compositions = 0;
    std::size_t theories = 0;
};

// f^n(a) through the finite monoid of theory transforms.
Structure iterate_qf(const QfInterp& f, const Structure& a, std::uint64_t n, IterateStats* stats = nullptr);

// ---------------------------------------------------------------- suites

// A hand-written transition function Γ × Σ -> Γ with samplers for states and
// letters.
struct SuiteDelta {
    std::string name;
    QfInterp delta;
    Type state;
    Type letter;
    std::function<Value(std::mt19937_64&, LeafIdSource&)> random_state;
    std::function<Value(std::mt19937_64&, LeafIdSource&)> random_letter;
};

// list constructor, reverse-order constructor, append of a whole list, and
// the δ compiled from suite_sst().
std::vector<SuiteDelta> delta_suite();
// Reads a's into the first register and b's, reversed, into the second.
Sst suite_sst();
FoldInstance random_instance(const SuiteDelta& d, std::size_t letters, std::mt19937_64& rng);

// Endo-interpretations used for iteration.
struct SuiteEndo {
    std::string name;
    QfInterp f;
    Type type;
};
std::vector<SuiteEndo> endo_suite();

// Interpretation with out_vocab = vocab_of(out); relations not listed in defs
// are copied from the input relation of the same name.
QfInterp make_interp(Vocabulary in, const Type& out, Formula universe, const std::map<std::string, Formula>& defs);

}  // namespace foldreg
