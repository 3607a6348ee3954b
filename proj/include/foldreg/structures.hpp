#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "foldreg/types.hpp"

namespace foldreg {

struct RelationSymbol {
    std::string name;
    int arity = 0;
    friend bool operator==(const RelationSymbol&, const RelationSymbol&) = default;
};

// Ordered relation names with arities. Names are unique.
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<RelationSymbol> symbols);

    int add(std::string name, int arity);
    std::size_t size() const { return symbols_.size(); }
    bool empty() const { return symbols_.empty(); }
    const RelationSymbol& operator[](std::size_t i) const { return symbols_[i]; }
    const std::vector<RelationSymbol>& symbols() const { return symbols_; }
    // -1 when absent.
    int find(const std::string& name) const;
    int max_arity() const;

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.symbols_ == b.symbols_; }
    friend bool operator!=(const Vocabulary& a, const Vocabulary& b) { return !(a == b); }

private:
    std::vector<RelationSymbol> symbols_;
    std::unordered_map<std::string, int> index_;
};

// Relation names have the form role[path] where path is a word over L, R, E.
// side: first component of a product; tag: left variant of a coproduct;
// ord: list order; desc, doc: tree descendant and document order.
Vocabulary vocab_of(const Type& t);
// side[] followed by the left names under L and the right names under R.
Vocabulary pair_vocab(const Vocabulary& left, const Vocabulary& right);
std::string prefix_name(const std::string& name, char step);

using ElemId = LeafId;
using Tuple = std::vector<ElemId>;

class Structure {
public:
    Structure() = default;
    explicit Structure(Vocabulary vocab);

    const Vocabulary& vocab() const { return vocab_; }

    void add_element(ElemId id, int grade = 0);
    bool contains(ElemId id) const { return grades_.count(id) != 0; }
    int grade(ElemId id) const;
    const std::map<ElemId, int>& elements() const { return grades_; }
    std::vector<ElemId> universe() const;
    std::size_t universe_size() const { return grades_.size(); }

    void add_tuple(int rel, Tuple t);
    void add_tuple(const std::string& rel, Tuple t);
    void set_nullary(int rel, bool value);
    bool holds(int rel, const Tuple& t) const;
    bool nullary(int rel) const { return holds(rel, {}); }
    const std::set<Tuple>& tuples(int rel) const { return rels_[static_cast<std::size_t>(rel)]; }

    friend bool operator==(const Structure& a, const Structure& b) {
        return a.vocab_ == b.vocab_ && a.grades_ == b.grades_ && a.rels_ == b.rels_;
    }
    friend bool operator!=(const Structure& a, const Structure& b) { return !(a == b); }

private:
    Vocabulary vocab_;
    std::map<ElemId, int> grades_;
    std::vector<std::set<Tuple>> rels_;
};

class EncodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotInImage : public std::runtime_error {
public:
    NotInImage(std::string relation, Tuple witness, const std::string& msg);
    const std::string& relation() const { return relation_; }
    const Tuple& witness() const { return witness_; }

private:
    std::string relation_;
    Tuple witness_;
};

class VocabularyMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Lists and trees whose items have an empty universe raise EncodeError.
Structure encode(const Value& v, const Type& t);
Value decode(const Structure& s, const Type& t);
Structure restrict(const Structure& s, int min_grade);
// Universes must be disjoint.
Structure pair_structures(const Structure& left, const Structure& right);

// Universe lines id:grade, then NAME(arity): t;t;... per relation.
std::string dump(const Structure& s);
Structure parse_dump(const std::string& text);

}  // namespace foldreg
