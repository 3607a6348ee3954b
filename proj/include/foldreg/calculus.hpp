#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "foldreg/types.hpp"

namespace foldreg {

enum class Flavor { QuantifierFree, Polyregular, Linear, Reduced };

struct SystemFlavor {
    Flavor base = Flavor::Polyregular;
    bool trees = false;
    friend bool operator==(const SystemFlavor&, const SystemFlavor&) = default;
};

std::string to_string(SystemFlavor f);
// qf, poly, linear, reduced, optionally followed by +trees.
std::optional<SystemFlavor> parse_flavor(std::string_view text);

// In inventory order; see prime_inventory().
enum class PrimeOp {
    CommTimesFwd, CommTimesBwd, CommPlusFwd, CommPlusBwd,
    AssocTimesFwd, AssocTimesBwd, AssocPlusFwd, AssocPlusBwd,
    DistrFwd, DistrBwd, Proj1, Proj2, Coproj1, Coproj2, Codiag,
    AddZero, Concat2, MaybeList,
    Append, ListCons, Reverse, Concat, CreateEmpty, ListDistribute, ListUnit, EmptyFromZero,
    ConstUnit,
    BangPlusFwd, BangPlusBwd, BangTimesFwd, BangTimesBwd, BangListFwd, BangListBwd,
    Absorb, LinAbsorb,
    TreeCons, ReplaceHole, CtxCompose, CtxCreate, BangTreeFwd, BangTreeBwd,
};

enum class TermKind { Prime, Compose, ProdMap, CoProdMap, Map, BangMap, SafeFold, TreeFold, Upgrade };

// Derivation in the calculus. Compose(f, g) runs f first.
class Term {
public:
    static Term prime(std::string name, std::vector<Type> params = {});
    static Term compose(Term f, Term g);
    static Term par_times(Term f, Term g);
    static Term par_plus(Term f, Term g);
    static Term map(Term f);
    static Term bang(Term f);
    static Term safefold(int k, Term init, Term step);
    static Term treefold(int k, Term init, Term step);
    static Term upgrade(int k);

    TermKind kind() const;
    const std::string& name() const;
    // Unknown prime names are kept so the checker can report them.
    std::optional<PrimeOp> op() const;
    const std::vector<Type>& params() const;
    const std::vector<Term>& children() const;
    const Term& child(std::size_t i) const { return children().at(i); }
    int k() const;

    bool is(TermKind kind_) const { return kind() == kind_; }
    std::size_t size() const;

    friend bool operator==(const Term& a, const Term& b);
    friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

private:
    struct Node;
    explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

// Left-to-right composition; a single term is returned unchanged.
Term seq(std::vector<Term> steps);

enum class TypeErrorKind { UnknownPrime, DomainMismatch, GradeViolation, FlavorViolation };

std::string to_string(TypeErrorKind k);

struct TypeError {
    TypeErrorKind kind;
    std::vector<int> path;  // child indices from the root
    std::string message;
};

std::string to_string(const TypeError& e);

class TypeErrorException : public std::runtime_error {
public:
    explicit TypeErrorException(TypeError e);
    const TypeError& error() const { return error_; }

private:
    TypeError error_;
};

class TypeResult {
public:
    TypeResult(FunctionType t) : type_(std::move(t)) {}
    TypeResult(TypeError e) : error_(std::move(e)) {}

    bool ok() const { return type_.has_value(); }
    explicit operator bool() const { return ok(); }
    const FunctionType& type() const;
    const TypeError& error() const;

private:
    std::optional<FunctionType> type_;
    std::optional<TypeError> error_;
};

TypeResult infer_type(const Term& t, SystemFlavor flavor);
// Throws TypeErrorException.
FunctionType type_of(const Term& t, SystemFlavor flavor);

// Wraps f (of type !^k S -> G) so that it reads S -> G.
Term make_weak(const Term& f, int k, SystemFlavor flavor);
// k of a term built by make_weak, or 0.
int weak_level(const Term& t);

struct PrimeInfo {
    PrimeOp op;
    std::string name;
    int params;
    std::string summary;
};
const std::vector<PrimeInfo>& prime_inventory();

std::string print_term(const Term& t);
Term parse_term(std::string_view text);
Type parse_type_sexpr(std::string_view text);

Term identity_term(const Type& t);

struct DnfIso {
    Type type;
    Term forward;
    Term backward;
};

// Isomorphism with a type where no product or bang sits directly above a
// coproduct. Tree labels must already be in that form.
DnfIso to_dnf(const Type& t);

}  // namespace foldreg
