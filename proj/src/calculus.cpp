#include "foldreg/calculus.hpp"

#include <functional>
#include <unordered_map>

namespace foldreg {

// ---------------------------------------------------------------- flavors

std::string to_string(SystemFlavor f) {
    std::string s;
    switch (f.base) {
    case Flavor::QuantifierFree: s = "qf"; break;
    case Flavor::Polyregular: s = "poly"; break;
    case Flavor::Linear: s = "linear"; break;
    case Flavor::Reduced: s = "reduced"; break;
    }
    if (f.trees) s += "+trees";
    return s;
}

std::optional<SystemFlavor> parse_flavor(std::string_view text) {
    SystemFlavor f;
    constexpr std::string_view suffix = "+trees";
    if (text.size() > suffix.size() && text.substr(text.size() - suffix.size()) == suffix) {
        f.trees = true;
        text.remove_suffix(suffix.size());
    }
    if (text == "qf" || text == "quantifier-free") f.base = Flavor::QuantifierFree;
    else if (text == "poly" || text == "polyregular") f.base = Flavor::Polyregular;
    else if (text == "linear") f.base = Flavor::Linear;
    else if (text == "reduced") f.base = Flavor::Reduced;
    else return std::nullopt;
    return f;
}

// ---------------------------------------------------------------- terms

struct Term::Node {
    TermKind kind;
    std::string name;
    std::optional<PrimeOp> op;
    std::vector<Type> params;
    std::vector<Term> kids;
    int k = 0;
    std::size_t size = 1;
};

namespace {

const std::unordered_map<std::string, PrimeOp>& op_by_name() {
    static const std::unordered_map<std::string, PrimeOp> m = [] {
        std::unordered_map<std::string, PrimeOp> r;
        for (const auto& p : prime_inventory()) r.emplace(p.name, p.op);
        return r;
    }();
    return m;
}

}  // namespace

Term Term::prime(std::string name, std::vector<Type> params) {
    auto n = std::make_shared<Node>();
    n->kind = TermKind::Prime;
    auto it = op_by_name().find(name);
    if (it != op_by_name().end()) n->op = it->second;
    n->name = std::move(name);
    n->params = std::move(params);
    return Term(std::move(n));
}

Term Term::compose(Term f, Term g) {
    auto n = std::make_shared<Node>();
    n->kind = TermKind::Compose;
    n->size = 1 + f.size() + g.size();
    n->kids = {std::move(f), std::move(g)};
    return Term(std::move(n));
}

Term Term::par_times(Term f, Term g) {
    auto n = std::make_shared<Node>();
    n->kind = TermKind::ProdMap;
    n->size = 1 + f.size() + g.size();
    n->kids = {std::move(f), std::move(g)};
    return Term(std::move(n));
}

Term Term::par_plus(Term f, Term g) {
    auto n = std::make_shared<Node>();
    n->kind = TermKind::CoProdMap;
    n->size = 1 + f.size() + g.size();
    n->kids = {std::move(f), std::move(g)};
    return Term(std::move(n));
}

Term Term::map(Term f) {
    auto n = std::make_shared<Node>();
    n->kind = TermKind::Map;
    n->size = 1 + f.size();
    n->kids = {std::move(f)};
    return Term(std::move(n));
}

Term Term::bang(Term f) {
    auto n = std::make_shared<Node>();
    n->kind = TermKind::BangMap;
    n->size = 1 + f.size();
    n->kids = {std::move(f)};
    return Term(std::move(n));
}

Term Term::safefold(int k, Term init, Term step) {
    if (k < 0) throw std::invalid_argument("safefold: negative k");
    auto n = std::make_shared<Node>();
    n->kind = TermKind::SafeFold;
    n->k = k;
    n->size = 1 + init.size() + step.size();
    n->kids = {std::move(init), std::move(step)};
    return Term(std::move(n));
}

Term Term::treefold(int k, Term init, Term step) {
    if (k < 0) throw std::invalid_argument("treefold: negative k");
    auto n = std::make_shared<Node>();
    n->kind = TermKind::TreeFold;
    n->k = k;
    n->size = 1 + init.size() + step.size();
    n->kids = {std::move(init), std::move(step)};
    return Term(std::move(n));
}

Term Term::upgrade(int k) {
    if (k < 0) throw std::invalid_argument("upgrade: negative k");
    auto n = std::make_shared<Node>();
    n->kind = TermKind::Upgrade;
    n->k = k;
    return Term(std::move(n));
}

TermKind Term::kind() const { return node_->kind; }
const std::string& Term::name() const { return node_->name; }
std::optional<PrimeOp> Term::op() const { return node_->op; }
const std::vector<Type>& Term::params() const { return node_->params; }
const std::vector<Term>& Term::children() const { return node_->kids; }
int Term::k() const { return node_->k; }
std::size_t Term::size() const { return node_->size; }

bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    const auto& x = *a.node_;
    const auto& y = *b.node_;
    return x.kind == y.kind && x.name == y.name && x.k == y.k && x.params == y.params && x.kids == y.kids;
}

Term seq(std::vector<Term> steps) {
    if (steps.empty()) throw std::invalid_argument("seq: no steps");
    Term t = steps[0];
    for (std::size_t i = 1; i < steps.size(); ++i) t = Term::compose(t, steps[i]);
    return t;
}

// ---------------------------------------------------------------- primes

namespace {

enum Gate : unsigned {
    G_QF = 1, G_POLY = 2, G_LIN = 4, G_RED = 8,
    G_ALL = 15, G_NOT_RED = 7, G_NON_QF = 14,
};

struct PrimeRule {
    unsigned flavors;
    bool trees;
    std::function<FunctionType(const std::vector<Type>&)> type;
};

using P = const std::vector<Type>&;

Type X(const Type& a, const Type& b) { return Type::prod(a, b); }
Type S(const Type& a, const Type& b) { return Type::coprod(a, b); }
Type L(const Type& a) { return Type::list(a); }
Type B(const Type& a) { return Type::bang(a); }
Type T(const Type& a) { return Type::tree(a); }

struct Entry {
    PrimeOp op;
    const char* name;
    int params;
    const char* summary;
    PrimeRule rule;
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> e = {
        {PrimeOp::CommTimesFwd, "comm-times-fwd", 2, "A × B -> B × A",
         {G_ALL, false, [](P p) { return FunctionType{X(p[0], p[1]), X(p[1], p[0])}; }}},
        {PrimeOp::CommTimesBwd, "comm-times-bwd", 2, "B × A -> A × B",
         {G_ALL, false, [](P p) { return FunctionType{X(p[1], p[0]), X(p[0], p[1])}; }}},
        {PrimeOp::CommPlusFwd, "comm-plus-fwd", 2, "A + B -> B + A",
         {G_ALL, false, [](P p) { return FunctionType{S(p[0], p[1]), S(p[1], p[0])}; }}},
        {PrimeOp::CommPlusBwd, "comm-plus-bwd", 2, "B + A -> A + B",
         {G_ALL, false, [](P p) { return FunctionType{S(p[1], p[0]), S(p[0], p[1])}; }}},
        {PrimeOp::AssocTimesFwd, "assoc-times-fwd", 3, "A × (B × C) -> (A × B) × C",
         {G_ALL, false, [](P p) { return FunctionType{X(p[0], X(p[1], p[2])), X(X(p[0], p[1]), p[2])}; }}},
        {PrimeOp::AssocTimesBwd, "assoc-times-bwd", 3, "(A × B) × C -> A × (B × C)",
         {G_ALL, false, [](P p) { return FunctionType{X(X(p[0], p[1]), p[2]), X(p[0], X(p[1], p[2]))}; }}},
        {PrimeOp::AssocPlusFwd, "assoc-plus-fwd", 3, "A + (B + C) -> (A + B) + C",
         {G_ALL, false, [](P p) { return FunctionType{S(p[0], S(p[1], p[2])), S(S(p[0], p[1]), p[2])}; }}},
        {PrimeOp::AssocPlusBwd, "assoc-plus-bwd", 3, "(A + B) + C -> A + (B + C)",
         {G_ALL, false, [](P p) { return FunctionType{S(S(p[0], p[1]), p[2]), S(p[0], S(p[1], p[2]))}; }}},
        {PrimeOp::DistrFwd, "distr-fwd", 3, "A × (B + C) -> A × B + A × C",
         {G_ALL, false, [](P p) { return FunctionType{X(p[0], S(p[1], p[2])), S(X(p[0], p[1]), X(p[0], p[2]))}; }}},
        {PrimeOp::DistrBwd, "distr-bwd", 3, "A × B + A × C -> A × (B + C)",
         {G_ALL, false, [](P p) { return FunctionType{S(X(p[0], p[1]), X(p[0], p[2])), X(p[0], S(p[1], p[2]))}; }}},
        {PrimeOp::Proj1, "proj1", 2, "A × B -> A",
         {G_ALL, false, [](P p) { return FunctionType{X(p[0], p[1]), p[0]}; }}},
        {PrimeOp::Proj2, "proj2", 2, "A × B -> B",
         {G_ALL, false, [](P p) { return FunctionType{X(p[0], p[1]), p[1]}; }}},
        {PrimeOp::Coproj1, "coproj1", 2, "A -> A + B",
         {G_ALL, false, [](P p) { return FunctionType{p[0], S(p[0], p[1])}; }}},
        {PrimeOp::Coproj2, "coproj2", 2, "B -> A + B",
         {G_ALL, false, [](P p) { return FunctionType{p[1], S(p[0], p[1])}; }}},
        {PrimeOp::Codiag, "codiag", 1, "A + A -> A",
         {G_ALL, false, [](P p) { return FunctionType{S(p[0], p[0]), p[0]}; }}},
        {PrimeOp::AddZero, "add-zero", 1, "A -> A × 0",
         {G_ALL, false, [](P p) { return FunctionType{p[0], X(p[0], Type::zero())}; }}},
        {PrimeOp::Concat2, "concat2", 1, "A* × A* -> A*",
         {G_ALL, false, [](P p) { return FunctionType{X(L(p[0]), L(p[0])), L(p[0])}; }}},
        {PrimeOp::MaybeList, "maybe-list", 1, "1 + A -> A*",
         {G_ALL, false, [](P p) { return FunctionType{S(Type::unit(), p[0]), L(p[0])}; }}},
        {PrimeOp::Append, "append", 1, "A* × A -> A*",
         {G_NOT_RED, false, [](P p) { return FunctionType{X(L(p[0]), p[0]), L(p[0])}; }}},
        {PrimeOp::ListCons, "list-cons", 1, "1 + A × A* -> A*",
         {G_NOT_RED, false, [](P p) { return FunctionType{S(Type::unit(), X(p[0], L(p[0]))), L(p[0])}; }}},
        {PrimeOp::Reverse, "reverse", 1, "A* -> A*",
         {G_NOT_RED, false, [](P p) { return FunctionType{L(p[0]), L(p[0])}; }}},
        {PrimeOp::Concat, "concat", 1, "A** -> A*",
         {G_NOT_RED, false, [](P p) { return FunctionType{L(L(p[0])), L(p[0])}; }}},
        {PrimeOp::CreateEmpty, "create-empty", 2, "A -> A × B*",
         {G_NOT_RED, false, [](P p) { return FunctionType{p[0], X(p[0], L(p[1]))}; }}},
        {PrimeOp::ListDistribute, "list-distribute", 2, "(A × B)* -> A* × B*",
         {G_NOT_RED, false, [](P p) { return FunctionType{L(X(p[0], p[1])), X(L(p[0]), L(p[1]))}; }}},
        {PrimeOp::ListUnit, "list-unit", 1, "A -> A*",
         {G_NOT_RED, false, [](P p) { return FunctionType{p[0], L(p[0])}; }}},
        {PrimeOp::EmptyFromZero, "empty-from-zero", 1, "0 -> A*",
         {G_NOT_RED, false, [](P p) { return FunctionType{Type::zero(), L(p[0])}; }}},
        {PrimeOp::ConstUnit, "const-unit", 1, "A -> 1",
         {G_NON_QF, false, [](P p) { return FunctionType{p[0], Type::unit()}; }}},
        {PrimeOp::BangPlusFwd, "bang-plus-fwd", 2, "!(A + B) -> !A + !B",
         {G_NON_QF, false, [](P p) { return FunctionType{B(S(p[0], p[1])), S(B(p[0]), B(p[1]))}; }}},
        {PrimeOp::BangPlusBwd, "bang-plus-bwd", 2, "!A + !B -> !(A + B)",
         {G_NON_QF, false, [](P p) { return FunctionType{S(B(p[0]), B(p[1])), B(S(p[0], p[1]))}; }}},
        {PrimeOp::BangTimesFwd, "bang-times-fwd", 2, "!(A × B) -> !A × !B",
         {G_NON_QF, false, [](P p) { return FunctionType{B(X(p[0], p[1])), X(B(p[0]), B(p[1]))}; }}},
        {PrimeOp::BangTimesBwd, "bang-times-bwd", 2, "!A × !B -> !(A × B)",
         {G_NON_QF, false, [](P p) { return FunctionType{X(B(p[0]), B(p[1])), B(X(p[0], p[1]))}; }}},
        {PrimeOp::BangListFwd, "bang-list-fwd", 1, "!(A*) -> (!A)*",
         {G_NON_QF, false, [](P p) { return FunctionType{B(L(p[0])), L(B(p[0]))}; }}},
        {PrimeOp::BangListBwd, "bang-list-bwd", 1, "(!A)* -> !(A*)",
         {G_NON_QF, false, [](P p) { return FunctionType{L(B(p[0])), B(L(p[0]))}; }}},
        {PrimeOp::Absorb, "absorb", 1, "!A -> !A × A",
         {G_POLY | G_RED, false, [](P p) { return FunctionType{B(p[0]), X(B(p[0]), p[0])}; }}},
        {PrimeOp::LinAbsorb, "lin-absorb", 1, "!A -> A × A",
         {G_LIN, false, [](P p) { return FunctionType{B(p[0]), X(p[0], p[0])}; }}},
        {PrimeOp::TreeCons, "tree-cons", 1, "1 + T(A) × (A × T(A)) -> T(A)",
         {G_ALL, true, [](P p) { return FunctionType{S(Type::unit(), X(T(p[0]), X(p[0], T(p[0])))), T(p[0])}; }}},
        {PrimeOp::ReplaceHole, "replace-hole", 1, "C(A) × T(A) -> T(A)",
         {G_ALL, true, [](P p) { return FunctionType{X(context_type(p[0]), T(p[0])), T(p[0])}; }}},
        {PrimeOp::CtxCompose, "ctx-compose", 1, "C(A) × C(A) -> C(A)",
         {G_ALL, true,
          [](P p) { return FunctionType{X(context_type(p[0]), context_type(p[0])), context_type(p[0])}; }}},
        {PrimeOp::CtxCreate, "ctx-create", 1, "1 + (T(A) × A + A × T(A)) -> C(A)",
         {G_ALL, true,
          [](P p) {
              return FunctionType{S(Type::unit(), S(X(T(p[0]), p[0]), X(p[0], T(p[0])))), context_type(p[0])};
          }}},
        {PrimeOp::BangTreeFwd, "bang-tree-fwd", 1, "!T(A) -> T(!A)",
         {G_NON_QF, true, [](P p) { return FunctionType{B(T(p[0])), T(B(p[0]))}; }}},
        {PrimeOp::BangTreeBwd, "bang-tree-bwd", 1, "T(!A) -> !T(A)",
         {G_NON_QF, true, [](P p) { return FunctionType{T(B(p[0])), B(T(p[0]))}; }}},
    };
    return e;
}

unsigned flavor_bit(Flavor f) {
    switch (f) {
    case Flavor::QuantifierFree: return G_QF;
    case Flavor::Polyregular: return G_POLY;
    case Flavor::Linear: return G_LIN;
    case Flavor::Reduced: return G_RED;
    }
    return 0;
}

const Entry& entry(PrimeOp op) { return entries()[static_cast<std::size_t>(op)]; }

}  // namespace

const std::vector<PrimeInfo>& prime_inventory() {
    static const std::vector<PrimeInfo> v = [] {
        std::vector<PrimeInfo> r;
        for (const auto& e : entries()) r.push_back({e.op, e.name, e.params, e.summary});
        return r;
    }();
    return v;
}

// ---------------------------------------------------------------- checker

std::string to_string(TypeErrorKind k) {
    switch (k) {
    case TypeErrorKind::UnknownPrime: return "unknown-prime";
    case TypeErrorKind::DomainMismatch: return "domain-mismatch";
    case TypeErrorKind::GradeViolation: return "grade-violation";
    case TypeErrorKind::FlavorViolation: return "flavor-violation";
    }
    return "?";
}

std::string to_string(const TypeError& e) {
    std::string p = "[";
    for (std::size_t i = 0; i < e.path.size(); ++i) {
        if (i) p += ",";
        p += std::to_string(e.path[i]);
    }
    p += "]";
    return to_string(e.kind) + " at " + p + ": " + e.message;
}

TypeErrorException::TypeErrorException(TypeError e) : std::runtime_error(to_string(e)), error_(std::move(e)) {}

const FunctionType& TypeResult::type() const {
    if (!type_) throw TypeErrorException(*error_);
    return *type_;
}

const TypeError& TypeResult::error() const {
    if (!error_) throw std::logic_error("TypeResult holds a type");
    return *error_;
}

namespace {

class Checker {
public:
    explicit Checker(SystemFlavor f) : flavor_(f) {}

    TypeResult run(const Term& t) {
        // Upgrade is only meaningful as the first step of the whole derivation.
        if (t.is(TermKind::Compose) && t.child(0).is(TermKind::Upgrade)) {
            int k = t.child(0).k();
            path_.push_back(1);
            auto r = check(t.child(1));
            path_.pop_back();
            if (!r) return r;
            int stripped = 0;
            Type dom = r.type().dom;
            for (; stripped < k && dom.is(TypeKind::Bang); ++stripped) dom = dom.inner();
            if (stripped < k)
                return fail(TypeErrorKind::DomainMismatch,
                            "weak derivation at level " + std::to_string(k) + " needs a domain with " +
                                std::to_string(k) + " leading bangs, got " + to_string(r.type().dom));
            return FunctionType{dom, r.type().cod};
        }
        return check(t);
    }

private:
    SystemFlavor flavor_;
    std::vector<int> path_;

    TypeError fail(TypeErrorKind k, std::string msg) const { return TypeError{k, path_, std::move(msg)}; }

    bool non_qf() const { return flavor_.base != Flavor::QuantifierFree; }

    TypeResult sub(const Term& t, int i) {
        path_.push_back(i);
        auto r = check(t.child(static_cast<std::size_t>(i)));
        path_.pop_back();
        return r;
    }

    TypeResult check(const Term& t) {
        switch (t.kind()) {
        case TermKind::Prime: return prime(t);
        case TermKind::Upgrade:
            return fail(TypeErrorKind::FlavorViolation, "upgrade may only start a weak derivation");
        case TermKind::Compose: {
            auto f = sub(t, 0);
            if (!f) return f;
            auto g = sub(t, 1);
            if (!g) return g;
            if (f.type().cod != g.type().dom)
                return fail(TypeErrorKind::DomainMismatch,
                            "compose: " + to_string(f.type().cod) + " does not match " + to_string(g.type().dom));
            return FunctionType{f.type().dom, g.type().cod};
        }
        case TermKind::ProdMap:
        case TermKind::CoProdMap: {
            auto f = sub(t, 0);
            if (!f) return f;
            auto g = sub(t, 1);
            if (!g) return g;
            if (t.is(TermKind::ProdMap))
                return FunctionType{Type::prod(f.type().dom, g.type().dom), Type::prod(f.type().cod, g.type().cod)};
            return FunctionType{Type::coprod(f.type().dom, g.type().dom), Type::coprod(f.type().cod, g.type().cod)};
        }
        case TermKind::Map: {
            auto f = sub(t, 0);
            if (!f) return f;
            if (flavor_.base == Flavor::Reduced)
                return fail(TypeErrorKind::FlavorViolation, "map is not available in the reduced system");
            return FunctionType{Type::list(f.type().dom), Type::list(f.type().cod)};
        }
        case TermKind::BangMap: {
            auto f = sub(t, 0);
            if (!f) return f;
            if (!non_qf()) return fail(TypeErrorKind::FlavorViolation, "bang functor is not quantifier-free");
            return FunctionType{Type::bang(f.type().dom), Type::bang(f.type().cod)};
        }
        case TermKind::SafeFold:
        case TermKind::TreeFold: return fold(t);
        }
        return fail(TypeErrorKind::UnknownPrime, "bad term node");
    }

    TypeResult prime(const Term& t) {
        if (!t.op()) return fail(TypeErrorKind::UnknownPrime, "unknown prime '" + t.name() + "'");
        const Entry& e = entry(*t.op());
        if (static_cast<int>(t.params().size()) != e.params)
            return fail(TypeErrorKind::DomainMismatch, t.name() + " takes " + std::to_string(e.params) +
                                                           " type parameters, got " +
                                                           std::to_string(t.params().size()));
        if (!(e.rule.flavors & flavor_bit(flavor_.base)))
            return fail(TypeErrorKind::FlavorViolation,
                        t.name() + " is not available in " + to_string(SystemFlavor{flavor_.base, false}));
        if (e.rule.trees && !flavor_.trees)
            return fail(TypeErrorKind::FlavorViolation, t.name() + " needs the tree extension");
        return e.rule.type(t.params());
    }

    TypeResult fold(const Term& t) {
        bool tree = t.is(TermKind::TreeFold);
        auto init = sub(t, 0);
        if (!init) return init;
        auto step = sub(t, 1);
        if (!step) return step;
        const char* what = tree ? "treefold" : "safefold";
        if (!non_qf()) return fail(TypeErrorKind::FlavorViolation, std::string(what) + " is not quantifier-free");
        if (tree && !flavor_.trees)
            return fail(TypeErrorKind::FlavorViolation, "treefold needs the tree extension");
        int k = t.k();
        Type want = bangs(k, Type::unit());
        if (init.type().dom != want)
            return fail(TypeErrorKind::DomainMismatch, std::string(what) + ": init must start at " + to_string(want) +
                                                           ", got " + to_string(init.type().dom));
        const Type& gamma = init.type().cod;
        if (grade(gamma) >= k)
            return fail(TypeErrorKind::GradeViolation, std::string(what) + ": state " + to_string(gamma) +
                                                           " has grade " + std::to_string(grade(gamma)) +
                                                           ", needs < " + std::to_string(k));
        const Type& sd = step.type().dom;
        bool shape = step.type().cod == gamma && sd.is(TypeKind::Prod) && sd.left() == gamma;
        if (shape && tree)
            shape = sd.right().is(TypeKind::Prod) && sd.right().right() == gamma;
        if (!shape)
            return fail(TypeErrorKind::DomainMismatch,
                        std::string(what) + ": step " + to_string(step.type()) + " does not fit state " +
                            to_string(gamma));
        Type letter = tree ? sd.right().left() : sd.right();
        Type input = tree ? Type::tree(letter) : Type::list(letter);
        return FunctionType{bangs(k, input), gamma};
    }
};

}  // namespace

TypeResult infer_type(const Term& t, SystemFlavor flavor) { return Checker(flavor).run(t); }

FunctionType type_of(const Term& t, SystemFlavor flavor) { return infer_type(t, flavor).type(); }

Term make_weak(const Term& f, int k, SystemFlavor flavor) {
    if (k < 0) throw std::invalid_argument("make_weak: negative k");
    FunctionType ft = type_of(f, flavor);
    Type dom = ft.dom;
    for (int i = 0; i < k; ++i) {
        if (!dom.is(TypeKind::Bang))
            throw TypeErrorException(TypeError{TypeErrorKind::DomainMismatch, {},
                                               "make_weak: domain " + to_string(ft.dom) + " has fewer than " +
                                                   std::to_string(k) + " leading bangs"});
        dom = dom.inner();
    }
    if (k == 0) return f;
    return Term::compose(Term::upgrade(k), f);
}

int weak_level(const Term& t) {
    if (t.is(TermKind::Compose) && t.child(0).is(TermKind::Upgrade)) return t.child(0).k();
    return 0;
}

// ---------------------------------------------------------------- text form

namespace {

void print_into(const Term& t, std::string& out);

void print_compose_chain(const Term& t, std::string& out) {
    if (t.is(TermKind::Compose) && !t.child(0).is(TermKind::Upgrade)) {
        print_compose_chain(t.child(0), out);
        out += ' ';
        print_into(t.child(1), out);
    } else {
        print_into(t, out);
    }
}

void print_into(const Term& t, std::string& out) {
    switch (t.kind()) {
    case TermKind::Prime:
        out += "(prime " + t.name();
        for (const auto& p : t.params()) out += " " + to_sexpr(p);
        out += ')';
        return;
    case TermKind::Compose:
        if (t.child(0).is(TermKind::Upgrade)) {
            out += "(weak " + std::to_string(t.child(0).k()) + ' ';
            print_into(t.child(1), out);
            out += ')';
            return;
        }
        out += "(compose ";
        print_compose_chain(t, out);
        out += ')';
        return;
    case TermKind::ProdMap:
    case TermKind::CoProdMap:
        out += t.is(TermKind::ProdMap) ? "(par× " : "(par+ ";
        print_into(t.child(0), out);
        out += ' ';
        print_into(t.child(1), out);
        out += ')';
        return;
    case TermKind::Map:
    case TermKind::BangMap:
        out += t.is(TermKind::Map) ? "(map " : "(bang ";
        print_into(t.child(0), out);
        out += ')';
        return;
    case TermKind::SafeFold:
    case TermKind::TreeFold:
        out += t.is(TermKind::SafeFold) ? "(safefold " : "(treefold ";
        out += std::to_string(t.k()) + ' ';
        print_into(t.child(0), out);
        out += ' ';
        print_into(t.child(1), out);
        out += ')';
        return;
    case TermKind::Upgrade: out += "(upgrade " + std::to_string(t.k()) + ")"; return;
    }
}

struct SExpr {
    std::size_t pos = 0;
    bool is_list = false;
    std::string atom;
    std::vector<SExpr> items;
};

class Reader {
public:
    explicit Reader(std::string_view s) : s_(s) {}

    SExpr read_one() {
        skip();
        SExpr e = read();
        skip();
        if (i_ != s_.size()) throw ParseError(i_, "trailing input");
        return e;
    }

private:
    std::string_view s_;
    std::size_t i_ = 0;

    void skip() {
        while (i_ < s_.size()) {
            char c = s_[i_];
            if (c == ';') {
                while (i_ < s_.size() && s_[i_] != '\n') ++i_;
            } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                ++i_;
            } else {
                break;
            }
        }
    }

    SExpr read() {
        if (i_ >= s_.size()) throw ParseError(i_, "unexpected end of input");
        SExpr e;
        e.pos = i_;
        if (s_[i_] == ')') throw ParseError(i_, "unexpected ')'");
        if (s_[i_] == '(') {
            e.is_list = true;
            ++i_;
            for (;;) {
                skip();
                if (i_ >= s_.size()) throw ParseError(e.pos, "unclosed '('");
                if (s_[i_] == ')') {
                    ++i_;
                    return e;
                }
                e.items.push_back(read());
            }
        }
        std::size_t start = i_;
        while (i_ < s_.size()) {
            char c = s_[i_];
            if (c == '(' || c == ')' || c == ';' || c == ' ' || c == '\t' || c == '\n' || c == '\r') break;
            ++i_;
        }
        e.atom = std::string(s_.substr(start, i_ - start));
        return e;
    }
};

const std::string& head(const SExpr& e) {
    if (!e.is_list || e.items.empty() || e.items[0].is_list) throw ParseError(e.pos, "expected (keyword ...)");
    return e.items[0].atom;
}

void expect_args(const SExpr& e, std::size_t n) {
    if (e.items.size() != n + 1)
        throw ParseError(e.pos, "'" + e.items[0].atom + "' takes " + std::to_string(n) + " arguments");
}

Type to_type(const SExpr& e) {
    if (!e.is_list) {
        if (e.atom == "1") return Type::unit();
        if (e.atom == "0") return Type::zero();
        return Type::var(e.atom);
    }
    const std::string& h = head(e);
    if (h == "unit" || h == "zero") {
        expect_args(e, 0);
        return h == "unit" ? Type::unit() : Type::zero();
    }
    if (h == "prod" || h == "coprod") {
        expect_args(e, 2);
        Type a = to_type(e.items[1]), b = to_type(e.items[2]);
        return h == "prod" ? Type::prod(a, b) : Type::coprod(a, b);
    }
    if (h == "list" || h == "bang" || h == "tree" || h == "ctx") {
        expect_args(e, 1);
        Type a = to_type(e.items[1]);
        if (h == "list") return Type::list(a);
        if (h == "bang") return Type::bang(a);
        if (h == "tree") return Type::tree(a);
        return context_type(a);
    }
    throw ParseError(e.pos, "unknown type constructor '" + h + "'");
}

int to_int(const SExpr& e) {
    if (e.is_list || e.atom.empty()) throw ParseError(e.pos, "expected a number");
    int v = 0;
    for (char c : e.atom) {
        if (c < '0' || c > '9') throw ParseError(e.pos, "expected a number");
        v = v * 10 + (c - '0');
        if (v > 1000000) throw ParseError(e.pos, "number too large");
    }
    return v;
}

Term to_term(const SExpr& e) {
    const std::string& h = head(e);
    if (h == "prime") {
        if (e.items.size() < 2 || e.items[1].is_list) throw ParseError(e.pos, "expected (prime NAME TYPE...)");
        std::vector<Type> ps;
        for (std::size_t i = 2; i < e.items.size(); ++i) ps.push_back(to_type(e.items[i]));
        return Term::prime(e.items[1].atom, std::move(ps));
    }
    if (h == "compose") {
        if (e.items.size() < 3) throw ParseError(e.pos, "compose takes at least 2 arguments");
        Term t = to_term(e.items[1]);
        for (std::size_t i = 2; i < e.items.size(); ++i) t = Term::compose(t, to_term(e.items[i]));
        return t;
    }
    if (h == "par×" || h == "par*" || h == "par-times" || h == "par+" || h == "par-plus") {
        expect_args(e, 2);
        Term a = to_term(e.items[1]), b = to_term(e.items[2]);
        return (h == "par+" || h == "par-plus") ? Term::par_plus(a, b) : Term::par_times(a, b);
    }
    if (h == "map" || h == "bang") {
        expect_args(e, 1);
        Term a = to_term(e.items[1]);
        return h == "map" ? Term::map(a) : Term::bang(a);
    }
    if (h == "safefold" || h == "treefold") {
        expect_args(e, 3);
        int k = to_int(e.items[1]);
        Term a = to_term(e.items[2]), b = to_term(e.items[3]);
        return h == "safefold" ? Term::safefold(k, a, b) : Term::treefold(k, a, b);
    }
    if (h == "weak") {
        expect_args(e, 2);
        return Term::compose(Term::upgrade(to_int(e.items[1])), to_term(e.items[2]));
    }
    if (h == "upgrade") {
        expect_args(e, 1);
        return Term::upgrade(to_int(e.items[1]));
    }
    throw ParseError(e.pos, "unknown term form '" + h + "'");
}

}  // namespace

std::string print_term(const Term& t) {
    std::string out;
    print_into(t, out);
    return out;
}

Term parse_term(std::string_view text) { return to_term(Reader(text).read_one()); }

Type parse_type_sexpr(std::string_view text) { return to_type(Reader(text).read_one()); }

// ---------------------------------------------------------------- DNF

Term identity_term(const Type& t) {
    return Term::compose(Term::prime("coproj1", {t, t}), Term::prime("codiag", {t}));
}

namespace {

// An isomorphism, or nothing when it is the identity.
struct Iso {
    Type type;
    std::optional<Term> fwd;
    std::optional<Term> bwd;
};

std::optional<Term> then(const std::optional<Term>& a, const std::optional<Term>& b) {
    if (!a) return b;
    if (!b) return a;
    return Term::compose(*a, *b);
}

Term or_id(const std::optional<Term>& t, const Type& ty) { return t ? *t : identity_term(ty); }

std::optional<Term> par(TermKind k, const std::optional<Term>& f, const Type& fd, const std::optional<Term>& g,
                        const Type& gd) {
    if (!f && !g) return std::nullopt;
    Term a = or_id(f, fd), b = or_id(g, gd);
    return k == TermKind::ProdMap ? Term::par_times(a, b) : Term::par_plus(a, b);
}

Iso dnf(const Type& t);

// !X with X already normal.
Iso push_bang(const Type& x) {
    if (!x.is(TypeKind::CoProd)) return {Type::bang(x), std::nullopt, std::nullopt};
    Iso l = push_bang(x.left());
    Iso r = push_bang(x.right());
    Type bl = Type::bang(x.left()), br = Type::bang(x.right());
    Iso out;
    out.type = Type::coprod(l.type, r.type);
    out.fwd = then(Term::prime("bang-plus-fwd", {x.left(), x.right()}),
                   par(TermKind::CoProdMap, l.fwd, bl, r.fwd, br));
    out.bwd = then(par(TermKind::CoProdMap, l.bwd, l.type, r.bwd, r.type),
                   Term::prime("bang-plus-bwd", {x.left(), x.right()}));
    return out;
}

// x × y with x and y already normal.
Iso distribute(const Type& x, const Type& y) {
    if (x.is(TypeKind::CoProd)) {
        const Type& x1 = x.left();
        const Type& x2 = x.right();
        Iso a = distribute(x1, y);
        Iso b = distribute(x2, y);
        Type p1 = Type::prod(x1, y), p2 = Type::prod(x2, y);
        Iso out;
        out.type = Type::coprod(a.type, b.type);
        out.fwd = then(seq({Term::prime("comm-times-fwd", {x, y}), Term::prime("distr-fwd", {y, x1, x2}),
                            Term::par_plus(Term::prime("comm-times-fwd", {y, x1}),
                                           Term::prime("comm-times-fwd", {y, x2}))}),
                       par(TermKind::CoProdMap, a.fwd, p1, b.fwd, p2));
        out.bwd = then(par(TermKind::CoProdMap, a.bwd, a.type, b.bwd, b.type),
                       seq({Term::par_plus(Term::prime("comm-times-bwd", {y, x1}),
                                           Term::prime("comm-times-bwd", {y, x2})),
                            Term::prime("distr-bwd", {y, x1, x2}), Term::prime("comm-times-bwd", {x, y})}));
        return out;
    }
    if (y.is(TypeKind::CoProd)) {
        const Type& y1 = y.left();
        const Type& y2 = y.right();
        Iso a = distribute(x, y1);
        Iso b = distribute(x, y2);
        Type p1 = Type::prod(x, y1), p2 = Type::prod(x, y2);
        Iso out;
        out.type = Type::coprod(a.type, b.type);
        out.fwd = then(Term::prime("distr-fwd", {x, y1, y2}), par(TermKind::CoProdMap, a.fwd, p1, b.fwd, p2));
        out.bwd = then(par(TermKind::CoProdMap, a.bwd, a.type, b.bwd, b.type),
                       Term::prime("distr-bwd", {x, y1, y2}));
        return out;
    }
    return {Type::prod(x, y), std::nullopt, std::nullopt};
}

Iso dnf(const Type& t) {
    switch (t.kind()) {
    case TypeKind::Zero:
    case TypeKind::Unit:
    case TypeKind::Var: return {t, std::nullopt, std::nullopt};
    case TypeKind::List: {
        Iso a = dnf(t.inner());
        if (!a.fwd) return {t, std::nullopt, std::nullopt};
        return {Type::list(a.type), Term::map(*a.fwd), Term::map(*a.bwd)};
    }
    case TypeKind::Tree:
        if (!is_dnf(t.inner())) throw std::invalid_argument("to_dnf: tree labels must already be normal");
        return {t, std::nullopt, std::nullopt};
    case TypeKind::Bang: {
        Iso a = dnf(t.inner());
        Iso p = push_bang(a.type);
        Iso out;
        out.type = p.type;
        out.fwd = then(a.fwd ? std::optional<Term>(Term::bang(*a.fwd)) : std::nullopt, p.fwd);
        out.bwd = then(p.bwd, a.bwd ? std::optional<Term>(Term::bang(*a.bwd)) : std::nullopt);
        return out;
    }
    case TypeKind::Prod: {
        Iso a = dnf(t.left());
        Iso b = dnf(t.right());
        Iso d = distribute(a.type, b.type);
        Iso out;
        out.type = d.type;
        out.fwd = then(par(TermKind::ProdMap, a.fwd, t.left(), b.fwd, t.right()), d.fwd);
        out.bwd = then(d.bwd, par(TermKind::ProdMap, a.bwd, a.type, b.bwd, b.type));
        return out;
    }
    case TypeKind::CoProd: {
        Iso a = dnf(t.left());
        Iso b = dnf(t.right());
        return {Type::coprod(a.type, b.type), par(TermKind::CoProdMap, a.fwd, t.left(), b.fwd, t.right()),
                par(TermKind::CoProdMap, a.bwd, a.type, b.bwd, b.type)};
    }
    }
    return {t, std::nullopt, std::nullopt};
}

}  // namespace

DnfIso to_dnf(const Type& t) {
    Iso i = dnf(t);
    return {i.type, or_id(i.fwd, t), or_id(i.bwd, i.type)};
}

}  // namespace foldreg
