#include "foldreg/stdlib.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>

#include "foldreg/trees.hpp"

namespace foldreg {

namespace {

const SystemFlavor kQf{Flavor::QuantifierFree, false};
const SystemFlavor kPoly{Flavor::Polyregular, false};
const SystemFlavor kLinear{Flavor::Linear, false};
const SystemFlavor kReduced{Flavor::Reduced, false};

Term P(const char* name, std::vector<Type> params) { return Term::prime(name, std::move(params)); }
Term id(const Type& t) { return identity_term(t); }
Type U() { return Type::unit(); }
Type L(const Type& t) { return Type::list(t); }
Type B(const Type& t) { return Type::bang(t); }
Type Pr(const Type& a, const Type& b) { return Type::prod(a, b); }
Type Co(const Type& a, const Type& b) { return Type::coprod(a, b); }
Term par(Term f, Term g) { return Term::par_times(std::move(f), std::move(g)); }
Term alt(Term f, Term g) { return Term::par_plus(std::move(f), std::move(g)); }

Value fresh() { return Value::unit(0); }
Value list_of(std::vector<Value> xs) { return Value::seq(std::move(xs)); }

std::vector<Value> slice(const std::vector<Value>& xs, std::size_t from, std::size_t to) {
    return {xs.begin() + static_cast<std::ptrdiff_t>(from), xs.begin() + static_cast<std::ptrdiff_t>(to)};
}

Value relabel(const Value& v, const EvalTrace& tr) {
    switch (v.kind()) {
    case ValueKind::Unit: {
        auto it = tr.leaf_origin.find(v.id());
        return Value::unit(it == tr.leaf_origin.end() || !it->second ? 0 : *it->second);
    }
    case ValueKind::Zero:
    case ValueKind::Leaf: return v;
    case ValueKind::Pair: return Value::pair(relabel(v.first(), tr), relabel(v.second(), tr));
    case ValueKind::InL: return Value::inl(relabel(v.inner(), tr));
    case ValueKind::InR: return Value::inr(relabel(v.inner(), tr));
    case ValueKind::Bang: return Value::bang(relabel(v.inner(), tr));
    case ValueKind::Seq: {
        std::vector<Value> out;
        out.reserve(v.items().size());
        for (const auto& x : v.items()) out.push_back(relabel(x, tr));
        return Value::seq(std::move(out));
    }
    case ValueKind::Node: return Value::node(relabel(v.left(), tr), relabel(v.label(), tr), relabel(v.right(), tr));
    }
    return v;
}

void inject_steps(const Type& flat, std::size_t index, std::vector<Term>& out) {
    if (flat.is(TypeKind::Unit)) {
        if (index != 0) throw std::invalid_argument("inject: index out of range");
        return;
    }
    if (!flat.is(TypeKind::CoProd)) throw std::invalid_argument("inject: not a coproduct of units: " + to_string(flat));
    std::size_t l = finite_size(flat.left());
    if (index < l) {
        inject_steps(flat.left(), index, out);
        out.push_back(P("coproj1", {flat.left(), flat.right()}));
    } else {
        inject_steps(flat.right(), index - l, out);
        out.push_back(P("coproj2", {flat.left(), flat.right()}));
    }
}

// Keeps the leftmost unit of a product of units.
void collapse_steps(const Type& p, std::vector<Term>& out) {
    if (p.is(TypeKind::Unit)) return;
    if (!p.is(TypeKind::Prod)) throw std::invalid_argument("finite_fun: summand is not a product of units");
    out.push_back(P("proj1", {p.left(), p.right()}));
    collapse_steps(p.left(), out);
}

Term build(const Type& p, const Type& to, std::size_t index) {
    if (to.is(TypeKind::Prod)) {
        if (!p.is(TypeKind::Prod))
            throw std::invalid_argument("finite_fun: cannot build " + to_string(to) + " from " + to_string(p));
        std::size_t r = finite_size(to.right());
        return par(build(p.left(), to.left(), index / r), build(p.right(), to.right(), index % r));
    }
    std::vector<Term> steps;
    collapse_steps(p, steps);
    inject_steps(to, index, steps);
    return steps.empty() ? id(to) : seq(std::move(steps));
}

// A value of the dnf type sitting in the summand at `path` (false = left).
Value in_summand(Value v, const std::vector<bool>& path) {
    for (auto it = path.rbegin(); it != path.rend(); ++it) v = *it ? Value::inr(std::move(v)) : Value::inl(std::move(v));
    return v;
}

struct FiniteFunBuilder {
    const Type& from;
    const Type& to;
    const DnfIso& iso;
    const std::function<std::size_t(std::size_t)>& f;
    std::vector<bool> path;

    Term rec(const Type& d) {
        if (d.is(TypeKind::CoProd)) {
            path.push_back(false);
            Term l = rec(d.left());
            path.back() = true;
            Term r = rec(d.right());
            path.pop_back();
            return seq({alt(std::move(l), std::move(r)), P("codiag", {to})});
        }
        LeafIdSource ids;
        Value rep = in_summand(finite_element(d, 0, ids), path);
        std::size_t src = finite_index(eval_unchecked(iso.backward, rep), from);
        return build(d, to, f(src));
    }
};

// Right list destructor over !Σ*, a fold at level 1.
Term destructor(const Type& s) {
    Type tail = Pr(L(s), s);
    Type gamma = Co(U(), tail);
    Term init = seq({down(U(), Flavor::Polyregular), P("coproj1", {U(), tail})});
    Term first = seq({P("proj1", {s, U()}), P("create-empty", {s, s}), P("comm-times-fwd", {s, L(s)})});
    Term later = seq({P("comm-times-fwd", {s, tail}), par(P("append", {s}), id(s))});
    Term step = seq({P("comm-times-fwd", {gamma, s}), P("distr-fwd", {s, U(), tail}), alt(first, later),
                     P("codiag", {tail}), P("coproj2", {U(), tail})});
    return Term::safefold(1, init, step);
}

// !Σ* -> 1 + Σ, the last letter.
Term last_letter(const Type& s) { return seq({destructor(s), alt(id(U()), P("proj2", {L(s), s}))}); }

// !Σ** -> Σ*, the last letter of every list.
Term last_letters(const Type& s) {
    return seq({push_list(1, L(s)), Term::map(last_letter(s)), Term::map(P("maybe-list", {s})), P("concat", {s})});
}

// The fold behind both prefixes functions, of level 3.
Term prefixes_term(const Type& s, bool reversed) {
    Type ss = L(L(s)), bs = B(L(s)), ba = B(s);
    Term init = seq({Term::bang(seq({down(U(), Flavor::Polyregular), empty_from_unit(s)})),
                     P("create-empty", {bs, L(s)}), P("comm-times-fwd", {bs, ss})});
    Term grow = reversed ? seq({P("comm-times-fwd", {bs, ba}), P("bang-times-bwd", {s, L(s)}),
                                Term::bang(seq({P("coproj2", {U(), Pr(s, L(s))}), P("list-cons", {s})}))})
                         : seq({P("bang-times-bwd", {L(s), s}), Term::bang(P("append", {s}))});
    Term store = reversed ? seq({P("comm-times-fwd", {ss, L(s)}), P("coproj2", {U(), Pr(L(s), ss)}),
                                 P("list-cons", {L(s)})})
                          : P("append", {L(s)});
    Term step = seq({P("assoc-times-bwd", {ss, bs, ba}),
                     par(id(ss), seq({grow, P("absorb", {L(s)}), P("comm-times-fwd", {bs, L(s)})})),
                     P("assoc-times-fwd", {ss, L(s), bs}), par(store, id(bs))});
    return seq({bang_n(2, P("bang-list-fwd", {s})), Term::safefold(2, init, step), P("proj1", {ss, bs})});
}

struct CaseTree {
    Type type;
    std::optional<Term> handler;
    std::vector<CaseTree> kids;
};

CaseTree leaf_case(Type t, Term h) { return {std::move(t), std::move(h), {}}; }
CaseTree node_case(CaseTree l, CaseTree r) {
    Type t = Co(l.type, r.type);
    return {std::move(t), std::nullopt, {std::move(l), std::move(r)}};
}

// A × (cases) -> result, one handler per summand.
Term on_cases(const Type& a, const CaseTree& c, const Type& result) {
    if (c.handler) return *c.handler;
    return seq({P("distr-fwd", {a, c.kids[0].type, c.kids[1].type}),
                alt(on_cases(a, c.kids[0], result), on_cases(a, c.kids[1], result)), P("codiag", {result})});
}

NamedDerivation make(std::string name, std::string summary, Term term, SystemFlavor flavor, int k, Type domain,
                     std::function<Value(const Value&)> ref, Compare cmp = Compare::Exact) {
    return NamedDerivation{.name = std::move(name),
                           .summary = std::move(summary),
                           .term = std::move(term),
                           .flavor = flavor,
                           .weak_k = k,
                           .domain = std::move(domain),
                           .reference = std::move(ref),
                           .compare = cmp,
                           .generator = {},
                           .linear_bound = 0};
}

Value finite_value(const Type& t, std::size_t i) {
    LeafIdSource ids;
    return finite_element(t, i, ids);
}

}  // namespace

Value NamedDerivation::sample(std::size_t size, std::mt19937_64& rng, LeafIdSource& ids) const {
    if (generator) return generator(size, rng, ids);
    return random_sized_value(domain, size, rng, ids);
}

Value canonical_output(const EvalTrace& trace) { return relabel(trace.output, trace); }

// ---------------------------------------------------------------- building blocks

Term bang_n(int n, Term f) {
    for (int i = 0; i < n; ++i) f = Term::bang(std::move(f));
    return f;
}

Term down(const Type& a, Flavor flavor) {
    if (flavor == Flavor::Linear) return seq({P("lin-absorb", {a}), P("proj1", {a, a})});
    return seq({P("absorb", {a}), P("proj2", {B(a), a})});
}

Term empty_from_unit(const Type& a) { return seq({P("create-empty", {U(), a}), P("proj2", {U(), L(a)})}); }

Term push_list(int k, const Type& a) {
    if (k == 0) return id(L(a));
    std::vector<Term> steps;
    Type cur = a;
    for (int j = k; j >= 1; --j) {
        steps.push_back(bang_n(j - 1, P("bang-list-fwd", {cur})));
        cur = B(cur);
    }
    return seq(std::move(steps));
}

Term distr_left(const Type& a, const Type& b, const Type& c) {
    return seq({P("comm-times-fwd", {Co(b, c), a}), P("distr-fwd", {a, b, c}),
                alt(P("comm-times-fwd", {a, b}), P("comm-times-fwd", {a, c}))});
}

Term inject(const Type& flat, std::size_t index) {
    std::vector<Term> steps;
    inject_steps(flat, index, steps);
    return steps.empty() ? id(flat) : seq(std::move(steps));
}

Term finite_fun(const Type& from, const Type& to, const std::function<std::size_t(std::size_t)>& f) {
    if (!is_finite(from) || !is_finite(to)) throw std::invalid_argument("finite_fun: types must be finite");
    DnfIso iso = to_dnf(from);
    FiniteFunBuilder b{from, to, iso, f, {}};
    return seq({iso.forward, b.rec(iso.type)});
}

WeakStage weak_seq(const std::vector<WeakStage>& stages) {
    int total = 0;
    for (const auto& s : stages) total += s.k;
    std::vector<Term> steps;
    int left = total;
    for (const auto& s : stages) {
        left -= s.k;
        steps.push_back(bang_n(left, s.term));
    }
    return {seq(std::move(steps)), total};
}

WeakStage weak_list_map(const WeakStage& f, const Type& a) {
    if (f.k == 0) return {Term::map(f.term), 0};
    return {seq({push_list(f.k, a), Term::map(f.term)}), f.k};
}

// ---------------------------------------------------------------- entries

NamedDerivation prime_entry(const std::string& name, std::vector<Type> params, const Type& domain,
                            std::function<Value(const Value&)> reference) {
    return make(name, "prime " + name, Term::prime(name, std::move(params)), kQf, 0, domain, std::move(reference));
}

NamedDerivation group_mult(std::size_t order, const std::function<std::size_t(std::size_t, std::size_t)>& mult,
                           std::size_t identity) {
    Type g = finite_type(static_cast<int>(order));
    Term init = seq({down(U(), Flavor::Polyregular), inject(g, identity)});
    Term step = finite_fun(Pr(g, g), g, [=](std::size_t i) { return mult(i / order, i % order); });
    auto ref = [=](const Value& in) {
        std::size_t acc = identity;
        for (const auto& x : in.items()) acc = mult(acc, finite_index(x, g));
        return finite_value(g, acc);
    };
    return make("group_mult", "multiplication in a finite group", Term::safefold(1, init, step), kPoly, 1, L(g),
                ref, Compare::Shape);
}

NamedDerivation finite_fun_entry(const Type& from, const Type& to, const std::function<std::size_t(std::size_t)>& f) {
    auto ref = [=](const Value& in) { return finite_value(to, f(finite_index(in, from))); };
    return make("finite_fun", "a function between finite types", finite_fun(from, to, f), kQf, 0, from, ref,
                Compare::Shape);
}

NamedDerivation dfa(std::size_t states, std::size_t sigma, const std::vector<std::vector<std::size_t>>& delta,
                    const std::vector<bool>& accepting) {
    Type q = finite_type(static_cast<int>(states));
    Type s = finite_type(static_cast<int>(sigma));
    Type bit = finite_type(2);
    Term init = seq({down(U(), Flavor::Polyregular), inject(q, 0)});
    Term step = finite_fun(Pr(q, s), q, [=](std::size_t i) { return delta[i / sigma][i % sigma]; });
    Term out = finite_fun(q, bit, [=](std::size_t i) -> std::size_t { return accepting[i] ? 1 : 0; });
    auto ref = [=](const Value& in) {
        std::size_t st = 0;
        for (const auto& x : in.items()) st = delta[st][finite_index(x, s)];
        return finite_value(bit, accepting[st] ? 1 : 0);
    };
    return make("dfa", "language acceptor; output inr means accept", seq({Term::safefold(1, init, step), out}), kPoly,
                1, L(s), ref, Compare::Shape);
}

NamedDerivation mealy(std::size_t states, std::size_t sigma, std::size_t gamma,
                      const std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& delta) {
    Type q = finite_type(static_cast<int>(states));
    Type s = finite_type(static_cast<int>(sigma));
    Type g = finite_type(static_cast<int>(gamma));
    Term trans = finite_fun(Pr(q, s), Pr(q, g), [=](std::size_t i) {
        auto [next, out] = delta[i / sigma][i % sigma];
        return next * gamma + out;
    });
    Term step = seq({P("assoc-times-bwd", {q, L(g), s}), par(id(q), P("comm-times-fwd", {L(g), s})),
                     P("assoc-times-fwd", {q, s, L(g)}), par(trans, id(L(g))), P("assoc-times-bwd", {q, g, L(g)}),
                     par(id(q), seq({P("comm-times-fwd", {g, L(g)}), P("append", {g})}))});
    Term init = seq({down(U(), Flavor::Polyregular), inject(q, 0), P("create-empty", {q, g})});
    auto ref = [=](const Value& in) {
        std::size_t st = 0;
        std::vector<Value> out;
        for (const auto& x : in.items()) {
            auto [next, o] = delta[st][finite_index(x, s)];
            st = next;
            out.push_back(finite_value(g, o));
        }
        return list_of(std::move(out));
    };
    return make("mealy", "Mealy machine with one output letter per transition",
                seq({Term::safefold(1, init, step), P("proj2", {q, L(g)})}), kPoly, 1, L(s), ref, Compare::Shape);
}

NamedDerivation list_destructor(const Type& sigma) {
    auto ref = [](const Value& in) {
        const auto& xs = in.items();
        if (xs.empty()) return Value::inl(fresh());
        return Value::inr(Value::pair(list_of(slice(xs, 0, xs.size() - 1)), xs.back()));
    };
    return make("list_destructor", "splits off the last letter", destructor(sigma), kPoly, 1, L(sigma), ref);
}

NamedDerivation prefixes_rev(const Type& sigma) {
    auto ref = [](const Value& in) {
        const auto& xs = in.items();
        std::vector<Value> out;
        for (std::size_t n = xs.size(); n >= 1; --n) {
            std::vector<Value> p(xs.rend() - static_cast<std::ptrdiff_t>(n), xs.rend());
            out.push_back(list_of(std::move(p)));
        }
        return list_of(std::move(out));
    };
    return make("prefixes_rev", "reversed prefixes, longest first", prefixes_term(sigma, true), kPoly, 3, L(sigma),
                ref);
}

NamedDerivation prefixes_plain(const Type& sigma) {
    auto ref = [](const Value& in) {
        const auto& xs = in.items();
        std::vector<Value> out;
        for (std::size_t n = 1; n <= xs.size(); ++n) out.push_back(list_of(slice(xs, 0, n)));
        return list_of(std::move(out));
    };
    return make("prefixes_plain", "non-empty prefixes, shortest first", prefixes_term(sigma, false), kPoly, 3,
                L(sigma), ref);
}

NamedDerivation split(const Type& sigma) {
    Type s = sigma, ls = L(s), lls = L(L(s));
    Term empty_pair = seq({empty_from_unit(s), P("create-empty", {ls, s})});
    WeakStage h = weak_seq({
        {P("reverse", {ls}), 0},
        {destructor(ls), 1},
        {alt(id(U()), P("comm-times-fwd", {lls, ls})), 0},
        {seq({P("bang-plus-fwd", {U(), Pr(ls, lls)}),
              alt(down(U(), Flavor::Polyregular),
                  seq({P("bang-times-fwd", {ls, lls}), par(down(ls, Flavor::Polyregular), last_letters(s))}))}),
         1},
        {seq({alt(empty_pair, par(id(ls), P("reverse", {s}))), P("codiag", {Pr(ls, ls)})}), 0},
    });
    WeakStage all = weak_seq({
        {prefixes_term(s, true), 3},
        {Term::map(P("reverse", {s})), 0},
        {seq({P("create-empty", {lls, s}), P("append", {ls})}), 0},
        {prefixes_term(ls, true), 3},
        weak_list_map(h, lls),
    });
    auto ref = [](const Value& in) {
        const auto& xs = in.items();
        std::vector<Value> out;
        for (std::size_t i = 0; i <= xs.size(); ++i)
            out.push_back(Value::pair(list_of(slice(xs, 0, i)), list_of(slice(xs, i, xs.size()))));
        return list_of(std::move(out));
    };
    return make("split", "all ways of cutting the list in two", all.term, kPoly, all.k, ls, ref);
}

NamedDerivation block(const Type& sigma, const Type& gamma) {
    Type s = L(sigma), g = L(gamma), k = Co(s, g), c = Co(U(), k), bt = L(k), x = Co(sigma, gamma);
    Term to_c = P("coproj2", {U(), k});
    Term cx = seq({distr_left(x, U(), k),
                   alt(id(Pr(U(), x)), seq({distr_left(x, s, g), alt(P("distr-fwd", {s, sigma, gamma}),
                                                                      P("distr-fwd", {g, sigma, gamma}))}))});
    CaseTree cases = node_case(
        leaf_case(Pr(U(), x), par(id(bt), seq({P("proj2", {U(), x}),
                                                alt(P("list-unit", {sigma}), P("list-unit", {gamma})), to_c}))),
        node_case(
            node_case(leaf_case(Pr(s, sigma), par(id(bt), seq({P("append", {sigma}), P("coproj1", {s, g}), to_c}))),
                      leaf_case(Pr(s, gamma),
                                seq({P("assoc-times-fwd", {bt, s, gamma}),
                                     par(seq({par(id(bt), P("coproj1", {s, g})), P("append", {k})}),
                                         seq({P("list-unit", {gamma}), P("coproj2", {s, g}), to_c}))}))),
            node_case(leaf_case(Pr(g, sigma),
                                seq({P("assoc-times-fwd", {bt, g, sigma}),
                                     par(seq({par(id(bt), P("coproj2", {s, g})), P("append", {k})}),
                                         seq({P("list-unit", {sigma}), P("coproj1", {s, g}), to_c}))})),
                      leaf_case(Pr(g, gamma),
                                par(id(bt), seq({P("append", {gamma}), P("coproj2", {s, g}), to_c}))))));
    Term step = seq({P("assoc-times-bwd", {bt, c, x}), par(id(bt), cx), on_cases(bt, cases, Pr(bt, c))});
    Term init = seq({down(U(), Flavor::Polyregular), P("create-empty", {U(), k}), P("comm-times-fwd", {U(), bt}),
                     par(id(bt), P("coproj1", {U(), k}))});
    Term finish = seq({P("comm-times-fwd", {bt, c}), distr_left(bt, U(), k),
                       alt(P("proj2", {U(), bt}), seq({P("comm-times-fwd", {k, bt}), P("append", {k})})),
                       P("codiag", {bt})});
    auto ref = [](const Value& in) {
        std::vector<Value> out, cur;
        bool left = false;
        auto flush = [&] {
            if (cur.empty()) return;
            Value l = list_of(std::move(cur));
            out.push_back(left ? Value::inl(std::move(l)) : Value::inr(std::move(l)));
            cur.clear();
        };
        for (const auto& e : in.items()) {
            bool l = e.is(ValueKind::InL);
            if (!cur.empty() && l != left) flush();
            left = l;
            cur.push_back(e.inner());
        }
        flush();
        return list_of(std::move(out));
    };
    return make("block", "maximal blocks of letters from the same side",
                seq({Term::safefold(1, init, step), finish}), kPoly, 1, L(x), ref);
}

NamedDerivation square_underline(const Type& tau) {
    Type t = tau, lt = L(t), llt = L(L(t)), tt = Co(t, t), ltt = L(tt);
    Term second = seq({alt(empty_from_unit(tt), seq({par(Term::map(P("coproj1", {t, t})), P("coproj2", {t, t})),
                                                     P("append", {tt})})),
                       P("codiag", {ltt})});
    WeakStage h = weak_seq({
        {destructor(lt), 1},
        {seq({P("bang-plus-fwd", {U(), Pr(llt, lt)}),
              alt(down(U(), Flavor::Polyregular),
                  seq({P("bang-times-fwd", {llt, lt}), par(last_letters(t), destructor(t))}))}),
         1},
        {seq({alt(empty_from_unit(tt),
                  seq({par(seq({P("reverse", {t}), Term::map(P("coproj1", {t, t}))}), second),
                       P("comm-times-fwd", {ltt, ltt}), P("concat2", {tt})})),
              P("codiag", {ltt})}),
         0},
    });
    WeakStage all = weak_seq({
        {prefixes_term(t, false), 3},
        {P("reverse", {lt}), 0},
        {prefixes_term(lt, false), 3},
        {P("reverse", {llt}), 0},
        weak_list_map(h, llt),
        {P("concat", {tt}), 0},
    });
    auto ref = [](const Value& in) {
        const auto& xs = in.items();
        std::vector<Value> out;
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = 0; j < xs.size(); ++j)
                out.push_back(i == j ? Value::inr(xs[j]) : Value::inl(xs[j]));
        return list_of(std::move(out));
    };
    return make("square_underline", "n copies of the word, the i-th with its i-th letter marked", all.term, kPoly,
                all.k, lt, ref);
}

NamedDerivation squaring(const Type& sigma) {
    Type s = sigma, ls = L(s), bs = B(ls), letter = Co(bs, s), st = Pr(ls, bs);
    Term spread = seq({P("absorb", {ls}),
                       par(seq({P("list-unit", {bs}), Term::map(P("coproj1", {bs, s}))}),
                           Term::map(P("coproj2", {bs, s}))),
                       P("concat2", {letter})});
    Term init = seq({Term::bang(seq({down(U(), Flavor::Polyregular), empty_from_unit(s)})),
                     P("create-empty", {bs, s}), P("comm-times-fwd", {bs, ls})});
    Term keep = seq({P("assoc-times-bwd", {ls, bs, bs}), par(id(ls), P("proj2", {bs, bs}))});
    Term emit = seq({P("proj1", {st, s}), par(id(ls), seq({P("absorb", {ls}), P("comm-times-fwd", {bs, ls})})),
                     P("assoc-times-fwd", {ls, ls, bs}), par(P("concat2", {s}), id(bs))});
    Term step = seq({P("distr-fwd", {st, bs, s}), alt(keep, emit), P("codiag", {st})});
    auto ref = [](const Value& in) {
        const auto& xs = in.items();
        std::vector<Value> out;
        for (std::size_t i = 0; i < xs.size(); ++i) out.insert(out.end(), xs.begin(), xs.end());
        return list_of(std::move(out));
    };
    return make("squaring", "the word repeated once per letter",
                seq({bang_n(2, spread), Term::safefold(2, init, step), P("proj1", {ls, bs})}), kPoly, 3, ls, ref);
}

NamedDerivation weak_map(const Term& f, const Type& from, const Type& to, std::function<Value(const Value&)> ref) {
    Term init = seq({down(U(), Flavor::Reduced), P("coproj1", {U(), to}), P("maybe-list", {to})});
    Term step = seq({par(id(L(to)), seq({f, P("coproj2", {U(), to}), P("maybe-list", {to})})), P("concat2", {to})});
    auto r = [ref](const Value& in) {
        std::vector<Value> out;
        for (const auto& x : in.items()) out.push_back(ref(x));
        return list_of(std::move(out));
    };
    return make("weak_map", "map through a safe fold", Term::safefold(1, init, step), kReduced, 1, L(from), r);
}

NamedDerivation reduced_reverse(const Type& sigma) {
    Type s = sigma;
    Term init = seq({down(U(), Flavor::Reduced), P("coproj1", {U(), s}), P("maybe-list", {s})});
    Term step = seq({P("comm-times-fwd", {L(s), s}), par(seq({P("coproj2", {U(), s}), P("maybe-list", {s})}), id(L(s))),
                     P("concat2", {s})});
    auto ref = [](const Value& in) {
        std::vector<Value> xs(in.items().rbegin(), in.items().rend());
        return list_of(std::move(xs));
    };
    return make("reduced_reverse", "reverse from binary concatenation", Term::safefold(1, init, step), kReduced, 1,
                L(s), ref);
}

NamedDerivation linear_duplicate(const Type& sigma) {
    auto ref = [](const Value& in) {
        std::vector<Value> xs = in.items();
        xs.insert(xs.end(), in.items().begin(), in.items().end());
        return list_of(std::move(xs));
    };
    auto d = make("duplicate", "the word twice", seq({P("lin-absorb", {L(sigma)}), P("concat2", {sigma})}), kLinear, 1,
                  L(sigma), ref);
    d.linear_bound = 2;
    return d;
}

NamedDerivation linear_reverse(const Type& sigma) {
    Type s = sigma;
    Term init = seq({down(U(), Flavor::Linear), empty_from_unit(s)});
    Term step = seq({P("comm-times-fwd", {L(s), s}), P("coproj2", {U(), Pr(s, L(s))}), P("list-cons", {s})});
    auto ref = [](const Value& in) {
        std::vector<Value> xs(in.items().rbegin(), in.items().rend());
        return list_of(std::move(xs));
    };
    auto d = make("linear_reverse", "fold of the left list constructor", Term::safefold(1, init, step), kLinear, 1,
                  L(s), ref);
    d.linear_bound = 1;
    return d;
}

NamedDerivation linear_identity(const Type& sigma) {
    Term init = seq({down(U(), Flavor::Linear), empty_from_unit(sigma)});
    auto d = make("linear_identity", "fold of append", Term::safefold(1, init, P("append", {sigma})), kLinear, 1,
                  L(sigma), [](const Value& in) { return in; });
    d.linear_bound = 1;
    return d;
}

namespace {

Term infix_step(const Type& s) {
    return seq({P("assoc-times-fwd", {L(s), s, L(s)}), par(P("append", {s}), id(L(s))), P("concat2", {s})});
}

InputGenerator tree_gen(const Type& label) {
    return [label](std::size_t n, std::mt19937_64& rng, LeafIdSource& ids) { return random_tree(label, n, rng, ids); };
}

}  // namespace

NamedDerivation tree_infix(const Type& sigma) {
    Term init = seq({down(U(), Flavor::Linear), empty_from_unit(sigma)});
    auto d = make("tree_infix", "labels in infix order", Term::treefold(1, init, infix_step(sigma)),
                  SystemFlavor{Flavor::Linear, true}, 1, Type::tree(sigma),
                  [](const Value& in) { return list_of(infix_labels(in)); });
    d.generator = tree_gen(sigma);
    d.linear_bound = 1;
    return d;
}

NamedDerivation tree_size(const Type& sigma) {
    Term init = seq({down(U(), Flavor::Linear), empty_from_unit(U())});
    Term step = seq({par(id(L(U())), par(finite_fun(sigma, U(), [](std::size_t) { return std::size_t{0}; }),
                                         id(L(U())))),
                     infix_step(U())});
    auto ref = [](const Value& in) { return list_of(std::vector<Value>(foldreg::tree_size(in), fresh())); };
    auto d = make("tree_size", "one unit per node", Term::treefold(1, init, step), SystemFlavor{Flavor::Linear, true},
                  1, Type::tree(sigma), ref, Compare::Shape);
    d.generator = tree_gen(sigma);
    d.linear_bound = 1;
    return d;
}

std::vector<NamedDerivation> catalog() {
    Type s3 = finite_type(3), s2 = finite_type(2);
    auto rev = [](const Value& in) {
        std::vector<Value> xs(in.items().rbegin(), in.items().rend());
        return list_of(std::move(xs));
    };
    std::vector<NamedDerivation> out;
    out.push_back(prime_entry("reverse", {s3}, L(s3), rev));
    out.push_back(prime_entry("concat", {s3}, L(L(s3)), [](const Value& in) {
        std::vector<Value> xs;
        for (const auto& l : in.items()) xs.insert(xs.end(), l.items().begin(), l.items().end());
        return list_of(std::move(xs));
    }));
    auto append_ref = [](const Value& in) {
        std::vector<Value> xs = in.first().items();
        xs.push_back(in.second());
        return list_of(std::move(xs));
    };
    out.push_back(prime_entry("append", {s3}, Pr(L(s3), s3), append_ref));
    out.push_back(prime_entry("list-distribute", {s3, s2}, L(Pr(s3, s2)), [](const Value& in) {
        std::vector<Value> a, b;
        for (const auto& p : in.items()) {
            a.push_back(p.first());
            b.push_back(p.second());
        }
        return Value::pair(list_of(std::move(a)), list_of(std::move(b)));
    }));
    out.push_back(prime_entry("create-empty", {s3, s2}, s3,
                              [](const Value& in) { return Value::pair(in, list_of({})); }));
    auto cons_ref = [](const Value& in) {
        if (in.is(ValueKind::InL)) return list_of({});
        std::vector<Value> xs{in.inner().first()};
        const auto& rest = in.inner().second().items();
        xs.insert(xs.end(), rest.begin(), rest.end());
        return list_of(std::move(xs));
    };
    out.push_back(prime_entry("list-cons", {s3}, Co(U(), Pr(s3, L(s3))), cons_ref));

    // append and the left constructor, each from the other
    out.push_back(make("append_via_cons", "append from list-cons and reverse",
                       seq({par(P("reverse", {s3}), id(s3)), P("comm-times-fwd", {L(s3), s3}),
                            P("coproj2", {U(), Pr(s3, L(s3))}), P("list-cons", {s3}), P("reverse", {s3})}),
                       kQf, 0, Pr(L(s3), s3), append_ref));
    out.push_back(make("cons_via_append", "list-cons from append and reverse",
                       seq({alt(empty_from_unit(s3), seq({P("comm-times-fwd", {s3, L(s3)}),
                                                         par(P("reverse", {s3}), id(s3)), P("append", {s3}),
                                                         P("reverse", {s3})})),
                            P("codiag", {L(s3)})}),
                       kQf, 0, Co(U(), Pr(s3, L(s3))), cons_ref));

    out.push_back(finite_fun_entry(Pr(s2, s3), s3, [](std::size_t i) { return (i / 3 + i % 3) % 3; }));
    out.push_back(group_mult(2, [](std::size_t a, std::size_t b) { return a ^ b; }, 0));
    // even number of a's, a = letter 0
    out.push_back(dfa(2, 2, {{1, 0}, {0, 1}}, {true, false}));
    // emits the parity of the a's read so far
    out.push_back(mealy(2, 2, 2, {{{1, 1}, {0, 0}}, {{0, 0}, {1, 1}}}));
    out.push_back(list_destructor(s3));
    out.push_back(prefixes_rev(s3));
    out.push_back(prefixes_plain(s3));
    out.push_back(split(s3));
    out.push_back(block(s2, s2));
    out.push_back(square_underline(s3));
    out.push_back(squaring(s3));
    out.push_back(weak_map(P("comm-plus-fwd", {U(), s2}), s3, Co(s2, U()), [](const Value& x) {
        return x.is(ValueKind::InL) ? Value::inr(x.inner()) : Value::inl(x.inner());
    }));
    out.push_back(reduced_reverse(s3));
    out.push_back(linear_duplicate(s3));
    out.push_back(linear_reverse(s3));
    out.push_back(linear_identity(s3));
    out.push_back(tree_infix(s3));
    out.push_back(tree_size(s3));
    return out;
}

const NamedDerivation& catalog_entry(const std::string& name) {
    static const std::vector<NamedDerivation> all = catalog();
    for (const auto& d : all)
        if (d.name == name) return d;
    throw std::out_of_range("no catalog entry '" + name + "'");
}

DerivationReport check_derivation(const NamedDerivation& d, std::size_t trials, std::size_t max_size,
                                  std::uint64_t seed) {
    DerivationReport rep;
    rep.name = d.name;
    std::optional<Term> weak;
    try {
        weak = d.weak_term();
    } catch (const TypeErrorException& e) {
        rep.error = e.what();
        return rep;
    }
    const Term& w = *weak;
    auto ty = infer_type(w, d.flavor);
    if (!ty) {
        rep.error = to_string(ty.error());
        return rep;
    }
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        LeafIdSource ids;
        Value in = d.sample(rng() % (max_size + 1), rng, ids);
        Value want = d.reference(in);
        Value got;
        bool ok;
        if (d.compare == Compare::Exact) {
            got = canonical_output(eval_traced(w, in, d.flavor));
            ok = got == want;
        } else {
            got = eval(w, in, d.flavor);
            ok = same_shape(got, want);
        }
        ++rep.trials;
        if (!ok) {
            rep.error = "input " + serialize(in) + " expected " + serialize(want) + " got " + serialize(got);
            return rep;
        }
    }
    rep.passed = true;
    return rep;
}

Term linear_to_poly(const Term& t) {
    switch (t.kind()) {
    case TermKind::Prime:
        if (t.op() == PrimeOp::LinAbsorb) {
            const Type& a = t.params().at(0);
            return seq({P("absorb", {a}), par(down(a, Flavor::Polyregular), id(a))});
        }
        return t;
    case TermKind::Compose: return Term::compose(linear_to_poly(t.child(0)), linear_to_poly(t.child(1)));
    case TermKind::ProdMap: return Term::par_times(linear_to_poly(t.child(0)), linear_to_poly(t.child(1)));
    case TermKind::CoProdMap: return Term::par_plus(linear_to_poly(t.child(0)), linear_to_poly(t.child(1)));
    case TermKind::Map: return Term::map(linear_to_poly(t.child(0)));
    case TermKind::BangMap: return Term::bang(linear_to_poly(t.child(0)));
    case TermKind::SafeFold: return Term::safefold(t.k(), linear_to_poly(t.child(0)), linear_to_poly(t.child(1)));
    case TermKind::TreeFold: return Term::treefold(t.k(), linear_to_poly(t.child(0)), linear_to_poly(t.child(1)));
    case TermKind::Upgrade: return t;
    }
    return t;
}

// ---------------------------------------------------------------- goldens

namespace {

using Names = std::map<LeafId, std::string>;

std::string render(const Value& v, const Type& t, const Names& names) {
    auto name_of = [&](LeafId id) {
        auto it = names.find(id);
        return it == names.end() ? std::string("?") : it->second;
    };
    if (is_finite(t) && leaf_count(v) == 1) return name_of(leaf_ids(v).front());
    switch (t.kind()) {
    case TypeKind::List: {
        std::string s = "[";
        for (std::size_t i = 0; i < v.items().size(); ++i) {
            if (i) s += ",";
            s += render(v.items()[i], t.inner(), names);
        }
        return s + "]";
    }
    case TypeKind::Prod: return "(" + render(v.first(), t.left(), names) + "," + render(v.second(), t.right(), names) + ")";
    case TypeKind::CoProd:
        return v.is(ValueKind::InL) ? render(v.inner(), t.left(), names) : render(v.inner(), t.right(), names);
    case TypeKind::Bang: return render(v.inner(), t.inner(), names);
    default: return serialize(v);
    }
}

// A word over a finite alphabet; letter i gets element i mod |alphabet|.
Value word(const std::vector<std::string>& letters, const Type& alphabet, LeafIdSource& ids, Names& names,
           const std::function<bool(const std::string&)>& right = {}) {
    std::vector<Value> xs;
    for (std::size_t i = 0; i < letters.size(); ++i) {
        Type a = right ? (right(letters[i]) ? alphabet.right() : alphabet.left()) : alphabet;
        Value x = finite_element(a, i % finite_size(a), ids);
        names[leaf_ids(x).front()] = letters[i];
        if (right) x = right(letters[i]) ? Value::inr(std::move(x)) : Value::inl(std::move(x));
        xs.push_back(std::move(x));
    }
    return list_of(std::move(xs));
}

std::vector<std::string> chars(const std::string& s) {
    std::vector<std::string> out;
    for (char c : s) out.emplace_back(1, c);
    return out;
}

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? sep : "") + xs[i];
    return s;
}

GoldenResult golden(const NamedDerivation& d, const std::vector<std::string>& letters, std::string expected,
                    const std::function<bool(const std::string&)>& right = {}) {
    LeafIdSource ids;
    Names names;
    Type alphabet = d.domain.inner();
    Value in = word(letters, alphabet, ids, names, right);
    Value out = canonical_output(eval_traced(d.weak_term(), in, d.flavor));
    FunctionType ft = type_of(d.weak_term(), d.flavor);
    return {d.name, "[" + join(letters, ",") + "]", std::move(expected), render(out, ft.cod, names)};
}

}  // namespace

std::vector<GoldenResult> run_goldens() {
    std::vector<GoldenResult> out;
    auto digits = chars("123");
    out.push_back(golden(catalog_entry("split"), digits, "[([],[1,2,3]),([1],[2,3]),([1,2],[3]),([1,2,3],[])]"));
    out.push_back(golden(catalog_entry("block"), chars("12a345bc"), "[[1,2],[a],[3,4,5],[b,c]]",
                         [](const std::string& c) { return std::isalpha(static_cast<unsigned char>(c[0])) != 0; }));
    out.push_back(golden(catalog_entry("prefixes_rev"), {"a1", "a2", "a3"}, "[[a3,a2,a1],[a2,a1],[a1]]"));
    out.push_back(golden(catalog_entry("prefixes_plain"), digits, "[[1],[1,2],[1,2,3]]"));
    out.push_back(golden(catalog_entry("squaring"), digits, "[1,2,3,1,2,3,1,2,3]"));
    out.push_back(golden(catalog_entry("reverse"), digits, "[3,2,1]"));
    out.push_back(golden(catalog_entry("linear_reverse"), digits, "[3,2,1]"));
    out.push_back(golden(catalog_entry("duplicate"), digits, "[1,2,3,1,2,3]"));

    // Underlined letters come from the right copy; printed with a leading '_'
    // and a space after every copy of the word.
    const NamedDerivation& su = catalog_entry("square_underline");
    LeafIdSource ids;
    Names names;
    auto letters = chars("abcd");
    Value in = word(letters, su.domain.inner(), ids, names);
    Value res = canonical_output(eval_traced(su.weak_term(), in, su.flavor));
    std::string actual;
    for (std::size_t i = 0; i < res.items().size(); ++i) {
        const Value& x = res.items()[i];
        if (i && i % letters.size() == 0) actual += " ";
        if (x.is(ValueKind::InR)) actual += "_";
        actual += names[leaf_ids(x).front()];
    }
    out.push_back({su.name, "[a,b,c,d]", "_abcd a_bcd ab_cd abc_d", actual});
    return out;
}

// ---------------------------------------------------------------- ill-typed folds

Term fold_duplication(int k) {
    Type u = L(U());
    Term init = bang_n(k, P("list-unit", {U()}));
    Term dup = seq({P("absorb", {u}), par(down(u, Flavor::Polyregular), id(u)), P("concat2", {U()})});
    Term step = k == 0 ? seq({par(dup, id(U())), P("proj1", {u, U()})})
                       : seq({P("proj1", {bangs(k, u), U()}), bang_n(k - 1, dup)});
    return Term::safefold(k, init, step);
}

Term fold_tail(int k) {
    Type u = L(U()), x = Co(u, u), l = Co(U(), U()), bu = B(u);
    Term dest = destructor(U());
    auto shrink = [&](bool negative) {
        // empty list: cross zero; otherwise drop one element
        Term empty = seq({empty_from_unit(U()), P(negative ? "coproj2" : "coproj1", {u, u})});
        Term rest = seq({P("proj1", {u, U()}), P(negative ? "coproj1" : "coproj2", {u, u})});
        return seq({P("proj1", {bu, U()}), dest, alt(empty, rest), P("codiag", {x})});
    };
    auto grow = [&](bool negative) {
        return seq({par(down(u, Flavor::Polyregular), id(U())), P("append", {U()}),
                    P(negative ? "coproj1" : "coproj2", {u, u})});
    };
    Term on_neg = seq({P("distr-fwd", {bu, U(), U()}), alt(shrink(true), grow(true)), P("codiag", {x})});
    Term on_pos = seq({P("distr-fwd", {bu, U(), U()}), alt(grow(false), shrink(false)), P("codiag", {x})});
    Term core = seq({P("bang-times-fwd", {x, l}), par(P("bang-plus-fwd", {u, u}), down(l, Flavor::Polyregular)),
                     distr_left(l, bu, bu), alt(on_neg, on_pos), P("codiag", {x})});
    Term zero = seq({empty_from_unit(U()), P("coproj2", {u, u})});
    Term step = core;
    if (k > 0) {
        std::vector<Term> steps;
        for (int j = 0; j < k; ++j)
            steps.push_back(bang_n(j, P("bang-times-bwd", {bangs(k - 1 - j, x), bangs(k - 1 - j, l)})));
        steps.push_back(bang_n(k - 1, core));
        step = seq(std::move(steps));
    }
    return Term::safefold(k, bang_n(k, zero), step);
}

}  // namespace foldreg
