#include "foldreg/eval.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

namespace foldreg {

namespace {

constexpr LeafId kFreshMark = std::numeric_limits<LeafId>::max();

[[noreturn]] void bad(const char* what) { throw EvalError(std::string("eval: ") + what); }

const Value& expect(const Value& v, ValueKind k, const char* what) {
    if (!v.is(k)) bad(what);
    return v;
}

class Evaluator {
public:
    explicit Evaluator(bool track) : track_(track) {}

    Value run(const Term& t, const Value& v) {
        if (t.is(TermKind::Compose) && t.child(0).is(TermKind::Upgrade))
            return apply(t.child(1), wrap(t.child(0).k(), v));
        return apply(t, v);
    }

    // Input leaf for a leaf id, or kFreshMark.
    LeafId origin(LeafId id) const {
        if (id < kFreshBase) return id;
        auto it = origin_.find(id);
        return it == origin_.end() ? kFreshMark : it->second;
    }

private:
    bool track_;
    LeafId next_ = kFreshBase;
    std::unordered_map<LeafId, LeafId> origin_;

    static Value wrap(int k, Value v) {
        for (int i = 0; i < k; ++i) v = Value::bang(std::move(v));
        return v;
    }

    LeafId fresh() { return next_++; }

    // Copy with new leaf ids, remembering where each came from.
    Value copy(const Value& v) {
        switch (v.kind()) {
        case ValueKind::Zero:
        case ValueKind::Leaf: return v;
        case ValueKind::Unit: {
            LeafId id = fresh();
            if (track_) origin_[id] = origin(v.id());
            return Value::unit(id);
        }
        case ValueKind::Pair: return Value::pair(copy(v.first()), copy(v.second()));
        case ValueKind::InL: return Value::inl(copy(v.inner()));
        case ValueKind::InR: return Value::inr(copy(v.inner()));
        case ValueKind::Bang: return Value::bang(copy(v.inner()));
        case ValueKind::Seq: {
            std::vector<Value> items;
            items.reserve(v.items().size());
            for (const auto& x : v.items()) items.push_back(copy(x));
            return Value::seq(std::move(items));
        }
        case ValueKind::Node: return Value::node(copy(v.left()), copy(v.label()), copy(v.right()));
        }
        return v;
    }

    Value apply(const Term& t, const Value& v) {
        switch (t.kind()) {
        case TermKind::Prime: return prime(*t.op(), v);
        case TermKind::Upgrade: return wrap(t.k(), v);
        case TermKind::Compose: return apply(t.child(1), apply(t.child(0), v));
        case TermKind::ProdMap:
            expect(v, ValueKind::Pair, "par× on a non-pair");
            return Value::pair(apply(t.child(0), v.first()), apply(t.child(1), v.second()));
        case TermKind::CoProdMap:
            if (v.is(ValueKind::InL)) return Value::inl(apply(t.child(0), v.inner()));
            if (v.is(ValueKind::InR)) return Value::inr(apply(t.child(1), v.inner()));
            bad("par+ on a non-coproduct");
        case TermKind::Map: {
            expect(v, ValueKind::Seq, "map on a non-list");
            std::vector<Value> out;
            out.reserve(v.items().size());
            for (const auto& x : v.items()) out.push_back(apply(t.child(0), x));
            return Value::seq(std::move(out));
        }
        case TermKind::BangMap:
            expect(v, ValueKind::Bang, "bang functor on a non-bang");
            return Value::bang(apply(t.child(0), v.inner()));
        case TermKind::SafeFold: return fold(t, v);
        case TermKind::TreeFold: return tree_fold(t, v);
        }
        bad("unknown term");
    }

    Value init_state(const Term& t) { return apply(t.child(0), wrap(t.k(), Value::unit(fresh()))); }

    Value fold(const Term& t, Value v) {
        for (int i = 0; i < t.k(); ++i) v = expect(v, ValueKind::Bang, "fold input lacks bangs").inner();
        expect(v, ValueKind::Seq, "fold over a non-list");
        Value state = init_state(t);
        const Term& step = t.child(1);
        for (const auto& x : v.items()) state = apply(step, Value::pair(std::move(state), x));
        return state;
    }

    Value tree_fold(const Term& t, Value v) {
        for (int i = 0; i < t.k(); ++i) v = expect(v, ValueKind::Bang, "tree fold input lacks bangs").inner();
        const Term& step = t.child(1);
        // Post-order with an explicit stack so deep trees do not recurse.
        struct Frame {
            Value node;
            int stage;
        };
        std::vector<Frame> stack{{v, 0}};
        std::vector<Value> results;
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.node.is(ValueKind::Leaf)) {
                stack.pop_back();
                results.push_back(init_state(t));
                continue;
            }
            expect(f.node, ValueKind::Node, "tree fold over a non-tree");
            if (f.stage == 0) {
                f.stage = 1;
                Value l = f.node.left();
                stack.push_back({l, 0});
            } else if (f.stage == 1) {
                f.stage = 2;
                Value r = f.node.right();
                stack.push_back({r, 0});
            } else {
                Value label = f.node.label();
                stack.pop_back();
                Value right = std::move(results.back());
                results.pop_back();
                Value left = std::move(results.back());
                results.pop_back();
                results.push_back(apply(step, Value::pair(std::move(left), Value::pair(label, std::move(right)))));
            }
        }
        return results.back();
    }

    static Value tree_from_context(const Value& ctx, Value hole) {
        const auto& steps = expect(ctx, ValueKind::Seq, "context is not a list").items();
        for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
            const Value& s = *it;
            if (s.is(ValueKind::InL)) {
                hole = Value::node(s.inner().first(), s.inner().second(), std::move(hole));
            } else {
                hole = Value::node(std::move(hole), s.inner().first(), s.inner().second());
            }
        }
        return hole;
    }

    static Value bang_labels(const Value& t, bool add) {
        if (t.is(ValueKind::Leaf)) return t;
        expect(t, ValueKind::Node, "bang-tree on a non-tree");
        Value label = add ? Value::bang(t.label()) : expect(t.label(), ValueKind::Bang, "label lacks bang").inner();
        return Value::node(bang_labels(t.left(), add), label, bang_labels(t.right(), add));
    }

    Value prime(PrimeOp op, const Value& v) {
        switch (op) {
        case PrimeOp::CommTimesFwd:
        case PrimeOp::CommTimesBwd:
            expect(v, ValueKind::Pair, "comm-times");
            return Value::pair(v.second(), v.first());
        case PrimeOp::CommPlusFwd:
        case PrimeOp::CommPlusBwd:
            if (v.is(ValueKind::InL)) return Value::inr(v.inner());
            return Value::inl(expect(v, ValueKind::InR, "comm-plus").inner());
        case PrimeOp::AssocTimesFwd: {
            const Value& r = expect(expect(v, ValueKind::Pair, "assoc").second(), ValueKind::Pair, "assoc");
            return Value::pair(Value::pair(v.first(), r.first()), r.second());
        }
        case PrimeOp::AssocTimesBwd: {
            const Value& l = expect(expect(v, ValueKind::Pair, "assoc").first(), ValueKind::Pair, "assoc");
            return Value::pair(l.first(), Value::pair(l.second(), v.second()));
        }
        case PrimeOp::AssocPlusFwd:
            if (v.is(ValueKind::InL)) return Value::inl(Value::inl(v.inner()));
            expect(v, ValueKind::InR, "assoc-plus");
            if (v.inner().is(ValueKind::InL)) return Value::inl(Value::inr(v.inner().inner()));
            return Value::inr(expect(v.inner(), ValueKind::InR, "assoc-plus").inner());
        case PrimeOp::AssocPlusBwd:
            if (v.is(ValueKind::InR)) return Value::inr(Value::inr(v.inner()));
            expect(v, ValueKind::InL, "assoc-plus");
            if (v.inner().is(ValueKind::InR)) return Value::inr(Value::inl(v.inner().inner()));
            return Value::inl(expect(v.inner(), ValueKind::InL, "assoc-plus").inner());
        case PrimeOp::DistrFwd: {
            expect(v, ValueKind::Pair, "distr");
            const Value& s = v.second();
            if (s.is(ValueKind::InL)) return Value::inl(Value::pair(v.first(), s.inner()));
            return Value::inr(Value::pair(v.first(), expect(s, ValueKind::InR, "distr").inner()));
        }
        case PrimeOp::DistrBwd: {
            bool left = v.is(ValueKind::InL);
            const Value& p = expect(left ? v.inner() : expect(v, ValueKind::InR, "distr").inner(),
                                    ValueKind::Pair, "distr");
            return Value::pair(p.first(), left ? Value::inl(p.second()) : Value::inr(p.second()));
        }
        case PrimeOp::Proj1: return expect(v, ValueKind::Pair, "proj1").first();
        case PrimeOp::Proj2: return expect(v, ValueKind::Pair, "proj2").second();
        case PrimeOp::Coproj1: return Value::inl(v);
        case PrimeOp::Coproj2: return Value::inr(v);
        case PrimeOp::Codiag:
            if (v.is(ValueKind::InL) || v.is(ValueKind::InR)) return v.inner();
            bad("codiag");
        case PrimeOp::AddZero: return Value::pair(v, Value::zero());
        case PrimeOp::Concat2: {
            expect(v, ValueKind::Pair, "concat2");
            std::vector<Value> out = expect(v.first(), ValueKind::Seq, "concat2").items();
            const auto& b = expect(v.second(), ValueKind::Seq, "concat2").items();
            out.insert(out.end(), b.begin(), b.end());
            return Value::seq(std::move(out));
        }
        case PrimeOp::MaybeList:
            if (v.is(ValueKind::InL)) return Value::seq({});
            return Value::seq({expect(v, ValueKind::InR, "maybe-list").inner()});
        case PrimeOp::Append: {
            expect(v, ValueKind::Pair, "append");
            std::vector<Value> out = expect(v.first(), ValueKind::Seq, "append").items();
            out.push_back(v.second());
            return Value::seq(std::move(out));
        }
        case PrimeOp::ListCons: {
            if (v.is(ValueKind::InL)) return Value::seq({});
            const Value& p = expect(expect(v, ValueKind::InR, "list-cons").inner(), ValueKind::Pair, "list-cons");
            const auto& rest = expect(p.second(), ValueKind::Seq, "list-cons").items();
            std::vector<Value> out;
            out.reserve(rest.size() + 1);
            out.push_back(p.first());
            out.insert(out.end(), rest.begin(), rest.end());
            return Value::seq(std::move(out));
        }
        case PrimeOp::Reverse: {
            const auto& xs = expect(v, ValueKind::Seq, "reverse").items();
            return Value::seq(std::vector<Value>(xs.rbegin(), xs.rend()));
        }
        case PrimeOp::Concat: {
            std::vector<Value> out;
            for (const auto& x : expect(v, ValueKind::Seq, "concat").items()) {
                const auto& ys = expect(x, ValueKind::Seq, "concat").items();
                out.insert(out.end(), ys.begin(), ys.end());
            }
            return Value::seq(std::move(out));
        }
        case PrimeOp::CreateEmpty: return Value::pair(v, Value::seq({}));
        case PrimeOp::ListDistribute: {
            std::vector<Value> a, b;
            for (const auto& x : expect(v, ValueKind::Seq, "list-distribute").items()) {
                expect(x, ValueKind::Pair, "list-distribute");
                a.push_back(x.first());
                b.push_back(x.second());
            }
            return Value::pair(Value::seq(std::move(a)), Value::seq(std::move(b)));
        }
        case PrimeOp::ListUnit: return Value::seq({v});
        case PrimeOp::EmptyFromZero: return Value::seq({});
        case PrimeOp::ConstUnit: {
            LeafId id = fresh();
            return Value::unit(id);
        }
        case PrimeOp::BangPlusFwd: {
            const Value& s = expect(v, ValueKind::Bang, "bang-plus").inner();
            if (s.is(ValueKind::InL)) return Value::inl(Value::bang(s.inner()));
            return Value::inr(Value::bang(expect(s, ValueKind::InR, "bang-plus").inner()));
        }
        case PrimeOp::BangPlusBwd: {
            bool left = v.is(ValueKind::InL);
            const Value& b = expect(left ? v.inner() : expect(v, ValueKind::InR, "bang-plus").inner(),
                                    ValueKind::Bang, "bang-plus");
            return Value::bang(left ? Value::inl(b.inner()) : Value::inr(b.inner()));
        }
        case PrimeOp::BangTimesFwd: {
            const Value& p = expect(expect(v, ValueKind::Bang, "bang-times").inner(), ValueKind::Pair, "bang-times");
            return Value::pair(Value::bang(p.first()), Value::bang(p.second()));
        }
        case PrimeOp::BangTimesBwd:
            expect(v, ValueKind::Pair, "bang-times");
            return Value::bang(Value::pair(expect(v.first(), ValueKind::Bang, "bang-times").inner(),
                                           expect(v.second(), ValueKind::Bang, "bang-times").inner()));
        case PrimeOp::BangListFwd: {
            std::vector<Value> out;
            for (const auto& x : expect(expect(v, ValueKind::Bang, "bang-list").inner(), ValueKind::Seq, "bang-list")
                                     .items())
                out.push_back(Value::bang(x));
            return Value::seq(std::move(out));
        }
        case PrimeOp::BangListBwd: {
            std::vector<Value> out;
            for (const auto& x : expect(v, ValueKind::Seq, "bang-list").items())
                out.push_back(expect(x, ValueKind::Bang, "bang-list").inner());
            return Value::bang(Value::seq(std::move(out)));
        }
        case PrimeOp::Absorb:
            expect(v, ValueKind::Bang, "absorb");
            return Value::pair(v, copy(v.inner()));
        case PrimeOp::LinAbsorb:
            expect(v, ValueKind::Bang, "lin-absorb");
            return Value::pair(v.inner(), copy(v.inner()));
        case PrimeOp::TreeCons: {
            if (v.is(ValueKind::InL)) return Value::leaf();
            const Value& p = expect(expect(v, ValueKind::InR, "tree-cons").inner(), ValueKind::Pair, "tree-cons");
            const Value& q = expect(p.second(), ValueKind::Pair, "tree-cons");
            return Value::node(p.first(), q.first(), q.second());
        }
        case PrimeOp::ReplaceHole:
            expect(v, ValueKind::Pair, "replace-hole");
            return tree_from_context(v.first(), v.second());
        case PrimeOp::CtxCompose: {
            expect(v, ValueKind::Pair, "ctx-compose");
            std::vector<Value> out = expect(v.first(), ValueKind::Seq, "ctx-compose").items();
            const auto& b = expect(v.second(), ValueKind::Seq, "ctx-compose").items();
            out.insert(out.end(), b.begin(), b.end());
            return Value::seq(std::move(out));
        }
        case PrimeOp::CtxCreate:
            if (v.is(ValueKind::InL)) return Value::seq({});
            return Value::seq({expect(v, ValueKind::InR, "ctx-create").inner()});
        case PrimeOp::BangTreeFwd: return bang_labels(expect(v, ValueKind::Bang, "bang-tree").inner(), true);
        case PrimeOp::BangTreeBwd: return Value::bang(bang_labels(v, false));
        }
        bad("unknown prime");
    }
};

void check_input(const Term& term, const Value& input, SystemFlavor flavor) {
    FunctionType ft = type_of(term, flavor);
    if (!typecheck_value(input, ft.dom))
        throw std::invalid_argument("eval: input does not have type " + to_string(ft.dom));
    for (LeafId id : leaf_ids(input))
        if (id >= kFreshBase) throw std::invalid_argument("eval: input leaf id out of range");
}

}  // namespace

Value eval_unchecked(const Term& term, const Value& input) { return Evaluator(false).run(term, input); }

Value eval(const Term& term, const Value& input, SystemFlavor flavor) {
    check_input(term, input, flavor);
    return eval_unchecked(term, input);
}

EvalTrace eval_traced(const Term& term, const Value& input, SystemFlavor flavor) {
    check_input(term, input, flavor);
    Evaluator ev(true);
    EvalTrace tr;
    tr.output = ev.run(term, input);
    for (LeafId id : leaf_ids(tr.output)) {
        LeafId o = ev.origin(id);
        if (o == kFreshMark) tr.leaf_origin[id] = std::nullopt;
        else tr.leaf_origin[id] = o;
    }
    return tr;
}

GrowthFit growth_profile(const Term& term, SystemFlavor flavor, const std::vector<std::size_t>& sizes,
                         std::uint64_t seed, InputGenerator gen) {
    if (sizes.size() < 3) throw std::invalid_argument("growth_profile: needs at least 3 sizes");
    FunctionType ft = type_of(term, flavor);
    if (!gen) {
        Type dom = ft.dom;
        gen = [dom](std::size_t n, std::mt19937_64& rng, LeafIdSource& ids) {
            return random_sized_value(dom, n, rng, ids);
        };
    }
    std::mt19937_64 rng(seed);
    GrowthFit fit;
    std::vector<double> xs, ys;
    for (std::size_t n : sizes) {
        LeafIdSource ids;
        Value in = gen(n, rng, ids);
        if (!typecheck_value(in, ft.dom)) throw std::invalid_argument("growth_profile: generator left the domain");
        Value out = eval_unchecked(term, in);
        std::size_t a = leaf_count(in), b = leaf_count(out);
        fit.samples.emplace_back(a, b);
        xs.push_back(std::log(static_cast<double>(std::max<std::size_t>(a, 1))));
        ys.push_back(std::log(static_cast<double>(std::max<std::size_t>(b, 1))));
    }
    double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("growth_profile: input sizes do not vary");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / n);
    fit.degree = static_cast<int>(std::lround(fit.slope));
    return fit;
}

}  // namespace foldreg
