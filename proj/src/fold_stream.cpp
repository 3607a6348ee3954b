#include "foldreg/fold_stream.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <thread>

namespace foldreg {

void FoldInstance::validate() const {
    delta.validate();
    if (delta.out_vocab != b0.vocab()) throw VocabularyMismatch("delta does not produce the vocabulary of b0");
    std::set<ElemId> seen;
    for (const auto& [id, g] : b0.elements()) seen.insert(id);
    for (std::size_t i = 0; i < letters.size(); ++i) {
        if (i > 0 && letters[i].vocab() != letters[0].vocab())
            throw VocabularyMismatch("letter " + std::to_string(i + 1) + " has a different vocabulary");
        for (const auto& [id, g] : letters[i].elements())
            if (!seen.insert(id).second)
                throw std::invalid_argument("element " + std::to_string(id) + " occurs twice in the fold");
    }
    if (!letters.empty() && delta.in_vocab != pair_vocab(b0.vocab(), letters[0].vocab()))
        throw VocabularyMismatch("delta does not read the pair of state and letter");
}

Structure naive_fold(const FoldInstance& inst) {
    inst.validate();
    Structure b = inst.b0;
    for (const auto& a : inst.letters) b = apply_interp(inst.delta, pair_structures(b, a));
    return b;
}

namespace {

struct Shared {
    const FoldInstance& inst;
    TheoryStep delta;
    Vocabulary sigma;
    std::vector<LayoutPtr> gamma_layouts;  // by arity
    std::vector<LayoutPtr> sigma_layouts;
    std::vector<LayoutPtr> pair_layouts;
    std::vector<int> letter_class;         // by letter index 1..n
    std::vector<AtomicTheory> class_theory;

    Shared(const FoldInstance& in, int max_arity) : inst(in), delta(in.delta) {
        sigma = in.letters.empty() ? Vocabulary{} : in.letters[0].vocab();
        Vocabulary pv = pair_vocab(in.b0.vocab(), sigma);
        for (int a = 0; a <= max_arity; ++a) {
            gamma_layouts.push_back(delta.layout(a));
            sigma_layouts.push_back(std::make_shared<const TheoryLayout>(sigma, a));
            pair_layouts.push_back(std::make_shared<const TheoryLayout>(pv, a));
        }
        // Letters with the same nullary facts behave alike on tuples that take
        // nothing from them.
        std::unordered_map<std::string, int> classes;
        letter_class.assign(in.letters.size() + 1, -1);
        for (std::size_t t = 1; t <= in.letters.size(); ++t) {
            AtomicTheory th = theory_of(in.letters[t - 1], {}, sigma_layouts[0]);
            auto [it, fresh] = classes.emplace(th.key(), static_cast<int>(class_theory.size()));
            if (fresh) class_theory.push_back(th);
            letter_class[t] = it->second;
        }
    }
};

class Engine {
public:
    explicit Engine(const Shared& s) : s_(s) {}

    std::size_t transitions = 0;
    std::size_t cache_hits = 0;

    std::size_t distinct() const { return theories_.size(); }

    AtomicTheory run(const std::vector<Candidate>& tuple) {
        const auto& inst = s_.inst;
        const std::size_t n = inst.letters.size();
        Assignment first;
        for (const auto& c : tuple)
            if (c.index == 0) first.push_back(c.id);
        int cur = intern(theory_of(inst.b0, first, s_.gamma_layouts[first.size()]));
        std::size_t have = first.size();
        for (std::size_t t = 1; t <= n; ++t) {
            Assignment fresh;
            for (const auto& c : tuple)
                if (c.index == t) fresh.push_back(c.id);
            if (fresh.empty()) {
                cur = empty_step(cur, s_.letter_class[t]);
                continue;
            }
            std::vector<Side> sides;
            for (const auto& c : tuple) {
                if (c.index < t) sides.push_back(Side::Left);
                else if (c.index == t) sides.push_back(Side::Right);
            }
            have += fresh.size();
            AtomicTheory right = theory_of(inst.letters[t - 1], fresh, s_.sigma_layouts[fresh.size()]);
            AtomicTheory pair = pair_theory(theories_[static_cast<std::size_t>(cur)], right, sides,
                                            s_.pair_layouts[have]);
            ++transitions;
            cur = intern(s_.delta.apply(pair));
        }
        return theories_[static_cast<std::size_t>(cur)];
    }

private:
    const Shared& s_;
    std::unordered_map<std::string, int> index_;
    std::vector<AtomicTheory> theories_;
    std::unordered_map<std::uint64_t, int> cache_;

    int intern(AtomicTheory th) {
        auto [it, fresh] = index_.emplace(th.key(), static_cast<int>(theories_.size()));
        if (fresh) theories_.push_back(std::move(th));
        return it->second;
    }

    int empty_step(int cur, int cls) {
        const std::uint64_t key = (static_cast<std::uint64_t>(cur) << 32) | static_cast<std::uint32_t>(cls);
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            ++cache_hits;
            return it->second;
        }
        const AtomicTheory& th = theories_[static_cast<std::size_t>(cur)];
        std::vector<Side> sides(static_cast<std::size_t>(th.arity()), Side::Left);
        AtomicTheory pair = pair_theory(th, s_.class_theory[static_cast<std::size_t>(cls)], sides,
                                        s_.pair_layouts[static_cast<std::size_t>(th.arity())]);
        ++transitions;
        int next = intern(s_.delta.apply(pair));
        cache_.emplace(key, next);
        return next;
    }
};

// Adds the facts a tuple's final theory states about its prefixes.
struct Collector {
    std::map<ElemId, int> elements;
    std::vector<std::set<Tuple>> rels;
    std::vector<bool> nullary;

    explicit Collector(const Vocabulary& v) : rels(v.size()), nullary(v.size(), false) {}

    void add(const AtomicTheory& th, const std::vector<ElemId>& ids, const std::vector<int>& grades) {
        const auto& v = th.layout().vocab();
        if (!ids.empty() && th.present(0)) elements.emplace(ids[0], grades[0]);
        for (std::size_t r = 0; r < v.size(); ++r) {
            const int m = v[r].arity;
            if (m == 0) {
                if (th.nullary(static_cast<int>(r))) nullary[r] = true;
                continue;
            }
            if (m > th.arity()) continue;
            std::vector<int> idx(static_cast<std::size_t>(m));
            bool ok = true;
            for (int j = 0; j < m; ++j) {
                idx[static_cast<std::size_t>(j)] = j;
                ok = ok && th.present(j);
            }
            if (ok && th.atom(static_cast<int>(r), idx))
                rels[r].insert(Tuple(ids.begin(), ids.begin() + m));
        }
    }

    void merge(Collector&& o) {
        elements.merge(o.elements);
        for (std::size_t r = 0; r < rels.size(); ++r) {
            rels[r].merge(o.rels[r]);
            if (o.nullary[r]) nullary[r] = true;
        }
    }

    Structure build(const Vocabulary& v) const {
        Structure s(v);
        for (const auto& [id, g] : elements) s.add_element(id, g);
        for (std::size_t r = 0; r < v.size(); ++r) {
            if (v[r].arity == 0) {
                if (nullary[r]) s.set_nullary(static_cast<int>(r), true);
                continue;
            }
            for (const auto& t : rels[r]) s.add_tuple(static_cast<int>(r), t);
        }
        return s;
    }
};

std::size_t tuple_count(std::size_t base, int len) {
    std::size_t c = 1;
    for (int i = 0; i < len; ++i) c *= base;
    return c;
}

// Digits of i in base `base`, most significant first.
void decode_tuple(std::size_t i, std::size_t base, int len, std::vector<std::size_t>& digits) {
    digits.assign(static_cast<std::size_t>(len), 0);
    for (int j = len - 1; j >= 0; --j) {
        digits[static_cast<std::size_t>(j)] = i % base;
        i /= base;
    }
}

unsigned pick_threads(unsigned threads, std::size_t work) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (work < 256) threads = 1;
    return threads;
}

template <class Fn>
void parallel_for(std::size_t total, unsigned threads, Fn&& fn) {
    if (threads <= 1) {
        fn(0u, std::size_t{0}, total);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (total + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        std::size_t lo = std::min(total, w * chunk), hi = std::min(total, lo + chunk);
        pool.emplace_back([&fn, w, lo, hi] { fn(w, lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

Structure stream_fold(const FoldInstance& inst, StreamStats* stats, unsigned threads) {
    inst.validate();
    const Vocabulary& gv = inst.b0.vocab();
    const int len = std::max(1, gv.max_arity());
    Shared shared(inst, len);

    std::vector<Candidate> cands;
    std::vector<int> grades;
    for (const auto& [id, g] : inst.b0.elements()) {
        cands.push_back({0, id});
        grades.push_back(g);
    }
    for (std::size_t t = 1; t <= inst.letters.size(); ++t)
        for (const auto& [id, g] : inst.letters[t - 1].elements()) {
            cands.push_back({t, id});
            grades.push_back(g);
        }

    Collector result(gv);
    StreamStats st;
    st.state_bits = shared.gamma_layouts[static_cast<std::size_t>(len)]->bit_count() + static_cast<std::size_t>(len);
    if (cands.empty()) {
        Engine e(shared);
        result.add(e.run({}), {}, {});
        st.transitions = e.transitions;
        st.cache_hits = e.cache_hits;
        st.distinct_theories = e.distinct();
        if (stats) *stats = st;
        return result.build(gv);
    }

    const std::size_t total = tuple_count(cands.size(), len);
    const unsigned nt = pick_threads(threads, total);
    std::vector<Collector> parts(nt, Collector(gv));
    std::vector<StreamStats> part_stats(nt);
    parallel_for(total, nt, [&](unsigned w, std::size_t lo, std::size_t hi) {
        Engine e(shared);
        std::vector<std::size_t> digits;
        std::vector<Candidate> tuple(static_cast<std::size_t>(len));
        std::vector<ElemId> ids(static_cast<std::size_t>(len));
        std::vector<int> gs(static_cast<std::size_t>(len));
        for (std::size_t i = lo; i < hi; ++i) {
            decode_tuple(i, cands.size(), len, digits);
            for (int j = 0; j < len; ++j) {
                const std::size_t d = digits[static_cast<std::size_t>(j)];
                tuple[static_cast<std::size_t>(j)] = cands[d];
                ids[static_cast<std::size_t>(j)] = cands[d].id;
                gs[static_cast<std::size_t>(j)] = grades[d];
            }
            parts[w].add(e.run(tuple), ids, gs);
        }
        part_stats[w].transitions = e.transitions;
        part_stats[w].cache_hits = e.cache_hits;
        part_stats[w].distinct_theories = e.distinct();
    });
    st.tuples = total;
    for (unsigned w = 0; w < nt; ++w) {
        result.merge(std::move(parts[w]));
        st.transitions += part_stats[w].transitions;
        st.cache_hits += part_stats[w].cache_hits;
        st.distinct_theories = std::max(st.distinct_theories, part_stats[w].distinct_theories);
    }
    if (stats) *stats = st;
    return result.build(gv);
}

AtomicTheory mixed_tuple_theory(const FoldInstance& inst, const std::vector<Candidate>& tuple) {
    inst.validate();
    for (const auto& c : tuple) {
        if (c.index > inst.letters.size()) throw std::out_of_range("tuple index beyond the last letter");
        const Structure& src = c.index == 0 ? inst.b0 : inst.letters[c.index - 1];
        if (!src.contains(c.id))
            throw std::out_of_range("element " + std::to_string(c.id) + " is not at index " + std::to_string(c.index));
    }
    Shared shared(inst, static_cast<int>(tuple.size()));
    Engine e(shared);
    return e.run(tuple);
}

// ---------------------------------------------------------------- iteration

TheoryTable::TheoryTable(const QfInterp& f, int arity) : step_(std::make_shared<TheoryStep>(f)), arity_(arity) {
    if (f.in_vocab != f.out_vocab) throw VocabularyMismatch("iteration needs an endo-interpretation");
}

int TheoryTable::intern(const AtomicTheory& th) {
    if (th.arity() != arity_) throw std::invalid_argument("theory of the wrong arity");
    auto [it, fresh] = index_.emplace(th.key(), static_cast<int>(theories_.size()));
    if (fresh) {
        theories_.push_back(th);
        next_.push_back(-1);
    }
    return it->second;
}

int TheoryTable::step(int id) {
    int& slot = next_.at(static_cast<std::size_t>(id));
    if (slot >= 0) return slot;
    AtomicTheory img = step_->apply(theories_[static_cast<std::size_t>(id)]);
    int r = intern(img);
    next_[static_cast<std::size_t>(id)] = r;
    return r;
}

TheoryTransform TheoryTransform::identity(std::size_t n) {
    TheoryTransform t;
    t.map_.resize(n);
    for (std::size_t i = 0; i < n; ++i) t.map_[i] = static_cast<int>(i);
    return t;
}

TheoryTransform TheoryTransform::of(TheoryTable& table, const std::vector<int>& seeds) {
    (void)seeds;  // seeds are already interned; close the whole table
    for (std::size_t i = 0; i < table.size(); ++i) table.step(static_cast<int>(i));
    TheoryTransform t;
    t.map_.resize(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) t.map_[i] = table.step(static_cast<int>(i));
    return t;
}

TheoryTransform TheoryTransform::then(const TheoryTransform& next) const {
    if (next.size() != size()) throw std::invalid_argument("transforms over different theory sets");
    TheoryTransform t;
    t.map_.resize(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) t.map_[i] = next.map_[static_cast<std::size_t>(map_[i])];
    return t;
}

TheoryTransform TheoryTransform::power(std::uint64_t n, std::size_t* ops) const {
    std::size_t count = 0;
    std::optional<TheoryTransform> acc;
    TheoryTransform base = *this;
    while (n) {
        if (n & 1) {
            if (acc) {
                acc = acc->then(base);
                ++count;
            } else {
                acc = base;
            }
        }
        n >>= 1;
        if (n) {
            base = base.then(base);
            ++count;
        }
    }
    if (ops) *ops = count;
    return acc ? *acc : identity(size());
}

Structure iterate_qf(const QfInterp& f, const Structure& a, std::uint64_t n, IterateStats* stats) {
    if (a.vocab() != f.in_vocab) throw VocabularyMismatch("structure vocabulary does not match the interpretation");
    if (f.in_vocab != f.out_vocab) throw VocabularyMismatch("iteration needs an endo-interpretation");
    std::vector<ElemId> elems;
    std::vector<int> grades;
    for (const auto& [id, g] : a.elements()) {
        elems.push_back(id);
        grades.push_back(g);
    }
    const int len = elems.empty() ? 0 : std::max(1, a.vocab().max_arity());
    TheoryTable table(f, len);
    const LayoutPtr layout = table.interp().layout(len);

    const std::size_t total = elems.empty() ? 1 : tuple_count(elems.size(), len);
    std::vector<int> seeds(total);
    std::vector<std::size_t> digits;
    Assignment tuple(static_cast<std::size_t>(len));
    for (std::size_t i = 0; i < total; ++i) {
        if (len > 0) {
            decode_tuple(i, elems.size(), len, digits);
            for (int j = 0; j < len; ++j) tuple[static_cast<std::size_t>(j)] = elems[digits[static_cast<std::size_t>(j)]];
        }
        seeds[i] = table.intern(theory_of(a, tuple, layout));
    }
    TheoryTransform step = TheoryTransform::of(table, seeds);
    IterateStats st;
    TheoryTransform p = step.power(n, &st.compositions);
    st.theories = table.size();

    Collector out(a.vocab());
    std::vector<ElemId> ids(static_cast<std::size_t>(len));
    std::vector<int> gs(static_cast<std::size_t>(len));
    for (std::size_t i = 0; i < total; ++i) {
        if (len > 0) {
            decode_tuple(i, elems.size(), len, digits);
            for (int j = 0; j < len; ++j) {
                ids[static_cast<std::size_t>(j)] = elems[digits[static_cast<std::size_t>(j)]];
                gs[static_cast<std::size_t>(j)] = grades[digits[static_cast<std::size_t>(j)]];
            }
        }
        out.add(table.at(p(seeds[i])), ids, gs);
    }
    if (stats) *stats = st;
    return out.build(a.vocab());
}

// ---------------------------------------------------------------- suites

QfInterp make_interp(Vocabulary in, const Type& out, Formula universe, const std::map<std::string, Formula>& defs) {
    QfInterp f;
    f.in_vocab = std::move(in);
    f.out_vocab = vocab_of(out);
    f.universe = std::move(universe);
    for (const auto& sym : f.out_vocab.symbols()) {
        if (auto it = defs.find(sym.name); it != defs.end()) {
            f.defs.push_back(it->second);
            continue;
        }
        if (f.in_vocab.find(sym.name) < 0) throw std::invalid_argument("make_interp: no definition for " + sym.name);
        std::vector<int> vars(static_cast<std::size_t>(sym.arity));
        for (int i = 0; i < sym.arity; ++i) vars[static_cast<std::size_t>(i)] = i;
        f.defs.push_back(Formula::atom(sym.name, vars));
    }
    f.validate();
    return f;
}

Sst suite_sst() {
    Sst m;
    m.input_alphabet = {"a", "b"};
    m.output_alphabet = {"a", "b"};
    m.states = {"q0", "qa", "qb"};
    m.registers = 2;
    m.transition = {{1, 2}, {1, 2}, {1, 2}};
    auto reg = [](int i) { return UpdateSymbol{true, i}; };
    auto lit = [](int i) { return UpdateSymbol{false, i}; };
    m.updates = {RegisterUpdate(2, {{reg(0)}, {reg(1)}}), RegisterUpdate(2, {{reg(0), lit(0)}, {reg(1)}}),
                 RegisterUpdate(2, {{reg(0)}, {lit(1), reg(1)}})};
    m.output = RegisterUpdate(2, {{reg(0), reg(1)}});
    m.validate();
    return m;
}

namespace {

Formula at(const std::string& r, std::vector<int> xs) { return Formula::atom(r, std::move(xs)); }
Formula side(int x) { return at("side[]", {x}); }
Formula no(Formula f) { return Formula::negate(std::move(f)); }
Formula all(std::vector<Formula> fs) { return Formula::conj(std::move(fs)); }
Formula any(std::vector<Formula> fs) { return Formula::disj(std::move(fs)); }

Type bit() { return Type::coprod(Type::unit(), Type::unit()); }

std::function<Value(std::mt19937_64&, LeafIdSource&)> sampler(Type t, std::size_t max_len) {
    return [t, max_len](std::mt19937_64& rng, LeafIdSource& ids) {
        std::uniform_int_distribution<std::size_t> len(0, max_len);
        return random_sized_value(t, len(rng), rng, ids);
    };
}

std::function<Value(std::mt19937_64&, LeafIdSource&)> bit_sampler() {
    return [](std::mt19937_64& rng, LeafIdSource& ids) {
        Value u = Value::unit(ids.next());
        return (rng() & 1) ? Value::inl(u) : Value::inr(u);
    };
}

// Γ = (1+1)*, Σ = 1+1. The letter goes last (snoc) or first (cons).
SuiteDelta list_step(bool at_end) {
    Type gamma = Type::list(bit());
    Vocabulary in = pair_vocab(vocab_of(gamma), vocab_of(bit()));
    Formula old_ord = all({side(0), side(1), at("ord[L]", {0, 1})});
    Formula ord = any({old_ord, at_end ? no(side(1)) : no(side(0))});
    Formula tag = any({all({side(0), at("tag[LE]", {0})}), all({no(side(0)), at("tag[R]", {})})});
    return {at_end ? "snoc" : "cons", make_interp(in, gamma, Formula::truth(), {{"ord[]", ord}, {"tag[E]", tag}}),
            gamma, bit(), sampler(gamma, 6), bit_sampler()};
}

// snoc that drops letters on the right.
SuiteDelta filter_step() {
    SuiteDelta d = list_step(true);
    d.name = "snoc_left";
    d.delta.universe = any({side(0), at("tag[R]", {})});
    return d;
}

SuiteDelta append_step() {
    Type gamma = Type::list(bit());
    Vocabulary in = pair_vocab(vocab_of(gamma), vocab_of(gamma));
    Formula ord = any({all({side(0), side(1), at("ord[L]", {0, 1})}),
                       all({no(side(0)), no(side(1)), at("ord[R]", {0, 1})}), all({side(0), no(side(1))})});
    Formula tag = any({all({side(0), at("tag[LE]", {0})}), all({no(side(0)), at("tag[RE]", {0})})});
    return {"append", make_interp(in, gamma, Formula::truth(), {{"ord[]", ord}, {"tag[E]", tag}}), gamma, gamma,
            sampler(gamma, 6), sampler(gamma, 3)};
}

SuiteDelta sst_step() {
    Sst m = suite_sst();
    SstCompiled c = sst_to_qf(m);
    auto state = [m](std::mt19937_64& rng, LeafIdSource& ids) {
        std::uniform_int_distribution<int> q(0, static_cast<int>(m.states.size()) - 1), len(0, 4), letter(0, 1);
        Configuration cfg;
        cfg.state = q(rng);
        for (int r = 0; r < m.registers; ++r) {
            Word w(static_cast<std::size_t>(len(rng)));
            for (int& x : w) x = letter(rng);
            cfg.registers.push_back(std::move(w));
        }
        return config_value(m, cfg, ids);
    };
    auto letter = [m](std::mt19937_64& rng, LeafIdSource& ids) {
        return letter_value(m, static_cast<int>(rng() % m.input_alphabet.size()), ids);
    };
    return {"sst", c.delta, c.config_type, c.letter_type, state, letter};
}

}  // namespace

std::vector<SuiteDelta> delta_suite() {
    return {list_step(true), list_step(false), filter_step(), append_step(), sst_step()};
}

FoldInstance random_instance(const SuiteDelta& d, std::size_t letters, std::mt19937_64& rng) {
    LeafIdSource ids;
    FoldInstance inst{d.delta, encode(d.random_state(rng, ids), d.state), {}};
    for (std::size_t i = 0; i < letters; ++i) inst.letters.push_back(encode(d.random_letter(rng, ids), d.letter));
    return inst;
}

std::vector<SuiteEndo> endo_suite() {
    Type list = Type::list(bit());
    Vocabulary lv = vocab_of(list);
    Formula rev = at("ord[]", {1, 0});
    Formula flip = no(at("tag[E]", {0}));
    std::vector<SuiteEndo> out;
    out.push_back({"reverse", make_interp(lv, list, Formula::truth(), {{"ord[]", rev}}), list});
    out.push_back({"flip", make_interp(lv, list, Formula::truth(), {{"tag[E]", flip}}), list});
    out.push_back({"reverse_flip", make_interp(lv, list, Formula::truth(), {{"ord[]", rev}, {"tag[E]", flip}}), list});
    out.push_back({"filter_left", make_interp(lv, list, at("tag[E]", {0}), {}), list});

    Type pair = Type::prod(list, list);
    Vocabulary pv = vocab_of(pair);
    std::map<std::string, Formula> swap{{"side[]", no(side(0))},
                                        {"ord[L]", at("ord[R]", {0, 1})},
                                        {"ord[R]", at("ord[L]", {0, 1})},
                                        {"tag[LE]", at("tag[RE]", {0})},
                                        {"tag[RE]", at("tag[LE]", {0})}};
    out.push_back({"swap", make_interp(pv, pair, Formula::truth(), swap), pair});
    swap["ord[L]"] = at("ord[R]", {1, 0});
    swap["ord[R]"] = at("ord[L]", {1, 0});
    out.push_back({"swap_reverse", make_interp(pv, pair, Formula::truth(), swap), pair});
    return out;
}

}  // namespace foldreg
