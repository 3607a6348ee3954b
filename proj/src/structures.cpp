#include "foldreg/structures.hpp"

#include <algorithm>
#include <iterator>
#include <sstream>

namespace foldreg {

Vocabulary::Vocabulary(std::vector<RelationSymbol> symbols) {
    for (auto& s : symbols) add(std::move(s.name), s.arity);
}

int Vocabulary::add(std::string name, int arity) {
    if (arity < 0) throw std::invalid_argument("negative arity for relation " + name);
    if (index_.count(name)) throw std::invalid_argument("duplicate relation name " + name);
    const int idx = static_cast<int>(symbols_.size());
    index_.emplace(name, idx);
    symbols_.push_back({std::move(name), arity});
    return idx;
}

int Vocabulary::find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

int Vocabulary::max_arity() const {
    int m = 0;
    for (const auto& s : symbols_) m = std::max(m, s.arity);
    return m;
}

namespace {

std::string rel_name(const char* role, const std::string& path) { return std::string(role) + "[" + path + "]"; }

void build_vocab(const Type& t, const std::string& path, bool in_list, Vocabulary& out) {
    switch (t.kind()) {
    case TypeKind::Prod:
        out.add(rel_name("side", path), 1);
        build_vocab(t.left(), path + 'L', in_list, out);
        build_vocab(t.right(), path + 'R', in_list, out);
        break;
    case TypeKind::CoProd:
        out.add(rel_name("tag", path), in_list ? 1 : 0);
        build_vocab(t.left(), path + 'L', in_list, out);
        build_vocab(t.right(), path + 'R', in_list, out);
        break;
    case TypeKind::List:
        out.add(rel_name("ord", path), 2);
        build_vocab(t.inner(), path + 'E', true, out);
        break;
    case TypeKind::Tree:
        out.add(rel_name("desc", path), 2);
        out.add(rel_name("doc", path), 2);
        build_vocab(t.inner(), path + 'E', true, out);
        break;
    case TypeKind::Bang: build_vocab(t.inner(), path, in_list, out); break;
    default: break;
    }
}

}  // namespace

Vocabulary vocab_of(const Type& t) {
    Vocabulary v;
    build_vocab(t, "", false, v);
    return v;
}

std::string prefix_name(const std::string& name, char step) {
    const auto open = name.find('[');
    if (open == std::string::npos) return name + "[" + step + "]";
    std::string out = name;
    out.insert(open + 1, 1, step);
    return out;
}

Vocabulary pair_vocab(const Vocabulary& left, const Vocabulary& right) {
    Vocabulary v;
    v.add("side[]", 1);
    for (const auto& s : left.symbols()) v.add(prefix_name(s.name, 'L'), s.arity);
    for (const auto& s : right.symbols()) v.add(prefix_name(s.name, 'R'), s.arity);
    return v;
}

// ---------------------------------------------------------------- Structure

Structure::Structure(Vocabulary vocab) : vocab_(std::move(vocab)), rels_(vocab_.size()) {}

void Structure::add_element(ElemId id, int grade) { grades_[id] = grade; }

int Structure::grade(ElemId id) const {
    auto it = grades_.find(id);
    if (it == grades_.end()) throw std::out_of_range("element " + std::to_string(id) + " not in universe");
    return it->second;
}

std::vector<ElemId> Structure::universe() const {
    std::vector<ElemId> out;
    out.reserve(grades_.size());
    for (const auto& [id, g] : grades_) out.push_back(id);
    return out;
}

void Structure::add_tuple(int rel, Tuple t) {
    const auto& sym = vocab_[static_cast<std::size_t>(rel)];
    if (static_cast<int>(t.size()) != sym.arity)
        throw std::invalid_argument("arity mismatch for relation " + sym.name);
    rels_[static_cast<std::size_t>(rel)].insert(std::move(t));
}

void Structure::add_tuple(const std::string& rel, Tuple t) {
    const int idx = vocab_.find(rel);
    if (idx < 0) throw std::invalid_argument("unknown relation " + rel);
    add_tuple(idx, std::move(t));
}

void Structure::set_nullary(int rel, bool value) {
    auto& r = rels_[static_cast<std::size_t>(rel)];
    if (value)
        r.insert(Tuple{});
    else
        r.clear();
}

bool Structure::holds(int rel, const Tuple& t) const { return rels_[static_cast<std::size_t>(rel)].count(t) != 0; }

NotInImage::NotInImage(std::string relation, Tuple witness, const std::string& msg)
    : std::runtime_error(msg), relation_(std::move(relation)), witness_(std::move(witness)) {}

// ---------------------------------------------------------------- encode

namespace {

class Encoder {
public:
    explicit Encoder(const Type& t) : s_(vocab_of(t)) {}

    Structure take() { return std::move(s_); }

    int rel(const char* role, const std::string& path) const {
        const int idx = s_.vocab().find(rel_name(role, path));
        if (idx < 0) throw std::logic_error("missing relation " + rel_name(role, path));
        return idx;
    }

    void run(const Value& v, const Type& t, const std::string& path, int grade, const std::vector<ElemId>* item) {
        switch (t.kind()) {
        case TypeKind::Unit:
        case TypeKind::Var:
            if (!v.is(ValueKind::Unit)) throw EncodeError("only unit values can stand for a type atom");
            s_.add_element(v.id(), grade);
            break;
        case TypeKind::Zero: break;
        case TypeKind::Bang: run(v.inner(), t.inner(), path, grade + 1, item); break;
        case TypeKind::Prod: {
            const int side = rel("side", path);
            for (ElemId x : leaf_ids(v.first())) s_.add_tuple(side, {x});
            run(v.first(), t.left(), path + 'L', grade, item);
            run(v.second(), t.right(), path + 'R', grade, item);
            break;
        }
        case TypeKind::CoProd: {
            const bool left = v.is(ValueKind::InL);
            if (left) {
                const int tag = rel("tag", path);
                if (item)
                    for (ElemId x : *item) s_.add_tuple(tag, {x});
                else
                    s_.set_nullary(tag, true);
            }
            run(v.inner(), left ? t.left() : t.right(), path + (left ? 'L' : 'R'), grade, item);
            break;
        }
        case TypeKind::List: {
            const int ord = rel("ord", path);
            std::vector<std::vector<ElemId>> groups;
            groups.reserve(v.items().size());
            for (const auto& it : v.items()) {
                groups.push_back(leaf_ids(it));
                if (groups.back().empty())
                    throw EncodeError("list item with an empty universe at path [" + path + "]");
            }
            for (std::size_t i = 0; i < groups.size(); ++i)
                for (std::size_t j = i; j < groups.size(); ++j)
                    for (ElemId x : groups[i])
                        for (ElemId y : groups[j]) s_.add_tuple(ord, {x, y});
            for (std::size_t i = 0; i < groups.size(); ++i)
                run(v.items()[i], t.inner(), path + 'E', grade, &groups[i]);
            break;
        }
        case TypeKind::Tree: encode_tree(v, t, path, grade); break;
        }
    }

private:
    Structure s_;

    struct TreeNodeInfo {
        const Value* label;
        std::vector<ElemId> ids;
        int parent;
    };

    void collect(const Value& v, int parent, std::vector<TreeNodeInfo>& out, const std::string& path) {
        // Infix order: left subtree, node, right subtree.
        if (v.is(ValueKind::Leaf)) return;
        // Left subtree nodes need the index of this node as parent, which is only
        // known after they are placed, so parents are patched afterwards.
        const std::size_t before = out.size();
        collect(v.left(), -2, out, path);
        const int self = static_cast<int>(out.size());
        for (std::size_t i = before; i < out.size(); ++i)
            if (out[i].parent == -2) out[i].parent = self;
        out.push_back({&v.label(), leaf_ids(v.label()), parent});
        if (out.back().ids.empty()) throw EncodeError("tree label with an empty universe at path [" + path + "]");
        collect(v.right(), self, out, path);
    }

    void encode_tree(const Value& v, const Type& t, const std::string& path, int grade) {
        std::vector<TreeNodeInfo> nodes;
        collect(v, -1, nodes, path);
        const int desc = rel("desc", path);
        const int doc = rel("doc", path);
        for (std::size_t b = 0; b < nodes.size(); ++b) {
            for (int a = static_cast<int>(b); a >= 0; a = nodes[static_cast<std::size_t>(a)].parent)
                for (ElemId x : nodes[static_cast<std::size_t>(a)].ids)
                    for (ElemId y : nodes[b].ids) s_.add_tuple(desc, {x, y});
            for (std::size_t a = 0; a <= b; ++a)
                for (ElemId x : nodes[a].ids)
                    for (ElemId y : nodes[b].ids) s_.add_tuple(doc, {x, y});
        }
        for (const auto& n : nodes) run(*n.label, t.inner(), path + 'E', grade, &n.ids);
    }
};

}  // namespace

Structure encode(const Value& v, const Type& t) {
    if (!typecheck_value(v, t)) throw EncodeError("value does not inhabit " + to_string(t));
    Encoder enc(t);
    enc.run(v, t, "", 0, nullptr);
    return enc.take();
}

// ---------------------------------------------------------------- decode

namespace {

class Decoder {
public:
    explicit Decoder(const Structure& s) : s_(s) {}

    Value run(const Type& t, const std::string& path, const std::vector<ElemId>& elems,
              const std::vector<ElemId>* item) {
        switch (t.kind()) {
        case TypeKind::Unit:
        case TypeKind::Var:
            if (elems.size() != 1)
                throw NotInImage("", elems,
                                 "expected exactly one element at path [" + path + "], found " +
                                     std::to_string(elems.size()));
            return Value::unit(elems[0]);
        case TypeKind::Zero:
            if (!elems.empty()) throw NotInImage("", elems, "type 0 at path [" + path + "] has no elements");
            return Value::zero();
        case TypeKind::Bang: return Value::bang(run(t.inner(), path, elems, item));
        case TypeKind::Prod: {
            const int side = rel("side", path);
            std::vector<ElemId> l, r;
            for (ElemId x : elems) (s_.holds(side, {x}) ? l : r).push_back(x);
            Value a = run(t.left(), path + 'L', l, item);
            return Value::pair(std::move(a), run(t.right(), path + 'R', r, item));
        }
        case TypeKind::CoProd: {
            const int tag = rel("tag", path);
            bool left;
            if (item) {
                if (item->empty()) throw NotInImage(rel_name("tag", path), {}, "list item without elements");
                left = s_.holds(tag, {item->front()});
            } else {
                left = s_.nullary(tag);
            }
            if (left) return Value::inl(run(t.left(), path + 'L', elems, item));
            return Value::inr(run(t.right(), path + 'R', elems, item));
        }
        case TypeKind::List: {
            const auto groups = ordered_classes(rel("ord", path), elems);
            std::vector<Value> items;
            items.reserve(groups.size());
            for (const auto& g : groups) items.push_back(run(t.inner(), path + 'E', g, &g));
            return Value::seq(std::move(items));
        }
        case TypeKind::Tree: {
            const auto nodes = ordered_classes(rel("doc", path), elems);
            const int desc = rel("desc", path);
            std::vector<int> depth(nodes.size(), 0);
            for (std::size_t b = 0; b < nodes.size(); ++b)
                for (std::size_t a = 0; a < nodes.size(); ++a)
                    if (a != b && s_.holds(desc, {nodes[a][0], nodes[b][0]})) ++depth[b];
            return build_tree(t, path, nodes, depth, 0, nodes.size());
        }
        }
        return Value::zero();
    }

private:
    const Structure& s_;

    int rel(const char* role, const std::string& path) const {
        const int idx = s_.vocab().find(rel_name(role, path));
        if (idx < 0) throw NotInImage(rel_name(role, path), {}, "vocabulary lacks " + rel_name(role, path));
        return idx;
    }

    // Classes of a total preorder, in increasing order.
    std::vector<std::vector<ElemId>> ordered_classes(int order, const std::vector<ElemId>& elems) const {
        std::map<std::size_t, std::vector<ElemId>> by_rank;
        for (ElemId x : elems) {
            std::size_t below = 0;
            for (ElemId y : elems)
                if (s_.holds(order, {y, x})) ++below;
            by_rank[below].push_back(x);
        }
        std::vector<std::vector<ElemId>> out;
        out.reserve(by_rank.size());
        for (auto& [rank, g] : by_rank) out.push_back(std::move(g));
        return out;
    }

    Value build_tree(const Type& t, const std::string& path, const std::vector<std::vector<ElemId>>& nodes,
                     const std::vector<int>& depth, std::size_t lo, std::size_t hi) {
        if (lo >= hi) return Value::leaf();
        std::size_t root = lo;
        for (std::size_t i = lo; i < hi; ++i)
            if (depth[i] < depth[root]) root = i;
        Value l = build_tree(t, path, nodes, depth, lo, root);
        Value a = run(t.inner(), path + 'E', nodes[root], &nodes[root]);
        Value r = build_tree(t, path, nodes, depth, root + 1, hi);
        return Value::node(std::move(l), std::move(a), std::move(r));
    }
};

std::string tuple_text(const Tuple& t) {
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i) out += (i ? "," : "") + std::to_string(t[i]);
    return out + ")";
}

}  // namespace

Value decode(const Structure& s, const Type& t) {
    const Vocabulary expected = vocab_of(t);
    if (s.vocab() != expected) throw VocabularyMismatch("structure vocabulary does not match " + to_string(t));
    Value v = Decoder(s).run(t, "", s.universe(), nullptr);
    Structure back = encode(v, t);
    if (back.elements() != s.elements()) {
        for (const auto& [id, g] : s.elements()) {
            if (!back.contains(id) || back.grade(id) != g)
                throw NotInImage("", {id}, "element " + std::to_string(id) + " has an unexpected grade");
        }
        throw NotInImage("", {}, "universe is not in the image of encode");
    }
    for (std::size_t r = 0; r < expected.size(); ++r) {
        const auto& have = s.tuples(static_cast<int>(r));
        const auto& want = back.tuples(static_cast<int>(r));
        if (have == want) continue;
        std::vector<Tuple> diff;
        std::set_symmetric_difference(have.begin(), have.end(), want.begin(), want.end(), std::back_inserter(diff));
        const Tuple witness = diff.empty() ? Tuple{} : diff.front();
        throw NotInImage(expected[r].name, witness,
                         "relation " + expected[r].name + " differs at " + tuple_text(witness));
    }
    return v;
}

Structure restrict(const Structure& s, int min_grade) {
    Structure out(s.vocab());
    for (const auto& [id, g] : s.elements())
        if (g >= min_grade) out.add_element(id, g);
    for (std::size_t r = 0; r < s.vocab().size(); ++r)
        for (const auto& t : s.tuples(static_cast<int>(r)))
            if (std::all_of(t.begin(), t.end(), [&](ElemId x) { return out.contains(x); }))
                out.add_tuple(static_cast<int>(r), t);
    return out;
}

Structure pair_structures(const Structure& left, const Structure& right) {
    Structure out(pair_vocab(left.vocab(), right.vocab()));
    for (const auto& [id, g] : left.elements()) {
        out.add_element(id, g);
        out.add_tuple(0, {id});
    }
    for (const auto& [id, g] : right.elements()) {
        if (left.contains(id)) throw std::invalid_argument("pair of structures with a shared element " + std::to_string(id));
        out.add_element(id, g);
    }
    const int off_l = 1;
    const int off_r = 1 + static_cast<int>(left.vocab().size());
    for (std::size_t r = 0; r < left.vocab().size(); ++r)
        for (const auto& t : left.tuples(static_cast<int>(r))) out.add_tuple(off_l + static_cast<int>(r), t);
    for (std::size_t r = 0; r < right.vocab().size(); ++r)
        for (const auto& t : right.tuples(static_cast<int>(r))) out.add_tuple(off_r + static_cast<int>(r), t);
    return out;
}

// ---------------------------------------------------------------- dump

std::string dump(const Structure& s) {
    std::ostringstream os;
    for (const auto& [id, g] : s.elements()) os << id << ':' << g << '\n';
    for (std::size_t r = 0; r < s.vocab().size(); ++r) {
        const auto& sym = s.vocab()[r];
        os << sym.name << '(' << sym.arity << "):";
        bool first = true;
        for (const auto& t : s.tuples(static_cast<int>(r))) {
            os << (first ? " " : ";");
            first = false;
            if (t.empty()) {
                os << "()";
                continue;
            }
            for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
        }
        os << '\n';
    }
    return os.str();
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

ElemId parse_id(const std::string& s, std::size_t line) {
    const std::string t = trim(s);
    if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw ParseError(line, "bad element id '" + t + "' on line " + std::to_string(line));
    return std::stoull(t);
}

}  // namespace

Structure parse_dump(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::pair<ElemId, int>> elems;
    struct RelLine {
        std::string name;
        int arity;
        std::vector<Tuple> tuples;
    };
    std::vector<RelLine> rels;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto close = line.find("):");
        if (close == std::string::npos) {
            const auto colon = line.find(':');
            if (colon == std::string::npos) throw ParseError(lineno, "expected id:grade on line " + std::to_string(lineno));
            elems.emplace_back(parse_id(line.substr(0, colon), lineno),
                               static_cast<int>(parse_id(line.substr(colon + 1), lineno)));
            continue;
        }
        const auto open = line.rfind('(', close);
        if (open == std::string::npos) throw ParseError(lineno, "expected NAME(arity): on line " + std::to_string(lineno));
        RelLine r{trim(line.substr(0, open)), static_cast<int>(parse_id(line.substr(open + 1, close - open - 1), lineno)), {}};
        std::string rest = trim(line.substr(close + 2));
        std::size_t start = 0;
        while (!rest.empty() && start <= rest.size()) {
            auto semi = rest.find(';', start);
            std::string item = trim(rest.substr(start, semi == std::string::npos ? std::string::npos : semi - start));
            Tuple t;
            if (item != "()") {
                std::size_t p = 0;
                while (p <= item.size()) {
                    auto comma = item.find(',', p);
                    t.push_back(parse_id(item.substr(p, comma == std::string::npos ? std::string::npos : comma - p), lineno));
                    if (comma == std::string::npos) break;
                    p = comma + 1;
                }
            }
            if (static_cast<int>(t.size()) != r.arity)
                throw ParseError(lineno, "tuple arity does not match relation " + r.name);
            r.tuples.push_back(std::move(t));
            if (semi == std::string::npos) break;
            start = semi + 1;
        }
        rels.push_back(std::move(r));
    }
    Vocabulary v;
    for (const auto& r : rels) v.add(r.name, r.arity);
    Structure s(std::move(v));
    for (const auto& [id, g] : elems) s.add_element(id, g);
    for (std::size_t i = 0; i < rels.size(); ++i)
        for (auto& t : rels[i].tuples) {
            for (ElemId x : t)
                if (!s.contains(x))
                    throw ParseError(0, "relation " + rels[i].name + " mentions element " + std::to_string(x) +
                                            " outside the universe");
            s.add_tuple(static_cast<int>(i), t);
        }
    return s;
}

}  // namespace foldreg
