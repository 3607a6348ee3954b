#include "foldreg/qf_logic.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace foldreg {

struct Formula::Node {
    FormulaKind kind;
    std::string rel;
    std::vector<int> vars;
    std::vector<Formula> kids;
};

Formula Formula::truth() {
    static const Formula t(std::make_shared<const Node>(Node{FormulaKind::True, {}, {}, {}}));
    return t;
}
Formula Formula::falsity() {
    static const Formula f(std::make_shared<const Node>(Node{FormulaKind::False, {}, {}, {}}));
    return f;
}
Formula::Formula() : Formula(truth()) {}

Formula Formula::atom(std::string relation, std::vector<int> vars) {
    return Formula(std::make_shared<const Node>(Node{FormulaKind::Atom, std::move(relation), std::move(vars), {}}));
}

Formula Formula::eq(int a, int b) {
    return Formula(std::make_shared<const Node>(Node{FormulaKind::Eq, {}, {a, b}, {}}));
}

Formula Formula::negate(Formula f) {
    switch (f.kind()) {
    case FormulaKind::True: return falsity();
    case FormulaKind::False: return truth();
    case FormulaKind::Not: return f.children()[0];
    default: return Formula(std::make_shared<const Node>(Node{FormulaKind::Not, {}, {}, {std::move(f)}}));
    }
}

Formula Formula::conj(std::vector<Formula> parts) {
    std::vector<Formula> kept;
    for (auto& p : parts) {
        if (p.is(FormulaKind::False)) return falsity();
        if (p.is(FormulaKind::True)) continue;
        if (p.is(FormulaKind::And))
            kept.insert(kept.end(), p.children().begin(), p.children().end());
        else
            kept.push_back(std::move(p));
    }
    if (kept.empty()) return truth();
    if (kept.size() == 1) return kept[0];
    return Formula(std::make_shared<const Node>(Node{FormulaKind::And, {}, {}, std::move(kept)}));
}

Formula Formula::disj(std::vector<Formula> parts) {
    std::vector<Formula> kept;
    for (auto& p : parts) {
        if (p.is(FormulaKind::True)) return truth();
        if (p.is(FormulaKind::False)) continue;
        if (p.is(FormulaKind::Or))
            kept.insert(kept.end(), p.children().begin(), p.children().end());
        else
            kept.push_back(std::move(p));
    }
    if (kept.empty()) return falsity();
    if (kept.size() == 1) return kept[0];
    return Formula(std::make_shared<const Node>(Node{FormulaKind::Or, {}, {}, std::move(kept)}));
}

FormulaKind Formula::kind() const { return node_->kind; }
const std::string& Formula::relation() const { return node_->rel; }
const std::vector<int>& Formula::vars() const { return node_->vars; }
const std::vector<Formula>& Formula::children() const { return node_->kids; }

// ---------------------------------------------------------------- text

namespace {

int precedence(const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::Or: return 1;
    case FormulaKind::And: return 2;
    case FormulaKind::Not: return 3;
    default: return 4;
    }
}

void print(std::ostream& os, const Formula& f, int min_prec) {
    const bool paren = precedence(f) < min_prec;
    if (paren) os << '(';
    switch (f.kind()) {
    case FormulaKind::True: os << 'T'; break;
    case FormulaKind::False: os << 'F'; break;
    case FormulaKind::Atom:
        os << f.relation() << '(';
        for (std::size_t i = 0; i < f.vars().size(); ++i) os << (i ? "," : "") << 'x' << f.vars()[i] + 1;
        os << ')';
        break;
    case FormulaKind::Eq: os << 'x' << f.vars()[0] + 1 << "=x" << f.vars()[1] + 1; break;
    case FormulaKind::Not:
        os << '~';
        print(os, f.children()[0], 3);
        break;
    case FormulaKind::And:
    case FormulaKind::Or: {
        const char* op = f.is(FormulaKind::And) ? " & " : " | ";
        const int p = precedence(f);
        for (std::size_t i = 0; i < f.children().size(); ++i) {
            if (i) os << op;
            print(os, f.children()[i], p + 1);
        }
        break;
    }
    }
    if (paren) os << ')';
}

class FormulaParser {
public:
    explicit FormulaParser(std::string_view s) : s_(s) {}

    Formula parse_all() {
        Formula f = parse_or();
        skip();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return f;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() {
        skip();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    static bool name_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '[' ||
               c == ']';
    }

    Formula parse_or() {
        std::vector<Formula> parts{parse_and()};
        while (peek() == '|') {
            ++pos_;
            parts.push_back(parse_and());
        }
        return Formula::disj(std::move(parts));
    }

    Formula parse_and() {
        std::vector<Formula> parts{parse_unary()};
        while (peek() == '&') {
            ++pos_;
            parts.push_back(parse_unary());
        }
        return Formula::conj(std::move(parts));
    }

    int parse_var() {
        skip();
        if (pos_ >= s_.size() || s_[pos_] != 'x') fail("expected a variable x1, x2, ...");
        ++pos_;
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected digits after x");
        const int v = std::stoi(std::string(s_.substr(start, pos_ - start)));
        if (v < 1) fail("variables are numbered from x1");
        return v - 1;
    }

    Formula parse_unary() {
        const char c = peek();
        if (c == '~') {
            ++pos_;
            return Formula::negate(parse_unary());
        }
        if (c == '(') {
            ++pos_;
            Formula f = parse_or();
            if (peek() != ')') fail("expected ')'");
            ++pos_;
            return f;
        }
        if (!name_char(c)) fail("expected a formula");
        const std::size_t start = pos_;
        while (pos_ < s_.size() && name_char(s_[pos_])) ++pos_;
        const std::string word(s_.substr(start, pos_ - start));
        const char next = peek();
        if (next == '(') {
            ++pos_;
            std::vector<int> vars;
            if (peek() != ')') {
                vars.push_back(parse_var());
                while (peek() == ',') {
                    ++pos_;
                    vars.push_back(parse_var());
                }
            }
            if (peek() != ')') fail("expected ')' after atom arguments");
            ++pos_;
            return Formula::atom(word, std::move(vars));
        }
        if (word == "T") return Formula::truth();
        if (word == "F") return Formula::falsity();
        if (next == '=') {
            pos_ = start;
            const int a = parse_var();
            if (peek() != '=') fail("expected '='");
            ++pos_;
            const int b = parse_var();
            return Formula::eq(a, b);
        }
        pos_ = start;
        fail("expected an atom, equality, T or F");
    }
};

}  // namespace

std::string to_string(const Formula& f) {
    std::ostringstream os;
    print(os, f, 0);
    return os.str();
}

Formula parse_formula(std::string_view text) { return FormulaParser(text).parse_all(); }

int max_var(const Formula& f) {
    int m = -1;
    for (int v : f.vars()) m = std::max(m, v);
    for (const auto& k : f.children()) m = std::max(m, max_var(k));
    return m;
}

Formula substitute(const Formula& f,
                   const std::function<Formula(const std::string&, const std::vector<int>&)>& atom_map,
                   const std::function<Formula(int, int)>& eq_map) {
    switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False: return f;
    case FormulaKind::Atom: return atom_map(f.relation(), f.vars());
    case FormulaKind::Eq: return eq_map(f.vars()[0], f.vars()[1]);
    case FormulaKind::Not: return Formula::negate(substitute(f.children()[0], atom_map, eq_map));
    case FormulaKind::And:
    case FormulaKind::Or: {
        std::vector<Formula> parts;
        parts.reserve(f.children().size());
        for (const auto& k : f.children()) parts.push_back(substitute(k, atom_map, eq_map));
        return f.is(FormulaKind::And) ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
    }
    }
    return f;
}

Formula rename_vars(const Formula& f, const std::vector<int>& vars) {
    auto at = [&](int v) {
        if (v < 0 || static_cast<std::size_t>(v) >= vars.size())
            throw std::invalid_argument("variable x" + std::to_string(v + 1) + " outside the renaming");
        return vars[static_cast<std::size_t>(v)];
    };
    return substitute(
        f,
        [&](const std::string& r, const std::vector<int>& xs) {
            std::vector<int> ys;
            ys.reserve(xs.size());
            for (int x : xs) ys.push_back(at(x));
            return Formula::atom(r, std::move(ys));
        },
        [&](int a, int b) { return Formula::eq(at(a), at(b)); });
}

// ---------------------------------------------------------------- compiled

CompiledFormula::CompiledFormula(const Formula& f, const Vocabulary& vocab) { root_ = add(f, vocab); }

int CompiledFormula::add(const Formula& f, const Vocabulary& vocab) {
    Node n{f.kind(), -1, {}, {}};
    switch (f.kind()) {
    case FormulaKind::Atom: {
        n.rel = vocab.find(f.relation());
        if (n.rel < 0) throw std::invalid_argument("unknown relation " + f.relation() + " in formula");
        if (vocab[static_cast<std::size_t>(n.rel)].arity != static_cast<int>(f.vars().size()))
            throw std::invalid_argument("relation " + f.relation() + " used with the wrong arity");
        n.args = f.vars();
        break;
    }
    case FormulaKind::Eq: n.args = f.vars(); break;
    case FormulaKind::Not:
    case FormulaKind::And:
    case FormulaKind::Or:
        for (const auto& k : f.children()) n.kids.push_back(add(k, vocab));
        break;
    default: break;
    }
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

namespace {

struct StructureOracle {
    const Structure& s;
    const Assignment& a;

    bool atom(int rel, const std::vector<int>& args) const {
        Tuple t;
        t.reserve(args.size());
        for (int v : args) {
            const auto& e = a[static_cast<std::size_t>(v)];
            if (!e || !s.contains(*e)) return false;
            t.push_back(*e);
        }
        return s.holds(rel, t);
    }
    bool eq(int x, int y) const {
        const auto& ex = a[static_cast<std::size_t>(x)];
        const auto& ey = a[static_cast<std::size_t>(y)];
        return ex && ey && s.contains(*ex) && *ex == *ey;
    }
};

// Dense view of a structure: positions instead of ids, tables for arity <= 2.
class DenseStructure {
public:
    explicit DenseStructure(const Structure& s) : s_(s), ids_(s.universe()) {
        pos_.reserve(ids_.size());
        for (std::size_t i = 0; i < ids_.size(); ++i) pos_.emplace(ids_[i], static_cast<int>(i));
        const std::size_t n = ids_.size();
        tables_.resize(s.vocab().size());
        for (std::size_t r = 0; r < s.vocab().size(); ++r) {
            const int ar = s.vocab()[r].arity;
            if (ar == 0) {
                tables_[r].assign(1, s.nullary(static_cast<int>(r)) ? 1 : 0);
            } else if (ar == 1) {
                tables_[r].assign(n, 0);
                for (const auto& t : s.tuples(static_cast<int>(r))) tables_[r][index(t[0])] = 1;
            } else if (ar == 2) {
                tables_[r].assign(n * n, 0);
                for (const auto& t : s.tuples(static_cast<int>(r))) tables_[r][index(t[0]) * n + index(t[1])] = 1;
            }
        }
    }

    std::size_t size() const { return ids_.size(); }
    ElemId id(std::size_t i) const { return ids_[i]; }
    std::size_t index(ElemId e) const { return static_cast<std::size_t>(pos_.at(e)); }

    bool holds(int rel, const std::vector<int>& args, const std::vector<int>& at) const {
        const auto& tab = tables_[static_cast<std::size_t>(rel)];
        switch (args.size()) {
        case 0: return tab[0] != 0;
        case 1: return tab[static_cast<std::size_t>(at[static_cast<std::size_t>(args[0])])] != 0;
        case 2:
            return tab[static_cast<std::size_t>(at[static_cast<std::size_t>(args[0])]) * ids_.size() +
                       static_cast<std::size_t>(at[static_cast<std::size_t>(args[1])])] != 0;
        default: {
            Tuple t;
            for (int v : args) t.push_back(ids_[static_cast<std::size_t>(at[static_cast<std::size_t>(v)])]);
            return s_.holds(rel, t);
        }
        }
    }

private:
    const Structure& s_;
    std::vector<ElemId> ids_;
    std::unordered_map<ElemId, int> pos_;
    std::vector<std::vector<std::uint8_t>> tables_;
};

struct DenseOracle {
    const DenseStructure& d;
    const std::vector<int>& at;
    bool atom(int rel, const std::vector<int>& args) const { return d.holds(rel, args, at); }
    bool eq(int x, int y) const { return at[static_cast<std::size_t>(x)] == at[static_cast<std::size_t>(y)]; }
};

void check_vars(const Formula& f, int arity, const std::string& what) {
    if (max_var(f) >= arity)
        throw std::invalid_argument(what + " uses x" + std::to_string(max_var(f) + 1) + " but has arity " +
                                    std::to_string(arity));
}

}  // namespace

bool eval_formula(const Formula& f, const Structure& s, const Assignment& assignment) {
    if (max_var(f) >= static_cast<int>(assignment.size()))
        throw std::invalid_argument("formula uses x" + std::to_string(max_var(f) + 1) + " but only " +
                                    std::to_string(assignment.size()) + " elements are assigned");
    CompiledFormula c(f, s.vocab());
    return c.eval(StructureOracle{s, assignment});
}

// ---------------------------------------------------------------- interpretations

void QfInterp::validate() const {
    if (defs.size() != out_vocab.size())
        throw std::invalid_argument("interpretation defines " + std::to_string(defs.size()) + " of " +
                                    std::to_string(out_vocab.size()) + " output relations");
    check_vars(universe, 1, "universe formula");
    CompiledFormula(universe, in_vocab);
    for (std::size_t r = 0; r < defs.size(); ++r) {
        check_vars(defs[r], out_vocab[r].arity, "definition of " + out_vocab[r].name);
        CompiledFormula(defs[r], in_vocab);
    }
}

const Formula& QfInterp::def(const std::string& name) const {
    const int idx = out_vocab.find(name);
    if (idx < 0) throw std::invalid_argument("no output relation " + name);
    return defs[static_cast<std::size_t>(idx)];
}

QfInterp identity_interp(const Vocabulary& v) {
    QfInterp f{v, v, Formula::truth(), {}};
    for (const auto& sym : v.symbols()) {
        std::vector<int> vars(static_cast<std::size_t>(sym.arity));
        for (int i = 0; i < sym.arity; ++i) vars[static_cast<std::size_t>(i)] = i;
        f.defs.push_back(Formula::atom(sym.name, std::move(vars)));
    }
    return f;
}

Structure apply_interp(const QfInterp& f, const Structure& s) {
    if (s.vocab() != f.in_vocab) throw VocabularyMismatch("structure vocabulary does not match the interpretation");
    const DenseStructure d(s);
    const CompiledFormula univ(f.universe, f.in_vocab);
    std::vector<int> survivors;
    std::vector<int> at(1);
    for (std::size_t i = 0; i < d.size(); ++i) {
        at[0] = static_cast<int>(i);
        if (univ.eval(DenseOracle{d, at})) survivors.push_back(static_cast<int>(i));
    }
    Structure out(f.out_vocab);
    for (int i : survivors) out.add_element(d.id(static_cast<std::size_t>(i)), s.grade(d.id(static_cast<std::size_t>(i))));
    for (std::size_t r = 0; r < f.out_vocab.size(); ++r) {
        const CompiledFormula def(f.defs[r], f.in_vocab);
        const int m = f.out_vocab[r].arity;
        std::vector<std::size_t> odo(static_cast<std::size_t>(m), 0);
        std::vector<int> args(static_cast<std::size_t>(m));
        if (m > 0 && survivors.empty()) continue;
        for (;;) {
            for (int j = 0; j < m; ++j) args[static_cast<std::size_t>(j)] = survivors[odo[static_cast<std::size_t>(j)]];
            if (def.eval(DenseOracle{d, args})) {
                Tuple t;
                t.reserve(static_cast<std::size_t>(m));
                for (int a : args) t.push_back(d.id(static_cast<std::size_t>(a)));
                out.add_tuple(static_cast<int>(r), std::move(t));
            }
            int j = m - 1;
            while (j >= 0 && ++odo[static_cast<std::size_t>(j)] == survivors.size()) odo[static_cast<std::size_t>(j--)] = 0;
            if (j < 0) break;
        }
    }
    return out;
}

QfInterp compose_interp(const QfInterp& first, const QfInterp& second) {
    if (first.out_vocab != second.in_vocab)
        throw VocabularyMismatch("cannot compose: output vocabulary of the first interpretation differs");
    auto alive = [&](std::vector<int> vars) {
        std::sort(vars.begin(), vars.end());
        vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
        std::vector<Formula> parts;
        for (int v : vars) parts.push_back(rename_vars(first.universe, {v}));
        return Formula::conj(std::move(parts));
    };
    auto atom_map = [&](const std::string& r, const std::vector<int>& xs) {
        return Formula::conj(rename_vars(first.def(r), xs), alive(xs));
    };
    auto eq_map = [&](int a, int b) { return Formula::conj(Formula::eq(a, b), alive({a, b})); };
    QfInterp out{first.in_vocab, second.out_vocab,
                 Formula::conj(first.universe, substitute(second.universe, atom_map, eq_map)), {}};
    for (const auto& d : second.defs) out.defs.push_back(substitute(d, atom_map, eq_map));
    return out;
}

std::string print_interp(const QfInterp& f) {
    std::ostringstream os;
    os << "VOCAB-IN\n";
    for (const auto& s : f.in_vocab.symbols()) os << s.name << '(' << s.arity << ")\n";
    os << "VOCAB-OUT\n";
    for (const auto& s : f.out_vocab.symbols()) os << s.name << '(' << s.arity << ")\n";
    os << "UNIVERSE: " << to_string(f.universe) << '\n';
    for (std::size_t r = 0; r < f.defs.size(); ++r) os << "REL " << f.out_vocab[r].name << ": " << to_string(f.defs[r]) << '\n';
    return os.str();
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

void parse_symbols(const std::string& text, Vocabulary& v, std::size_t lineno) {
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        const auto open = tok.rfind('(');
        if (open == std::string::npos || tok.back() != ')')
            throw ParseError(lineno, "expected NAME(arity), found '" + tok + "'");
        const std::string ar = tok.substr(open + 1, tok.size() - open - 2);
        if (ar.empty() || !std::all_of(ar.begin(), ar.end(), [](char c) { return c >= '0' && c <= '9'; }))
            throw ParseError(lineno, "bad arity in '" + tok + "'");
        v.add(tok.substr(0, open), std::stoi(ar));
    }
}

}  // namespace

QfInterp parse_interp(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    enum class Section { None, In, Out } section = Section::None;
    QfInterp f;
    std::optional<Formula> universe;
    std::vector<std::pair<std::string, Formula>> defs;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto header = [&](const char* name) {
            const std::size_t n = std::char_traits<char>::length(name);
            return t.compare(0, n, name) == 0 && (t.size() == n || t[n] == ':' || t[n] == ' ');
        };
        try {
            if (header("VOCAB-IN") || header("VOCAB-OUT")) {
                const bool is_in = header("VOCAB-IN");
                section = is_in ? Section::In : Section::Out;
                const std::size_t n = is_in ? 8 : 9;
                std::string rest = t.substr(n);
                if (!rest.empty() && rest[0] == ':') rest = rest.substr(1);
                parse_symbols(rest, is_in ? f.in_vocab : f.out_vocab, lineno);
            } else if (header("UNIVERSE")) {
                section = Section::None;
                const auto colon = t.find(':');
                if (colon == std::string::npos) throw ParseError(lineno, "expected 'UNIVERSE: formula'");
                universe = parse_formula(t.substr(colon + 1));
            } else if (header("REL")) {
                section = Section::None;
                const auto colon = t.find(':');
                if (colon == std::string::npos) throw ParseError(lineno, "expected 'REL name: formula'");
                defs.emplace_back(trim(t.substr(3, colon - 3)), parse_formula(t.substr(colon + 1)));
            } else if (section != Section::None) {
                parse_symbols(t, section == Section::In ? f.in_vocab : f.out_vocab, lineno);
            } else {
                throw ParseError(lineno, "unexpected line '" + t + "'");
            }
        } catch (const ParseError& e) {
            throw ParseError(lineno, "line " + std::to_string(lineno) + ": " + e.what());
        } catch (const std::invalid_argument& e) {
            throw ParseError(lineno, "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!universe) throw ParseError(lineno, "missing UNIVERSE line");
    f.universe = *universe;
    f.defs.assign(f.out_vocab.size(), Formula::falsity());
    std::vector<bool> seen(f.out_vocab.size(), false);
    for (auto& [name, def] : defs) {
        const int idx = f.out_vocab.find(name);
        if (idx < 0) throw ParseError(0, "REL for undeclared output relation " + name);
        if (seen[static_cast<std::size_t>(idx)]) throw ParseError(0, "relation " + name + " defined twice");
        seen[static_cast<std::size_t>(idx)] = true;
        f.defs[static_cast<std::size_t>(idx)] = def;
    }
    for (std::size_t r = 0; r < seen.size(); ++r)
        if (!seen[r]) throw ParseError(0, "missing REL for output relation " + f.out_vocab[r].name);
    try {
        f.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(0, e.what());
    }
    return f;
}

// ---------------------------------------------------------------- theories

TheoryLayout::TheoryLayout(Vocabulary vocab, int arity) : vocab_(std::move(vocab)), arity_(arity) {
    offsets_.assign(vocab_.size(), 0);
    for (std::size_t r = 0; r < vocab_.size(); ++r)
        if (vocab_[r].arity == 0) offsets_[r] = bits_++;
    for (std::size_t r = 0; r < vocab_.size(); ++r) {
        const int m = vocab_[r].arity;
        if (m == 0) continue;
        offsets_[r] = bits_;
        std::size_t count = 1;
        for (int i = 0; i < m; ++i) count *= static_cast<std::size_t>(arity_);
        bits_ += count;
    }
}

std::size_t TheoryLayout::atom_bit(int rel, const int* indices) const {
    const int m = vocab_[static_cast<std::size_t>(rel)].arity;
    std::size_t b = 0;
    for (int i = 0; i < m; ++i) b = b * static_cast<std::size_t>(arity_) + static_cast<std::size_t>(indices[i]);
    return offsets_[static_cast<std::size_t>(rel)] + b;
}

AtomicTheory::AtomicTheory(LayoutPtr layout, std::vector<std::int8_t> rep, std::vector<std::uint8_t> bits)
    : layout_(std::move(layout)), rep_(std::move(rep)), bits_(std::move(bits)) {}

bool AtomicTheory::atom(int rel, const std::vector<int>& indices) const {
    if (indices.empty()) return nullary(rel);
    return bits_[layout_->atom_bit(rel, indices.data())] != 0;
}

std::string AtomicTheory::key() const {
    std::string k;
    k.reserve(rep_.size() + 1 + bits_.size());
    for (auto r : rep_) k.push_back(static_cast<char>(r + 1));
    k.push_back('|');
    for (auto b : bits_) k.push_back(b ? '1' : '0');
    return k;
}

namespace {

// Calls fn(indices) for every tuple in [0,k)^m in lexicographic order.
template <class Fn>
void for_each_index_tuple(int k, int m, Fn&& fn) {
    std::vector<int> idx(static_cast<std::size_t>(m), 0);
    if (m > 0 && k == 0) return;
    for (;;) {
        fn(idx);
        int j = m - 1;
        while (j >= 0 && ++idx[static_cast<std::size_t>(j)] == k) idx[static_cast<std::size_t>(j--)] = 0;
        if (j < 0) return;
    }
}

}  // namespace

AtomicTheory theory_of(const Structure& s, const Assignment& tuple) {
    return theory_of(s, tuple, std::make_shared<const TheoryLayout>(s.vocab(), static_cast<int>(tuple.size())));
}

AtomicTheory theory_of(const Structure& s, const Assignment& tuple, const LayoutPtr& layout) {
    const int k = static_cast<int>(tuple.size());
    std::vector<std::int8_t> rep(static_cast<std::size_t>(k), -1);
    for (int i = 0; i < k; ++i) {
        const auto& e = tuple[static_cast<std::size_t>(i)];
        if (!e || !s.contains(*e)) continue;
        for (int j = 0; j <= i; ++j)
            if (tuple[static_cast<std::size_t>(j)] == e) {
                rep[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(j);
                break;
            }
    }
    std::vector<std::uint8_t> bits(layout->bit_count(), 0);
    const auto& v = s.vocab();
    for (std::size_t r = 0; r < v.size(); ++r) {
        const int m = v[r].arity;
        if (m == 0) {
            bits[layout->nullary_bit(static_cast<int>(r))] = s.nullary(static_cast<int>(r)) ? 1 : 0;
            continue;
        }
        Tuple t(static_cast<std::size_t>(m));
        for_each_index_tuple(k, m, [&](const std::vector<int>& idx) {
            for (int j = 0; j < m; ++j) {
                const int i = idx[static_cast<std::size_t>(j)];
                if (rep[static_cast<std::size_t>(i)] < 0) return;
                t[static_cast<std::size_t>(j)] = *tuple[static_cast<std::size_t>(i)];
            }
            if (s.holds(static_cast<int>(r), t)) bits[layout->atom_bit(static_cast<int>(r), idx.data())] = 1;
        });
    }
    return AtomicTheory(layout, std::move(rep), std::move(bits));
}

namespace {

struct TheoryOracle {
    const AtomicTheory& th;
    const std::vector<int>& at;  // variable -> theory index
    bool atom(int rel, const std::vector<int>& args) const {
        if (args.empty()) return th.nullary(rel);
        int buf[8];
        std::vector<int> big;
        int* idx = buf;
        if (args.size() > 8) {
            big.resize(args.size());
            idx = big.data();
        }
        for (std::size_t j = 0; j < args.size(); ++j) {
            idx[j] = at[static_cast<std::size_t>(args[j])];
            if (!th.present(idx[j])) return false;
        }
        return th.bit(th.layout().atom_bit(rel, idx));
    }
    bool eq(int x, int y) const { return th.same(at[static_cast<std::size_t>(x)], at[static_cast<std::size_t>(y)]); }
};

}  // namespace

TheoryStep::TheoryStep(const QfInterp& f) : f_(f), universe_(f.universe, f.in_vocab) {
    for (const auto& d : f.defs) defs_.emplace_back(d, f.in_vocab);
}

LayoutPtr TheoryStep::layout(int arity) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto& slot = layouts_[arity];
    if (!slot) slot = std::make_shared<const TheoryLayout>(f_.out_vocab, arity);
    return slot;
}

AtomicTheory TheoryStep::apply(const AtomicTheory& th) const {
    if (th.layout().vocab() != f_.in_vocab) throw VocabularyMismatch("theory vocabulary does not match the interpretation");
    const int k = th.arity();
    const LayoutPtr out = layout(k);
    std::vector<std::int8_t> rep(static_cast<std::size_t>(k), -1);
    std::vector<int> at(1);
    for (int i = 0; i < k; ++i) {
        if (!th.present(i)) continue;
        if (th.rep(i) != i) {
            rep[static_cast<std::size_t>(i)] = rep[static_cast<std::size_t>(th.rep(i))];
            continue;
        }
        at[0] = i;
        if (universe_.eval(TheoryOracle{th, at})) rep[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(i);
    }
    std::vector<std::uint8_t> bits(out->bit_count(), 0);
    for (std::size_t r = 0; r < f_.out_vocab.size(); ++r) {
        const int m = f_.out_vocab[r].arity;
        if (m == 0) {
            std::vector<int> none;
            bits[out->nullary_bit(static_cast<int>(r))] = defs_[r].eval(TheoryOracle{th, none}) ? 1 : 0;
            continue;
        }
        for_each_index_tuple(k, m, [&](const std::vector<int>& idx) {
            for (int i : idx)
                if (rep[static_cast<std::size_t>(i)] < 0) return;
            if (defs_[r].eval(TheoryOracle{th, idx})) bits[out->atom_bit(static_cast<int>(r), idx.data())] = 1;
        });
    }
    return AtomicTheory(out, std::move(rep), std::move(bits));
}

AtomicTheory theory_transition(const QfInterp& f, const AtomicTheory& th) { return TheoryStep(f).apply(th); }

AtomicTheory pair_theory(const AtomicTheory& left, const AtomicTheory& right, const std::vector<Side>& sides) {
    return pair_theory(left, right, sides,
                       std::make_shared<const TheoryLayout>(pair_vocab(left.layout().vocab(), right.layout().vocab()),
                                                            static_cast<int>(sides.size())));
}

AtomicTheory pair_theory(const AtomicTheory& left, const AtomicTheory& right, const std::vector<Side>& sides,
                         const LayoutPtr& out_layout) {
    const int k = static_cast<int>(sides.size());
    if (k != left.arity() + right.arity()) throw std::invalid_argument("interleaving does not cover both tuples");
    // local[i]: index within its side; combined[s][j]: combined index of side-local j.
    std::vector<int> local(static_cast<std::size_t>(k));
    std::vector<int> combined[2];
    for (int i = 0; i < k; ++i) {
        auto& c = combined[sides[static_cast<std::size_t>(i)] == Side::Left ? 0 : 1];
        local[static_cast<std::size_t>(i)] = static_cast<int>(c.size());
        c.push_back(i);
    }
    if (static_cast<int>(combined[0].size()) != left.arity())
        throw std::invalid_argument("interleaving does not match the left tuple");
    std::vector<std::int8_t> rep(static_cast<std::size_t>(k), -1);
    for (int i = 0; i < k; ++i) {
        const bool is_left = sides[static_cast<std::size_t>(i)] == Side::Left;
        const AtomicTheory& th = is_left ? left : right;
        const int r = th.rep(local[static_cast<std::size_t>(i)]);
        if (r >= 0) rep[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(combined[is_left ? 0 : 1][static_cast<std::size_t>(r)]);
    }
    std::vector<std::uint8_t> bits(out_layout->bit_count(), 0);
    const auto& lv = left.layout().vocab();
    const auto& rv = right.layout().vocab();
    // side[] is relation 0 of the pair vocabulary.
    for (int i = 0; i < k; ++i)
        if (sides[static_cast<std::size_t>(i)] == Side::Left && rep[static_cast<std::size_t>(i)] >= 0)
            bits[out_layout->atom_bit(0, &i)] = 1;
    auto copy_side = [&](const AtomicTheory& th, const Vocabulary& v, int offset, Side side) {
        const int si = side == Side::Left ? 0 : 1;
        const auto& comb = combined[si];
        const int kk = th.arity();
        for (std::size_t r = 0; r < v.size(); ++r) {
            const int m = v[r].arity;
            const int out_rel = offset + static_cast<int>(r);
            if (m == 0) {
                bits[out_layout->nullary_bit(out_rel)] = th.nullary(static_cast<int>(r)) ? 1 : 0;
                continue;
            }
            std::vector<int> mapped(static_cast<std::size_t>(m));
            for_each_index_tuple(kk, m, [&](const std::vector<int>& idx) {
                if (!th.bit(th.layout().atom_bit(static_cast<int>(r), idx.data()))) return;
                for (int j = 0; j < m; ++j)
                    mapped[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
                bits[out_layout->atom_bit(out_rel, mapped.data())] = 1;
            });
        }
    };
    copy_side(left, lv, 1, Side::Left);
    copy_side(right, rv, 1 + static_cast<int>(lv.size()), Side::Right);
    return AtomicTheory(out_layout, std::move(rep), std::move(bits));
}

// ---------------------------------------------------------------- restriction

namespace {

struct RelPath {
    std::string role;
    std::string path;
};

RelPath split_name(const std::string& name) {
    const auto open = name.find('[');
    const auto close = name.rfind(']');
    if (open == std::string::npos || close == std::string::npos || close < open) return {name, {}};
    return {name.substr(0, open), name.substr(open + 1, close - open - 1)};
}

// Truth of one-variable atoms at an element whose position in the type is `leaf`.
struct PathOracle {
    const std::vector<RelPath>& rels;
    const std::string& leaf;
    bool under(const std::string& path, char step) const {
        return leaf.size() > path.size() && leaf.compare(0, path.size(), path) == 0 && leaf[path.size()] == step;
    }
    bool atom(int rel, const std::vector<int>&) const {
        const RelPath& r = rels[static_cast<std::size_t>(rel)];
        if (r.role == "side" || r.role == "tag") return under(r.path, 'L');
        return under(r.path, 'E');
    }
    bool eq(int, int) const { return true; }
};

bool always_empty(const Type& t) {
    switch (t.kind()) {
    case TypeKind::Unit:
    case TypeKind::Var: return false;
    case TypeKind::Zero: return true;
    case TypeKind::Prod:
    case TypeKind::CoProd: return always_empty(t.left()) && always_empty(t.right());
    default: return always_empty(t.inner());
    }
}

struct Restricted {
    Type type;
    // (role, path relative to this node in the output type, full input name)
    std::vector<std::tuple<std::string, std::string, std::string>> rels;
};

class Restrictor {
public:
    Restrictor(const CompiledFormula& phi, const std::vector<RelPath>& names) : phi_(phi), names_(names) {}

    Restricted run(const Type& t, const std::string& in_path, bool in_item) {
        switch (t.kind()) {
        case TypeKind::Unit:
        case TypeKind::Var: {
            const PathOracle o{names_, in_path};
            return {phi_.eval(o) ? t : Type::zero(), {}};
        }
        case TypeKind::Zero: return {t, {}};
        case TypeKind::Bang: {
            Restricted r = run(t.inner(), in_path, in_item);
            return {Type::bang(r.type), std::move(r.rels)};
        }
        case TypeKind::Prod: {
            Restricted l = run(t.left(), in_path + 'L', in_item);
            Restricted r = run(t.right(), in_path + 'R', in_item);
            Restricted out{Type::prod(l.type, r.type), {{"side", "", "side[" + in_path + "]"}}};
            append(out, l, 'L');
            append(out, r, 'R');
            return out;
        }
        case TypeKind::CoProd: {
            Restricted l = run(t.left(), in_path + 'L', in_item);
            Restricted r = run(t.right(), in_path + 'R', in_item);
            if (in_item && always_empty(l.type) && !always_empty(r.type)) return r;
            if (in_item && always_empty(r.type) && !always_empty(l.type)) return l;
            Restricted out{Type::coprod(l.type, r.type), {{"tag", "", "tag[" + in_path + "]"}}};
            append(out, l, 'L');
            append(out, r, 'R');
            return out;
        }
        case TypeKind::List: {
            Restricted e = run(t.inner(), in_path + 'E', true);
            Restricted out{Type::list(e.type), {{"ord", "", "ord[" + in_path + "]"}}};
            append(out, e, 'E');
            return out;
        }
        case TypeKind::Tree: {
            Restricted e = run(t.inner(), in_path + 'E', true);
            Restricted out{Type::tree(e.type),
                           {{"desc", "", "desc[" + in_path + "]"}, {"doc", "", "doc[" + in_path + "]"}}};
            append(out, e, 'E');
            return out;
        }
        }
        return {t, {}};
    }

private:
    const CompiledFormula& phi_;
    const std::vector<RelPath>& names_;

    static void append(Restricted& out, const Restricted& child, char step) {
        for (const auto& [role, path, in] : child.rels) out.rels.emplace_back(role, step + path, in);
    }
};

}  // namespace

Restriction type_restriction(const Type& t, const Formula& phi) {
    if (!is_dnf(t)) throw NotDnf("type " + to_string(t) + " is not in disjunctive normal form");
    if (max_var(phi) > 0) throw std::invalid_argument("restriction formula must have one variable");
    const Vocabulary in_vocab = vocab_of(t);
    std::vector<RelPath> names;
    for (const auto& s : in_vocab.symbols()) names.push_back(split_name(s.name));
    const CompiledFormula compiled(phi, in_vocab);
    Restricted r = Restrictor(compiled, names).run(t, "", false);

    QfInterp proj{in_vocab, vocab_of(r.type), phi, {}};
    std::unordered_map<std::string, std::string> source;
    for (const auto& [role, path, in] : r.rels) source.emplace(role + "[" + path + "]", in);
    for (const auto& sym : proj.out_vocab.symbols()) {
        std::vector<int> vars(static_cast<std::size_t>(sym.arity));
        for (int i = 0; i < sym.arity; ++i) vars[static_cast<std::size_t>(i)] = i;
        proj.defs.push_back(Formula::atom(source.at(sym.name), std::move(vars)));
    }
    return {r.type, std::move(proj)};
}

}  // namespace foldreg
