#include "foldreg/sst.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace foldreg {

// ---------------------------------------------------------------- updates

RegisterUpdate::RegisterUpdate(int in_count, std::vector<UpdateWord> words)
    : in_count_(in_count), words_(std::move(words)) {
    if (in_count_ < 0) throw std::invalid_argument("negative register count");
    std::vector<bool> used(static_cast<std::size_t>(in_count_), false);
    for (const auto& w : words_)
        for (const auto& s : w) {
            if (!s.is_register) {
                if (s.index < 0) throw std::invalid_argument("negative output letter");
                continue;
            }
            if (s.index < 0 || s.index >= in_count_)
                throw std::invalid_argument("register $" + std::to_string(s.index + 1) + " out of range");
            if (used[static_cast<std::size_t>(s.index)])
                throw std::invalid_argument("register $" + std::to_string(s.index + 1) + " used twice (not copyless)");
            used[static_cast<std::size_t>(s.index)] = true;
        }
}

std::size_t RegisterUpdate::literal_count() const {
    std::size_t n = 0;
    for (const auto& w : words_)
        for (const auto& s : w)
            if (!s.is_register) ++n;
    return n;
}

std::vector<Word> RegisterUpdate::apply(const std::vector<Word>& regs) const {
    if (static_cast<int>(regs.size()) != in_count_) throw std::invalid_argument("register count mismatch");
    std::vector<Word> out;
    out.reserve(words_.size());
    for (const auto& w : words_) {
        Word r;
        for (const auto& s : w) {
            if (s.is_register) {
                const auto& src = regs[static_cast<std::size_t>(s.index)];
                r.insert(r.end(), src.begin(), src.end());
            } else {
                r.push_back(s.index);
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------- machine

void Sst::validate() const {
    const int nq = static_cast<int>(states.size());
    const int na = static_cast<int>(input_alphabet.size());
    const int ng = static_cast<int>(output_alphabet.size());
    if (nq == 0) throw std::invalid_argument("sst: no states");
    if (ng == 0) throw std::invalid_argument("sst: empty output alphabet");
    if (static_cast<int>(transition.size()) != nq) throw std::invalid_argument("sst: transition table has wrong size");
    for (const auto& row : transition) {
        if (static_cast<int>(row.size()) != na) throw std::invalid_argument("sst: transition is not total");
        for (int q : row)
            if (q < 0 || q >= nq) throw std::invalid_argument("sst: transition to an unknown state");
    }
    if (static_cast<int>(updates.size()) != nq) throw std::invalid_argument("sst: one update per state expected");
    auto check_letters = [&](const RegisterUpdate& u) {
        for (const auto& w : u.words())
            for (const auto& s : w)
                if (!s.is_register && s.index >= ng) throw std::invalid_argument("sst: unknown output letter");
    };
    for (const auto& u : updates) {
        if (u.in_count() != registers || u.out_count() != registers)
            throw std::invalid_argument("sst: state update must map " + std::to_string(registers) + " registers to " +
                                        std::to_string(registers));
        check_letters(u);
    }
    if (output.in_count() != registers || output.out_count() != 1)
        throw std::invalid_argument("sst: output update must map the registers to one word");
    check_letters(output);
}

std::size_t Sst::literal_bound() const {
    std::size_t b = output.literal_count();
    for (const auto& u : updates) b = std::max(b, u.literal_count());
    return b;
}

namespace {

// Registers shuffled, some dropped, the rest cut into `out` words with
// literals sprinkled in.
RegisterUpdate random_update(std::mt19937_64& rng, int in, int out, int letters, int max_literals) {
    std::vector<int> regs(static_cast<std::size_t>(in));
    for (int i = 0; i < in; ++i) regs[static_cast<std::size_t>(i)] = i;
    std::shuffle(regs.begin(), regs.end(), rng);
    std::uniform_int_distribution<int> pick_word(0, out - 1), pick_letter(0, letters - 1), coin(0, 5);
    std::vector<UpdateWord> words(static_cast<std::size_t>(out));
    for (int r : regs)
        if (coin(rng) != 0) words[static_cast<std::size_t>(pick_word(rng))].push_back({true, r});
    int lits = std::uniform_int_distribution<int>(0, max_literals)(rng);
    for (int i = 0; i < lits; ++i) {
        auto& w = words[static_cast<std::size_t>(pick_word(rng))];
        auto pos = std::uniform_int_distribution<std::size_t>(0, w.size())(rng);
        w.insert(w.begin() + static_cast<std::ptrdiff_t>(pos), UpdateSymbol{false, pick_letter(rng)});
    }
    return RegisterUpdate(in, std::move(words));
}

}  // namespace

Sst random_sst(std::mt19937_64& rng, int states, int registers, int in_letters, int out_letters, int max_literals) {
    Sst m;
    for (int i = 0; i < in_letters; ++i) m.input_alphabet.push_back(std::string(1, static_cast<char>('a' + i)));
    for (int i = 0; i < out_letters; ++i) m.output_alphabet.push_back(std::string(1, static_cast<char>('a' + i)));
    for (int i = 0; i < states; ++i) m.states.push_back("q" + std::to_string(i));
    m.registers = registers;
    std::uniform_int_distribution<int> q(0, states - 1);
    m.transition.assign(static_cast<std::size_t>(states), std::vector<int>(static_cast<std::size_t>(in_letters)));
    for (auto& row : m.transition)
        for (int& t : row) t = q(rng);
    for (int i = 0; i < states; ++i) m.updates.push_back(random_update(rng, registers, registers, out_letters, max_literals));
    m.output = random_update(rng, registers, 1, out_letters, max_literals);
    m.validate();
    return m;
}

Configuration run_config(const Sst& m, const Word& w) {
    Configuration c;
    c.registers.assign(static_cast<std::size_t>(m.registers), Word{});
    for (int a : w) {
        if (a < 0 || a >= static_cast<int>(m.input_alphabet.size()))
            throw std::out_of_range("letter outside the input alphabet");
        c.state = m.transition[static_cast<std::size_t>(c.state)][static_cast<std::size_t>(a)];
        c.registers = m.updates[static_cast<std::size_t>(c.state)].apply(c.registers);
    }
    return c;
}

Word run(const Sst& m, const Word& w) { return m.output.apply(run_config(m, w).registers)[0]; }

namespace {

bool single_chars(const std::vector<std::string>& alphabet) {
    return std::all_of(alphabet.begin(), alphabet.end(), [](const std::string& s) { return s.size() == 1; });
}

int letter_index(const std::vector<std::string>& alphabet, const std::string& name) {
    auto it = std::find(alphabet.begin(), alphabet.end(), name);
    if (it == alphabet.end()) return -1;
    return static_cast<int>(it - alphabet.begin());
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

}  // namespace

Word parse_word(const std::vector<std::string>& alphabet, std::string_view text) {
    Word w;
    if (single_chars(alphabet) && text.find(' ') == std::string_view::npos) {
        for (char c : text) {
            int i = letter_index(alphabet, std::string(1, c));
            if (i < 0) throw std::out_of_range(std::string("letter '") + c + "' outside the alphabet");
            w.push_back(i);
        }
        return w;
    }
    for (const auto& tok : split_ws(text)) {
        int i = letter_index(alphabet, tok);
        if (i < 0) throw std::out_of_range("letter '" + tok + "' outside the alphabet");
        w.push_back(i);
    }
    return w;
}

std::string render_word(const std::vector<std::string>& alphabet, const Word& w) {
    const bool compact = single_chars(alphabet);
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!compact && i) out += ' ';
        out += alphabet.at(static_cast<std::size_t>(w[i]));
    }
    return out;
}

// ---------------------------------------------------------------- text format

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

UpdateWord parse_update_word(const std::vector<std::string>& out_alphabet, const std::string& text,
                             std::size_t lineno) {
    UpdateWord w;
    auto fail = [&](const std::string& msg) {
        throw std::invalid_argument("sst line " + std::to_string(lineno) + ": " + msg);
    };
    for (const auto& tok : split_ws(text)) {
        if (tok == "ε" || tok == "_") continue;
        std::size_t i = 0;
        while (i < tok.size()) {
            if (tok[i] == '$') {
                std::size_t j = i + 1;
                while (j < tok.size() && std::isdigit(static_cast<unsigned char>(tok[j]))) ++j;
                if (j == i + 1) fail("expected a register number after $");
                int r = std::stoi(tok.substr(i + 1, j - i - 1));
                if (r < 1) fail("registers are numbered from $1");
                w.push_back({true, r - 1});
                i = j;
                continue;
            }
            std::size_t j = tok.find('$', i);
            if (j == std::string::npos) j = tok.size();
            std::string chunk = tok.substr(i, j - i);
            int li = letter_index(out_alphabet, chunk);
            if (li >= 0) {
                w.push_back({false, li});
            } else if (single_chars(out_alphabet)) {
                for (char c : chunk) {
                    int ci = letter_index(out_alphabet, std::string(1, c));
                    if (ci < 0) fail(std::string("unknown output letter '") + c + "'");
                    w.push_back({false, ci});
                }
            } else {
                fail("unknown output letter '" + chunk + "'");
            }
            i = j;
        }
    }
    return w;
}

std::vector<UpdateWord> parse_update_words(const std::vector<std::string>& out_alphabet, const std::string& text,
                                           std::size_t lineno) {
    std::vector<UpdateWord> words;
    std::size_t start = 0;
    for (;;) {
        std::size_t bar = text.find('|', start);
        words.push_back(parse_update_word(out_alphabet, text.substr(start, bar - start), lineno));
        if (bar == std::string::npos) break;
        start = bar + 1;
    }
    return words;
}

std::string print_update_word(const std::vector<std::string>& out_alphabet, const UpdateWord& w) {
    if (w.empty()) return "_";
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += ' ';
        if (w[i].is_register) out += "$" + std::to_string(w[i].index + 1);
        else out += out_alphabet.at(static_cast<std::size_t>(w[i].index));
    }
    return out;
}

}  // namespace

Sst parse_sst(const std::string& text) {
    Sst m;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::tuple<std::string, std::string, std::string, std::size_t>> trans;
    std::vector<std::tuple<std::string, std::string, std::size_t>> updates;
    std::string out_text;
    std::size_t out_line = 0;
    int declared_regs = -1;
    auto fail = [&](const std::string& msg) {
        throw std::invalid_argument("sst line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        auto after = [&](std::string_view key) { return trim(std::string_view(t).substr(key.size())); };
        if (t.rfind("ALPHABET-IN:", 0) == 0) {
            m.input_alphabet = split_ws(after("ALPHABET-IN:"));
        } else if (t.rfind("ALPHABET-OUT:", 0) == 0) {
            m.output_alphabet = split_ws(after("ALPHABET-OUT:"));
        } else if (t.rfind("STATES:", 0) == 0) {
            m.states = split_ws(after("STATES:"));
        } else if (t.rfind("REGISTERS:", 0) == 0) {
            declared_regs = std::stoi(after("REGISTERS:"));
        } else if (t.rfind("TRANS", 0) == 0) {
            auto parts = split_ws(after("TRANS"));
            if (parts.size() != 4 || parts[2] != "->") fail("expected TRANS q a -> q'");
            trans.emplace_back(parts[0], parts[1], parts[3], lineno);
        } else if (t.rfind("UPDATE", 0) == 0) {
            std::string rest = after("UPDATE");
            auto colon = rest.find(':');
            if (colon == std::string::npos) fail("expected UPDATE q: words");
            updates.emplace_back(trim(std::string_view(rest).substr(0, colon)), rest.substr(colon + 1), lineno);
        } else if (t.rfind("OUT:", 0) == 0) {
            out_text = after("OUT:");
            out_line = lineno;
        } else {
            fail("unrecognized line");
        }
    }
    if (m.states.empty()) throw std::invalid_argument("sst: missing STATES");
    if (m.input_alphabet.empty()) throw std::invalid_argument("sst: missing ALPHABET-IN");
    if (m.output_alphabet.empty()) throw std::invalid_argument("sst: missing ALPHABET-OUT");

    std::map<std::string, std::vector<UpdateWord>> words;
    int regs = declared_regs;
    for (const auto& [q, body, ln] : updates) {
        if (letter_index(m.states, q) < 0)
            throw std::invalid_argument("sst line " + std::to_string(ln) + ": unknown state " + q);
        auto ws = parse_update_words(m.output_alphabet, body, ln);
        if (regs < 0) regs = static_cast<int>(ws.size());
        words[q] = std::move(ws);
    }
    if (regs < 0) regs = 0;
    m.registers = regs;
    for (const auto& q : m.states) {
        auto it = words.find(q);
        if (it == words.end()) {
            std::vector<UpdateWord> id;
            for (int i = 0; i < regs; ++i) id.push_back({{true, i}});
            m.updates.emplace_back(regs, std::move(id));
        } else {
            m.updates.emplace_back(regs, it->second);
        }
    }
    if (out_line == 0) throw std::invalid_argument("sst: missing OUT");
    m.output = RegisterUpdate(regs, {parse_update_word(m.output_alphabet, out_text, out_line)});

    m.transition.assign(m.states.size(), std::vector<int>(m.input_alphabet.size(), -1));
    for (const auto& [q, a, q2, ln] : trans) {
        int qi = letter_index(m.states, q), ai = letter_index(m.input_alphabet, a), qj = letter_index(m.states, q2);
        if (qi < 0 || ai < 0 || qj < 0)
            throw std::invalid_argument("sst line " + std::to_string(ln) + ": unknown state or letter");
        m.transition[static_cast<std::size_t>(qi)][static_cast<std::size_t>(ai)] = qj;
    }
    for (std::size_t q = 0; q < m.states.size(); ++q)
        for (std::size_t a = 0; a < m.input_alphabet.size(); ++a)
            if (m.transition[q][a] < 0)
                throw std::invalid_argument("sst: no transition from " + m.states[q] + " on " + m.input_alphabet[a]);
    m.validate();
    return m;
}

std::string print_sst(const Sst& m) {
    std::ostringstream os;
    auto list = [&](const std::vector<std::string>& xs) {
        for (const auto& x : xs) os << ' ' << x;
        os << '\n';
    };
    os << "ALPHABET-IN:";
    list(m.input_alphabet);
    os << "ALPHABET-OUT:";
    list(m.output_alphabet);
    os << "STATES:";
    list(m.states);
    os << "REGISTERS: " << m.registers << '\n';
    for (std::size_t q = 0; q < m.states.size(); ++q)
        for (std::size_t a = 0; a < m.input_alphabet.size(); ++a)
            os << "TRANS " << m.states[q] << ' ' << m.input_alphabet[a] << " -> "
               << m.states[static_cast<std::size_t>(m.transition[q][a])] << '\n';
    for (std::size_t q = 0; q < m.states.size(); ++q) {
        os << "UPDATE " << m.states[q] << ':';
        const auto& ws = m.updates[q].words();
        for (std::size_t i = 0; i < ws.size(); ++i) os << (i ? " | " : " ") << print_update_word(m.output_alphabet, ws[i]);
        os << '\n';
    }
    os << "OUT: " << print_update_word(m.output_alphabet, m.output.words()[0]) << '\n';
    return os.str();
}

// ---------------------------------------------------------------- pre-copying

Word Precopied::expand(const Word& w) const {
    Word out;
    out.reserve(w.size() * static_cast<std::size_t>(copies));
    for (int a : w)
        for (int j = 0; j < copies; ++j) out.push_back(a * copies + j);
    return out;
}

Precopied precopy(const Sst& m) {
    m.validate();
    Precopied p;
    std::size_t lmax = 0;
    for (const auto& u : m.updates) lmax = std::max(lmax, u.literal_count());
    if (lmax <= 1) {
        p.machine = m;
        p.copies = 1;
        return p;
    }
    const int L = static_cast<int>(lmax);
    const int k = m.registers;
    const int nq = static_cast<int>(m.states.size());
    const int na = static_cast<int>(m.input_alphabet.size());
    // Phase j < L parks the j-th written letter in temp register k + j - 1;
    // phase L runs the original update with temps in place of those letters.
    Sst& s = p.machine;
    p.copies = L;
    s.output_alphabet = m.output_alphabet;
    for (const auto& a : m.input_alphabet)
        for (int j = 1; j <= L; ++j) s.input_alphabet.push_back(a + "#" + std::to_string(j));
    s.registers = k + L - 1;
    auto sid = [&](int q, int j) { return q * L + (j - 1); };
    const int dead = nq * L;
    for (int q = 0; q < nq; ++q)
        for (int j = 1; j <= L; ++j) s.states.push_back(m.states[static_cast<std::size_t>(q)] + "#" + std::to_string(j));
    s.states.push_back("#dead");
    // Initial state must be index 0: rotate so that (q0, L) comes first.
    std::vector<int> order(static_cast<std::size_t>(dead + 1));
    for (int i = 0; i <= dead; ++i) order[static_cast<std::size_t>(i)] = i;
    std::swap(order[0], order[static_cast<std::size_t>(sid(0, L))]);
    // order[new] = old; inverse for lookups.
    std::vector<int> pos(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) pos[static_cast<std::size_t>(order[i])] = static_cast<int>(i);

    const int K = s.registers;
    auto identity_words = [&]() {
        std::vector<UpdateWord> ws;
        for (int i = 0; i < K; ++i) ws.push_back({{true, i}});
        return ws;
    };
    std::vector<std::vector<int>> trans(static_cast<std::size_t>(dead + 1),
                                        std::vector<int>(static_cast<std::size_t>(na * L), dead));
    std::vector<RegisterUpdate> ups(static_cast<std::size_t>(dead + 1));
    for (int q = 0; q < nq; ++q) {
        // Written letters of the state's update, in order.
        std::vector<int> lits;
        for (const auto& w : m.updates[static_cast<std::size_t>(q)].words())
            for (const auto& sym : w)
                if (!sym.is_register) lits.push_back(sym.index);
        for (int j = 1; j <= L; ++j) {
            const int st = sid(q, j);
            for (int a = 0; a < na; ++a) {
                if (j == L) {
                    int q2 = m.transition[static_cast<std::size_t>(q)][static_cast<std::size_t>(a)];
                    trans[static_cast<std::size_t>(st)][static_cast<std::size_t>(a * L)] = sid(q2, 1);
                } else {
                    trans[static_cast<std::size_t>(st)][static_cast<std::size_t>(a * L + j)] = sid(q, j + 1);
                }
            }
            std::vector<UpdateWord> ws;
            if (j < L) {
                ws = identity_words();
                UpdateWord park;
                if (j <= static_cast<int>(lits.size())) park.push_back({false, lits[static_cast<std::size_t>(j - 1)]});
                ws[static_cast<std::size_t>(k + j - 1)] = park;
            } else {
                int seen = 0;
                for (const auto& w : m.updates[static_cast<std::size_t>(q)].words()) {
                    UpdateWord nw;
                    for (const auto& sym : w) {
                        if (sym.is_register) {
                            nw.push_back(sym);
                        } else {
                            ++seen;
                            if (seen < L) nw.push_back({true, k + seen - 1});
                            else nw.push_back(sym);
                        }
                    }
                    ws.push_back(std::move(nw));
                }
                for (int t = 0; t < L - 1; ++t) ws.push_back({});
            }
            ups[static_cast<std::size_t>(st)] = RegisterUpdate(K, std::move(ws));
        }
    }
    ups[static_cast<std::size_t>(dead)] = RegisterUpdate(K, std::vector<UpdateWord>(static_cast<std::size_t>(K)));
    for (int a = 0; a < na; ++a)
        for (int j = 0; j < L; ++j) trans[static_cast<std::size_t>(dead)][static_cast<std::size_t>(a * L + j)] = dead;

    // Apply the state renumbering.
    std::vector<std::string> names(s.states.size());
    s.transition.assign(order.size(), {});
    s.updates.assign(order.size(), {});
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto old = static_cast<std::size_t>(order[i]);
        names[i] = s.states[old];
        s.updates[i] = ups[old];
        std::vector<int> row;
        for (int t : trans[old]) row.push_back(pos[static_cast<std::size_t>(t)]);
        s.transition[i] = std::move(row);
    }
    s.states = std::move(names);
    std::vector<UpdateWord> ow = m.output.words();
    s.output = RegisterUpdate(K, std::move(ow));
    s.validate();
    return p;
}

// ---------------------------------------------------------------- QF form

namespace {

std::string choice_path(int i, int n) {
    if (n <= 1) return "";
    std::string p(static_cast<std::size_t>(i), 'R');
    if (i < n - 1) p += 'L';
    return p;
}

std::string rel(const char* role, const std::string& path) { return std::string(role) + "[" + path + "]"; }

// Selection of summand i among n at a right-nested coproduct rooted at base.
Formula is_choice(const std::string& base, int i, int n, const std::vector<int>& vars) {
    if (n <= 1) return Formula::truth();
    if (i < n - 1) return Formula::atom(rel("tag", base + std::string(static_cast<std::size_t>(i), 'R')), vars);
    std::vector<Formula> parts;
    for (int p = 0; p < n - 1; ++p)
        parts.push_back(Formula::negate(Formula::atom(rel("tag", base + std::string(static_cast<std::size_t>(p), 'R')), vars)));
    return Formula::conj(std::move(parts));
}

struct Shape {
    int nq, k, ng, na;
    std::string state(int q) const { return choice_path(q, nq); }
    std::string reg(int q, int i) const { return state(q) + choice_path(i, k); }
};

Value inject(Value v, int i, int n) {
    if (n <= 1) return v;
    if (i < n - 1) v = Value::inl(std::move(v));
    for (int p = 0; p < i; ++p) v = Value::inr(std::move(v));
    return v;
}

}  // namespace

SstCompiled sst_to_qf(const Sst& m) {
    m.validate();
    if (m.registers < 1) throw std::invalid_argument("sst_to_qf: needs at least one register");
    for (std::size_t q = 0; q < m.updates.size(); ++q)
        if (m.updates[q].literal_count() > 1)
            throw std::invalid_argument("sst_to_qf: update of state " + m.states[q] +
                                        " writes more than one letter; precopy the machine first");
    const Shape sh{static_cast<int>(m.states.size()), m.registers, static_cast<int>(m.output_alphabet.size()),
                   static_cast<int>(m.input_alphabet.size())};
    SstCompiled c;
    Type gamma = finite_type(sh.ng);
    c.config_type = right_coprod(std::vector<Type>(
        static_cast<std::size_t>(sh.nq), right_prod(std::vector<Type>(static_cast<std::size_t>(sh.k), Type::list(gamma)))));
    c.letter_type = finite_type(sh.na);
    LeafIdSource ids;
    c.init = config_value(m, Configuration{0, std::vector<Word>(static_cast<std::size_t>(sh.k))}, ids);

    const Vocabulary out = vocab_of(c.config_type);
    const Vocabulary in = pair_vocab(out, vocab_of(c.letter_type));
    std::vector<std::vector<Formula>> defs(out.size());
    std::vector<Formula> universe;
    auto add = [&](const std::string& name, Formula f) {
        const int r = out.find(name);
        if (r < 0) throw std::logic_error("sst_to_qf: missing relation " + name);
        defs[static_cast<std::size_t>(r)].push_back(std::move(f));
    };

    for (int q = 0; q < sh.nq; ++q) {
        for (int a = 0; a < sh.na; ++a) {
            const int q2 = m.transition[static_cast<std::size_t>(q)][static_cast<std::size_t>(a)];
            const auto& words = m.updates[static_cast<std::size_t>(q2)].words();
            const Formula when = Formula::conj(is_choice("L", q, sh.nq, {}), is_choice("R", a, sh.na, {}));
            // Old register j, or the consumed letter.
            auto in_seg = [&](const UpdateSymbol& s, int x) {
                if (s.is_register) return Formula::atom(rel("ord", "L" + sh.reg(q, s.index)), {x, x});
                return Formula::negate(Formula::atom("side[]", {x}));
            };
            std::vector<Formula> kept;
            for (int i = 0; i < sh.k; ++i) {
                const auto& w = words[static_cast<std::size_t>(i)];
                std::vector<Formula> in_new;
                for (const auto& s : w) {
                    kept.push_back(in_seg(s, 0));
                    in_new.push_back(in_seg(s, 0));
                }
                // Order inside new register i.
                std::vector<Formula> ord;
                for (std::size_t s = 0; s < w.size(); ++s)
                    for (std::size_t t = s; t < w.size(); ++t) {
                        Formula same = Formula::truth();
                        if (s == t) {
                            same = w[s].is_register ? Formula::atom(rel("ord", "L" + sh.reg(q, w[s].index)), {0, 1})
                                                    : Formula::eq(0, 1);
                        }
                        ord.push_back(Formula::conj({in_seg(w[s], 0), in_seg(w[t], 1), same}));
                    }
                add(rel("ord", sh.reg(q2, i)), Formula::conj(when, Formula::disj(std::move(ord))));
                // Letter tags of the new register's items.
                for (int g = 0; g + 1 < sh.ng; ++g) {
                    std::vector<Formula> tag;
                    for (const auto& s : w) {
                        if (s.is_register) {
                            tag.push_back(Formula::conj(
                                in_seg(s, 0),
                                Formula::atom(rel("tag", "L" + sh.reg(q, s.index) + "E" + std::string(static_cast<std::size_t>(g), 'R')),
                                              {0})));
                        } else if (s.index == g) {
                            tag.push_back(in_seg(s, 0));
                        }
                    }
                    add(rel("tag", sh.reg(q2, i) + "E" + std::string(static_cast<std::size_t>(g), 'R')),
                        Formula::conj(when, Formula::disj(std::move(tag))));
                }
                if (i + 1 < sh.k)
                    add(rel("side", sh.state(q2) + std::string(static_cast<std::size_t>(i), 'R')),
                        Formula::conj(when, Formula::disj(std::move(in_new))));
            }
            if (q2 + 1 < sh.nq) add(rel("tag", std::string(static_cast<std::size_t>(q2), 'R')), when);
            universe.push_back(Formula::conj(when, Formula::disj(std::move(kept))));
        }
    }
    c.delta.in_vocab = in;
    c.delta.out_vocab = out;
    c.delta.universe = Formula::disj(std::move(universe));
    for (auto& d : defs) c.delta.defs.push_back(Formula::disj(std::move(d)));
    c.delta.validate();
    return c;
}

Value config_value(const Sst& m, const Configuration& c, LeafIdSource& ids) {
    const int ng = static_cast<int>(m.output_alphabet.size());
    const Type gamma = finite_type(ng);
    std::vector<Value> regs;
    for (const auto& w : c.registers) {
        std::vector<Value> items;
        for (int g : w) items.push_back(finite_element(gamma, static_cast<std::size_t>(g), ids));
        regs.push_back(Value::seq(std::move(items)));
    }
    if (regs.empty()) throw std::invalid_argument("config_value: needs at least one register");
    Value tuple = regs.back();
    for (std::size_t i = regs.size() - 1; i-- > 0;) tuple = Value::pair(regs[i], tuple);
    return inject(tuple, c.state, static_cast<int>(m.states.size()));
}

Configuration config_of(const Sst& m, const Value& v) {
    Configuration c;
    const int nq = static_cast<int>(m.states.size());
    Value cur = v;
    if (nq > 1) {
        int q = 0;
        while (q < nq - 1 && cur.is(ValueKind::InR)) {
            cur = cur.inner();
            ++q;
        }
        if (q < nq - 1) cur = cur.inner();
        c.state = q;
    }
    const Type gamma = finite_type(static_cast<int>(m.output_alphabet.size()));
    for (int i = 0; i < m.registers; ++i) {
        const Value reg = i + 1 < m.registers ? cur.first() : cur;
        Word w;
        for (const auto& item : reg.items()) w.push_back(static_cast<int>(finite_index(item, gamma)));
        c.registers.push_back(std::move(w));
        if (i + 1 < m.registers) cur = cur.second();
    }
    return c;
}

Value letter_value(const Sst& m, int letter, LeafIdSource& ids) {
    return finite_element(finite_type(static_cast<int>(m.input_alphabet.size())), static_cast<std::size_t>(letter), ids);
}

}  // namespace foldreg
