#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "foldreg/calculus.hpp"
#include "foldreg/eval.hpp"
#include "foldreg/fold_stream.hpp"
#include "foldreg/sst.hpp"
#include "foldreg/stdlib.hpp"

namespace fs = std::filesystem;
using namespace foldreg;

namespace {

enum Exit { Ok = 0, Internal = 1, TypeFail = 2, ParseFail = 3, Mismatch = 4 };

struct ExitError {
    int code;
    std::string message;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ExitError{Internal, "cannot read " + path};
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ExitError{Internal, "cannot write " + path.string()};
    out << text;
}

// Machine-readable output is key=value per line; text output is for people.
struct Out {
    bool kv = false;

    void field(const std::string& key, const std::string& value) const {
        if (kv)
            std::cout << key << '=' << value << '\n';
        else
            std::cout << key << ": " << value << '\n';
    }
};

SystemFlavor flavor_or_throw(const std::string& text) {
    auto f = parse_flavor(text);
    if (!f) throw ExitError{Internal, "unknown flavor '" + text + "'"};
    return *f;
}

Term load_term(const std::string& path) {
    std::string text = read_file(path);
    try {
        return parse_term(text);
    } catch (const ParseError& e) {
        throw ExitError{ParseFail, path + ": " + e.what()};
    }
}

FunctionType type_or_throw(const Term& t, SystemFlavor flavor) {
    TypeResult r = infer_type(t, flavor);
    if (!r) throw ExitError{TypeFail, to_string(r.error())};
    return r.type();
}

std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t flag_value) {
    if (flag->count() > 0) return flag_value;
    if (const char* env = std::getenv("FOLDREG_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ExitError{Internal, "FOLDREG_SEED is not a number"};
        }
    }
    return 0;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
    auto dots = text.find("..");
    if (dots == std::string::npos) throw ExitError{Internal, "sizes must look like a..b"};
    std::size_t a = std::stoul(text.substr(0, dots)), b = std::stoul(text.substr(dots + 2));
    if (a == 0 || b < a + 2) throw ExitError{Internal, "sizes need 1 <= a and at least 3 points"};
    std::vector<std::size_t> out;
    for (std::size_t s = a; s <= b; ++s) out.push_back(s);
    return out;
}

Structure load_structure(const std::string& path) {
    try {
        return parse_dump(read_file(path));
    } catch (const ParseError& e) {
        throw ExitError{ParseFail, path + ": " + e.what()};
    }
}

Sst load_sst(const std::string& path) {
    try {
        return parse_sst(read_file(path));
    } catch (const std::invalid_argument& e) {
        throw ExitError{ParseFail, path + ": " + e.what()};
    }
}

Word load_word(const Sst& m, const std::string& text) {
    try {
        return parse_word(m.input_alphabet, text);
    } catch (const std::exception& e) {
        throw ExitError{ParseFail, std::string("word: ") + e.what()};
    }
}

// Letters are every regular file of the directory except b0, by name.
std::vector<fs::path> letter_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ExitError{Internal, dir.string() + " is not a directory"};
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().filename() != "b0") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------- subcommands

int cmd_check(const Out& out, const std::string& file, const std::string& flavor) {
    Term t = load_term(file);
    FunctionType ft = type_or_throw(t, flavor_or_throw(flavor));
    if (out.kv) {
        out.field("status", "ok");
        out.field("type", to_string(ft));
    } else {
        std::cout << to_string(ft) << '\n';
    }
    return Ok;
}

int cmd_run(const Out& out, const std::string& file, const std::string& input, const std::string& flavor, bool total) {
    SystemFlavor fl = flavor_or_throw(flavor);
    Term t = load_term(file);
    FunctionType ft = type_or_throw(t, fl);
    std::string text = read_file(input);
    LeafIdSource ids;
    auto load = [&] {
        if (total) return load_total(text, ft.dom, ids);
        try {
            return parse_value(text, ft.dom, ids);
        } catch (const ParseError& e) {
            throw ExitError{ParseFail, input + ": " + e.what()};
        }
    };
    Value r = eval(t, load(), fl);
    if (out.kv) {
        out.field("status", "ok");
        out.field("output", serialize(r, ft.cod));
    } else {
        std::cout << serialize(r, ft.cod) << '\n';
    }
    return Ok;
}

int cmd_growth(const Out& out, const std::string& file, const std::string& flavor, const std::string& sizes,
               std::uint64_t seed) {
    SystemFlavor fl = flavor_or_throw(flavor);
    Term t = load_term(file);
    type_or_throw(t, fl);
    GrowthFit g = growth_profile(t, fl, parse_sizes(sizes), seed);
    std::ostringstream slope, res;
    slope << g.slope;
    res << g.residual;
    out.field("degree", std::to_string(g.degree));
    out.field("slope", slope.str());
    out.field("residual", res.str());
    out.field("seed", std::to_string(seed));
    return Ok;
}

int cmd_fold(const Out& out, const std::string& file, const std::string& b0_path, const std::string& dir,
             const std::string& mode) {
    QfInterp delta;
    try {
        delta = parse_interp(read_file(file));
        delta.validate();
    } catch (const ParseError& e) {
        throw ExitError{ParseFail, file + ": " + e.what()};
    }
    std::string b0_file = b0_path.empty() ? (fs::path(dir) / "b0").string() : b0_path;
    FoldInstance inst{delta, load_structure(b0_file), {}};
    for (const auto& p : letter_files(dir)) inst.letters.push_back(load_structure(p.string()));
    try {
        inst.validate();
    } catch (const std::exception& e) {
        throw ExitError{TypeFail, e.what()};
    }
    if (mode == "naive") {
        std::cout << dump(naive_fold(inst));
        return Ok;
    }
    StreamStats st;
    Structure s = stream_fold(inst, &st, 1);
    if (mode == "stream") {
        std::cout << dump(s);
        return Ok;
    }
    bool same = naive_fold(inst) == s;
    std::cout << dump(s);
    out.field("letters", std::to_string(inst.letters.size()));
    out.field("transitions", std::to_string(st.transitions));
    out.field("result", same ? "PASS" : "FAIL");
    return same ? Ok : Mismatch;
}

SstCompiled compile_with_copies(const Sst& m, Precopied& pc) {
    pc = precopy(m);
    return sst_to_qf(pc.machine);
}

int cmd_sst(const Out& out, const std::string& action, const std::string& file, const std::string& word,
            const std::string& cases, std::size_t trials, std::uint64_t seed) {
    Sst m = load_sst(file);
    if (action == "run") {
        Word w = load_word(m, word);
        Word r = run(m, w);
        out.field("output", render_word(m.output_alphabet, r));
        out.field("length", std::to_string(r.size()));
        return Ok;
    }
    Precopied pc;
    SstCompiled c = compile_with_copies(m, pc);
    if (action == "compile") {
        std::cout << print_interp(c.delta);
        if (!cases.empty()) {
            Word w = pc.expand(load_word(m, word));
            fs::create_directories(cases);
            LeafIdSource ids;
            write_file(fs::path(cases) / "b0", dump(encode(renumber(c.init, ids), c.config_type)));
            for (std::size_t i = 0; i < w.size(); ++i) {
                char name[16];
                std::snprintf(name, sizeof name, "%04zu", i + 1);
                write_file(fs::path(cases) / name, dump(encode(letter_value(pc.machine, w[i], ids), c.letter_type)));
            }
        }
        return Ok;
    }
    // compare: the word if given, otherwise random words up to length 25.
    std::vector<Word> words;
    if (!word.empty()) {
        words.push_back(load_word(m, word));
    } else {
        std::mt19937_64 rng(seed);
        for (std::size_t i = 0; i < trials; ++i) {
            Word w(rng() % 26);
            for (int& x : w) x = static_cast<int>(rng() % m.input_alphabet.size());
            words.push_back(std::move(w));
        }
    }
    std::size_t failures = 0;
    for (const Word& w : words) {
        Word ew = pc.expand(w);
        LeafIdSource ids;
        FoldInstance inst{c.delta, encode(renumber(c.init, ids), c.config_type), {}};
        for (int x : ew) inst.letters.push_back(encode(letter_value(pc.machine, x, ids), c.letter_type));
        Configuration cfg = config_of(pc.machine, decode(stream_fold(inst, nullptr, 1), c.config_type));
        bool ok = cfg == run_config(pc.machine, ew) && pc.machine.output.apply(cfg.registers)[0] == run(m, w);
        if (!ok) {
            ++failures;
            std::cerr << "mismatch on " << render_word(m.input_alphabet, w) << '\n';
        }
    }
    out.field("words", std::to_string(words.size()));
    out.field("failures", std::to_string(failures));
    out.field("result", failures == 0 ? "PASS" : "FAIL");
    return failures == 0 ? Ok : Mismatch;
}

int cmd_catalog(const Out& out, bool check, const std::string& export_dir, std::size_t trials, std::size_t max_size,
                std::uint64_t seed) {
    std::vector<NamedDerivation> entries = catalog();
    if (!export_dir.empty()) {
        fs::create_directories(export_dir);
        for (const auto& d : entries) write_file(fs::path(export_dir) / (d.name + ".term"), print_term(d.weak_term()) + "\n");
    }
    if (!check) {
        for (const auto& d : entries) {
            if (out.kv)
                std::cout << "entry=" << d.name << " flavor=" << to_string(d.flavor) << '\n';
            else
                std::cout << d.name << " [" << to_string(d.flavor) << "] " << d.summary << '\n';
        }
        return Ok;
    }
    std::size_t failures = 0;
    for (const auto& d : entries) {
        DerivationReport r = check_derivation(d, trials, max_size, seed);
        if (!r.passed) ++failures;
        std::cout << (out.kv ? "entry=" : "") << d.name << (out.kv ? " result=" : " ") << (r.passed ? "PASS" : "FAIL")
                  << '\n';
        if (!r.passed) std::cerr << d.name << ": " << r.error << '\n';
    }
    for (const auto& g : run_goldens()) {
        if (!g.passed()) ++failures;
        std::cout << (out.kv ? "golden=" : "golden ") << g.name << (out.kv ? " result=" : " ")
                  << (g.passed() ? "PASS" : "FAIL") << '\n';
        if (!g.passed()) std::cerr << g.name << ": expected " << g.expected << ", got " << g.actual << '\n';
    }
    out.field("failures", std::to_string(failures));
    return failures == 0 ? Ok : Mismatch;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"foldreg: graded list calculus, QF interpretations and streaming folds"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    std::string format = "text";
    app.add_option("--format", format, "text or kv")->check(CLI::IsMember({"text", "kv"}));

    std::string file, flavor = "poly", input, sizes = "5..50", b0, letters, mode = "compare", word, cases, export_dir;
    std::uint64_t seed_flag = 0;
    std::size_t trials = 100, max_size = 20;
    bool total = false, check = false;

    auto* check_cmd = app.add_subcommand("check", "Infer the type of a term");
    check_cmd->add_option("file", file)->required();
    check_cmd->add_option("--flavor", flavor);

    auto* run_cmd = app.add_subcommand("run", "Evaluate a term on a value");
    run_cmd->add_option("file", file)->required();
    run_cmd->add_option("--input", input)->required();
    run_cmd->add_option("--flavor", flavor);
    run_cmd->add_flag("--total", total, "map unparsable input to the default value");

    auto* growth_cmd = app.add_subcommand("growth", "Fit the output growth degree");
    growth_cmd->add_option("file", file)->required();
    growth_cmd->add_option("--flavor", flavor);
    growth_cmd->add_option("--sizes", sizes);
    auto* growth_seed = growth_cmd->add_option("--seed", seed_flag);

    auto* fold_cmd = app.add_subcommand("fold", "Fold a QF transition over letter structures");
    fold_cmd->add_option("file", file)->required();
    fold_cmd->add_option("--b0", b0, "initial structure (default DIR/b0)");
    fold_cmd->add_option("--letters", letters)->required();
    fold_cmd->add_option("--mode", mode)->check(CLI::IsMember({"naive", "stream", "compare"}));

    auto* sst_cmd = app.add_subcommand("sst", "Streaming string transducers");
    std::string action;
    sst_cmd->add_option("action", action)->required()->check(CLI::IsMember({"run", "compile", "compare"}));
    sst_cmd->add_option("file", file)->required();
    sst_cmd->add_option("--word", word);
    sst_cmd->add_option("--cases", cases, "compile: write b0 and letter dumps for --word here");
    sst_cmd->add_option("--trials", trials);
    auto* sst_seed = sst_cmd->add_option("--seed", seed_flag);

    auto* cat_cmd = app.add_subcommand("catalog", "List or check the derivation catalog");
    cat_cmd->add_flag("--check", check);
    cat_cmd->add_option("--export", export_dir, "write one .term file per entry");
    cat_cmd->add_option("--trials", trials);
    cat_cmd->add_option("--max-size", max_size);
    auto* cat_seed = cat_cmd->add_option("--seed", seed_flag);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? Ok : Internal;
    }
    Out out{format == "kv"};
    try {
        if (*check_cmd) return cmd_check(out, file, flavor);
        if (*run_cmd) return cmd_run(out, file, input, flavor, total);
        if (*growth_cmd) return cmd_growth(out, file, flavor, sizes, resolve_seed(growth_seed, seed_flag));
        if (*fold_cmd) return cmd_fold(out, file, b0, letters, mode);
        if (*sst_cmd) {
            if (action == "run" && word.empty()) throw ExitError{Internal, "sst run needs --word"};
            return cmd_sst(out, action, file, word, cases, trials, resolve_seed(sst_seed, seed_flag));
        }
        if (*cat_cmd) {
            return cmd_catalog(out, check, export_dir, trials, max_size, resolve_seed(cat_seed, seed_flag));
        }
    } catch (const ExitError& e) {
        std::cerr << "error: " << e.message << '\n';
        return e.code;
    } catch (const TypeErrorException& e) {
        std::cerr << "type error: " << e.what() << '\n';
        return TypeFail;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return ParseFail;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return Internal;
    }
    return Internal;
}
