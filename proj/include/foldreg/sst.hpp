#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "foldreg/qf_logic.hpp"
#include "foldreg/structures.hpp"
#include "foldreg/types.hpp"

namespace foldreg {

// A register reference or an output letter, both 0-based.
struct UpdateSymbol {
    bool is_register;
    int index;
    friend bool operator==(const UpdateSymbol&, const UpdateSymbol&) = default;
};

using UpdateWord = std::vector<UpdateSymbol>;
using Word = std::vector<int>;

class RegisterUpdate {
public:
    RegisterUpdate() = default;
    // Throws std::invalid_argument unless every register occurs at most once
    // across all words and indices are below in_count.
    RegisterUpdate(int in_count, std::vector<UpdateWord> words);

    int in_count() const { return in_count_; }
    int out_count() const { return static_cast<int>(words_.size()); }
    const std::vector<UpdateWord>& words() const { return words_; }
    std::size_t literal_count() const;

    std::vector<Word> apply(const std::vector<Word>& regs) const;

    friend bool operator==(const RegisterUpdate&, const RegisterUpdate&) = default;

private:
    int in_count_ = 0;
    std::vector<UpdateWord> words_;
};

inline std::vector<Word> apply_update(const RegisterUpdate& u, const std::vector<Word>& regs) { return u.apply(regs); }

struct Configuration {
    int state = 0;
    std::vector<Word> registers;
    friend bool operator==(const Configuration&, const Configuration&) = default;
};

// Deterministic copyless streaming string transducer. State 0 is initial;
// after each letter the update of the new state is applied.
struct Sst {
    std::vector<std::string> input_alphabet;
    std::vector<std::string> output_alphabet;
    std::vector<std::string> states;
    int registers = 0;
    std::vector<std::vector<int>> transition;  // [state][letter] -> state
    std::vector<RegisterUpdate> updates;       // per state, registers -> registers
    RegisterUpdate output;                     // registers -> 1

    // Throws std::invalid_argument.
    void validate() const;
    // Largest number of output letters written by one update or the output.
    std::size_t literal_bound() const;
};

// Copyless by construction; each update writes at most max_literals letters.
Sst random_sst(std::mt19937_64& rng, int states, int registers, int in_letters, int out_letters, int max_literals = 2);

Configuration run_config(const Sst& m, const Word& w);
// Throws std::out_of_range for a letter outside the input alphabet.
Word run(const Sst& m, const Word& w);

// Letters are single characters when every letter name is one character,
// otherwise whitespace separated names.
Word parse_word(const std::vector<std::string>& alphabet, std::string_view text);
std::string render_word(const std::vector<std::string>& alphabet, const Word& w);

Sst parse_sst(const std::string& text);
std::string print_sst(const Sst& m);

// An SST whose updates write at most one output letter each, reading every
// input letter `copies` times in a row, with run(machine, expand(w)) equal to
// run(original, w).
struct Precopied {
    Sst machine;
    int copies = 1;
    Word expand(const Word& w) const;
};
Precopied precopy(const Sst& m);

// ---------------------------------------------------------------- QF form

// Configurations as the type (Γ*)^k + ... + (Γ*)^k with one summand per
// state; letters as the finite type with one unit per letter.
struct SstCompiled {
    Type config_type;
    Type letter_type;
    Value init;
    QfInterp delta;  // vocab(config × letter) -> vocab(config)
};

// Needs registers >= 1 and at most one output letter per state update;
// see precopy otherwise. Throws std::invalid_argument.
SstCompiled sst_to_qf(const Sst& m);

Value config_value(const Sst& m, const Configuration& c, LeafIdSource& ids);
Configuration config_of(const Sst& m, const Value& v);
Value letter_value(const Sst& m, int letter, LeafIdSource& ids);

}  // namespace foldreg
