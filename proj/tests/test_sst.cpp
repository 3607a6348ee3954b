#include <doctest.h>

#include <random>

#include "foldreg/fold_stream.hpp"
#include "foldreg/sst.hpp"

using namespace foldreg;

TEST_CASE("register updates must be copyless") {
    CHECK_THROWS_AS(RegisterUpdate(1, {{{true, 0}}, {{true, 0}}}), std::invalid_argument);
    CHECK_THROWS_AS(RegisterUpdate(1, {{{true, 1}}}), std::invalid_argument);
    RegisterUpdate u(2, {{{true, 1}, {false, 0}}, {}});
    CHECK(u.literal_count() == 1);
    CHECK(u.apply({{1}, {2, 3}}) == std::vector<Word>{{2, 3, 0}, {}});
}

TEST_CASE("running the suite machine") {
    Sst m = suite_sst();
    CHECK(render_word(m.output_alphabet, run(m, parse_word(m.input_alphabet, "abbab"))) == "aabbb");
    Configuration c = run_config(m, parse_word(m.input_alphabet, "ab"));
    CHECK(c.state == 2);
    CHECK(c.registers == std::vector<Word>{{0}, {1}});
    CHECK_THROWS_AS(run(m, {5}), std::out_of_range);
}

TEST_CASE("text format round-trip") {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 30; ++i) {
        Sst m = random_sst(rng, 1 + rng() % 3, 1 + rng() % 3, 2, 2);
        Sst back = parse_sst(print_sst(m));
        CHECK(print_sst(back) == print_sst(m));
        Word w(rng() % 10);
        for (int& x : w) x = rng() % 2;
        CHECK(run(back, w) == run(m, w));
    }
    CHECK_THROWS_AS(parse_sst("STATES: q\n"), std::invalid_argument);
}

TEST_CASE("precopy keeps outputs and bounds literals") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 30; ++i) {
        Sst m = random_sst(rng, 2, 2, 2, 2, 4);
        Precopied p = precopy(m);
        for (const auto& u : p.machine.updates) CHECK(u.literal_count() <= 1);
        Word w(rng() % 12);
        for (int& x : w) x = rng() % 2;
        CHECK(run(p.machine, p.expand(w)) == run(m, w));
        CHECK(run(m, w).size() <= m.literal_bound() * (w.size() + 1));
    }
}

TEST_CASE("configurations as values") {
    Sst m = suite_sst();
    Configuration c{1, {{0, 1}, {}}};
    LeafIdSource ids;
    CHECK(config_of(m, config_value(m, c, ids)) == c);
}

TEST_CASE("compiled transition agrees with the machine") {
    Sst m = suite_sst();
    SstCompiled c = sst_to_qf(precopy(m).machine);
    Word w = parse_word(m.input_alphabet, "abaab");
    Precopied p = precopy(m);
    Word ew = p.expand(w);
    LeafIdSource ids;
    FoldInstance inst{c.delta, encode(renumber(c.init, ids), c.config_type), {}};
    for (int x : ew) inst.letters.push_back(encode(letter_value(p.machine, x, ids), c.letter_type));
    Configuration got = config_of(p.machine, decode(stream_fold(inst), c.config_type));
    CHECK(got == run_config(p.machine, ew));
}
