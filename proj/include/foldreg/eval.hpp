#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "foldreg/calculus.hpp"
#include "foldreg/types.hpp"

namespace foldreg {

// Leaves created during evaluation are numbered from here; input ids must
// stay below it.
constexpr LeafId kFreshBase = LeafId{1} << 62;

// Raised only when evaluation hits a case the checker should have excluded.
class EvalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct EvalTrace {
    Value output;
    // Output leaf -> input leaf it was copied from; nullopt for created leaves.
    std::map<LeafId, std::optional<LeafId>> leaf_origin;
};

// Both check the term and the input first (TypeErrorException,
// std::invalid_argument).
Value eval(const Term& term, const Value& input, SystemFlavor flavor);
EvalTrace eval_traced(const Term& term, const Value& input, SystemFlavor flavor);

// Skips the checks. For inner loops that already validated the term.
Value eval_unchecked(const Term& term, const Value& input);

using InputGenerator = std::function<Value(std::size_t size, std::mt19937_64& rng, LeafIdSource& ids)>;

struct GrowthFit {
    int degree = 0;
    double slope = 0;
    double intercept = 0;
    double residual = 0;  // root mean square, in log space
    std::vector<std::pair<std::size_t, std::size_t>> samples;  // (input leaves, output leaves)
};

// Least-squares fit of log(output leaves) against log(input leaves). The
// default generator draws a value of the domain whose outer list has `size`
// items. Needs at least 3 sizes.
GrowthFit growth_profile(const Term& term, SystemFlavor flavor, const std::vector<std::size_t>& sizes,
                         std::uint64_t seed, InputGenerator gen = {});

}  // namespace foldreg
