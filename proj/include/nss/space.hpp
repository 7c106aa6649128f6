#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nss/arch.hpp"
#include "nss/rng.hpp"

namespace nss {

struct VariableSpec {
    enum class Kind { choice, int_range };

    std::string name;
    Kind kind = Kind::int_range;
    std::vector<std::int64_t> choices;  // kind == choice, non-empty
    std::int64_t min = 0;               // kind == int_range, min <= max
    std::int64_t max = 0;

    std::uint64_t option_count() const;
    // Absolute ratings: the legal minimum/maximum value.
    std::int64_t rating_min() const;
    std::int64_t rating_max() const;
    bool admits(std::int64_t value) const;
};

enum class TemplateKind {
    plain_sequence,
    residual_bypass,
    multi_branch_concat,
};

const char* to_string(TemplateKind t);
TemplateKind template_from_string(const std::string& name);

using Assignment = std::map<std::string, std::int64_t>;

// A narrow-space template plus per-variable absolute ratings. Every full
// in-rating assignment materializes to a valid architecture.
//
// Template variable conventions (i = 1..N, one group per layer/stage):
//   plain_sequence      kernel_h_i, kernel_w_i, out_channels_i
//   residual_bypass     kernel_i, out_channels_i
//   multi_branch_concat kernel_i, out_channels_i
// An optional integer variable "depth" selects how many groups are built;
// without it all N groups are used. Convolutions use stride 1 and padding
// (max kernel extent - 1) / 2.
struct SearchSpace {
    std::string id;
    TemplateKind tmpl = TemplateKind::plain_sequence;
    Shape input_shape;
    std::vector<VariableSpec> variables;
    Assignment reference_assignment;

    const VariableSpec* find(const std::string& name) const;
    // Number of layer/stage groups declared (highest out_channels_i index).
    int group_count() const;
};

// Exact number of configurations: product of per-variable option counts.
// Throws on 64-bit overflow.
std::uint64_t cardinality(const SearchSpace& space);

// Builds the architecture for one full assignment. Throws
// "rating violation: <variable>" on out-of-rating values,
// "missing variable: <name>" / "unknown variable: <name>" on coverage
// errors. The result carries its content id and passes validate().
Architecture materialize(const SearchSpace& space, const Assignment& assignment);

// One draw per variable, uniform over its full ratings, in declared order.
Assignment draw_assignment(const SearchSpace& space, Rng& rng);

// Deterministic per seed; every variable drawn independently and uniformly
// over its full ratings.
Architecture sample_uniform(const SearchSpace& space, std::uint64_t seed);

// Space definition file:
// {"id", "template", "input_shape", "variables":
//   [{"name","kind","choices"} | {"name","kind","min","max"}],
//  "reference_assignment": {...}}
std::string to_json(const SearchSpace& space, bool pretty = false);
SearchSpace space_from_json(const std::string& text);

// Built-in narrow spaces: "example3" (3-layer plain conv space),
// "residual3", "branch3".
SearchSpace builtin_space(const std::string& name);
std::vector<std::string> builtin_space_names();

}  // namespace nss
