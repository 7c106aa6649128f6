#include "nss/space.hpp"

#include <json.hpp>

#include <algorithm>
#include <stdexcept>

namespace nss {

using nlohmann::json;

std::uint64_t VariableSpec::option_count() const {
    if (kind == Kind::choice) return choices.size();
    return static_cast<std::uint64_t>(max - min) + 1;
}

std::int64_t VariableSpec::rating_min() const {
    if (kind == Kind::choice) return *std::min_element(choices.begin(), choices.end());
    return min;
}

std::int64_t VariableSpec::rating_max() const {
    if (kind == Kind::choice) return *std::max_element(choices.begin(), choices.end());
    return max;
}

bool VariableSpec::admits(std::int64_t value) const {
    if (kind == Kind::choice)
        return std::find(choices.begin(), choices.end(), value) != choices.end();
    return value >= min && value <= max;
}

const char* to_string(TemplateKind t) {
    switch (t) {
        case TemplateKind::plain_sequence: return "plain_sequence";
        case TemplateKind::residual_bypass: return "residual_bypass";
        case TemplateKind::multi_branch_concat: return "multi_branch_concat";
    }
    return "?";
}

TemplateKind template_from_string(const std::string& name) {
    if (name == "plain_sequence") return TemplateKind::plain_sequence;
    if (name == "residual_bypass") return TemplateKind::residual_bypass;
    if (name == "multi_branch_concat") return TemplateKind::multi_branch_concat;
    throw std::runtime_error("unknown template: " + name);
}

const VariableSpec* SearchSpace::find(const std::string& name) const {
    for (const auto& v : variables)
        if (v.name == name) return &v;
    return nullptr;
}

int SearchSpace::group_count() const {
    int n = 0;
    for (const auto& v : variables) {
        const std::string prefix = "out_channels_";
        if (v.name.rfind(prefix, 0) == 0) {
            int idx = std::stoi(v.name.substr(prefix.size()));
            n = std::max(n, idx);
        }
    }
    return n;
}

std::uint64_t cardinality(const SearchSpace& space) {
    unsigned __int128 product = 1;
    for (const auto& v : space.variables) {
        product *= v.option_count();
        if (product > UINT64_MAX)
            throw std::runtime_error("cardinality overflows 64 bits for space " + space.id);
    }
    return static_cast<std::uint64_t>(product);
}

namespace {

std::int64_t require(const SearchSpace& space, const Assignment& assignment,
                     const std::string& name) {
    auto it = assignment.find(name);
    if (it == assignment.end())
        throw std::runtime_error("missing variable: " + name);
    return it->second;
}

std::int64_t same_padding(std::int64_t kh, std::int64_t kw) {
    return (std::max(kh, kw) - 1) / 2;
}

LayerDescriptor conv(std::string id, std::int64_t kh, std::int64_t kw, std::int64_t channels,
                     std::vector<std::string> inputs) {
    LayerDescriptor layer;
    layer.id = std::move(id);
    layer.kind = LayerKind::conv2d;
    layer.kernel_h = kh;
    layer.kernel_w = kw;
    layer.stride = 1;
    layer.padding = same_padding(kh, kw);
    layer.out_channels = channels;
    layer.inputs = std::move(inputs);
    return layer;
}

LayerDescriptor unary(std::string id, LayerKind kind, std::string input) {
    LayerDescriptor layer;
    layer.id = std::move(id);
    layer.kind = kind;
    layer.inputs = {std::move(input)};
    return layer;
}

LayerDescriptor join(std::string id, LayerKind kind, std::vector<std::string> inputs) {
    LayerDescriptor layer;
    layer.id = std::move(id);
    layer.kind = kind;
    layer.inputs = std::move(inputs);
    return layer;
}

void build_plain(const SearchSpace& space, const Assignment& a, int depth, Architecture& arch) {
    std::string prev;
    for (int i = 1; i <= depth; ++i) {
        const std::string n = std::to_string(i);
        const std::int64_t kh = require(space, a, "kernel_h_" + n);
        const std::int64_t kw = require(space, a, "kernel_w_" + n);
        const std::int64_t c = require(space, a, "out_channels_" + n);
        std::vector<std::string> inputs;
        if (!prev.empty()) inputs.push_back(prev);
        arch.layers.push_back(conv("conv" + n, kh, kw, c, std::move(inputs)));
        prev = arch.layers.back().id;
    }
}

void build_residual(const SearchSpace& space, const Assignment& a, int depth,
                    Architecture& arch) {
    std::string prev;
    std::int64_t prev_c = arch.input_shape.c;
    for (int i = 1; i <= depth; ++i) {
        const std::string n = std::to_string(i);
        const std::int64_t k = require(space, a, "kernel_" + n);
        const std::int64_t c = require(space, a, "out_channels_" + n);
        std::vector<std::string> stage_in;
        if (!prev.empty()) stage_in.push_back(prev);

        arch.layers.push_back(conv("s" + n + "_conv_a", k, k, c, stage_in));
        arch.layers.push_back(unary("s" + n + "_relu_a", LayerKind::relu, "s" + n + "_conv_a"));
        arch.layers.push_back(conv("s" + n + "_conv_b", k, k, c, {"s" + n + "_relu_a"}));

        std::string skip = prev;
        if (prev_c != c) {
            arch.layers.push_back(conv("s" + n + "_proj", 1, 1, c, stage_in));
            skip = "s" + n + "_proj";
        } else if (prev.empty()) {
            // Stage feeds straight off the architecture input; joins need
            // named predecessors, so pass it through a 1x1 projection.
            arch.layers.push_back(conv("s" + n + "_proj", 1, 1, c, stage_in));
            skip = "s" + n + "_proj";
        }
        arch.layers.push_back(join("s" + n + "_add", LayerKind::add,
                                   {"s" + n + "_conv_b", skip}));
        arch.layers.push_back(unary("s" + n + "_relu_out", LayerKind::relu, "s" + n + "_add"));
        prev = "s" + n + "_relu_out";
        prev_c = c;
    }
}

void build_branches(const SearchSpace& space, const Assignment& a, int depth,
                    Architecture& arch) {
    std::string prev;
    for (int i = 1; i <= depth; ++i) {
        const std::string n = std::to_string(i);
        const std::int64_t k = require(space, a, "kernel_" + n);
        const std::int64_t c = require(space, a, "out_channels_" + n);
        std::vector<std::string> stage_in;
        if (!prev.empty()) stage_in.push_back(prev);

        arch.layers.push_back(conv("s" + n + "_conv1", 1, 1, c, stage_in));
        arch.layers.push_back(conv("s" + n + "_convk", k, k, c, stage_in));
        arch.layers.push_back(join("s" + n + "_concat", LayerKind::concat,
                                   {"s" + n + "_conv1", "s" + n + "_convk"}));
        arch.layers.push_back(unary("s" + n + "_relu", LayerKind::relu, "s" + n + "_concat"));
        prev = "s" + n + "_relu";
    }
}

}  // namespace

Architecture materialize(const SearchSpace& space, const Assignment& assignment) {
    for (const auto& [name, value] : assignment)
        if (!space.find(name))
            throw std::runtime_error("unknown variable: " + name);
    for (const auto& v : space.variables) {
        auto it = assignment.find(v.name);
        if (it == assignment.end())
            throw std::runtime_error("missing variable: " + v.name);
        if (!v.admits(it->second))
            throw std::runtime_error("rating violation: " + v.name);
    }

    const int groups = space.group_count();
    int depth = groups;
    if (space.find("depth")) {
        depth = static_cast<int>(assignment.at("depth"));
        if (depth < 1 || depth > groups)
            throw std::runtime_error("rating violation: depth");
    }

    Architecture arch;
    arch.input_shape = space.input_shape;
    switch (space.tmpl) {
        case TemplateKind::plain_sequence: build_plain(space, assignment, depth, arch); break;
        case TemplateKind::residual_bypass: build_residual(space, assignment, depth, arch); break;
        case TemplateKind::multi_branch_concat: build_branches(space, assignment, depth, arch); break;
    }
    arch.id = content_id(arch);

    ValidationReport report = validate(arch);
    if (!report.ok())
        throw std::runtime_error("materialized architecture invalid: " + report.violations.front());
    return arch;
}

Assignment draw_assignment(const SearchSpace& space, Rng& rng) {
    Assignment a;
    for (const auto& v : space.variables) {
        if (v.kind == VariableSpec::Kind::choice) {
            a[v.name] = v.choices[rng.below(v.choices.size())];
        } else {
            a[v.name] = rng.uniform_int(v.min, v.max);
        }
    }
    return a;
}

Architecture sample_uniform(const SearchSpace& space, std::uint64_t seed) {
    Rng rng(seed);
    return materialize(space, draw_assignment(space, rng));
}

namespace {

void reject_unknown_fields(const json& j, std::initializer_list<const char*> known,
                           const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) { ok = true; break; }
        if (!ok)
            throw std::runtime_error(std::string("unknown field '") + it.key() + "' in " + where);
    }
}

}  // namespace

std::string to_json(const SearchSpace& space, bool pretty) {
    json j;
    j["id"] = space.id;
    j["template"] = to_string(space.tmpl);
    j["input_shape"] = {space.input_shape.c, space.input_shape.h, space.input_shape.w};
    json vars = json::array();
    for (const auto& v : space.variables) {
        json vj;
        vj["name"] = v.name;
        if (v.kind == VariableSpec::Kind::choice) {
            vj["kind"] = "choice";
            vj["choices"] = v.choices;
        } else {
            vj["kind"] = "int_range";
            vj["min"] = v.min;
            vj["max"] = v.max;
        }
        vars.push_back(std::move(vj));
    }
    j["variables"] = std::move(vars);
    if (!space.reference_assignment.empty()) {
        json ref = json::object();
        for (const auto& [name, value] : space.reference_assignment) ref[name] = value;
        j["reference_assignment"] = std::move(ref);
    }
    return pretty ? j.dump(2) + "\n" : j.dump();
}

SearchSpace space_from_json(const std::string& text) {
    json j = json::parse(text);
    if (!j.is_object()) throw std::runtime_error("space document must be an object");
    reject_unknown_fields(j, {"id", "template", "input_shape", "variables",
                              "reference_assignment"},
                          "space");
    SearchSpace space;
    space.id = j.at("id").get<std::string>();
    space.tmpl = template_from_string(j.at("template").get<std::string>());
    const auto& shape = j.at("input_shape");
    if (!shape.is_array() || shape.size() != 3)
        throw std::runtime_error("input_shape must be [C, H, W]");
    space.input_shape = Shape{shape[0].get<std::int64_t>(), shape[1].get<std::int64_t>(),
                              shape[2].get<std::int64_t>()};
    for (const auto& vj : j.at("variables")) {
        reject_unknown_fields(vj, {"name", "kind", "choices", "min", "max"}, "variable");
        VariableSpec v;
        v.name = vj.at("name").get<std::string>();
        const std::string kind = vj.at("kind").get<std::string>();
        if (kind == "choice") {
            v.kind = VariableSpec::Kind::choice;
            v.choices = vj.at("choices").get<std::vector<std::int64_t>>();
            if (v.choices.empty())
                throw std::runtime_error("empty choice set for variable " + v.name);
        } else if (kind == "int_range") {
            v.kind = VariableSpec::Kind::int_range;
            v.min = vj.at("min").get<std::int64_t>();
            v.max = vj.at("max").get<std::int64_t>();
            if (v.min > v.max)
                throw std::runtime_error("min > max for variable " + v.name);
        } else {
            throw std::runtime_error("unknown variable kind: " + kind);
        }
        space.variables.push_back(std::move(v));
    }
    if (j.contains("reference_assignment")) {
        for (auto it = j.at("reference_assignment").begin();
             it != j.at("reference_assignment").end(); ++it)
            space.reference_assignment[it.key()] = it.value().get<std::int64_t>();
    }
    return space;
}

namespace {

VariableSpec choice_var(std::string name, std::vector<std::int64_t> choices) {
    VariableSpec v;
    v.name = std::move(name);
    v.kind = VariableSpec::Kind::choice;
    v.choices = std::move(choices);
    return v;
}

VariableSpec range_var(std::string name, std::int64_t min, std::int64_t max) {
    VariableSpec v;
    v.name = std::move(name);
    v.kind = VariableSpec::Kind::int_range;
    v.min = min;
    v.max = max;
    return v;
}

SearchSpace make_example3() {
    SearchSpace s;
    s.id = "example3";
    s.tmpl = TemplateKind::plain_sequence;
    s.input_shape = Shape{3, 32, 32};
    const std::vector<std::int64_t> kernels{1, 3, 5, 7};
    for (int i = 1; i <= 3; ++i) {
        const std::string n = std::to_string(i);
        s.variables.push_back(choice_var("kernel_h_" + n, kernels));
        s.variables.push_back(choice_var("kernel_w_" + n, kernels));
        s.variables.push_back(range_var("out_channels_" + n, 1, 128));
    }
    s.reference_assignment = {
        {"kernel_h_1", 3}, {"kernel_w_1", 3}, {"out_channels_1", 16},
        {"kernel_h_2", 3}, {"kernel_w_2", 3}, {"out_channels_2", 32},
        {"kernel_h_3", 3}, {"kernel_w_3", 3}, {"out_channels_3", 64},
    };
    return s;
}

SearchSpace make_residual3() {
    SearchSpace s;
    s.id = "residual3";
    s.tmpl = TemplateKind::residual_bypass;
    s.input_shape = Shape{3, 32, 32};
    s.variables.push_back(range_var("depth", 1, 3));
    const std::vector<std::int64_t> kernels{1, 3, 5};
    for (int i = 1; i <= 3; ++i) {
        const std::string n = std::to_string(i);
        s.variables.push_back(choice_var("kernel_" + n, kernels));
        s.variables.push_back(range_var("out_channels_" + n, 1, 64));
    }
    s.reference_assignment = {
        {"depth", 2},
        {"kernel_1", 3}, {"out_channels_1", 16},
        {"kernel_2", 3}, {"out_channels_2", 32},
        {"kernel_3", 3}, {"out_channels_3", 64},
    };
    return s;
}

SearchSpace make_branch3() {
    SearchSpace s;
    s.id = "branch3";
    s.tmpl = TemplateKind::multi_branch_concat;
    s.input_shape = Shape{3, 32, 32};
    s.variables.push_back(range_var("depth", 1, 3));
    const std::vector<std::int64_t> kernels{3, 5, 7};
    for (int i = 1; i <= 3; ++i) {
        const std::string n = std::to_string(i);
        s.variables.push_back(choice_var("kernel_" + n, kernels));
        s.variables.push_back(range_var("out_channels_" + n, 1, 32));
    }
    s.reference_assignment = {
        {"depth", 2},
        {"kernel_1", 3}, {"out_channels_1", 8},
        {"kernel_2", 5}, {"out_channels_2", 16},
        {"kernel_3", 3}, {"out_channels_3", 16},
    };
    return s;
}

}  // namespace

SearchSpace builtin_space(const std::string& name) {
    if (name == "example3") return make_example3();
    if (name == "residual3") return make_residual3();
    if (name == "branch3") return make_branch3();
    throw std::runtime_error("unknown built-in space: " + name);
}

std::vector<std::string> builtin_space_names() { return {"example3", "residual3", "branch3"}; }

}  // namespace nss
