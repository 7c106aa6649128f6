#include "nss/arch.hpp"

#include <json.hpp>

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "nss/csv.hpp"

namespace nss {

using nlohmann::json;

const char* to_string(LayerKind kind) {
    switch (kind) {
        case LayerKind::conv2d: return "conv2d";
        case LayerKind::dense: return "dense";
        case LayerKind::relu: return "relu";
        case LayerKind::max_pool: return "max_pool";
        case LayerKind::avg_pool: return "avg_pool";
        case LayerKind::global_avg_pool: return "global_avg_pool";
        case LayerKind::add: return "add";
        case LayerKind::concat: return "concat";
        case LayerKind::flatten: return "flatten";
        case LayerKind::softmax: return "softmax";
    }
    return "?";
}

LayerKind layer_kind_from_string(const std::string& name) {
    static const std::unordered_map<std::string, LayerKind> table = {
        {"conv2d", LayerKind::conv2d},
        {"dense", LayerKind::dense},
        {"relu", LayerKind::relu},
        {"max_pool", LayerKind::max_pool},
        {"avg_pool", LayerKind::avg_pool},
        {"global_avg_pool", LayerKind::global_avg_pool},
        {"add", LayerKind::add},
        {"concat", LayerKind::concat},
        {"flatten", LayerKind::flatten},
        {"softmax", LayerKind::softmax},
    };
    auto it = table.find(name);
    if (it == table.end()) throw std::runtime_error("unknown layer kind: " + name);
    return it->second;
}

bool has_window(LayerKind kind) {
    return kind == LayerKind::conv2d || kind == LayerKind::max_pool ||
           kind == LayerKind::avg_pool;
}

bool has_out_channels(LayerKind kind) {
    return kind == LayerKind::conv2d || kind == LayerKind::dense;
}

static bool is_join(LayerKind kind) {
    return kind == LayerKind::add || kind == LayerKind::concat;
}

Shape output_shape(const LayerDescriptor& layer, const std::vector<Shape>& in_shapes) {
    auto window_out = [&](const Shape& in) {
        const std::int64_t kh = *layer.kernel_h;
        const std::int64_t kw = *layer.kernel_w;
        const std::int64_t s = *layer.stride;
        const std::int64_t p = *layer.padding;
        const std::int64_t nh = in.h + 2 * p - kh;
        const std::int64_t nw = in.w + 2 * p - kw;
        if (nh < 0 || nw < 0)
            throw std::runtime_error("degenerate shape at layer '" + layer.id + "'");
        return Shape{in.c, nh / s + 1, nw / s + 1};
    };

    if (is_join(layer.kind)) {
        if (in_shapes.size() < 2)
            throw std::invalid_argument("join layer '" + layer.id + "' needs >= 2 inputs");
    } else if (in_shapes.size() != 1) {
        throw std::invalid_argument("layer '" + layer.id + "' needs exactly 1 input");
    }

    const Shape& in = in_shapes.front();
    switch (layer.kind) {
        case LayerKind::conv2d: {
            Shape out = window_out(in);
            out.c = *layer.out_channels;
            return out;
        }
        case LayerKind::max_pool:
        case LayerKind::avg_pool:
            return window_out(in);
        case LayerKind::global_avg_pool:
            return Shape{in.c, 1, 1};
        case LayerKind::dense:
            return Shape{*layer.out_channels, 1, 1};
        case LayerKind::relu:
        case LayerKind::softmax:
            return in;
        case LayerKind::flatten:
            return Shape{in.elements(), 1, 1};
        case LayerKind::add: {
            for (const Shape& s : in_shapes)
                if (!(s == in))
                    throw std::invalid_argument("shape mismatch at add '" + layer.id + "'");
            return in;
        }
        case LayerKind::concat: {
            std::int64_t channels = 0;
            for (const Shape& s : in_shapes) {
                if (s.h != in.h || s.w != in.w)
                    throw std::invalid_argument("spatial mismatch at concat '" + layer.id + "'");
                channels += s.c;
            }
            return Shape{channels, in.h, in.w};
        }
    }
    throw std::invalid_argument("unhandled layer kind");
}

namespace {

struct Structure {
    std::unordered_map<std::string, std::size_t> index_of;
    bool sound = true;
};

Structure check_structure(const Architecture& arch, std::vector<std::string>& violations) {
    Structure st;
    for (std::size_t i = 0; i < arch.layers.size(); ++i) {
        const auto& layer = arch.layers[i];
        if (layer.id.empty()) {
            violations.push_back("layer at position " + std::to_string(i) + " has empty id");
            st.sound = false;
            continue;
        }
        if (!st.index_of.emplace(layer.id, i).second) {
            violations.push_back("duplicate layer id '" + layer.id + "'");
            st.sound = false;
        }
    }

    for (const auto& layer : arch.layers) {
        const bool window = layer.kernel_h || layer.kernel_w || layer.stride || layer.padding;
        if (has_window(layer.kind)) {
            if (!(layer.kernel_h && layer.kernel_w && layer.stride && layer.padding)) {
                violations.push_back("missing kernel/stride/padding at '" + layer.id + "'");
                st.sound = false;
            } else if (*layer.kernel_h < 1 || *layer.kernel_w < 1 || *layer.stride < 1 ||
                       *layer.padding < 0) {
                violations.push_back("non-positive window field at '" + layer.id + "'");
                st.sound = false;
            }
        } else if (window) {
            violations.push_back("kernel/stride/padding not allowed at '" + layer.id + "'");
            st.sound = false;
        }
        if (has_out_channels(layer.kind)) {
            if (!layer.out_channels) {
                violations.push_back("missing out_channels at '" + layer.id + "'");
                st.sound = false;
            } else if (*layer.out_channels < 1) {
                violations.push_back("non-positive out_channels at '" + layer.id + "'");
                st.sound = false;
            }
        } else if (layer.out_channels) {
            violations.push_back("out_channels not allowed at '" + layer.id + "'");
            st.sound = false;
        }
        if (is_join(layer.kind)) {
            if (layer.inputs.size() < 2) {
                violations.push_back("join layer '" + layer.id + "' needs >= 2 inputs");
                st.sound = false;
            }
        } else if (layer.inputs.size() > 1) {
            violations.push_back("layer '" + layer.id + "' takes at most one input");
            st.sound = false;
        }
        for (const auto& in : layer.inputs) {
            if (in == layer.id) {
                violations.push_back("cycle detected at '" + layer.id + "'");
                st.sound = false;
            } else if (!st.index_of.count(in)) {
                violations.push_back("unknown input '" + in + "' at '" + layer.id + "'");
                st.sound = false;
            }
        }
    }
    return st;
}

// Kahn's algorithm over the predecessor graph; reports layers on cycles.
bool check_acyclic(const Architecture& arch, const Structure& st,
                   std::vector<std::string>& violations) {
    const std::size_t n = arch.layers.size();
    std::vector<std::size_t> indegree(n, 0);
    std::vector<std::vector<std::size_t>> successors(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& in : arch.layers[i].inputs) {
            auto it = st.index_of.find(in);
            if (it == st.index_of.end()) continue;
            successors[it->second].push_back(i);
            ++indegree[i];
        }
    }
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indegree[i] == 0) ready.push_back(i);
    std::size_t visited = 0;
    while (!ready.empty()) {
        std::size_t i = ready.back();
        ready.pop_back();
        ++visited;
        for (std::size_t s : successors[i])
            if (--indegree[s] == 0) ready.push_back(s);
    }
    if (visited == n) return true;
    for (std::size_t i = 0; i < n; ++i) {
        if (indegree[i] > 0) {
            violations.push_back("cycle detected at '" + arch.layers[i].id + "'");
            break;
        }
    }
    return false;
}

}  // namespace

ValidationReport validate(const Architecture& arch) {
    ValidationReport report;
    if (arch.input_shape.c < 1 || arch.input_shape.h < 1 || arch.input_shape.w < 1) {
        report.violations.push_back("non-positive input shape");
        return report;
    }

    Structure st = check_structure(arch, report.violations);
    if (!st.sound) return report;

    if (!check_acyclic(arch, st, report.violations)) return report;

    for (std::size_t i = 0; i < arch.layers.size(); ++i) {
        for (const auto& in : arch.layers[i].inputs) {
            if (st.index_of.at(in) >= i) {
                report.violations.push_back("not topologically ordered at '" +
                                            arch.layers[i].id + "'");
                return report;
            }
        }
    }

    if (!arch.layers.empty()) {
        std::unordered_set<std::string> referenced;
        for (const auto& layer : arch.layers)
            for (const auto& in : layer.inputs) referenced.insert(in);
        std::size_t terminals = 0;
        for (const auto& layer : arch.layers)
            if (!referenced.count(layer.id)) ++terminals;
        if (terminals != 1)
            report.violations.push_back("expected exactly one output layer, found " +
                                        std::to_string(terminals));
    }

    // Shape propagation; any throw becomes a violation.
    std::vector<Shape> shapes(arch.layers.size());
    for (std::size_t i = 0; i < arch.layers.size(); ++i) {
        const auto& layer = arch.layers[i];
        std::vector<Shape> ins;
        if (layer.inputs.empty()) {
            ins.push_back(arch.input_shape);
        } else {
            for (const auto& in : layer.inputs) ins.push_back(shapes[st.index_of.at(in)]);
        }
        try {
            shapes[i] = output_shape(layer, ins);
        } catch (const std::exception& e) {
            report.violations.push_back(e.what());
            return report;
        }
    }
    return report;
}

std::vector<Shape> propagate_shapes(const Architecture& arch) {
    std::unordered_map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < arch.layers.size(); ++i) index_of[arch.layers[i].id] = i;
    std::vector<Shape> shapes(arch.layers.size());
    for (std::size_t i = 0; i < arch.layers.size(); ++i) {
        const auto& layer = arch.layers[i];
        std::vector<Shape> ins;
        if (layer.inputs.empty()) {
            ins.push_back(arch.input_shape);
        } else {
            for (const auto& in : layer.inputs) ins.push_back(shapes[index_of.at(in)]);
        }
        shapes[i] = output_shape(layer, ins);
    }
    return shapes;
}

static Shape first_input_shape(const Architecture& arch,
                               const std::unordered_map<std::string, std::size_t>& index_of,
                               const std::vector<Shape>& shapes, std::size_t i) {
    const auto& layer = arch.layers[i];
    if (layer.inputs.empty()) return arch.input_shape;
    return shapes[index_of.at(layer.inputs.front())];
}

std::uint64_t count_parameters(const Architecture& arch) {
    std::unordered_map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < arch.layers.size(); ++i) index_of[arch.layers[i].id] = i;
    const std::vector<Shape> shapes = propagate_shapes(arch);
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < arch.layers.size(); ++i) {
        const auto& layer = arch.layers[i];
        const Shape in = first_input_shape(arch, index_of, shapes, i);
        if (layer.kind == LayerKind::conv2d) {
            const std::uint64_t cout = static_cast<std::uint64_t>(*layer.out_channels);
            total += static_cast<std::uint64_t>(*layer.kernel_h) *
                         static_cast<std::uint64_t>(*layer.kernel_w) *
                         static_cast<std::uint64_t>(in.c) * cout +
                     cout;
        } else if (layer.kind == LayerKind::dense) {
            const std::uint64_t fan_in = static_cast<std::uint64_t>(in.elements());
            const std::uint64_t fan_out = static_cast<std::uint64_t>(*layer.out_channels);
            total += fan_in * fan_out + fan_out;
        }
    }
    return total;
}

std::uint64_t count_flops(const Architecture& arch) {
    std::unordered_map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < arch.layers.size(); ++i) index_of[arch.layers[i].id] = i;
    const std::vector<Shape> shapes = propagate_shapes(arch);
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < arch.layers.size(); ++i) {
        const auto& layer = arch.layers[i];
        const Shape in = first_input_shape(arch, index_of, shapes, i);
        const Shape out = shapes[i];
        switch (layer.kind) {
            case LayerKind::conv2d:
                total += 2ULL * static_cast<std::uint64_t>(*layer.kernel_h) *
                         static_cast<std::uint64_t>(*layer.kernel_w) *
                         static_cast<std::uint64_t>(in.c) *
                         static_cast<std::uint64_t>(out.c) *
                         static_cast<std::uint64_t>(out.h) *
                         static_cast<std::uint64_t>(out.w);
                break;
            case LayerKind::dense:
                total += 2ULL * static_cast<std::uint64_t>(in.elements()) *
                         static_cast<std::uint64_t>(out.c);
                break;
            case LayerKind::add:
            case LayerKind::relu:
            case LayerKind::softmax:
            case LayerKind::max_pool:
            case LayerKind::avg_pool:
            case LayerKind::global_avg_pool:
                total += static_cast<std::uint64_t>(out.elements());
                break;
            case LayerKind::concat:
            case LayerKind::flatten:
                break;
        }
    }
    return total;
}

AnalyticalMetrics analyze(const Architecture& arch) {
    return AnalyticalMetrics{count_parameters(arch), count_flops(arch)};
}

namespace {

json layer_to_json(const LayerDescriptor& layer) {
    json j;
    j["id"] = layer.id;
    j["kind"] = to_string(layer.kind);
    j["inputs"] = layer.inputs;
    if (layer.kernel_h && layer.kernel_w) j["kernel"] = {*layer.kernel_h, *layer.kernel_w};
    if (layer.stride) j["stride"] = *layer.stride;
    if (layer.padding) j["padding"] = *layer.padding;
    if (layer.out_channels) j["out_channels"] = *layer.out_channels;
    return j;
}

json arch_to_json(const Architecture& arch) {
    json j;
    j["id"] = arch.id;
    j["input_shape"] = {arch.input_shape.c, arch.input_shape.h, arch.input_shape.w};
    json layers = json::array();
    for (const auto& layer : arch.layers) layers.push_back(layer_to_json(layer));
    j["layers"] = std::move(layers);
    return j;
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) { ok = true; break; }
        if (!ok)
            throw std::runtime_error(std::string("unknown field '") + it.key() + "' in " + where);
    }
}

LayerDescriptor layer_from_json(const json& j) {
    if (!j.is_object()) throw std::runtime_error("layer entry must be an object");
    reject_unknown(j, {"id", "kind", "inputs", "kernel", "stride", "padding", "out_channels"},
                   "layer");
    LayerDescriptor layer;
    layer.id = j.at("id").get<std::string>();
    layer.kind = layer_kind_from_string(j.at("kind").get<std::string>());
    layer.inputs = j.at("inputs").get<std::vector<std::string>>();
    if (j.contains("kernel")) {
        const auto& k = j.at("kernel");
        if (!k.is_array() || k.size() != 2)
            throw std::runtime_error("kernel must be [kh, kw] at layer '" + layer.id + "'");
        layer.kernel_h = k[0].get<std::int64_t>();
        layer.kernel_w = k[1].get<std::int64_t>();
    }
    if (j.contains("stride")) layer.stride = j.at("stride").get<std::int64_t>();
    if (j.contains("padding")) layer.padding = j.at("padding").get<std::int64_t>();
    if (j.contains("out_channels")) layer.out_channels = j.at("out_channels").get<std::int64_t>();
    return layer;
}

}  // namespace

std::string to_json(const Architecture& arch, bool pretty) {
    json j = arch_to_json(arch);
    return pretty ? j.dump(2) + "\n" : j.dump();
}

std::string canonical_json(const Architecture& arch) { return arch_to_json(arch).dump(); }

Architecture architecture_from_json(const std::string& text) {
    json j = json::parse(text);
    if (!j.is_object()) throw std::runtime_error("architecture document must be an object");
    reject_unknown(j, {"id", "input_shape", "layers"}, "architecture");
    Architecture arch;
    arch.id = j.at("id").get<std::string>();
    const auto& shape = j.at("input_shape");
    if (!shape.is_array() || shape.size() != 3)
        throw std::runtime_error("input_shape must be [C, H, W]");
    arch.input_shape = Shape{shape[0].get<std::int64_t>(), shape[1].get<std::int64_t>(),
                             shape[2].get<std::int64_t>()};
    for (const auto& layer : j.at("layers")) arch.layers.push_back(layer_from_json(layer));
    return arch;
}

std::string content_id(const Architecture& arch) {
    Architecture blank = arch;
    blank.id.clear();
    const std::string body = canonical_json(blank);
    return "a" + hex64(fnv1a64(body.data(), body.size()));
}

}  // namespace nss
