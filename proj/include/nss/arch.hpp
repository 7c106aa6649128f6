#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nss {

struct Shape {
    std::int64_t c = 0;
    std::int64_t h = 0;
    std::int64_t w = 0;

    bool operator==(const Shape&) const = default;
    std::int64_t elements() const { return c * h * w; }
};

enum class LayerKind {
    conv2d,
    dense,
    relu,
    max_pool,
    avg_pool,
    global_avg_pool,
    add,
    concat,
    flatten,
    softmax,
};

const char* to_string(LayerKind kind);
LayerKind layer_kind_from_string(const std::string& name);

// Whether the kind carries kernel/stride/padding fields (conv2d and the
// windowed pools; global_avg_pool has no window of its own).
bool has_window(LayerKind kind);
// Whether the kind carries out_channels (conv2d, dense).
bool has_out_channels(LayerKind kind);

struct LayerDescriptor {
    std::string id;
    LayerKind kind = LayerKind::relu;
    // Present iff has_window(kind).
    std::optional<std::int64_t> kernel_h;
    std::optional<std::int64_t> kernel_w;
    std::optional<std::int64_t> stride;
    std::optional<std::int64_t> padding;
    // Present iff has_out_channels(kind).
    std::optional<std::int64_t> out_channels;
    // Predecessor layer ids; empty means the layer consumes the
    // architecture input.
    std::vector<std::string> inputs;

    bool operator==(const LayerDescriptor&) const = default;
};

struct Architecture {
    std::string id;
    Shape input_shape;
    // Expected in topological order; validate() reports violations.
    std::vector<LayerDescriptor> layers;

    bool operator==(const Architecture&) const = default;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

struct AnalyticalMetrics {
    std::uint64_t parameter_count = 0;
    std::uint64_t flops = 0;
};

// Structural and shape checks. Invalid architectures are a report, not an
// error; every violation names the offending layer id.
ValidationReport validate(const Architecture& arch);

// Output shape of one layer given its input shapes. Throws
// std::runtime_error("degenerate shape ...") when a dimension collapses
// to zero or below, std::invalid_argument on inconsistent inputs.
Shape output_shape(const LayerDescriptor& layer, const std::vector<Shape>& in_shapes);

// Trainable scalar count: conv2d kh*kw*Cin*Cout + Cout, dense
// fan_in*fan_out + fan_out, everything else 0. Requires validate() ok.
std::uint64_t count_parameters(const Architecture& arch);

// Inference workload at batch 1. Multiplies and adds count separately
// (2 ops per MAC); padded taps are counted; bias adds are not.
// relu/pool/softmax/add cost one op per output element; concat and
// flatten are free.
std::uint64_t count_flops(const Architecture& arch);

AnalyticalMetrics analyze(const Architecture& arch);

// Per-layer output shapes in layer order. Requires a valid architecture.
std::vector<Shape> propagate_shapes(const Architecture& arch);

// JSON document with fields {"id", "input_shape", "layers"}; unknown
// fields are rejected on parse.
std::string to_json(const Architecture& arch, bool pretty = false);
Architecture architecture_from_json(const std::string& text);

// Compact sorted-key serialization used for hashing and byte-for-byte
// comparisons.
std::string canonical_json(const Architecture& arch);

// Content id: "a" + fnv1a64 hex over the canonical serialization with the
// id field blanked, so it is stable across naming.
std::string content_id(const Architecture& arch);

}  // namespace nss
