#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nss/arch.hpp"
#include "nss/minifloat.hpp"

namespace nss {

struct WeightTensor {
    std::vector<std::int64_t> shape;
    std::vector<float> values;
};

struct LayerWeights {
    std::string layer_id;
    WeightTensor weights;
    WeightTensor bias;
};

// Binary32 parameters for every trainable layer, in architecture order.
// Total element count equals count_parameters of the architecture.
struct WeightBundle {
    std::vector<LayerWeights> layers;

    std::uint64_t element_count() const;
    const LayerWeights* find(const std::string& layer_id) const;
};

// Allocates weight tensors matching the architecture's shapes
// (conv2d: [Cout, Cin, kh, kw] + [Cout]; dense: [fan_out, fan_in] +
// [fan_out]).
WeightBundle zero_bundle(const Architecture& arch);
// Deterministic uniform values scaled by 1/sqrt(fan_in).
WeightBundle random_bundle(const Architecture& arch, std::uint64_t seed);

// Projects every tensor onto the reduced type's value set.
WeightBundle quantize_bundle(WeightBundle bundle, const ReducedFloatType& ty);

// Bundle file: magic "NSWB0001", 4-byte little-endian manifest length, a
// JSON manifest listing per-layer tensor shapes and byte offsets, then raw
// little-endian binary32 data.
void save_bundle(const std::string& path, const WeightBundle& bundle);
WeightBundle load_bundle(const std::string& path);

}  // namespace nss
