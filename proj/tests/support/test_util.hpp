#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nss/arch.hpp"
#include "nss/dataset.hpp"
#include "nss/rng.hpp"

namespace testutil {

// Fresh scratch directory under the build tree, cleared per construction.
struct ScratchDir {
    std::filesystem::path path;

    explicit ScratchDir(const std::string& name) {
        path = std::filesystem::temp_directory_path() / ("nss_test_" + name);
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline nss::LayerDescriptor conv_layer(std::string id, std::int64_t k, std::int64_t stride,
                                       std::int64_t pad, std::int64_t channels,
                                       std::vector<std::string> inputs = {}) {
    nss::LayerDescriptor layer;
    layer.id = std::move(id);
    layer.kind = nss::LayerKind::conv2d;
    layer.kernel_h = k;
    layer.kernel_w = k;
    layer.stride = stride;
    layer.padding = pad;
    layer.out_channels = channels;
    layer.inputs = std::move(inputs);
    return layer;
}

inline nss::LayerDescriptor dense_layer(std::string id, std::int64_t out,
                                        std::vector<std::string> inputs = {}) {
    nss::LayerDescriptor layer;
    layer.id = std::move(id);
    layer.kind = nss::LayerKind::dense;
    layer.out_channels = out;
    layer.inputs = std::move(inputs);
    return layer;
}

inline nss::LayerDescriptor plain_layer(std::string id, nss::LayerKind kind,
                                        std::vector<std::string> inputs = {}) {
    nss::LayerDescriptor layer;
    layer.id = std::move(id);
    layer.kind = kind;
    layer.inputs = std::move(inputs);
    return layer;
}

// Balanced synthetic classification set: `classes` Gaussian-ish blobs of
// uniform noise around per-class anchors.
inline nss::Dataset synthetic_dataset(nss::Shape shape, std::size_t classes, std::size_t count,
                                      std::uint64_t seed, float spread = 0.25f) {
    nss::Dataset ds;
    ds.shape = shape;
    nss::Rng rng(seed);
    const std::size_t elements = static_cast<std::size_t>(shape.elements());
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint16_t label = static_cast<std::uint16_t>(i % classes);
        for (std::size_t e = 0; e < elements; ++e) {
            const float anchor = (e % classes) == label ? 1.0f : 0.0f;
            ds.inputs.push_back(anchor +
                                static_cast<float>(rng.uniform_real(-spread, spread)));
        }
        ds.labels.push_back(label);
    }
    return ds;
}

}  // namespace testutil
