#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nss/arch.hpp"
#include "nss/tensor.hpp"

namespace nss {

// Labeled classification items sharing one input shape.
struct Dataset {
    Shape shape;
    std::vector<float> inputs;  // count * C * H * W, item-major
    std::vector<std::uint16_t> labels;

    std::size_t count() const { return labels.size(); }
    Tensor item(std::size_t i) const;
};

// Dataset file: magic "NSDS0001", item count (4-byte LE), shape header
// (C, H, W as 4-byte LE), raw little-endian binary32 inputs, then 2-byte
// LE labels.
void save_dataset(const std::string& path, const Dataset& ds);
Dataset load_dataset(const std::string& path);

}  // namespace nss
