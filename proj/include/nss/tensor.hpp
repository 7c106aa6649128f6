#pragma once

#include <cstdint>
#include <vector>

#include "nss/arch.hpp"

namespace nss {

// Dense (C, H, W) tensor of binary32 values, row-major with w fastest.
struct Tensor {
    Shape shape;
    std::vector<float> v;

    Tensor() = default;
    explicit Tensor(Shape s) : shape(s), v(static_cast<std::size_t>(s.elements()), 0.0f) {}

    float& at(std::int64_t c, std::int64_t y, std::int64_t x) {
        return v[static_cast<std::size_t>((c * shape.h + y) * shape.w + x)];
    }
    float at(std::int64_t c, std::int64_t y, std::int64_t x) const {
        return v[static_cast<std::size_t>((c * shape.h + y) * shape.w + x)];
    }
};

}  // namespace nss
