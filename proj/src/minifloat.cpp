#include "nss/minifloat.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nss {

double ReducedFloatType::max_finite() const {
    if (has_normals()) {
        const int emax = bias();
        return std::ldexp(2.0 - std::ldexp(1.0, -t), emax);
    }
    // Subnormal-only format (w == 1): largest value is (2^t - 1) ulps.
    return std::ldexp(static_cast<double>((1LL << t) - 1), emin() - t);
}

std::string type_name(const ReducedFloatType& ty) {
    return "T" + std::to_string(ty.w) + "_" + std::to_string(ty.t);
}

ReducedFloatType type_from_name(const std::string& name) {
    if (name.size() < 4 || name[0] != 'T')
        throw std::runtime_error("bad type name: " + name);
    const std::size_t sep = name.find('_');
    if (sep == std::string::npos)
        throw std::runtime_error("bad type name: " + name);
    const int w = std::stoi(name.substr(1, sep - 1));
    const int t = std::stoi(name.substr(sep + 1));
    if (w < 1 || w > 8 || t < 1 || t > 23)
        throw std::runtime_error("type out of range: " + name);
    return ReducedFloatType{w, t};
}

float quantize_scalar(float x, const ReducedFloatType& ty) {
    if (std::isnan(x)) return std::numeric_limits<float>::quiet_NaN();
    if (std::isinf(x) || x == 0.0f) return x;

    // Exponent e with |x| = f * 2^e, f in [1, 2).
    int k = 0;
    std::frexp(x, &k);
    const int e = k - 1;

    // lsb exponent of the target value: normal spacing above emin,
    // fixed subnormal spacing below.
    const int q = std::max(e - ty.t, ty.emin() - ty.t);

    // Exact in double: x has 24 significand bits, |y| < 2^(t+1) <= 2^24.
    const double y = std::ldexp(static_cast<double>(x), -q);
    const double r = std::nearbyint(y);  // round to nearest, ties to even
    const double result = std::ldexp(r, q);

    if (result == 0.0) return std::copysign(0.0f, x);
    if (std::abs(result) > ty.max_finite())
        return std::copysign(std::numeric_limits<float>::infinity(), x);
    return static_cast<float>(result);
}

void quantize_values_serial(float* data, std::size_t n, const ReducedFloatType& ty) {
    for (std::size_t i = 0; i < n; ++i) data[i] = quantize_scalar(data[i], ty);
}

void quantize_values(float* data, std::size_t n, const ReducedFloatType& ty) {
    const std::int64_t count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) data[i] = quantize_scalar(data[i], ty);
}

std::vector<float> quantize_tensor(std::vector<float> values, const ReducedFloatType& ty) {
    quantize_values(values.data(), values.size(), ty);
    return values;
}

std::vector<float> quantize_tensor_serial(std::vector<float> values,
                                          const ReducedFloatType& ty) {
    quantize_values_serial(values.data(), values.size(), ty);
    return values;
}

std::vector<ReducedFloatType> type_grid() {
    std::vector<ReducedFloatType> grid;
    for (int w = 1; w <= 8; ++w)
        for (int t = 1; t <= 23; ++t) grid.push_back(ReducedFloatType{w, t});
    std::sort(grid.begin(), grid.end(), [](const ReducedFloatType& a, const ReducedFloatType& b) {
        if (a.storage_width() != b.storage_width())
            return a.storage_width() < b.storage_width();
        return a.w < b.w;
    });
    return grid;
}

}  // namespace nss
