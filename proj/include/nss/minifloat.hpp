#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace nss {

// Reduced IEEE 754 binary format with 1 sign bit, w exponent bits and t
// trailing significand bits; T_{5,10} is binary16, T_{8,23} is binary32.
struct ReducedFloatType {
    int w = 8;
    int t = 23;

    bool operator==(const ReducedFloatType&) const = default;

    int storage_width() const { return 1 + w + t; }
    int bias() const { return (1 << (w - 1)) - 1; }
    // Minimum normal exponent; with w == 1 every finite value is subnormal.
    int emin() const { return 1 - bias(); }
    bool has_normals() const { return (1 << w) - 2 >= 1; }
    // Largest finite value in the format.
    double max_finite() const;
};

// "T{w}_{t}", e.g. "T5_10".
std::string type_name(const ReducedFloatType& ty);
ReducedFloatType type_from_name(const std::string& name);

// Round-to-nearest-even projection of a binary32 value onto the T_{w,t}
// value set, returned in binary32. Subnormals and signed zero are kept;
// overflow follows IEEE RNE semantics and saturates to +-Inf; NaN maps to
// the canonical quiet NaN.
float quantize_scalar(float x, const ReducedFloatType& ty);

// Elementwise quantize_scalar. The default entry point runs the OpenMP
// kernel; the serial variant is the reference implementation the tests and
// benchmarks compare against.
void quantize_values(float* data, std::size_t n, const ReducedFloatType& ty);
void quantize_values_serial(float* data, std::size_t n, const ReducedFloatType& ty);
std::vector<float> quantize_tensor(std::vector<float> values, const ReducedFloatType& ty);
std::vector<float> quantize_tensor_serial(std::vector<float> values,
                                          const ReducedFloatType& ty);

// All 184 types with w in [1,8] and t in [1,23], ordered by storage width
// then exponent width.
std::vector<ReducedFloatType> type_grid();

}  // namespace nss
