#pragma once

// Brute-force reference for reduced-float quantization, independent of the
// library's scale-and-round implementation. Finite T_{w,t} values are
// enumerated through their integer encodings (sign excluded): encoding
// k = E * 2^t + m maps to
//   E == 0:  m * 2^(emin - t)            (subnormals, zero included)
//   E >= 1:  (2^t + m) * 2^(E - bias - t)
// which is strictly increasing in k, so the nearest representable is found
// by binary search plus explicit neighbor and tie analysis. All arithmetic
// is exact: operands carry at most 24 significand bits and long double has
// 64.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>

#include "nss/minifloat.hpp"

namespace oracle {

inline long double encoding_value(const nss::ReducedFloatType& ty, std::uint64_t k) {
    const std::uint64_t t_mask = (1ULL << ty.t) - 1;
    const std::uint64_t e_field = k >> ty.t;
    const std::uint64_t m = k & t_mask;
    if (e_field == 0)
        return std::ldexp(static_cast<long double>(m), ty.emin() - ty.t);
    return std::ldexp(static_cast<long double>((1ULL << ty.t) + m),
                      static_cast<int>(e_field) - ty.bias() - ty.t);
}

// Number of finite encodings per sign: exponent field all-ones is Inf/NaN.
inline std::uint64_t finite_encodings(const nss::ReducedFloatType& ty) {
    return ((1ULL << ty.w) - 1) << ty.t;
}

inline float quantize_reference(float x, const nss::ReducedFloatType& ty) {
    if (std::isnan(x)) return std::numeric_limits<float>::quiet_NaN();
    if (std::isinf(x)) return x;

    const bool negative = std::signbit(x);
    const long double a = std::fabs(static_cast<long double>(x));
    const std::uint64_t n = finite_encodings(ty);

    auto signed_result = [&](long double magnitude) -> float {
        if (magnitude == 0.0L) return negative ? -0.0f : 0.0f;
        const float f = static_cast<float>(magnitude);
        return negative ? -f : f;
    };

    const long double top = encoding_value(ty, n - 1);
    if (a > top) {
        // Overflow rule: round as if the exponent range were unbounded.
        // The next value above the top finite one sits one top-binade ulp
        // away; at the halfway point the even-significand neighbor (the
        // carry into the next binade) wins, so the threshold is inclusive.
        const std::uint64_t e_field = (n - 1) >> ty.t;
        const int e_top = e_field == 0 ? ty.emin() : static_cast<int>(e_field) - ty.bias();
        const long double half_step = std::ldexp(1.0L, e_top - ty.t - 1);
        if (a >= top + half_step)
            return negative ? -std::numeric_limits<float>::infinity()
                            : std::numeric_limits<float>::infinity();
        return signed_result(top);
    }

    // Largest k with value(k) <= a.
    std::uint64_t lo = 0, hi = n - 1;
    while (lo < hi) {
        const std::uint64_t mid = lo + (hi - lo + 1) / 2;
        if (encoding_value(ty, mid) <= a)
            lo = mid;
        else
            hi = mid - 1;
    }

    const long double below = encoding_value(ty, lo);
    if (below == a) return signed_result(below);
    const long double above = encoding_value(ty, lo + 1);
    const long double d_below = a - below;
    const long double d_above = above - a;
    if (d_below < d_above) return signed_result(below);
    if (d_above < d_below) return signed_result(above);
    return signed_result(lo % 2 == 0 ? below : above);  // tie: even significand
}

// Classic bit-level binary32 -> binary16 conversion with round-to-nearest-
// even, used as the independent cross-check that T_{5,10} matches the
// standard half format.
inline std::uint16_t float_to_half_bits(float f) {
    std::uint32_t x;
    std::memcpy(&x, &f, sizeof(x));
    const std::uint16_t sign = static_cast<std::uint16_t>((x >> 16) & 0x8000u);
    const std::uint32_t abs = x & 0x7fffffffu;

    if (abs >= 0x7f800000u)  // Inf or NaN
        return static_cast<std::uint16_t>(sign | (abs > 0x7f800000u ? 0x7e00u : 0x7c00u));
    if (abs < 0x00800000u)  // binary32 subnormal, far below half's range
        return sign;

    int exp = static_cast<int>(abs >> 23) - 127;
    const std::uint32_t mant = (abs & 0x7fffffu) | 0x800000u;  // 24 bits with hidden one

    if (exp >= -14) {
        // Normal half candidate: keep 11 of 24 bits, round the 13 dropped.
        std::uint32_t kept = mant >> 13;
        const std::uint32_t rest = mant & 0x1fffu;
        if (rest > 0x1000u || (rest == 0x1000u && (kept & 1u))) ++kept;
        if (kept == (1u << 11)) {  // carry into the next binade
            kept >>= 1;
            ++exp;
        }
        if (exp > 15) return static_cast<std::uint16_t>(sign | 0x7c00u);  // overflow
        return static_cast<std::uint16_t>(sign |
                                          ((static_cast<std::uint32_t>(exp + 15) << 10) |
                                           (kept & 0x3ffu)));
    }

    // Subnormal half: value = mant * 2^(exp-23), quantum 2^-24.
    const int shift = -(exp + 1);  // >= 14
    if (shift >= 32) return sign;
    std::uint32_t kept = mant >> shift;
    const std::uint32_t rest = mant & ((1u << shift) - 1);
    const std::uint32_t halfway = 1u << (shift - 1);
    if (rest > halfway || (rest == halfway && (kept & 1u))) ++kept;
    // kept == 2^10 lands exactly on the smallest normal encoding.
    return static_cast<std::uint16_t>(sign | kept);
}

inline float half_bits_to_float(std::uint16_t h) {
    const std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000u) << 16;
    const std::uint32_t exp = (h >> 10) & 0x1fu;
    const std::uint32_t mant = h & 0x3ffu;
    std::uint32_t out;
    if (exp == 0) {
        if (mant == 0) {
            out = sign;
        } else {
            float v = std::ldexp(static_cast<float>(mant), -24);
            std::memcpy(&out, &v, sizeof(out));
            out |= sign;
        }
    } else if (exp == 31) {
        out = sign | 0x7f800000u | (mant ? (mant << 13) | 0x400000u : 0u);
    } else {
        out = sign | ((exp - 15 + 127) << 23) | (mant << 13);
    }
    float f;
    std::memcpy(&f, &out, sizeof(f));
    return f;
}

inline float half_round_trip(float x) { return half_bits_to_float(float_to_half_bits(x)); }

}  // namespace oracle
