#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nss/arch.hpp"
#include "nss/dataset.hpp"
#include "nss/minifloat.hpp"
#include "nss/tensor.hpp"
#include "nss/weights.hpp"

namespace nss {

// Extrinsic quantization hook: when set, weights are projected once at
// load and every activation map passed between operators is projected
// before being consumed. Absent means plain binary32 evaluation.
struct QuantizationHook {
    std::optional<ReducedFloatType> type;
};

// Forward-only evaluation in binary32, layers in topological order with
// fixed row-major reduction order; bit-reproducible for identical inputs.
// Single-threaded by design so per-item results do not depend on thread
// count.
Tensor forward(const Architecture& arch, const WeightBundle& weights, const Tensor& input,
               const QuantizationHook& hook = {});

// Same evaluation with operation counting at the arithmetic sites: 2 ops
// per multiply-accumulate tap (padded taps included, bias loads not
// counted), 1 op per relu/pool/softmax/add output element. The total
// matches count_flops exactly.
Tensor forward_counted(const Architecture& arch, const WeightBundle& weights,
                       const Tensor& input, const QuantizationHook& hook, std::uint64_t& ops);

// Argmax index of the terminal output; ties resolve to the lowest index.
std::size_t argmax_class(const Tensor& output);

// Top-1 accuracy over all dataset items at batch 1; OpenMP-parallel over
// items with the serial variant kept as the reference path.
double classify_accuracy(const Architecture& arch, const WeightBundle& weights,
                         const Dataset& dataset, const QuantizationHook& hook = {});
double classify_accuracy_serial(const Architecture& arch, const WeightBundle& weights,
                                const Dataset& dataset, const QuantizationHook& hook = {});

struct SweepRow {
    std::string type_name;  // "fp32" for the baseline row
    int storage_bits = 32;
    double accuracy = 0.0;
};

// Baseline accuracy plus one row per grid type, in grid order.
std::vector<SweepRow> precision_sweep(const Architecture& arch, const WeightBundle& weights,
                                      const Dataset& dataset);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> sweep_from_csv(const std::string& path);

}  // namespace nss
