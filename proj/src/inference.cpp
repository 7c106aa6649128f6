#include "nss/inference.hpp"

#include <omp.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "nss/csv.hpp"

namespace nss {

namespace {

struct NullCounter {
    void add(std::uint64_t) {}
};

struct OpCounter {
    std::uint64_t total = 0;
    void add(std::uint64_t n) { total += n; }
};

template <typename Counter>
Tensor eval_conv(const LayerDescriptor& layer, const LayerWeights& lw, const Tensor& in,
                 Counter& counter) {
    const std::int64_t kh = *layer.kernel_h;
    const std::int64_t kw = *layer.kernel_w;
    const std::int64_t stride = *layer.stride;
    const std::int64_t pad = *layer.padding;
    const std::int64_t cout = *layer.out_channels;
    const std::int64_t cin = in.shape.c;

    Tensor out(output_shape(layer, {in.shape}));
    for (std::int64_t co = 0; co < cout; ++co) {
        for (std::int64_t y = 0; y < out.shape.h; ++y) {
            for (std::int64_t x = 0; x < out.shape.w; ++x) {
                float acc = lw.bias.values[static_cast<std::size_t>(co)];
                for (std::int64_t ci = 0; ci < cin; ++ci) {
                    for (std::int64_t ky = 0; ky < kh; ++ky) {
                        const std::int64_t iy = y * stride - pad + ky;
                        for (std::int64_t kx = 0; kx < kw; ++kx) {
                            const std::int64_t ix = x * stride - pad + kx;
                            const bool inside =
                                iy >= 0 && iy < in.shape.h && ix >= 0 && ix < in.shape.w;
                            const float v = inside ? in.at(ci, iy, ix) : 0.0f;
                            const float w = lw.weights.values[static_cast<std::size_t>(
                                ((co * cin + ci) * kh + ky) * kw + kx)];
                            acc += w * v;
                            counter.add(2);
                        }
                    }
                }
                out.at(co, y, x) = acc;
            }
        }
    }
    return out;
}

template <typename Counter>
Tensor eval_dense(const LayerDescriptor& layer, const LayerWeights& lw, const Tensor& in,
                  Counter& counter) {
    const std::int64_t fan_in = in.shape.elements();
    const std::int64_t fan_out = *layer.out_channels;
    Tensor out(Shape{fan_out, 1, 1});
    for (std::int64_t o = 0; o < fan_out; ++o) {
        float acc = lw.bias.values[static_cast<std::size_t>(o)];
        for (std::int64_t i = 0; i < fan_in; ++i) {
            acc += lw.weights.values[static_cast<std::size_t>(o * fan_in + i)] *
                   in.v[static_cast<std::size_t>(i)];
            counter.add(2);
        }
        out.v[static_cast<std::size_t>(o)] = acc;
    }
    return out;
}

template <typename Counter>
Tensor eval_pool(const LayerDescriptor& layer, const Tensor& in, Counter& counter) {
    const std::int64_t kh = *layer.kernel_h;
    const std::int64_t kw = *layer.kernel_w;
    const std::int64_t stride = *layer.stride;
    const std::int64_t pad = *layer.padding;
    const bool is_max = layer.kind == LayerKind::max_pool;

    Tensor out(output_shape(layer, {in.shape}));
    for (std::int64_t c = 0; c < out.shape.c; ++c) {
        for (std::int64_t y = 0; y < out.shape.h; ++y) {
            for (std::int64_t x = 0; x < out.shape.w; ++x) {
                float acc = is_max ? -std::numeric_limits<float>::infinity() : 0.0f;
                for (std::int64_t ky = 0; ky < kh; ++ky) {
                    const std::int64_t iy = y * stride - pad + ky;
                    for (std::int64_t kx = 0; kx < kw; ++kx) {
                        const std::int64_t ix = x * stride - pad + kx;
                        const bool inside =
                            iy >= 0 && iy < in.shape.h && ix >= 0 && ix < in.shape.w;
                        if (is_max) {
                            if (inside && in.at(c, iy, ix) > acc) acc = in.at(c, iy, ix);
                        } else {
                            acc += inside ? in.at(c, iy, ix) : 0.0f;
                        }
                    }
                }
                out.at(c, y, x) = is_max ? acc : acc / static_cast<float>(kh * kw);
                counter.add(1);
            }
        }
    }
    return out;
}

template <typename Counter>
Tensor eval_layer(const LayerDescriptor& layer, const std::vector<const Tensor*>& ins,
                  const WeightBundle& weights, Counter& counter) {
    switch (layer.kind) {
        case LayerKind::conv2d:
            return eval_conv(layer, *weights.find(layer.id), *ins.front(), counter);
        case LayerKind::dense:
            return eval_dense(layer, *weights.find(layer.id), *ins.front(), counter);
        case LayerKind::relu: {
            Tensor out = *ins.front();
            for (float& v : out.v) {
                v = v > 0.0f ? v : 0.0f;
                counter.add(1);
            }
            return out;
        }
        case LayerKind::max_pool:
        case LayerKind::avg_pool:
            return eval_pool(layer, *ins.front(), counter);
        case LayerKind::global_avg_pool: {
            const Tensor& in = *ins.front();
            Tensor out(Shape{in.shape.c, 1, 1});
            const std::int64_t area = in.shape.h * in.shape.w;
            for (std::int64_t c = 0; c < in.shape.c; ++c) {
                float acc = 0.0f;
                for (std::int64_t y = 0; y < in.shape.h; ++y)
                    for (std::int64_t x = 0; x < in.shape.w; ++x) acc += in.at(c, y, x);
                out.v[static_cast<std::size_t>(c)] = acc / static_cast<float>(area);
                counter.add(1);
            }
            return out;
        }
        case LayerKind::add: {
            Tensor out = *ins.front();
            for (std::size_t k = 1; k < ins.size(); ++k)
                for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += ins[k]->v[i];
            counter.add(static_cast<std::uint64_t>(out.shape.elements()));
            return out;
        }
        case LayerKind::concat: {
            std::vector<Shape> shapes;
            for (const Tensor* t : ins) shapes.push_back(t->shape);
            Tensor out(output_shape(layer, shapes));
            std::size_t offset = 0;
            for (const Tensor* t : ins) {
                std::copy(t->v.begin(), t->v.end(), out.v.begin() + offset);
                offset += t->v.size();
            }
            return out;
        }
        case LayerKind::flatten: {
            Tensor out = *ins.front();
            out.shape = Shape{out.shape.elements(), 1, 1};
            return out;
        }
        case LayerKind::softmax: {
            const Tensor& in = *ins.front();
            Tensor out(in.shape);
            float max = -std::numeric_limits<float>::infinity();
            for (float v : in.v)
                if (v > max) max = v;
            float sum = 0.0f;
            for (std::size_t i = 0; i < in.v.size(); ++i) {
                out.v[i] = std::exp(in.v[i] - max);
                sum += out.v[i];
            }
            for (std::size_t i = 0; i < out.v.size(); ++i) {
                out.v[i] /= sum;
                counter.add(1);
            }
            return out;
        }
    }
    throw std::invalid_argument("unhandled layer kind");
}

template <typename Counter>
Tensor run_forward(const Architecture& arch, const WeightBundle& weights, const Tensor& input,
                   const QuantizationHook& hook, Counter& counter) {
    if (!(input.shape == arch.input_shape))
        throw std::invalid_argument("input shape mismatch");
    for (const auto& layer : arch.layers) {
        if (layer.kind != LayerKind::conv2d && layer.kind != LayerKind::dense) continue;
        const LayerWeights* lw = weights.find(layer.id);
        if (!lw) throw std::invalid_argument("missing weights for layer '" + layer.id + "'");
    }
    if (weights.element_count() != count_parameters(arch))
        throw std::invalid_argument("weight-count mismatch");

    std::unordered_map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < arch.layers.size(); ++i) index_of[arch.layers[i].id] = i;

    Tensor source = input;
    if (hook.type) quantize_values_serial(source.v.data(), source.v.size(), *hook.type);
    if (arch.layers.empty()) return source;

    std::vector<Tensor> outputs(arch.layers.size());
    for (std::size_t i = 0; i < arch.layers.size(); ++i) {
        const auto& layer = arch.layers[i];
        std::vector<const Tensor*> ins;
        if (layer.inputs.empty()) {
            ins.push_back(&source);
        } else {
            for (const auto& in : layer.inputs) ins.push_back(&outputs[index_of.at(in)]);
        }
        outputs[i] = eval_layer(layer, ins, weights, counter);
        if (hook.type)
            quantize_values_serial(outputs[i].v.data(), outputs[i].v.size(), *hook.type);
    }
    return std::move(outputs.back());
}

WeightBundle prepare_weights(const WeightBundle& weights, const QuantizationHook& hook) {
    if (hook.type) return quantize_bundle(weights, *hook.type);
    return weights;
}

}  // namespace

Tensor forward(const Architecture& arch, const WeightBundle& weights, const Tensor& input,
               const QuantizationHook& hook) {
    NullCounter counter;
    const WeightBundle prepared = prepare_weights(weights, hook);
    return run_forward(arch, prepared, input, hook, counter);
}

Tensor forward_counted(const Architecture& arch, const WeightBundle& weights,
                       const Tensor& input, const QuantizationHook& hook, std::uint64_t& ops) {
    OpCounter counter;
    const WeightBundle prepared = prepare_weights(weights, hook);
    Tensor out = run_forward(arch, prepared, input, hook, counter);
    ops = counter.total;
    return out;
}

std::size_t argmax_class(const Tensor& output) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < output.v.size(); ++i)
        if (output.v[i] > output.v[best]) best = i;
    return best;
}

namespace {

template <bool Parallel>
double accuracy_impl(const Architecture& arch, const WeightBundle& weights,
                     const Dataset& dataset, const QuantizationHook& hook) {
    if (dataset.count() == 0) throw std::invalid_argument("empty dataset");
    if (!(dataset.shape == arch.input_shape))
        throw std::invalid_argument("dataset shape mismatch");
    const std::vector<Shape> shapes = propagate_shapes(arch);
    const std::int64_t classes =
        arch.layers.empty() ? arch.input_shape.elements() : shapes.back().elements();
    for (std::uint16_t label : dataset.labels)
        if (static_cast<std::int64_t>(label) >= classes)
            throw std::invalid_argument("label out of range of output classes");

    const WeightBundle prepared = prepare_weights(weights, hook);
    const std::int64_t n = static_cast<std::int64_t>(dataset.count());
    std::vector<unsigned char> correct(dataset.count(), 0);

    // Per-item forward is single-threaded; items are independent, so the
    // parallel and serial paths fill identical slots.
#pragma omp parallel for schedule(static) if (Parallel)
    for (std::int64_t i = 0; i < n; ++i) {
        NullCounter counter;
        QuantizationHook item_hook = hook;  // weights already projected
        Tensor out = run_forward(arch, prepared, dataset.item(static_cast<std::size_t>(i)),
                                 item_hook, counter);
        const std::size_t predicted = argmax_class(out);
        correct[static_cast<std::size_t>(i)] =
            predicted == dataset.labels[static_cast<std::size_t>(i)] ? 1 : 0;
    }

    std::uint64_t hits = 0;
    for (unsigned char c : correct) hits += c;
    return static_cast<double>(hits) / static_cast<double>(dataset.count());
}

}  // namespace

double classify_accuracy(const Architecture& arch, const WeightBundle& weights,
                         const Dataset& dataset, const QuantizationHook& hook) {
    return accuracy_impl<true>(arch, weights, dataset, hook);
}

double classify_accuracy_serial(const Architecture& arch, const WeightBundle& weights,
                                const Dataset& dataset, const QuantizationHook& hook) {
    return accuracy_impl<false>(arch, weights, dataset, hook);
}

std::vector<SweepRow> precision_sweep(const Architecture& arch, const WeightBundle& weights,
                                      const Dataset& dataset) {
    std::vector<SweepRow> rows;
    rows.push_back({"fp32", 32, classify_accuracy(arch, weights, dataset, {})});
    for (const ReducedFloatType& ty : type_grid()) {
        QuantizationHook hook{ty};
        rows.push_back({type_name(ty), ty.storage_width(),
                        classify_accuracy(arch, weights, dataset, hook)});
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "type,storage_bits,accuracy\n";
    for (const auto& row : rows) {
        out += row.type_name;
        out += ',';
        out += std::to_string(row.storage_bits);
        out += ',';
        out += format_double(row.accuracy);
        out += '\n';
    }
    return out;
}

std::vector<SweepRow> sweep_from_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const int type = table.column("type");
    const int bits = table.column("storage_bits");
    const int acc = table.column("accuracy");
    if (type < 0 || bits < 0 || acc < 0)
        throw std::runtime_error("sweep CSV misses required columns: " + path);
    std::vector<SweepRow> rows;
    for (const auto& r : table.rows)
        rows.push_back({r[type], std::stoi(r[bits]), std::stod(r[acc])});
    return rows;
}

}  // namespace nss
