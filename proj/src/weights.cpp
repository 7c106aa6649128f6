#include "nss/weights.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "nss/rng.hpp"

namespace nss {

using nlohmann::json;

std::uint64_t WeightBundle::element_count() const {
    std::uint64_t total = 0;
    for (const auto& layer : layers)
        total += layer.weights.values.size() + layer.bias.values.size();
    return total;
}

const LayerWeights* WeightBundle::find(const std::string& layer_id) const {
    for (const auto& layer : layers)
        if (layer.layer_id == layer_id) return &layer;
    return nullptr;
}

namespace {

std::uint64_t shape_elements(const std::vector<std::int64_t>& shape) {
    std::uint64_t n = 1;
    for (std::int64_t d : shape) n *= static_cast<std::uint64_t>(d);
    return n;
}

WeightBundle build_bundle(const Architecture& arch) {
    std::unordered_map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < arch.layers.size(); ++i) index_of[arch.layers[i].id] = i;
    const std::vector<Shape> shapes = propagate_shapes(arch);

    WeightBundle bundle;
    for (std::size_t i = 0; i < arch.layers.size(); ++i) {
        const auto& layer = arch.layers[i];
        if (layer.kind != LayerKind::conv2d && layer.kind != LayerKind::dense) continue;
        const Shape in = layer.inputs.empty() ? arch.input_shape
                                              : shapes[index_of.at(layer.inputs.front())];
        LayerWeights lw;
        lw.layer_id = layer.id;
        if (layer.kind == LayerKind::conv2d) {
            lw.weights.shape = {*layer.out_channels, in.c, *layer.kernel_h, *layer.kernel_w};
        } else {
            lw.weights.shape = {*layer.out_channels, in.elements()};
        }
        lw.bias.shape = {*layer.out_channels};
        lw.weights.values.assign(shape_elements(lw.weights.shape), 0.0f);
        lw.bias.values.assign(shape_elements(lw.bias.shape), 0.0f);
        bundle.layers.push_back(std::move(lw));
    }
    return bundle;
}

}  // namespace

WeightBundle zero_bundle(const Architecture& arch) { return build_bundle(arch); }

WeightBundle random_bundle(const Architecture& arch, std::uint64_t seed) {
    WeightBundle bundle = build_bundle(arch);
    Rng rng(seed);
    for (auto& layer : bundle.layers) {
        std::uint64_t fan_in = 1;
        for (std::size_t d = 1; d < layer.weights.shape.size(); ++d)
            fan_in *= static_cast<std::uint64_t>(layer.weights.shape[d]);
        const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (float& w : layer.weights.values)
            w = static_cast<float>(rng.uniform_real(-scale, scale));
        for (float& b : layer.bias.values)
            b = static_cast<float>(rng.uniform_real(-0.1, 0.1));
    }
    return bundle;
}

WeightBundle quantize_bundle(WeightBundle bundle, const ReducedFloatType& ty) {
    for (auto& layer : bundle.layers) {
        quantize_values(layer.weights.values.data(), layer.weights.values.size(), ty);
        quantize_values(layer.bias.values.data(), layer.bias.values.size(), ty);
    }
    return bundle;
}

namespace {

constexpr char kBundleMagic[8] = {'N', 'S', 'W', 'B', '0', '0', '0', '1'};

void put_u32le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32le(std::string& out, float f) {
    put_u32le(out, std::bit_cast<std::uint32_t>(f));
}

std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void save_bundle(const std::string& path, const WeightBundle& bundle) {
    json manifest;
    manifest["tensors"] = json::array();
    std::string data;
    auto append = [&](const std::string& layer_id, const char* name, const WeightTensor& t) {
        json entry;
        entry["layer"] = layer_id;
        entry["name"] = name;
        entry["shape"] = t.shape;
        entry["offset"] = data.size();
        manifest["tensors"].push_back(std::move(entry));
        for (float f : t.values) put_f32le(data, f);
    };
    for (const auto& layer : bundle.layers) {
        append(layer.layer_id, "weights", layer.weights);
        append(layer.layer_id, "bias", layer.bias);
    }

    const std::string manifest_text = manifest.dump();
    std::string out(kBundleMagic, sizeof(kBundleMagic));
    put_u32le(out, static_cast<std::uint32_t>(manifest_text.size()));
    out += manifest_text;
    out += data;

    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write weight bundle: " + path);
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw std::runtime_error("write failed: " + path);
}

WeightBundle load_bundle(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open weight bundle: " + path);
    std::string blob((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());

    if (blob.size() < 12 || std::memcmp(blob.data(), kBundleMagic, 8) != 0)
        throw std::runtime_error("bad weight bundle magic: " + path);
    const auto* bytes = reinterpret_cast<const unsigned char*>(blob.data());
    const std::uint32_t manifest_len = get_u32le(bytes + 8);
    if (blob.size() < 12 + static_cast<std::size_t>(manifest_len))
        throw std::runtime_error("truncated weight bundle manifest: " + path);
    const json manifest = json::parse(blob.substr(12, manifest_len));
    const std::size_t data_start = 12 + manifest_len;

    WeightBundle bundle;
    std::unordered_map<std::string, std::size_t> index_of;
    for (const auto& entry : manifest.at("tensors")) {
        const std::string layer_id = entry.at("layer").get<std::string>();
        const std::string name = entry.at("name").get<std::string>();
        WeightTensor t;
        t.shape = entry.at("shape").get<std::vector<std::int64_t>>();
        const std::uint64_t offset = entry.at("offset").get<std::uint64_t>();
        const std::uint64_t count = shape_elements(t.shape);
        if (data_start + offset + count * 4 > blob.size())
            throw std::runtime_error("weight tensor out of bounds: " + path);
        t.values.resize(count);
        for (std::uint64_t i = 0; i < count; ++i)
            t.values[i] = std::bit_cast<float>(
                get_u32le(bytes + data_start + offset + i * 4));

        auto it = index_of.find(layer_id);
        if (it == index_of.end()) {
            index_of[layer_id] = bundle.layers.size();
            bundle.layers.push_back(LayerWeights{layer_id, {}, {}});
            it = index_of.find(layer_id);
        }
        if (name == "weights")
            bundle.layers[it->second].weights = std::move(t);
        else if (name == "bias")
            bundle.layers[it->second].bias = std::move(t);
        else
            throw std::runtime_error("unknown tensor name '" + name + "' in " + path);
    }
    return bundle;
}

}  // namespace nss
