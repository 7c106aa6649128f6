#include "nss/dataset.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace nss {

Tensor Dataset::item(std::size_t i) const {
    Tensor t(shape);
    const std::size_t n = t.v.size();
    std::memcpy(t.v.data(), inputs.data() + i * n, n * sizeof(float));
    return t;
}

namespace {

constexpr char kDatasetMagic[8] = {'N', 'S', 'D', 'S', '0', '0', '0', '1'};

void put_u32le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void save_dataset(const std::string& path, const Dataset& ds) {
    if (ds.inputs.size() != ds.count() * static_cast<std::size_t>(ds.shape.elements()))
        throw std::runtime_error("dataset input size inconsistent with shape and count");
    std::string out(kDatasetMagic, sizeof(kDatasetMagic));
    put_u32le(out, static_cast<std::uint32_t>(ds.count()));
    put_u32le(out, static_cast<std::uint32_t>(ds.shape.c));
    put_u32le(out, static_cast<std::uint32_t>(ds.shape.h));
    put_u32le(out, static_cast<std::uint32_t>(ds.shape.w));
    for (float f : ds.inputs) put_u32le(out, std::bit_cast<std::uint32_t>(f));
    for (std::uint16_t label : ds.labels) {
        out.push_back(static_cast<char>(label & 0xff));
        out.push_back(static_cast<char>((label >> 8) & 0xff));
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write dataset: " + path);
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw std::runtime_error("write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open dataset: " + path);
    std::string blob((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
    if (blob.size() < 24 || std::memcmp(blob.data(), kDatasetMagic, 8) != 0)
        throw std::runtime_error("bad dataset magic: " + path);
    const auto* bytes = reinterpret_cast<const unsigned char*>(blob.data());
    const std::uint32_t count = get_u32le(bytes + 8);
    Dataset ds;
    ds.shape = Shape{get_u32le(bytes + 12), get_u32le(bytes + 16), get_u32le(bytes + 20)};
    const std::size_t values = static_cast<std::size_t>(count) *
                               static_cast<std::size_t>(ds.shape.elements());
    if (blob.size() != 24 + values * 4 + static_cast<std::size_t>(count) * 2)
        throw std::runtime_error("dataset size mismatch: " + path);
    ds.inputs.resize(values);
    for (std::size_t i = 0; i < values; ++i)
        ds.inputs[i] = std::bit_cast<float>(get_u32le(bytes + 24 + i * 4));
    const std::size_t label_start = 24 + values * 4;
    ds.labels.resize(count);
    for (std::size_t i = 0; i < count; ++i)
        ds.labels[i] = static_cast<std::uint16_t>(
            bytes[label_start + 2 * i] |
            (static_cast<std::uint16_t>(bytes[label_start + 2 * i + 1]) << 8));
    return ds;
}

}  // namespace nss
