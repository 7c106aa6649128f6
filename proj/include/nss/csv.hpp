#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nss {

// Shortest round-trip decimal text for a double (std::to_chars), so CSV
// output is deterministic and parses back to the same bits.
std::string format_double(double v);
std::string format_u64(std::uint64_t v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a header column, -1 when absent.
    int column(const std::string& name) const;
};

// Strict reader for the artifact's comma-separated files: no quoting, no
// embedded commas, one header line. Throws std::runtime_error on
// malformed input (ragged rows, empty file).
CsvTable read_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// FNV-1a 64-bit, used for content ids and manifest hashes.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::string hex64(std::uint64_t v);

}  // namespace nss
