#include "nss/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "nss/csv.hpp"

namespace nss {

const char* to_string(CostAxis axis) {
    switch (axis) {
        case CostAxis::parameter_count: return "parameter_count";
        case CostAxis::weight_bytes: return "weight_bytes";
        case CostAxis::flops: return "flops";
        case CostAxis::latency_ms: return "latency_ms";
    }
    return "?";
}

CostAxis axis_from_string(const std::string& name) {
    if (name == "parameter_count") return CostAxis::parameter_count;
    if (name == "weight_bytes") return CostAxis::weight_bytes;
    if (name == "flops") return CostAxis::flops;
    if (name == "latency_ms") return CostAxis::latency_ms;
    throw std::runtime_error("unknown cost axis: " + name);
}

namespace {

std::optional<double> try_axis_value(const CandidateRecord& r, CostAxis axis) {
    switch (axis) {
        case CostAxis::parameter_count: return static_cast<double>(r.parameter_count);
        case CostAxis::flops: return static_cast<double>(r.flops);
        case CostAxis::weight_bytes: return r.weight_bytes;
        case CostAxis::latency_ms: return r.latency_ms;
    }
    return std::nullopt;
}

}  // namespace

double axis_value(const CandidateRecord& record, CostAxis axis) {
    const auto v = try_axis_value(record, axis);
    if (!v)
        throw std::runtime_error("record '" + record.candidate_id + "' misses axis " +
                                 to_string(axis));
    return *v;
}

std::vector<CandidateRecord> pareto_front(const std::vector<CandidateRecord>& records,
                                          CostAxis cost_axis) {
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> cost(records.size());
    std::vector<double> quality(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        cost[i] = axis_value(records[i], cost_axis);
        if (!records[i].accuracy)
            throw std::runtime_error("record '" + records[i].candidate_id +
                                     "' misses accuracy");
        quality[i] = *records[i].accuracy;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (cost[a] != cost[b]) return cost[a] < cost[b];
        if (quality[a] != quality[b]) return quality[a] > quality[b];
        return records[a].candidate_id < records[b].candidate_id;
    });

    std::vector<CandidateRecord> front;
    double best_quality = -std::numeric_limits<double>::infinity();
    for (std::size_t idx : order) {
        if (quality[idx] > best_quality) {
            front.push_back(records[idx]);
            best_quality = quality[idx];
        }
    }
    return front;
}

std::optional<CandidateRecord> best_under_constraint(
    const std::vector<CandidateRecord>& records, const Constraint& constraint) {
    const CandidateRecord* best = nullptr;
    double best_axis = 0.0;
    for (const auto& r : records) {
        const auto v = try_axis_value(r, constraint.axis);
        if (!v || *v > constraint.bound || !r.accuracy) continue;
        if (!best || *r.accuracy > *best->accuracy ||
            (*r.accuracy == *best->accuracy &&
             (*v < best_axis || (*v == best_axis && r.candidate_id < best->candidate_id)))) {
            best = &r;
            best_axis = *v;
        }
    }
    if (!best) return std::nullopt;
    return *best;
}

namespace {

CandidateRecord priced_record(const ModelPrecisionTable& table, const PrecisionEntry& entry) {
    CandidateRecord r;
    r.candidate_id = table.candidate_id;
    r.space_id = table.space_id;
    r.parameter_count = table.parameter_count;
    r.flops = table.flops;
    r.accuracy = entry.accuracy;
    r.type_name = entry.type_name;
    r.weight_bytes =
        static_cast<double>(table.parameter_count) * static_cast<double>(entry.storage_bits) / 8.0;
    return r;
}

}  // namespace

std::vector<CandidateRecord> best_type_per_model(
    const std::vector<ModelPrecisionTable>& tables) {
    std::vector<CandidateRecord> out;
    for (const auto& table : tables) {
        if (table.entries.empty())
            throw std::runtime_error("missing precision table for '" + table.candidate_id + "'");
        std::vector<CandidateRecord> points;
        for (const auto& entry : table.entries) points.push_back(priced_record(table, entry));
        std::sort(points.begin(), points.end(), [](const CandidateRecord& a,
                                                   const CandidateRecord& b) {
            if (*a.weight_bytes != *b.weight_bytes) return *a.weight_bytes < *b.weight_bytes;
            if (*a.accuracy != *b.accuracy) return *a.accuracy > *b.accuracy;
            return *a.type_name < *b.type_name;
        });
        double best_quality = -std::numeric_limits<double>::infinity();
        for (const auto& p : points) {
            if (*p.accuracy > best_quality) {
                out.push_back(p);
                best_quality = *p.accuracy;
            }
        }
    }
    return out;
}

std::vector<CandidateRecord> fixed_type_records(const std::vector<ModelPrecisionTable>& tables,
                                                const std::string& type_name) {
    std::vector<CandidateRecord> out;
    for (const auto& table : tables) {
        const PrecisionEntry* found = nullptr;
        for (const auto& entry : table.entries)
            if (entry.type_name == type_name) { found = &entry; break; }
        if (!found)
            throw std::runtime_error("model '" + table.candidate_id + "' has no row for type " +
                                     type_name);
        out.push_back(priced_record(table, *found));
    }
    return out;
}

double front_value_at(const std::vector<CandidateRecord>& front, CostAxis axis, double budget) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : front) {
        if (axis_value(r, axis) <= budget && r.accuracy && *r.accuracy > best)
            best = *r.accuracy;
    }
    return best;
}

std::string records_csv(const std::vector<CandidateRecord>& records) {
    std::string out =
        "candidate_id,space_id,parameter_count,flops,accuracy,latency_ms,latency_source,type,"
        "weight_bytes\n";
    for (const auto& r : records) {
        out += r.candidate_id;
        out += ',';
        out += r.space_id;
        out += ',';
        out += format_u64(r.parameter_count);
        out += ',';
        out += format_u64(r.flops);
        out += ',';
        if (r.accuracy) out += format_double(*r.accuracy);
        out += ',';
        if (r.latency_ms) out += format_double(*r.latency_ms);
        out += ',';
        if (r.latency_ms) out += r.latency_predicted ? "predicted" : "measured";
        out += ',';
        if (r.type_name) out += *r.type_name;
        out += ',';
        if (r.weight_bytes) out += format_double(*r.weight_bytes);
        out += '\n';
    }
    return out;
}

std::vector<CandidateRecord> records_from_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const int id = table.column("candidate_id");
    const int params = table.column("parameter_count");
    const int flops = table.column("flops");
    if (id < 0 || params < 0 || flops < 0)
        throw std::runtime_error("records CSV misses required columns: " + path);
    const int space = table.column("space_id");
    const int acc = table.column("accuracy");
    const int lat = table.column("latency_ms");
    const int lat_src = table.column("latency_source");
    const int type = table.column("type");
    const int bytes = table.column("weight_bytes");

    std::vector<CandidateRecord> records;
    for (const auto& row : table.rows) {
        CandidateRecord r;
        r.candidate_id = row[id];
        if (space >= 0) r.space_id = row[space];
        r.parameter_count = std::stoull(row[params]);
        r.flops = std::stoull(row[flops]);
        if (acc >= 0 && !row[acc].empty()) r.accuracy = std::stod(row[acc]);
        if (lat >= 0 && !row[lat].empty()) r.latency_ms = std::stod(row[lat]);
        if (lat_src >= 0 && !row[lat_src].empty()) r.latency_predicted = row[lat_src] == "predicted";
        if (type >= 0 && !row[type].empty()) r.type_name = row[type];
        if (bytes >= 0 && !row[bytes].empty()) r.weight_bytes = std::stod(row[bytes]);
        records.push_back(std::move(r));
    }
    return records;
}

std::string front_csv(const std::vector<CandidateRecord>& front, CostAxis axis) {
    std::string out = "candidate_id,cost_axis,cost_value,accuracy,type\n";
    for (const auto& r : front) {
        out += r.candidate_id;
        out += ',';
        out += to_string(axis);
        out += ',';
        out += format_double(axis_value(r, axis));
        out += ',';
        out += format_double(r.accuracy.value_or(0.0));
        out += ',';
        out += r.type_name.value_or("fp32");
        out += '\n';
    }
    return out;
}

}  // namespace nss
