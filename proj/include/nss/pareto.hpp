#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nss {

struct CandidateRecord {
    std::string candidate_id;
    std::string space_id;
    std::uint64_t parameter_count = 0;
    std::uint64_t flops = 0;
    std::optional<double> accuracy;    // in [0, 1]
    std::optional<double> latency_ms;  // measured or predicted
    bool latency_predicted = false;
    // Precision pricing: "fp32" or "T{w}_{t}", with the matching weight
    // storage in bytes (parameter_count * storage_width / 8).
    std::optional<std::string> type_name;
    std::optional<double> weight_bytes;
};

enum class CostAxis { parameter_count, weight_bytes, flops, latency_ms };

const char* to_string(CostAxis axis);
CostAxis axis_from_string(const std::string& name);

// Value of the cost axis for a record; throws when the record lacks it.
double axis_value(const CandidateRecord& record, CostAxis axis);

struct Constraint {
    CostAxis axis = CostAxis::parameter_count;
    double bound = 0.0;  // upper limit, > 0
};

// Non-dominated records over (cost, accuracy): r survives iff no other
// record has cost <= and accuracy >= with at least one strict; exact ties
// on both axes keep the lexicographically smallest candidate_id. Sorted by
// cost ascending. Throws on records missing either axis.
std::vector<CandidateRecord> pareto_front(const std::vector<CandidateRecord>& records,
                                          CostAxis cost_axis);

// Best-accuracy record with axis value <= bound (ties: smaller axis value,
// then id). Records without the axis or without accuracy cannot satisfy
// the constraint and are skipped. Empty optional when nothing qualifies.
std::optional<CandidateRecord> best_under_constraint(
    const std::vector<CandidateRecord>& records, const Constraint& constraint);

struct PrecisionEntry {
    std::string type_name;  // "fp32" or grid type
    int storage_bits = 32;
    double accuracy = 0.0;
};

// One model's precision sweep result.
struct ModelPrecisionTable {
    std::string candidate_id;
    std::string space_id;
    std::uint64_t parameter_count = 0;
    std::uint64_t flops = 0;
    std::vector<PrecisionEntry> entries;
};

// Re-prices every model at every swept type and keeps the per-model Pareto
// set over (weight_bytes, accuracy); fronts over the union dominate or
// equal any fixed-type front.
std::vector<CandidateRecord> best_type_per_model(
    const std::vector<ModelPrecisionTable>& tables);

// Each model priced at one fixed type (throws when a table lacks it).
std::vector<CandidateRecord> fixed_type_records(const std::vector<ModelPrecisionTable>& tables,
                                                const std::string& type_name);

// Best accuracy available from a front within a cost budget; -infinity
// when the budget is below every member.
double front_value_at(const std::vector<CandidateRecord>& front, CostAxis axis, double budget);

// Records CSV: candidate_id,space_id,parameter_count,flops plus optional
// accuracy,latency_ms,latency_source,type,weight_bytes columns.
std::string records_csv(const std::vector<CandidateRecord>& records);
std::vector<CandidateRecord> records_from_csv(const std::string& path);

// Front CSV: candidate_id,cost_axis,cost_value,accuracy,type.
std::string front_csv(const std::vector<CandidateRecord>& front, CostAxis axis);

}  // namespace nss
