#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nss {

struct MeasurementRecord {
    std::string candidate_id;
    std::uint64_t parameter_count = 0;
    std::uint64_t flops = 0;
    double latency_ms_mean = 0.0;
    double latency_ms_std = 0.0;
    std::uint64_t repetitions = 10;
    std::uint64_t batch_size = 1;
};

// log10(latency_ms) = a + b * log10(flops), ordinary least squares.
struct LatencyModel {
    double intercept = 0.0;  // a
    double slope = 0.0;      // b
    double residual_std = 0.0;
    std::uint64_t n = 0;
};

struct CorrelationReport {
    double spearman_params = 0.0;
    double spearman_flops = 0.0;
    double pearson_log_params = 0.0;
    double pearson_log_flops = 0.0;
};

// Requires >= 2 records with distinct flops; zero flops or non-positive
// latencies are rejected.
LatencyModel fit_latency_model(const std::vector<MeasurementRecord>& records);

// 10^(a + b * log10(flops)); flops must be positive.
double predict_latency(const LatencyModel& model, double flops);

// Rank correlations of latency against each analytical property, plus
// Pearson coefficients in log10-log10 space. Requires >= 3 records.
CorrelationReport correlations(const std::vector<MeasurementRecord>& records);

// Normative header:
// candidate_id,parameter_count,flops,latency_ms_mean,latency_ms_std,repetitions,batch_size
std::vector<MeasurementRecord> measurements_from_csv(const std::string& path);
std::string measurements_csv(const std::vector<MeasurementRecord>& records);

std::string latency_model_to_json(const LatencyModel& model, const CorrelationReport* report);
LatencyModel latency_model_from_json(const std::string& text);

}  // namespace nss
