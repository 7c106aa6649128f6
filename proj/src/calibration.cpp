#include "nss/calibration.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nss/csv.hpp"

namespace nss {

using nlohmann::json;

namespace {

void check_records(const std::vector<MeasurementRecord>& records) {
    for (const auto& r : records) {
        if (r.flops == 0)
            throw std::invalid_argument("record '" + r.candidate_id + "' has zero flops");
        if (!(r.latency_ms_mean > 0.0))
            throw std::invalid_argument("record '" + r.candidate_id +
                                        "' has non-positive latency");
        if (r.repetitions < 1)
            throw std::invalid_argument("record '" + r.candidate_id + "' has zero repetitions");
    }
}

// Average ranks (1-based, ties share the mean rank).
std::vector<double> ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> out(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) out[order[k]] = rank;
        i = j + 1;
    }
    return out;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("degenerate input: constant variable in correlation");
    return sxy / std::sqrt(sxx * syy);
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    return pearson(ranks(xs), ranks(ys));
}

}  // namespace

LatencyModel fit_latency_model(const std::vector<MeasurementRecord>& records) {
    check_records(records);
    if (records.size() < 2)
        throw std::invalid_argument("latency fit needs at least 2 records");
    bool distinct = false;
    for (const auto& r : records)
        if (r.flops != records.front().flops) { distinct = true; break; }
    if (!distinct)
        throw std::invalid_argument("latency fit needs records with distinct flops");

    const double n = static_cast<double>(records.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& r : records) {
        sx += std::log10(static_cast<double>(r.flops));
        sy += std::log10(r.latency_ms_mean);
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxy = 0.0, sxx = 0.0;
    for (const auto& r : records) {
        const double dx = std::log10(static_cast<double>(r.flops)) - mx;
        const double dy = std::log10(r.latency_ms_mean) - my;
        sxy += dx * dy;
        sxx += dx * dx;
    }

    LatencyModel model;
    model.slope = sxy / sxx;
    model.intercept = my - model.slope * mx;
    double ss_res = 0.0;
    for (const auto& r : records) {
        const double predicted =
            model.intercept + model.slope * std::log10(static_cast<double>(r.flops));
        const double residual = std::log10(r.latency_ms_mean) - predicted;
        ss_res += residual * residual;
    }
    model.residual_std = std::sqrt(ss_res / n);
    model.n = records.size();
    return model;
}

double predict_latency(const LatencyModel& model, double flops) {
    if (!(flops > 0.0)) throw std::invalid_argument("flops must be positive");
    return std::pow(10.0, model.intercept + model.slope * std::log10(flops));
}

CorrelationReport correlations(const std::vector<MeasurementRecord>& records) {
    check_records(records);
    if (records.size() < 3)
        throw std::invalid_argument("correlations need at least 3 records");
    std::vector<double> params, flops, latency, log_params, log_flops, log_latency;
    for (const auto& r : records) {
        if (r.parameter_count == 0)
            throw std::invalid_argument("record '" + r.candidate_id +
                                        "' has zero parameters");
        params.push_back(static_cast<double>(r.parameter_count));
        flops.push_back(static_cast<double>(r.flops));
        latency.push_back(r.latency_ms_mean);
        log_params.push_back(std::log10(static_cast<double>(r.parameter_count)));
        log_flops.push_back(std::log10(static_cast<double>(r.flops)));
        log_latency.push_back(std::log10(r.latency_ms_mean));
    }
    CorrelationReport report;
    report.spearman_params = spearman(params, latency);
    report.spearman_flops = spearman(flops, latency);
    report.pearson_log_params = pearson(log_params, log_latency);
    report.pearson_log_flops = pearson(log_flops, log_latency);
    return report;
}

static const char* kMeasurementHeader =
    "candidate_id,parameter_count,flops,latency_ms_mean,latency_ms_std,repetitions,batch_size";

std::vector<MeasurementRecord> measurements_from_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    std::string header;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) header += ',';
        header += table.header[i];
    }
    if (header != kMeasurementHeader)
        throw std::runtime_error("measurement CSV header mismatch in " + path);
    std::vector<MeasurementRecord> records;
    for (const auto& row : table.rows) {
        MeasurementRecord r;
        r.candidate_id = row[0];
        r.parameter_count = std::stoull(row[1]);
        r.flops = std::stoull(row[2]);
        r.latency_ms_mean = std::stod(row[3]);
        r.latency_ms_std = std::stod(row[4]);
        r.repetitions = std::stoull(row[5]);
        r.batch_size = std::stoull(row[6]);
        records.push_back(std::move(r));
    }
    return records;
}

std::string measurements_csv(const std::vector<MeasurementRecord>& records) {
    std::string out = std::string(kMeasurementHeader) + "\n";
    for (const auto& r : records) {
        out += r.candidate_id;
        out += ',';
        out += format_u64(r.parameter_count);
        out += ',';
        out += format_u64(r.flops);
        out += ',';
        out += format_double(r.latency_ms_mean);
        out += ',';
        out += format_double(r.latency_ms_std);
        out += ',';
        out += format_u64(r.repetitions);
        out += ',';
        out += format_u64(r.batch_size);
        out += '\n';
    }
    return out;
}

std::string latency_model_to_json(const LatencyModel& model, const CorrelationReport* report) {
    json j;
    j["a"] = model.intercept;
    j["b"] = model.slope;
    j["residual_std"] = model.residual_std;
    j["n"] = model.n;
    if (report) {
        j["spearman_params"] = report->spearman_params;
        j["spearman_flops"] = report->spearman_flops;
        j["pearson_log_params"] = report->pearson_log_params;
        j["pearson_log_flops"] = report->pearson_log_flops;
    }
    return j.dump(2) + "\n";
}

LatencyModel latency_model_from_json(const std::string& text) {
    const json j = json::parse(text);
    LatencyModel model;
    model.intercept = j.at("a").get<double>();
    model.slope = j.at("b").get<double>();
    model.residual_std = j.at("residual_std").get<double>();
    model.n = j.at("n").get<std::uint64_t>();
    return model;
}

}  // namespace nss
