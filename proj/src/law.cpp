#include "nss/law.hpp"

#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nss/csv.hpp"

namespace nss {

using nlohmann::json;

const char* to_string(MetricKind m) {
    return m == MetricKind::parameter_count ? "parameter_count" : "flops";
}

MetricKind metric_from_string(const std::string& name) {
    if (name == "parameter_count") return MetricKind::parameter_count;
    if (name == "flops") return MetricKind::flops;
    throw std::runtime_error("unknown metric: " + name);
}

std::uint64_t metric_of(const Architecture& arch, MetricKind metric) {
    return metric == MetricKind::parameter_count ? count_parameters(arch) : count_flops(arch);
}

SamplingLaw full_rating_law(const SearchSpace& space) {
    SamplingLaw law;
    law.space_id = space.id;
    for (const auto& v : space.variables)
        law.ranges.push_back({v.name, static_cast<double>(v.rating_min()),
                              static_cast<double>(v.rating_max())});
    return law;
}

SamplingLaw bind_law(const SearchSpace& space, const SamplingLaw& law) {
    if (!law.space_id.empty() && law.space_id != space.id)
        throw std::runtime_error("law belongs to space '" + law.space_id + "', not '" +
                                 space.id + "'");
    if (law.ranges.size() != space.variables.size())
        throw std::runtime_error("law does not cover the space's variables");
    SamplingLaw bound;
    bound.space_id = space.id;
    for (const auto& v : space.variables) {
        const LawRange* found = nullptr;
        for (const auto& r : law.ranges)
            if (r.variable == v.name) { found = &r; break; }
        if (!found) throw std::runtime_error("law misses variable: " + v.name);
        bound.ranges.push_back(*found);
    }
    return bound;
}

std::vector<std::int64_t> admissible_values(const VariableSpec& var, double low, double high) {
    std::vector<std::int64_t> values;
    if (var.kind == VariableSpec::Kind::choice) {
        for (std::int64_t c : var.choices)
            if (static_cast<double>(c) >= low && static_cast<double>(c) <= high)
                values.push_back(c);
    } else {
        const std::int64_t lo = std::max<std::int64_t>(
            var.min, static_cast<std::int64_t>(std::ceil(low)));
        const std::int64_t hi = std::min<std::int64_t>(
            var.max, static_cast<std::int64_t>(std::floor(high)));
        for (std::int64_t v = lo; v <= hi; ++v) values.push_back(v);
    }
    return values;
}

SamplingLaw repair_law(const SearchSpace& space, SamplingLaw law) {
    law = bind_law(space, law);
    for (std::size_t i = 0; i < law.ranges.size(); ++i) {
        const VariableSpec& var = space.variables[i];
        LawRange& r = law.ranges[i];
        if (r.low > r.high) std::swap(r.low, r.high);
        r.low = std::clamp(r.low, static_cast<double>(var.rating_min()),
                           static_cast<double>(var.rating_max()));
        r.high = std::clamp(r.high, static_cast<double>(var.rating_min()),
                            static_cast<double>(var.rating_max()));
        if (admissible_values(var, r.low, r.high).empty()) {
            // Widen to the legal value nearest the midpoint (ties toward
            // the smaller value).
            const double mid = (r.low + r.high) / 2.0;
            std::int64_t best = var.rating_min();
            double best_dist = std::abs(static_cast<double>(best) - mid);
            auto consider = [&](std::int64_t v) {
                const double d = std::abs(static_cast<double>(v) - mid);
                if (d < best_dist) { best = v; best_dist = d; }
            };
            if (var.kind == VariableSpec::Kind::choice) {
                for (std::int64_t c : var.choices) consider(c);
            } else {
                consider(std::clamp(static_cast<std::int64_t>(std::llround(mid)),
                                    var.min, var.max));
            }
            r.low = std::min(r.low, static_cast<double>(best));
            r.high = std::max(r.high, static_cast<double>(best));
        }
    }
    return law;
}

Assignment draw_assignment_with_law(const SearchSpace& space, const SamplingLaw& law, Rng& rng) {
    if (law.ranges.size() != space.variables.size())
        throw std::runtime_error("law does not cover the space's variables");
    Assignment a;
    for (std::size_t i = 0; i < space.variables.size(); ++i) {
        const VariableSpec& var = space.variables[i];
        const LawRange& r = law.ranges[i];
        if (r.variable != var.name)
            throw std::runtime_error("law range order mismatch at " + var.name);
        if (var.kind == VariableSpec::Kind::choice) {
            const auto values = admissible_values(var, r.low, r.high);
            if (values.empty())
                throw std::runtime_error("empty sampling range for variable " + var.name);
            a[var.name] = values[rng.below(values.size())];
        } else {
            const std::int64_t lo = std::max<std::int64_t>(
                var.min, static_cast<std::int64_t>(std::ceil(r.low)));
            const std::int64_t hi = std::min<std::int64_t>(
                var.max, static_cast<std::int64_t>(std::floor(r.high)));
            if (lo > hi)
                throw std::runtime_error("empty sampling range for variable " + var.name);
            a[var.name] = rng.uniform_int(lo, hi);
        }
    }
    return a;
}

Architecture sample_with_law(const SearchSpace& space, const SamplingLaw& law,
                             std::uint64_t seed) {
    const SamplingLaw bound = bind_law(space, law);
    Rng rng(seed);
    return materialize(space, draw_assignment_with_law(space, bound, rng));
}

std::vector<std::uint64_t> draw_metrics_serial(const SearchSpace& space, const SamplingLaw& law,
                                               MetricKind metric, std::uint64_t n,
                                               std::uint64_t seed) {
    const SamplingLaw bound = bind_law(space, law);
    std::vector<std::uint64_t> samples(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        Rng rng(mix64(seed, i));
        samples[i] = metric_of(materialize(space, draw_assignment_with_law(space, bound, rng)),
                               metric);
    }
    return samples;
}

std::vector<std::uint64_t> draw_metrics(const SearchSpace& space, const SamplingLaw& law,
                                        MetricKind metric, std::uint64_t n, std::uint64_t seed) {
    const SamplingLaw bound = bind_law(space, law);
    std::vector<std::uint64_t> samples(n);
    const std::int64_t count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
        Rng rng(mix64(seed, static_cast<std::uint64_t>(i)));
        samples[i] = metric_of(materialize(space, draw_assignment_with_law(space, bound, rng)),
                               metric);
    }
    return samples;
}

LawStatistics statistics_from(MetricKind metric, const std::vector<std::uint64_t>& samples) {
    if (samples.empty()) throw std::invalid_argument("statistics need at least one sample");
    double sum = 0.0;
    for (std::uint64_t s : samples) sum += static_cast<double>(s);
    const double mu = sum / static_cast<double>(samples.size());
    double sq = 0.0;
    for (std::uint64_t s : samples) {
        const double d = static_cast<double>(s) - mu;
        sq += d * d;
    }
    LawStatistics stats;
    stats.metric = metric;
    stats.mu = mu;
    stats.sigma = std::sqrt(sq / static_cast<double>(samples.size()));
    stats.n = samples.size();
    return stats;
}

LawStatistics estimate_statistics(const SearchSpace& space, const SamplingLaw& law,
                                  MetricKind metric, std::uint64_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("estimate_statistics needs n >= 1");
    return statistics_from(metric, draw_metrics(space, law, metric, n, seed));
}

double law_cost(const LawStatistics& stats, const Window& window) {
    if (!(window.tau1 < window.tau2))
        throw std::invalid_argument("window requires tau1 < tau2");
    return std::abs(stats.mu - stats.sigma - window.tau1) +
           std::abs(stats.mu + stats.sigma - window.tau2);
}

std::string law_to_json(const SamplingLaw& law, bool pretty) {
    json j = json::array();
    for (const auto& r : law.ranges) {
        json rj;
        rj["variable"] = r.variable;
        rj["low"] = r.low;
        rj["high"] = r.high;
        j.push_back(std::move(rj));
    }
    return pretty ? j.dump(2) + "\n" : j.dump();
}

SamplingLaw law_from_json(const std::string& text) {
    json j = json::parse(text);
    if (!j.is_array()) throw std::runtime_error("law document must be a JSON array");
    SamplingLaw law;
    for (const auto& rj : j) {
        for (auto it = rj.begin(); it != rj.end(); ++it)
            if (it.key() != "variable" && it.key() != "low" && it.key() != "high")
                throw std::runtime_error("unknown field '" + it.key() + "' in law range");
        LawRange r;
        r.variable = rj.at("variable").get<std::string>();
        r.low = rj.at("low").get<double>();
        r.high = rj.at("high").get<double>();
        if (r.low > r.high)
            throw std::runtime_error("law range has low > high for " + r.variable);
        law.ranges.push_back(std::move(r));
    }
    return law;
}

std::string stats_csv_header() { return "law_id,metric,mu,sigma,n,seed"; }

std::string stats_csv_row(const std::string& law_id, const LawStatistics& stats,
                          std::uint64_t seed) {
    return law_id + "," + to_string(stats.metric) + "," + format_double(stats.mu) + "," +
           format_double(stats.sigma) + "," + format_u64(stats.n) + "," + format_u64(seed);
}

}  // namespace nss
