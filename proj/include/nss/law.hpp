#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nss/arch.hpp"
#include "nss/rng.hpp"
#include "nss/space.hpp"

namespace nss {

enum class MetricKind { parameter_count, flops };

const char* to_string(MetricKind m);
MetricKind metric_from_string(const std::string& name);
std::uint64_t metric_of(const Architecture& arch, MetricKind metric);

struct LawRange {
    std::string variable;
    double low = 0.0;
    double high = 0.0;

    bool operator==(const LawRange&) const = default;
};

// Ordered set of per-variable uniform ranges; the genome of the genetic
// search. Ranges are kept in the space's variable order and clipped inside
// absolute ratings.
struct SamplingLaw {
    std::string space_id;
    std::vector<LawRange> ranges;

    bool operator==(const SamplingLaw&) const = default;
};

struct LawStatistics {
    MetricKind metric = MetricKind::parameter_count;
    double mu = 0.0;
    double sigma = 0.0;
    std::uint64_t n = 0;
};

struct Window {
    double tau1 = 0.0;
    double tau2 = 0.0;
};

// Law spanning the full ratings of every variable; sampling it coincides
// with sample_uniform.
SamplingLaw full_rating_law(const SearchSpace& space);

// Throws unless the law names exactly the space's variables; returns the
// law with ranges in the space's variable order.
SamplingLaw bind_law(const SearchSpace& space, const SamplingLaw& law);

// Clips every range into the absolute ratings, reorders bounds, and when a
// range contains no legal value widens it minimally to the nearest one.
SamplingLaw repair_law(const SearchSpace& space, SamplingLaw law);

// Legal values of one variable inside [low, high], in domain order.
std::vector<std::int64_t> admissible_values(const VariableSpec& var, double low, double high);

Assignment draw_assignment_with_law(const SearchSpace& space, const SamplingLaw& law, Rng& rng);

// Each variable drawn uniformly from the law's range; deterministic per
// seed. Throws on space/law mismatch or on an empty range.
Architecture sample_with_law(const SearchSpace& space, const SamplingLaw& law,
                             std::uint64_t seed);

// n independent draws with per-draw seeds mix64(seed, i); OpenMP-parallel
// over draws, bit-identical to the serial reference.
std::vector<std::uint64_t> draw_metrics(const SearchSpace& space, const SamplingLaw& law,
                                        MetricKind metric, std::uint64_t n, std::uint64_t seed);
std::vector<std::uint64_t> draw_metrics_serial(const SearchSpace& space, const SamplingLaw& law,
                                               MetricKind metric, std::uint64_t n,
                                               std::uint64_t seed);

// Sample mean and population (divide-by-n) standard deviation in draw
// order.
LawStatistics statistics_from(MetricKind metric, const std::vector<std::uint64_t>& samples);
LawStatistics estimate_statistics(const SearchSpace& space, const SamplingLaw& law,
                                  MetricKind metric, std::uint64_t n, std::uint64_t seed);

// c((mu, sigma), (tau1, tau2)) = |mu - sigma - tau1| + |mu + sigma - tau2|.
// Requires tau1 < tau2; single-sided windows are rejected.
double law_cost(const LawStatistics& stats, const Window& window);

// Law file: JSON list of {"variable", "low", "high"}.
std::string law_to_json(const SamplingLaw& law, bool pretty = false);
SamplingLaw law_from_json(const std::string& text);

std::string stats_csv_header();
std::string stats_csv_row(const std::string& law_id, const LawStatistics& stats,
                          std::uint64_t seed);

}  // namespace nss
