#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nss/law.hpp"
#include "nss/rng.hpp"
#include "nss/space.hpp"

namespace nss {

struct GeneticConfig {
    std::uint64_t n_init = 100;
    std::uint64_t n_steps = 900;
    std::uint64_t n_eval = 10;
    std::uint64_t tournament_size = 3;
    // Per-variable mutation probability and maximum bound shift as a
    // fraction of the variable's rating span.
    double mutation_prob = 0.3;
    double mutation_rel_shift = 0.25;
    std::uint64_t seed = 0;
};

struct ScoredLaw {
    SamplingLaw law;
    double cost = 0.0;
};

struct SearchLogRow {
    std::uint64_t step = 0;
    double best_cost = 0.0;
    double offspring_cost = 0.0;
    int replaced = 0;
};

struct SearchResult {
    std::vector<ScoredLaw> population;
    std::vector<SearchLogRow> log;
    std::uint64_t networks_evaluated = 0;
};

// Random law with uniform bounds inside the ratings.
SamplingLaw random_law(const SearchSpace& space, Rng& rng);

// Independently mutates each variable with the configured probability;
// shifted bounds are clipped to ratings, reordered, and kept non-empty.
SamplingLaw mutate(const SearchSpace& space, const SamplingLaw& law,
                   const GeneticConfig& config, Rng& rng);

// Draws `size` members uniformly with replacement and returns the index of
// the lowest-cost one; ties go to the lower index.
std::size_t tournament_select(const std::vector<double>& costs, std::uint64_t size, Rng& rng);

// Tournament-selection GA with single-offspring steps and replace-worst
// elitist acceptance. Evaluates exactly (n_init + n_steps) * n_eval
// networks; best-so-far cost is non-increasing over the log.
SearchResult run_genetic_search(const SearchSpace& space, MetricKind metric,
                                const Window& window, const GeneticConfig& config);

struct ConstraintGrid {
    std::vector<std::uint64_t> points;
};

// Splits each decade into [tau, 2 tau, 5 tau, 10 tau]; the default grid
// tau = 10^3 .. 10^6 has 13 points and 12 sliding windows.
ConstraintGrid constraint_grid(std::uint64_t low_decade = 1000,
                               std::uint64_t high_decade = 1000000);
std::vector<Window> sliding_windows(const ConstraintGrid& grid);

// Spectral clustering of a law population (bound vectors normalized by
// rating spans, RBF affinity with median-distance bandwidth, normalized
// Laplacian + k-means). Returns the lowest-cost law per cluster, sorted by
// cost. Throws when the population is smaller than k.
std::vector<ScoredLaw> cluster_laws(const SearchSpace& space,
                                    const std::vector<ScoredLaw>& population, std::uint64_t k);

struct LibraryLaw {
    std::string law_id;
    SamplingLaw law;
    double cost = 0.0;
    std::uint64_t window_index = 0;
};

struct ArchiveRow {
    std::string candidate_id;
    std::string space_id;
    std::string law_id;
    std::uint64_t parameter_count = 0;
    std::uint64_t flops = 0;
};

struct ElaborateConfig {
    GeneticConfig genetic;
    MetricKind metric = MetricKind::parameter_count;
    std::uint64_t clusters = 10;
    std::uint64_t n_val = 100;
    ConstraintGrid grid = constraint_grid();
};

struct ElaborateResult {
    std::vector<Window> windows;
    std::vector<SearchResult> searches;
    std::vector<LibraryLaw> laws;
    std::vector<ArchiveRow> archive;
};

// One genetic search per sliding window, k representative laws each, and
// n_val validation samples per law; defaults give 12 x 10 x 100 = 12000
// archived candidates.
ElaborateResult elaborate_space(const SearchSpace& space, const ElaborateConfig& config);

std::string search_log_csv(const std::vector<SearchLogRow>& log);
std::string archive_csv(const std::vector<ArchiveRow>& archive);
std::vector<ArchiveRow> archive_from_csv(const std::string& path);

}  // namespace nss
