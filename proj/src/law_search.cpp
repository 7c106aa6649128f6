#include "nss/law_search.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "nss/csv.hpp"

namespace nss {

SamplingLaw random_law(const SearchSpace& space, Rng& rng) {
    SamplingLaw law;
    law.space_id = space.id;
    for (const auto& v : space.variables) {
        const double lo = static_cast<double>(v.rating_min());
        const double hi = static_cast<double>(v.rating_max());
        double a = rng.uniform_real(lo, hi);
        double b = rng.uniform_real(lo, hi);
        if (a > b) std::swap(a, b);
        law.ranges.push_back({v.name, a, b});
    }
    return repair_law(space, law);
}

SamplingLaw mutate(const SearchSpace& space, const SamplingLaw& law,
                   const GeneticConfig& config, Rng& rng) {
    SamplingLaw out = law;
    for (std::size_t i = 0; i < space.variables.size(); ++i) {
        if (rng.uniform01() >= config.mutation_prob) continue;
        const VariableSpec& var = space.variables[i];
        const double span =
            static_cast<double>(var.rating_max() - var.rating_min());
        const double limit = config.mutation_rel_shift * span;
        out.ranges[i].low += rng.uniform_real(-limit, limit);
        out.ranges[i].high += rng.uniform_real(-limit, limit);
    }
    return repair_law(space, out);
}

std::size_t tournament_select(const std::vector<double>& costs, std::uint64_t size, Rng& rng) {
    if (costs.empty()) throw std::invalid_argument("empty population");
    std::size_t best = costs.size();
    for (std::uint64_t j = 0; j < size; ++j) {
        const std::size_t i = static_cast<std::size_t>(rng.below(costs.size()));
        if (best == costs.size() || costs[i] < costs[best] ||
            (costs[i] == costs[best] && i < best))
            best = i;
    }
    return best;
}

SearchResult run_genetic_search(const SearchSpace& space, MetricKind metric,
                                const Window& window, const GeneticConfig& config) {
    if (!(window.tau1 < window.tau2))
        throw std::invalid_argument("window requires tau1 < tau2");
    if (config.n_init == 0 || config.n_eval == 0 || config.tournament_size == 0)
        throw std::invalid_argument("genetic config counts must be positive");

    SearchResult result;
    Rng ga_rng(config.seed);
    std::uint64_t eval_index = 0;

    auto evaluate = [&](const SamplingLaw& law) {
        const std::uint64_t eval_seed = mix64(config.seed, eval_index++);
        const LawStatistics stats =
            estimate_statistics(space, law, metric, config.n_eval, eval_seed);
        result.networks_evaluated += config.n_eval;
        return law_cost(stats, window);
    };

    std::vector<SamplingLaw> laws;
    std::vector<double> costs;
    laws.reserve(config.n_init);
    for (std::uint64_t i = 0; i < config.n_init; ++i) laws.push_back(random_law(space, ga_rng));
    for (const auto& law : laws) costs.push_back(evaluate(law));

    double best = *std::min_element(costs.begin(), costs.end());
    for (std::uint64_t step = 1; step <= config.n_steps; ++step) {
        const std::size_t parent = tournament_select(costs, config.tournament_size, ga_rng);
        const SamplingLaw offspring = mutate(space, laws[parent], config, ga_rng);
        const double offspring_cost = evaluate(offspring);

        std::size_t worst = 0;
        for (std::size_t i = 1; i < costs.size(); ++i)
            if (costs[i] > costs[worst]) worst = i;

        int replaced = 0;
        if (offspring_cost < costs[worst]) {
            laws[worst] = offspring;
            costs[worst] = offspring_cost;
            replaced = 1;
        }
        best = std::min(best, offspring_cost);
        result.log.push_back({step, best, offspring_cost, replaced});
    }

    result.population.reserve(laws.size());
    for (std::size_t i = 0; i < laws.size(); ++i)
        result.population.push_back({std::move(laws[i]), costs[i]});
    return result;
}

ConstraintGrid constraint_grid(std::uint64_t low_decade, std::uint64_t high_decade) {
    auto is_power_of_ten = [](std::uint64_t v) {
        if (v == 0) return false;
        while (v % 10 == 0) v /= 10;
        return v == 1;
    };
    if (!is_power_of_ten(low_decade) || !is_power_of_ten(high_decade) ||
        low_decade > high_decade)
        throw std::invalid_argument("grid decades must be ascending powers of ten");
    ConstraintGrid grid;
    for (std::uint64_t tau = low_decade; tau <= high_decade; tau *= 10) {
        grid.points.push_back(tau);
        grid.points.push_back(2 * tau);
        grid.points.push_back(5 * tau);
    }
    grid.points.push_back(10 * high_decade);
    return grid;
}

std::vector<Window> sliding_windows(const ConstraintGrid& grid) {
    std::vector<Window> windows;
    for (std::size_t i = 0; i + 1 < grid.points.size(); ++i)
        windows.push_back({static_cast<double>(grid.points[i]),
                           static_cast<double>(grid.points[i + 1])});
    return windows;
}

ElaborateResult elaborate_space(const SearchSpace& space, const ElaborateConfig& config) {
    ElaborateResult result;
    result.windows = sliding_windows(config.grid);

    for (std::size_t wi = 0; wi < result.windows.size(); ++wi) {
        GeneticConfig ga = config.genetic;
        ga.seed = mix64(config.genetic.seed, 1000 + wi);
        SearchResult search = run_genetic_search(space, config.metric, result.windows[wi], ga);

        const std::vector<ScoredLaw> picked =
            cluster_laws(space, search.population, config.clusters);
        for (std::size_t li = 0; li < picked.size(); ++li) {
            char tag[32];
            std::snprintf(tag, sizeof(tag), "w%02zu_l%02zu", wi + 1, li + 1);
            LibraryLaw entry{space.id + "_" + tag, picked[li].law, picked[li].cost, wi};

            const std::uint64_t val_seed = mix64(ga.seed, 500000 + li);
            std::vector<ArchiveRow> rows(config.n_val);
            const std::int64_t n = static_cast<std::int64_t>(config.n_val);
#pragma omp parallel for schedule(static)
            for (std::int64_t s = 0; s < n; ++s) {
                const Architecture arch = sample_with_law(
                    space, entry.law, mix64(val_seed, static_cast<std::uint64_t>(s)));
                rows[s] = ArchiveRow{arch.id, space.id, entry.law_id, count_parameters(arch),
                                     count_flops(arch)};
            }
            result.archive.insert(result.archive.end(), rows.begin(), rows.end());
            result.laws.push_back(std::move(entry));
        }
        result.searches.push_back(std::move(search));
    }
    return result;
}

std::string search_log_csv(const std::vector<SearchLogRow>& log) {
    std::string out = "step,best_cost,offspring_cost,replaced\n";
    for (const auto& row : log) {
        out += format_u64(row.step);
        out += ',';
        out += format_double(row.best_cost);
        out += ',';
        out += format_double(row.offspring_cost);
        out += ',';
        out += std::to_string(row.replaced);
        out += '\n';
    }
    return out;
}

std::string archive_csv(const std::vector<ArchiveRow>& archive) {
    std::string out = "candidate_id,space_id,law_id,parameter_count,flops\n";
    for (const auto& row : archive) {
        out += row.candidate_id;
        out += ',';
        out += row.space_id;
        out += ',';
        out += row.law_id;
        out += ',';
        out += format_u64(row.parameter_count);
        out += ',';
        out += format_u64(row.flops);
        out += '\n';
    }
    return out;
}

std::vector<ArchiveRow> archive_from_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const int id = table.column("candidate_id");
    const int sp = table.column("space_id");
    const int law = table.column("law_id");
    const int params = table.column("parameter_count");
    const int flops = table.column("flops");
    if (id < 0 || sp < 0 || law < 0 || params < 0 || flops < 0)
        throw std::runtime_error("archive CSV misses required columns: " + path);
    std::vector<ArchiveRow> rows;
    for (const auto& r : table.rows)
        rows.push_back({r[id], r[sp], r[law], std::stoull(r[params]), std::stoull(r[flops])});
    return rows;
}

}  // namespace nss
