#include "nss/law_search.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nss {

namespace {

// Law embedding: per variable, both bounds normalized by the rating span.
Eigen::MatrixXd embed_laws(const SearchSpace& space, const std::vector<ScoredLaw>& population) {
    const std::size_t n = population.size();
    const std::size_t dims = 2 * space.variables.size();
    Eigen::MatrixXd points(n, dims);
    for (std::size_t i = 0; i < n; ++i) {
        const SamplingLaw& law = population[i].law;
        for (std::size_t v = 0; v < space.variables.size(); ++v) {
            const VariableSpec& var = space.variables[v];
            const double lo = static_cast<double>(var.rating_min());
            const double span = static_cast<double>(var.rating_max()) - lo;
            if (span > 0) {
                points(i, 2 * v) = (law.ranges[v].low - lo) / span;
                points(i, 2 * v + 1) = (law.ranges[v].high - lo) / span;
            } else {
                points(i, 2 * v) = 0.0;
                points(i, 2 * v + 1) = 0.0;
            }
        }
    }
    return points;
}

// Deterministic k-means: farthest-first seeding from point 0, Lloyd steps,
// nearest-centroid ties to the lower index.
std::vector<int> kmeans(const Eigen::MatrixXd& points, int k) {
    const int n = static_cast<int>(points.rows());
    std::vector<int> centers;
    centers.push_back(0);
    Eigen::VectorXd dist = (points.rowwise() - points.row(0)).rowwise().squaredNorm();
    while (static_cast<int>(centers.size()) < k) {
        int far = 0;
        for (int i = 1; i < n; ++i)
            if (dist[i] > dist[far]) far = i;
        centers.push_back(far);
        const Eigen::VectorXd d = (points.rowwise() - points.row(far)).rowwise().squaredNorm();
        dist = dist.cwiseMin(d);
    }

    Eigen::MatrixXd centroids(k, points.cols());
    for (int c = 0; c < k; ++c) centroids.row(c) = points.row(centers[c]);

    std::vector<int> assign(n, -1);
    for (int iter = 0; iter < 200; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (points.row(i) - centroids.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                const double d = (points.row(i) - centroids.row(c)).squaredNorm();
                if (d < best_d) { best_d = d; best = c; }
            }
            if (assign[i] != best) { assign[i] = best; changed = true; }
        }

        // Re-seed empty clusters from the point farthest from its centroid.
        std::vector<int> sizes(k, 0);
        for (int i = 0; i < n; ++i) ++sizes[assign[i]];
        for (int c = 0; c < k; ++c) {
            if (sizes[c] > 0) continue;
            int far = -1;
            double far_d = -1.0;
            for (int i = 0; i < n; ++i) {
                if (sizes[assign[i]] <= 1) continue;
                const double d = (points.row(i) - centroids.row(assign[i])).squaredNorm();
                if (d > far_d) { far_d = d; far = i; }
            }
            if (far >= 0) {
                --sizes[assign[far]];
                assign[far] = c;
                sizes[c] = 1;
                changed = true;
            }
        }

        if (!changed && iter > 0) break;
        centroids.setZero();
        std::vector<int> counts(k, 0);
        for (int i = 0; i < n; ++i) {
            centroids.row(assign[i]) += points.row(i);
            ++counts[assign[i]];
        }
        for (int c = 0; c < k; ++c)
            if (counts[c] > 0) centroids.row(c) /= counts[c];
    }
    return assign;
}

}  // namespace

std::vector<ScoredLaw> cluster_laws(const SearchSpace& space,
                                    const std::vector<ScoredLaw>& population, std::uint64_t k) {
    if (population.size() < k)
        throw std::invalid_argument("population smaller than requested cluster count");
    if (k == 0) throw std::invalid_argument("cluster count must be positive");

    std::vector<ScoredLaw> reps;
    if (population.size() == k) {
        reps = population;
    } else {
        const Eigen::MatrixXd points = embed_laws(space, population);
        const int n = static_cast<int>(population.size());

        std::vector<double> dists;
        dists.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                dists.push_back((points.row(i) - points.row(j)).norm());
        std::sort(dists.begin(), dists.end());
        double sigma = dists.empty() ? 1.0 : dists[dists.size() / 2];
        if (sigma <= 0.0) sigma = 1.0;

        Eigen::MatrixXd affinity = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) {
                    const double d = (points.row(i) - points.row(j)).squaredNorm();
                    affinity(i, j) = std::exp(-d / (2.0 * sigma * sigma));
                }

        Eigen::VectorXd inv_sqrt_deg(n);
        for (int i = 0; i < n; ++i) {
            const double deg = affinity.row(i).sum();
            inv_sqrt_deg[i] = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
        }
        Eigen::MatrixXd laplacian = Eigen::MatrixXd::Identity(n, n) -
                                    inv_sqrt_deg.asDiagonal() * affinity *
                                        inv_sqrt_deg.asDiagonal();

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("eigendecomposition failed in cluster_laws");
        Eigen::MatrixXd rows = solver.eigenvectors().leftCols(static_cast<int>(k));
        for (int i = 0; i < n; ++i) {
            const double norm = rows.row(i).norm();
            if (norm > 0.0) rows.row(i) /= norm;
        }

        const std::vector<int> assign = kmeans(rows, static_cast<int>(k));
        std::vector<int> best(k, -1);
        for (int i = 0; i < n; ++i) {
            const int c = assign[i];
            if (best[c] < 0 || population[i].cost < population[best[c]].cost) best[c] = i;
        }
        for (std::uint64_t c = 0; c < k; ++c)
            if (best[c] >= 0) reps.push_back(population[best[c]]);
    }

    std::sort(reps.begin(), reps.end(), [](const ScoredLaw& a, const ScoredLaw& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        return law_to_json(a.law) < law_to_json(b.law);
    });
    return reps;
}

}  // namespace nss
