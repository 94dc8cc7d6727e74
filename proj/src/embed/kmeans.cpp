#include <algorithm>
#include <cmath>
#include <limits>

#include "duokg/embed.hpp"
#include "duokg/log.hpp"

namespace duokg::embed {

namespace {

double sq_dist(const double* a, const double* b, std::size_t dim) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        const double v = a[j] - b[j];
        s += v * v;
    }
    return s;
}

std::uint32_t nearest(const double* p, std::span<const double> centroids, std::size_t k, std::size_t dim,
                      double& best) {
    std::uint32_t arg = 0;
    best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
        const double dist = sq_dist(p, centroids.data() + c * dim, dim);
        if (dist < best) {
            best = dist;
            arg = static_cast<std::uint32_t>(c);
        }
    }
    return arg;
}

void check_sizes(std::span<const double> points, std::size_t n, std::size_t dim, std::span<const double> centroids,
                 std::size_t k) {
    if (points.size() != n * dim || centroids.size() != k * dim) throw ShapeError("kmeans: buffer size mismatch");
    if (k == 0) throw ConfigError("kmeans: need at least one cluster");
}

std::vector<double> plus_plus_init(std::span<const double> points, std::size_t n, std::size_t dim, std::size_t k,
                                   Rng& rng) {
    std::vector<double> centroids(k * dim);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    std::size_t pick = rng.below(n);
    for (std::size_t c = 0; c < k; ++c) {
        std::copy_n(points.data() + pick * dim, dim, centroids.data() + c * dim);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], sq_dist(points.data() + i * dim, centroids.data() + c * dim, dim));
            total += d2[i];
        }
        if (c + 1 == k) break;
        if (total <= 0.0) {
            // every point already sits on a centroid; pick any point
            pick = rng.below(n);
            continue;
        }
        double u = rng.uniform() * total;
        pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (u < d2[i]) {
                pick = i;
                break;
            }
            u -= d2[i];
        }
    }
    return centroids;
}

}  // namespace

double assign_nearest(std::span<const double> points, std::size_t n, std::size_t dim,
                      std::span<const double> centroids, std::size_t k, std::vector<std::uint32_t>& assignment) {
    check_sizes(points, n, dim, centroids, k);
    assignment.resize(n);
    std::vector<double> dist(n);
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
        const auto u = static_cast<std::size_t>(i);
        assignment[u] = nearest(points.data() + u * dim, centroids, k, dim, dist[u]);
    }
    // summed in index order so the result does not depend on the thread count
    double total = 0.0;
    for (double v : dist) total += v;
    return total;
}

double assign_nearest_reference(std::span<const double> points, std::size_t n, std::size_t dim,
                                std::span<const double> centroids, std::size_t k,
                                std::vector<std::uint32_t>& assignment) {
    check_sizes(points, n, dim, centroids, k);
    assignment.resize(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double best;
        assignment[i] = nearest(points.data() + i * dim, centroids, k, dim, best);
        total += best;
    }
    return total;
}

double inertia(std::span<const double> points, std::size_t n, std::size_t dim, std::span<const double> centroids,
               std::span<const std::uint32_t> assignment) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += sq_dist(points.data() + i * dim, centroids.data() + assignment[i] * dim, dim);
    }
    return total;
}

std::vector<double> cluster_means(std::span<const double> points, std::size_t n, std::size_t dim, std::size_t k,
                                  std::span<const std::uint32_t> assignment) {
    std::vector<double> sums(k * dim, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = assignment[i];
        ++counts[c];
        for (std::size_t j = 0; j < dim; ++j) sums[c * dim + j] += points[i * dim + j];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) continue;
        for (std::size_t j = 0; j < dim; ++j) sums[c * dim + j] /= static_cast<double>(counts[c]);
    }
    return sums;
}

KMeansResult kmeans(std::span<const double> points, std::size_t n, std::size_t dim, const KMeansConfig& cfg) {
    const std::size_t k = cfg.clusters;
    if (k == 0) throw ConfigError("kmeans: cluster count must be positive");
    if (k > n) {
        throw ConfigError("kmeans: " + std::to_string(k) + " clusters requested for " + std::to_string(n) + " points");
    }
    if (points.size() != n * dim) throw ShapeError("kmeans: point buffer size mismatch");
    Rng rng(cfg.seed);
    KMeansResult res;
    res.centroids = plus_plus_init(points, n, dim, k, rng);
    assign_nearest(points, n, dim, res.centroids, k, res.assignment);

    for (std::size_t it = 0; it < std::max<std::size_t>(cfg.max_iters, 1); ++it) {
        // empty clusters take the point farthest from its centroid
        std::vector<std::size_t> counts(k, 0);
        for (auto a : res.assignment) ++counts[a];
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            std::size_t far = n;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[res.assignment[i]] < 2) continue;
                const double dd = sq_dist(points.data() + i * dim, res.centroids.data() + res.assignment[i] * dim, dim);
                if (dd > far_d) {
                    far_d = dd;
                    far = i;
                }
            }
            if (far == n) break;
            --counts[res.assignment[far]];
            res.assignment[far] = static_cast<std::uint32_t>(c);
            counts[c] = 1;
            ++res.reseeds;
            log::info("kmeans: reseeded empty cluster " + std::to_string(c) + " at point " + std::to_string(far));
        }
        res.centroids = cluster_means(points, n, dim, k, res.assignment);
        res.inertia_history.push_back(inertia(points, n, dim, res.centroids, res.assignment));
        ++res.iterations;

        std::vector<std::uint32_t> next;
        assign_nearest(points, n, dim, res.centroids, k, next);
        // keep the current label when it is tied with the nearest one so the fixpoint is stable
        for (std::size_t i = 0; i < n; ++i) {
            const double cur = sq_dist(points.data() + i * dim, res.centroids.data() + res.assignment[i] * dim, dim);
            const double alt = sq_dist(points.data() + i * dim, res.centroids.data() + next[i] * dim, dim);
            if (!(alt < cur)) next[i] = res.assignment[i];
        }
        if (next == res.assignment) {
            res.converged = true;
            break;
        }
        res.assignment = std::move(next);
    }
    res.centroids = cluster_means(points, n, dim, k, res.assignment);
    return res;
}

}  // namespace duokg::embed
