#pragma once

// Max-min p-dispersion: pick p points whose smallest pairwise distance is
// as large as possible. The heuristics cluster the data with Ward linkage
// into p groups and keep one representative per group.

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace perfkit::dispersion {

enum class Metric { euclidean, manhattan };

Metric metric_from_name(std::string_view name);

struct PointSet {
    Eigen::MatrixXd points;  // n x d, one row per point
    Metric metric = Metric::euclidean;

    PointSet() = default;
    PointSet(Eigen::MatrixXd pts, Metric m = Metric::euclidean);

    std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
    double distance(std::size_t a, std::size_t b) const;
    double distance_to(std::size_t a, const Eigen::RowVectorXd& point) const;
};

using Assignment = std::vector<std::size_t>;

// Agglomerative Ward clustering (Lance-Williams update on squared Euclidean
// distances) stopped at k clusters. Labels are numbered by the lowest point
// index in each cluster. Ward always works in Euclidean space, whatever
// metric the point set uses for selection.
Assignment ward_cluster(const PointSet& ps, std::size_t k);

enum class Method { A, B, C, D };

Method method_from_name(std::string_view name);

struct DispersionResult {
    std::vector<std::size_t> selected;  // ascending
    double min_dist = 0.0;
};

// Minimum pairwise distance among the given indices.
double min_pairwise(const PointSet& ps, const std::vector<std::size_t>& indices);

struct SelectOptions {
    // Method A reference centroid: all points but the candidate (default),
    // or all points outside the candidate's cluster.
    bool method_a_exclude_cluster = false;
};

// Ward-cluster into p groups, then per group keep the point maximizing:
//   A: distance to the centroid of the other points
//   B: minimum distance to the other clusters' centroids
//   C: minimum distance to points of other clusters
//   D: minimum distance to every other point
// Ties go to the lowest index.
DispersionResult select_dispersed(const PointSet& ps, std::size_t p, Method method, const SelectOptions& options = {});

inline constexpr std::uint64_t kDefaultSubsetBudget = 50'000'000;

// Exhaustive search; ties resolve to the lexicographically smallest subset.
// Throws DataError when C(n, p) exceeds the budget.
DispersionResult brute_force_pdispersion(const PointSet& ps, std::size_t p,
                                         std::uint64_t budget = kDefaultSubsetBudget);

// Index minimizing the summed distance to all points; lowest index on ties.
std::size_t medoid(const PointSet& ps);

// Moves points from clusters larger than t into clusters smaller than t,
// each time taking the rich-cluster point nearest the poor cluster's
// centroid. Stops when no cluster is below t or no cluster exceeds t.
Assignment robin_hood(Assignment assignment, const PointSet& ps, std::size_t t);

struct KMeansResult {
    Assignment assignment;
    Eigen::MatrixXd centroids;  // k x d
    std::vector<double> inertia_history;  // after each Lloyd iteration
    double inertia = 0.0;
};

inline constexpr std::size_t kKMeansMaxIterations = 300;

// k-means++ seeding followed by Lloyd iterations until the assignment stops
// changing. Always Euclidean.
KMeansResult kmeans(const PointSet& ps, std::size_t k, std::mt19937_64& rng,
                    std::size_t max_iterations = kKMeansMaxIterations);

}  // namespace perfkit::dispersion
