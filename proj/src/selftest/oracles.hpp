#pragma once

// Slow, straightforward reference implementations used to cross-check the
// library in tests, in the acceptance suite and in `perfkit selftest`.

#include "perfkit/core.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <random>
#include <utility>
#include <vector>

namespace perfkit::oracle {

// Minimum over every monotone path from (0,0) to (n-1,m-1) of the summed
// cell costs, accumulated from the start of the path.
double brute_force_dtw_cost(const Eigen::MatrixXd& cost);

// Number of monotone paths visited by brute_force_dtw_cost.
std::size_t monotone_path_count(std::size_t n, std::size_t m);

// Edge list of the melody graph derived naively from the note list: node 0
// is the start, nodes 1..k the passing notes in list order, node k+1 the end.
struct NaiveEdge {
    std::size_t from;
    std::size_t to;
    double weight;
    bool operator==(const NaiveEdge&) const = default;
};
std::vector<NaiveEdge> melody_graph_edges(const NoteList& notes, const std::vector<double>& probs, double threshold);

// Maximum of sum(-weight) over every start-to-end path, the end node's
// +0.5 included. Returns false when no path exists.
struct PathOptimum {
    bool reachable = false;
    double weight = 0.0;  // smallest summed weight
    std::vector<std::size_t> nodes;
};
PathOptimum best_path_by_enumeration(std::size_t node_count, const std::vector<NaiveEdge>& edges);

// Clusters of sorted onset values by repeated merging of the closest pair
// of clusters while their gap is below t. Returns the cluster id per value.
std::vector<std::size_t> naive_single_linkage(const std::vector<double>& sorted_values, double t);

// Every p-subset by bitmask, keeping the largest minimum distance.
double brute_force_dispersion_value(const Eigen::MatrixXd& points, std::size_t p, bool manhattan = false);

// 13 MFCCs by the textbook formulas, written independently of the library:
// triangular mel bands on the 1127*ln(1+f/700) scale, unit-sum bands,
// natural log with floor 1e-10, orthonormal DCT-II evaluated term by term.
std::vector<double> direct_mfcc(const std::vector<double>& spectrum, double sample_rate);

// 0.5 * sum |p - q| of two count vectors after normalizing each.
double total_variation(const std::vector<double>& a, const std::vector<double>& b);

// Random note list with onsets on a grid of `step` seconds.
NoteList random_notes(std::mt19937_64& rng, std::size_t count, double step = 0.125, int low_pitch = 48,
                      int high_pitch = 84);

}  // namespace perfkit::oracle
