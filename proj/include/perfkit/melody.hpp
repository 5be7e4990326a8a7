#pragma once

// Melody-line identification on symbolic scores.
//
// The graph method keeps notes whose melody probability passes a per-piece
// threshold, links each node to the earliest-starting notes that begin
// after it ends, and reads the melody off the shortest start-to-end path
// under negated probabilities.

#include "perfkit/core.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace perfkit::melody {

// Melody flag per note: true iff no other note sounding at its onset has a
// strictly higher pitch.
std::vector<bool> skyline(const NoteList& notes);

using NoteProbabilities = std::vector<double>;

// Median of the roll cells each note covers (the roll is read only where
// the note is). Even counts average the two central values.
NoteProbabilities note_probabilities(const PianoRoll& prob_roll, const NoteList& notes);

// Two-cluster single-linkage split of the probability values; returns the
// largest value of the lower cluster, or -infinity when fewer than two
// distinct values exist.
double cluster_threshold(const NoteProbabilities& probs);

// Strict `p > threshold` retention used for the threshold-only melody.
std::vector<bool> retain_over_threshold(const NoteProbabilities& probs, double threshold);

inline constexpr double kEndProbability = -0.5;

struct MeloDigraph {
    struct Node {
        double onset = 0.0;
        double end_time = 0.0;
        double probability = 0.0;
        std::size_t note_index = 0;  // meaningful for note nodes only
    };
    struct Edge {
        std::size_t from = 0;
        std::size_t to = 0;
        double weight = 0.0;
    };

    // nodes.front() is the start node, nodes.back() the end node.
    std::vector<Node> nodes;
    std::vector<Edge> edges;

    std::size_t start() const { return 0; }
    std::size_t end() const { return nodes.size() - 1; }
    std::vector<std::vector<std::size_t>> successors() const;
};

// Nodes are the start node (end time 0), one node per note with
// probability >= threshold, and the end node (onset +inf, probability
// -0.5). From the start node and every note node, candidates are all notes
// with onset >= its end time, narrowed to those sharing the minimum such
// onset; edges go to candidates with probability >= threshold, weighted
// -probability. The end node closes every node that has no later note.
MeloDigraph build_melo_digraph(const NoteList& notes, const NoteProbabilities& probs, double threshold);

// Bellman-Ford from the start node. Returns the notes on the shortest
// start-to-end path, i.e. the non-overlapping chain of maximal total
// probability. An unreachable end node gives an empty list.
NoteList extract_monophonic(const MeloDigraph& graph, const NoteList& notes);

// Indices (into the note list) of the extracted path, in time order.
std::vector<std::size_t> extract_monophonic_indices(const MeloDigraph& graph);

/// Rectangle of roll cells given by two opposite corners (inclusive).
struct QueryRegion {
    Eigen::Index row_start = 0;
    Eigen::Index col_start = 0;
    Eigen::Index row_end = 0;
    Eigen::Index col_end = 0;

    Eigen::Index top() const { return std::min(row_start, row_end); }
    Eigen::Index bottom() const { return std::max(row_start, row_end); }
    Eigen::Index left() const { return std::min(col_start, col_end); }
    Eigen::Index right() const { return std::max(col_start, col_end); }
    Eigen::Index area() const { return (bottom() - top() + 1) * (right() - left() + 1); }
};

using Predictor = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

struct SaliencyOptions {
    std::size_t iterations = 30000;
    std::size_t rects_per_iter = 5;
    std::uint64_t seed = 0;
    std::size_t threads = 0;  // 0: thread_count()
};

// Occlusion saliency: each iteration zeroes random rectangles (width and
// height uniform in [1, max(1, dim/4)]), drops the iteration if any
// rectangle touches the query, and adds the mean query-prediction drop to
// every zeroed note cell. Each cell is finally divided by the number of
// accepted iterations that zeroed it. Iteration k draws from a generator
// seeded with mix_seed(seed, k), so results do not depend on threading.
Eigen::MatrixXd saliency_map(const Predictor& predictor, const Eigen::MatrixXd& input, const QueryRegion& query,
                             const SaliencyOptions& options = {});

// Stand-in predictor: each active cell scores (row + 1) / (highest active
// row in its column + 1); inactive cells score 0.
Eigen::MatrixXd pitch_height_predictor(const Eigen::MatrixXd& input);

}  // namespace perfkit::melody
