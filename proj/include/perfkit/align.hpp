#pragma once

// Score-to-performance alignment: exact and approximate dynamic time
// warping, frame-level alignment of 3-valued piano rolls, note-level
// alignment through matched anchors, and matched-ratio evaluation curves.

#include "perfkit/core.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace perfkit::align {

enum class Distance { euclidean, sqeuclidean, manhattan, cosine };

// Accepts "euclidean", "sqeuclidean", "manhattan"/"cityblock", "cosine".
Distance distance_from_name(std::string_view name);

// Cosine distance is 1 - cos(a, b), clamped to [0, 2]. A zero vector is at
// distance 0 from another zero vector and at distance 1 from anything else.
double distance(Distance kind, const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b);

struct DtwResult {
    WarpingPath path;
    double cost = 0.0;
};

// Sequences are d x N matrices, one column per element.
DtwResult dtw(const Eigen::MatrixXd& seq_a, const Eigen::MatrixXd& seq_b, Distance dist);

// Dynamic programming on a precomputed N x M local-cost matrix, with the
// step set {(1,0), (0,1), (1,1)} and unit weights. On equal accumulated
// costs the diagonal predecessor wins, then (i-1, j), then (i, j-1).
DtwResult dtw_from_cost(const Eigen::MatrixXd& cost);

inline constexpr int kDefaultRadius = 178;

// Multi-resolution approximation: halve both sequences, solve recursively,
// project the coarse path and refine inside a band of `radius` cells. When
// either sequence is shorter than radius + 2 the exact DTW is used.
DtwResult fastdtw(const Eigen::MatrixXd& seq_a, const Eigen::MatrixXd& seq_b, int radius = kDefaultRadius,
                  Distance dist = Distance::cosine);

/// Monotone piecewise-linear map from score seconds to performance seconds,
/// extrapolated beyond its knots with the slope of the nearest segment.
class TimeMapping {
public:
    TimeMapping(std::vector<double> from, std::vector<double> to);

    double operator()(double t) const;
    const std::vector<double>& from() const { return from_; }
    const std::vector<double>& to() const { return to_; }

private:
    std::vector<double> from_;
    std::vector<double> to_;
};

// Aligns two 3-valued rolls column-wise with FastDTW and cosine distance.
// Each score column maps to the mean of the performance columns it is paired
// with; knot times are column start times.
TimeMapping frame_align(const PianoRoll& score_roll, const PianoRoll& perf_roll, int radius = kDefaultRadius);

// Maps note onsets and offsets through the mapping. Notes whose mapped
// offset does not exceed the mapped onset keep their original duration.
NoteList apply_mapping(const NoteList& notes, const TimeMapping& mapping);

// Per-pitch monotone matcher: for every pitch, onsets of both sides are
// aligned by edit-distance DP with substitution cost |onset difference| and
// an insertion/deletion cost of twice the median inter-onset interval of the
// pitch lane (1 s when the lane has no intervals).
NoteMatching match_notes(const NoteList& score, const NoteList& performance);

// Matched score notes take the performance times; unmatched ones are mapped
// through the piecewise-linear interpolation of (score onset, perf onset)
// anchors.
NoteList note_align(const NoteList& score, const NoteList& performance, const NoteMatching& matching);

struct EvalCurve {
    std::vector<double> thresholds;
    std::vector<double> onset_ratio;
    std::vector<double> offset_ratio;
};

// Fraction of notes whose onset (offset) error is <= each threshold. The
// two lists must correspond index by index.
EvalCurve eval_matched_ratio(const NoteList& aligned, const NoteList& ground_truth, std::span<const double> thresholds);

// Unweighted mean of per-piece curves sharing the same thresholds.
EvalCurve macro_average(std::span<const EvalCurve> curves);

}  // namespace perfkit::align
