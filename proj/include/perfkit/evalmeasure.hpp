#pragma once

// Transcription F-measure with velocity rescaling, symbolic piano-roll
// features and an elastic-net linear measure built on top of them.

#include "perfkit/core.hpp"

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

namespace perfkit::evalmeasure {

struct MatchCriteria {
    double onset_tol = 0.05;     // seconds
    double offset_tol = 0.05;    // seconds
    double pitch_tol = 0.5;      // semitones
    double velocity_tol = 0.10;  // fraction of 127
};

struct F1Result {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t matches = 0;
};

// Candidate pairs agree on onset, offset and pitch within tolerance. The
// predicted velocities are mapped by the least-squares line fitted over
// all candidate pairs, then a pair survives when the mapped velocity is
// within velocity_tol * 127 of the target. Matches are a maximum bipartite
// matching of the survivors. Undefined ratios are 0.
F1Result obj_f1(const NoteList& prediction, const NoteList& target, const MatchCriteria& criteria = {});

inline constexpr std::size_t kFeatureCount = 16;
inline constexpr double kFeatureCell = 0.005;
inline constexpr std::array<double, 3> kOnsetWindows{0.1, 1.0, 10.0};

using SymbolicFeatures = std::array<double, kFeatureCount>;

const std::array<std::string_view, kFeatureCount>& feature_names();

// Mean and population std of: pitch, velocity and duration over notes;
// sounding-note count and pitch above the column's lowest note over the
// non-empty piano-roll columns; onset counts in windows of 0.1, 1 and 10 s
// with 50% hop, starting at the first onset and up to the last one.
SymbolicFeatures symbolic_features(const NoteList& notes, double cell_duration = kFeatureCell);

struct ReferenceStats {
    SymbolicFeatures mean{};
    SymbolicFeatures std{};
};

// Per-feature mean and population std over a corpus of pieces.
ReferenceStats reference_stats(const std::vector<SymbolicFeatures>& corpus);

inline constexpr std::size_t kRowSize = kFeatureCount + 1;

// Standardized (target - prediction) feature difference followed by the
// prediction's F1 against the target. Zero reference stds count as 1.
Eigen::VectorXd measure_row(const SymbolicFeatures& prediction, const SymbolicFeatures& target, double f1,
                            const ReferenceStats& stats);

struct ElasticNetOptions {
    double l1 = 0.0;
    double l2 = 0.0;
    std::size_t max_sweeps = 100'000;
    double tolerance = 1e-13;  // on the largest coefficient change per sweep
};

struct ElasticNetFit {
    Eigen::VectorXd weights;
    double intercept = 0.0;
    std::vector<double> objective;  // after each sweep
    std::size_t sweeps = 0;
};

// Minimizes 1/(2n) |y - Xw - b|^2 + l1 |w|_1 + l2/2 |w|^2 by cyclic
// coordinate descent with an unpenalized intercept.
ElasticNetFit elastic_net(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const ElasticNetOptions& options = {});

double elastic_net_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double b,
                             double l1, double l2);

struct LinearMeasure {
    Eigen::VectorXd weights;    // one per row entry, 0 for dropped features
    double intercept = 0.0;
    std::vector<bool> active;   // features kept after pruning
    double training_l1_error = 0.0;
};

// Elastic net, then drops features whose |weight| is below 0.1 times the
// mean absolute training error and refits on the rest. Needs at least two
// rows; constant targets give an intercept-only model.
LinearMeasure fit_linear_measure(const Eigen::MatrixXd& rows, const Eigen::VectorXd& ratings, double l1, double l2);

double apply_measure(const LinearMeasure& measure, const Eigen::Ref<const Eigen::VectorXd>& row);

}  // namespace perfkit::evalmeasure
