#pragma once

// Statistical generation of artificially misaligned scores.
//
// A model is fitted on (score, performance, matching) triples. For every
// matched note the onset misalignment (score onset - performance onset) and
// the duration ratio (score duration / performance duration) are collected,
// standardized per piece, and pooled into two histograms. The per-piece
// means and standard deviations go to four further histograms. Sampling
// reverses the process against a reference performance.

#include "perfkit/core.hpp"
#include "perfkit/io.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace perfkit::misalign {

using Rng = std::mt19937_64;

class Histogram {
public:
    Histogram() = default;
    Histogram(std::vector<double> edges, std::vector<double> counts);

    // Equal-width bins spanning [min, max] of the values, last bin closed.
    // All-equal values yield a single bin [v, nextafter(v)) that samples
    // back to exactly v. No values yields an empty histogram.
    static Histogram from_values(std::span<const double> values, std::size_t bins);

    const std::vector<double>& edges() const { return edges_; }
    const std::vector<double>& counts() const { return counts_; }
    std::size_t bins() const { return counts_.size(); }
    double total() const;
    bool empty() const { return total() <= 0.0; }

    // Bin index for a value, clamped to the histogram range.
    std::size_t bin_of(double value) const;

    // Picks a bin with probability proportional to its count, then a value
    // uniformly inside it. Throws DataError when the total count is zero.
    double sample(Rng& rng) const;

    bool operator==(const Histogram&) const = default;

private:
    std::vector<double> edges_;
    std::vector<double> counts_;
};

struct MisalignmentModel {
    Histogram x_ons;
    Histogram x_dur;
    Histogram y_ons_mean;
    Histogram y_ons_std;
    Histogram y_dur_mean;
    Histogram y_dur_std;

    // Fitting diagnostics; not serialized.
    std::size_t pieces_used = 0;
    std::size_t pieces_skipped = 0;
    std::size_t zero_std_onset = 0;
    std::size_t zero_std_duration = 0;

    // True once the value and mean histograms can be sampled. The std
    // histograms may legitimately stay empty when every fitted piece had a
    // constant statistic; sampling then uses a unit std.
    bool fitted() const;
};

struct FitPiece {
    NoteList score;
    NoteList performance;
    NoteMatching matching;
};

inline constexpr std::size_t kDefaultBins = 100;

MisalignmentModel fit_misalignment_model(std::span<const FitPiece> pieces, std::size_t bins = kDefaultBins);

double sample_histogram(const Histogram& h, Rng& rng);

NoteList sample_misaligned(const NoteList& reference, const MisalignmentModel& model, Rng& rng);

struct TaggedRun {
    std::size_t start = 0;
    std::size_t length = 0;
    double p_missing = 0.5;
    double p_extra = 0.5;
    bool missing = false;
};

struct MissingExtraLabels {
    std::vector<bool> missing;
    std::vector<bool> extra;
    std::vector<TaggedRun> runs;

    std::size_t tagged() const;
};

MissingExtraLabels generate_missing_extra(const NoteList& notes, Rng& rng);

// Single-linkage clustering of onsets with stopping distance t; every onset
// becomes its cluster's mean onset.
NoteList cluster_chords(const NoteList& notes, double t);

io::Json model_to_json(const MisalignmentModel& model);
MisalignmentModel model_from_json(const io::Json& doc);

}  // namespace perfkit::misalign
