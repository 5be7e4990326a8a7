#pragma once

// Score-informed NMF note separation.
//
// Each of the 88 piano keys owns 30 template columns: one attack column,
// 14 sustain columns covering two frames each (the last one also covers any
// sustain beyond 28 frames) and 15 release columns of one frame each that
// start at the note offset. The activation matrix is initialized from
// aligned notes, the factorization is refined with Euclidean multiplicative
// updates, and each note's spectrogram is reconstructed from its own
// template columns and activation region.

#include "perfkit/core.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace perfkit::notesep {

inline constexpr double kSampleRate = 22050.0;
inline constexpr std::size_t kFrameSize = 2048;
inline constexpr std::size_t kHopSize = 512;

struct SpectrogramMatrix {
    Eigen::MatrixXd values;  // F x T magnitudes
    double frame_duration = static_cast<double>(kHopSize) / kSampleRate;
    double sample_rate = kSampleRate;
};

// Hann-windowed magnitude STFT without padding: frame k covers samples
// [k*hop, k*hop + frame_size). Yields frame_size/2 + 1 bins. Throws
// DataError for input shorter than one frame.
SpectrogramMatrix stft_magnitude(std::span<const double> samples, double sample_rate = kSampleRate,
                                 std::size_t frame_size = kFrameSize, std::size_t hop = kHopSize);

struct TemplateLayout {
    static constexpr int kLowestPitch = 21;
    static constexpr int kPitchCount = 88;
    static constexpr int kAttackColumns = 1;
    static constexpr int kSustainColumns = 14;
    static constexpr int kFramesPerSustainColumn = 2;
    static constexpr int kReleaseColumns = 15;
    static constexpr int kColumnsPerPitch = kAttackColumns + kSustainColumns + kReleaseColumns;
    static constexpr int kTotalColumns = kPitchCount * kColumnsPerPitch;

    static bool has_pitch(int pitch) { return pitch >= kLowestPitch && pitch < kLowestPitch + kPitchCount; }
    static int first_column(int pitch);
    static int attack_column(int pitch) { return first_column(pitch); }
    static int sustain_column(int pitch, int k) { return first_column(pitch) + kAttackColumns + k; }
    static int release_column(int pitch, int k) { return first_column(pitch) + kAttackColumns + kSustainColumns + k; }

    // Column offset inside a pitch block for a frame before the note
    // offset: 0 for the attack frame, then the sustain columns.
    static int sounding_part(int frame_since_onset);
};

// Frame index of a time, rounded to the nearest frame.
int frame_index(double seconds, double frame_duration);

/// Isolated-note recording of one pitch: the note starts at frame 0 and is
/// released at `offset_frame`.
struct PitchReference {
    int pitch = 60;
    Eigen::MatrixXd spectrogram;  // F x frames
    int offset_frame = 0;
};

// Averages every reference frame into its template column; columns no
// frame reaches take the mean of the pitch's other columns. Every layout
// pitch needs at least one non-silent reference.
Eigen::MatrixXd build_initial_template(std::span<const PitchReference> references);

struct HarmonicModel {
    int partials = 8;
    double decay_per_second = 3.0;          // sustain envelope
    double release_decay_per_second = 25.0;  // after the offset
    double note_seconds = 1.0;
    double tail_seconds = 0.7;
};

// Additive tone with partials k*f0 at amplitude 1/k (partials at or above
// Nyquist are dropped), exponential decay and a faster decay after the
// offset.
std::vector<double> synthesize_note(int pitch, double amplitude, double onset, double offset, std::size_t total_samples,
                                    const HarmonicModel& model = {}, double sample_rate = kSampleRate);

// One synthetic reference per layout pitch.
std::vector<PitchReference> synthetic_piano_scale(const HarmonicModel& model = {}, double sample_rate = kSampleRate);

// Attack row on the onset frame, sustain rows on successive 2-frame groups
// (the last one absorbing the overflow), release rows on the 15 frames from
// the offset frame; values are velocity / 127. Overlapping same-pitch
// notes keep the larger value.
Eigen::MatrixXd build_initial_activation(const NoteList& notes, double frame_duration, Eigen::Index frames);

// Activation support of a single note (same shape as the full activation).
Eigen::MatrixXd note_activation(const NoteEvent& note, double frame_duration, Eigen::Index frames);

struct NMFState {
    Eigen::MatrixXd W;  // F x 2640
    Eigen::MatrixXd H;  // 2640 x T
    NoteList notes;     // notes H was initialized from
    double frame_duration = static_cast<double>(kHopSize) / kSampleRate;
};

NMFState make_state(Eigen::MatrixXd W, const NoteList& notes, double frame_duration, Eigen::Index frames);

inline constexpr double kEpsilon = 1e-12;
inline constexpr int kWindowCount = 5;
inline constexpr int kFullIterations = 5;

enum class UpdateStage { template_window, full_activation, full_template };

struct NMFOptions {
    int windows = kWindowCount;
    int iterations = kFullIterations;
    // Called after every multiplicative update.
    std::function<void(UpdateStage, const Eigen::MatrixXd& W, const Eigen::MatrixXd& H)> on_update;
};

struct NMFReport {
    double input_error = 0.0;             // ||S - WH|| of the state as given
    std::vector<double> full_errors;      // before and after each full iteration
};

// Normalizes W and H to unit maximum, updates W alone once per time window
// (H fixed, remainder frames in the last window), normalizes again, then
// runs full Lee-Seung iterations on both factors. Template columns with no
// activation in the frames being fit are left as they are. An all-zero S
// returns the state unchanged.
NMFState nmf_fit(const Eigen::MatrixXd& S, NMFState state, const NMFOptions& options = {}, NMFReport* report = nullptr);

double euclidean_error(const Eigen::MatrixXd& S, const Eigen::MatrixXd& W, const Eigen::MatrixXd& H);

inline constexpr Eigen::Index kNoteFrames = 30;

// W restricted to the note's pitch block times H masked to the note's own
// attack/sustain support, over the full time axis (F x T).
Eigen::MatrixXd note_reconstruction(const NMFState& state, std::size_t note_index);

// The note's first 30 frames from its onset frame, zero-padded (F x 30).
// Throws DataError when the note is not part of the state.
Eigen::MatrixXd extract_note_spectrogram(const NMFState& state, const NoteEvent& note);

inline constexpr int kMelBands = 40;
inline constexpr int kMfccCount = 13;
inline constexpr double kLogFloor = 1e-10;

/// 40 triangular mel bands (HTK mel scale, 0 Hz to Nyquist, each band
/// normalized to unit weight sum), natural log with a floor, orthonormal
/// DCT-II, first 13 coefficients.
class Mfcc {
public:
    explicit Mfcc(Eigen::Index bins, double sample_rate = kSampleRate);

    Eigen::VectorXd operator()(const Eigen::Ref<const Eigen::VectorXd>& spectrum) const;
    const Eigen::MatrixXd& filterbank() const { return filters_; }

private:
    Eigen::MatrixXd filters_;  // bands x bins
    Eigen::MatrixXd dct_;      // 13 x bands
};

Eigen::VectorXd mfcc(const Eigen::Ref<const Eigen::VectorXd>& spectral_column, double sample_rate = kSampleRate);

}  // namespace perfkit::notesep
