#pragma once

// Note-event and piano-roll data model shared by every perfkit module.

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace perfkit {

inline constexpr int kPitchCount = 128;

struct NoteEvent {
    int pitch = 60;
    double onset = 0.0;   // seconds
    double offset = 0.0;  // seconds
    int velocity = 64;

    double duration() const { return offset - onset; }
    bool operator==(const NoteEvent&) const = default;
};

// Throws DataError unless 0 <= pitch,velocity <= 127, onset >= 0 and
// offset > onset.
void validate(const NoteEvent& note);

/// A sequence of notes kept sorted by (onset, pitch). The sort is stable so
/// notes that tie on both keys keep their insertion order.
class NoteList {
public:
    NoteList() = default;
    explicit NoteList(std::vector<NoteEvent> notes);

    std::size_t size() const { return notes_.size(); }
    bool empty() const { return notes_.empty(); }
    const NoteEvent& operator[](std::size_t i) const { return notes_[i]; }
    auto begin() const { return notes_.begin(); }
    auto end() const { return notes_.end(); }
    const std::vector<NoteEvent>& notes() const { return notes_; }

    // Earliest onset and latest offset; both 0 for an empty list.
    double start_time() const;
    double end_time() const;

    bool operator==(const NoteList&) const = default;

private:
    std::vector<NoteEvent> notes_;
};

enum class RollKind { boolean, three_valued, probability };

/// 128 x T grid, one row per MIDI pitch and one column per time cell.
class PianoRoll {
public:
    PianoRoll(Eigen::MatrixXd values, double cell_duration, RollKind kind);

    // All-zero roll with the given number of columns.
    static PianoRoll zeros(Eigen::Index columns, double cell_duration, RollKind kind);

    const Eigen::MatrixXd& values() const { return values_; }
    double cell_duration() const { return cell_duration_; }
    RollKind kind() const { return kind_; }
    Eigen::Index columns() const { return values_.cols(); }

private:
    Eigen::MatrixXd values_;
    double cell_duration_;
    RollKind kind_;
};

// Half-open cell coverage of a note: cell c is covered iff
// c*cell < offset and (c+1)*cell > onset. Returns [first, last) column
// indices. Boundaries within 1e-9 cells of an integer are snapped so that
// decimal inputs such as 0.3 / 0.1 do not spill into an extra cell.
std::pair<Eigen::Index, Eigen::Index> covered_cells(const NoteEvent& note, double cell_duration);

PianoRoll notes_to_pianoroll(const NoteList& notes, double cell_duration, RollKind kind);

// Translates the earliest onset to zero and scales every time so that the
// list spans `target_duration` seconds.
NoteList stretch_to_duration(const NoteList& notes, double target_duration);

struct WarpingPath {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    // Starts at (0,0), ends at (n-1,m-1), every step advances i, j or both
    // by exactly one.
    bool is_valid(std::size_t n, std::size_t m) const;
    bool operator==(const WarpingPath&) const = default;
};

/// A correspondence between score notes and performance notes, by index.
struct NoteMatching {
    std::vector<std::pair<std::size_t, std::size_t>> matched;  // (score, perf)
    std::vector<std::size_t> unmatched_score;
    std::vector<std::size_t> unmatched_perf;
};

// Identity matching for two lists of equal length.
NoteMatching identity_matching(std::size_t count);

// Checks index ranges and per-side uniqueness.
void validate(const NoteMatching& matching, std::size_t score_size, std::size_t perf_size);

}  // namespace perfkit
