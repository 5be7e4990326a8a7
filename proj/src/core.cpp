#include "perfkit/core.hpp"

#include "perfkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace perfkit {

namespace {

constexpr double kSnapTolerance = 1e-9;

double snap(double cells)
{
    const double nearest = std::round(cells);
    return std::abs(cells - nearest) < kSnapTolerance ? nearest : cells;
}

}  // namespace

void validate(const NoteEvent& note)
{
    if (note.pitch < 0 || note.pitch > 127)
        throw DataError("note pitch out of range [0,127]: " + std::to_string(note.pitch));
    if (note.velocity < 0 || note.velocity > 127)
        throw DataError("note velocity out of range [0,127]: " + std::to_string(note.velocity));
    if (!std::isfinite(note.onset) || !std::isfinite(note.offset))
        throw DataError("note times must be finite");
    if (note.onset < 0.0)
        throw DataError("negative note onset: " + std::to_string(note.onset));
    if (!(note.offset > note.onset))
        throw DataError("note offset must be greater than onset");
}

NoteList::NoteList(std::vector<NoteEvent> notes) : notes_(std::move(notes))
{
    for (const auto& n : notes_)
        validate(n);
    std::stable_sort(notes_.begin(), notes_.end(), [](const NoteEvent& a, const NoteEvent& b) {
        if (a.onset != b.onset)
            return a.onset < b.onset;
        return a.pitch < b.pitch;
    });
}

double NoteList::start_time() const
{
    return notes_.empty() ? 0.0 : notes_.front().onset;
}

double NoteList::end_time() const
{
    double end = 0.0;
    for (const auto& n : notes_)
        end = std::max(end, n.offset);
    return end;
}

PianoRoll::PianoRoll(Eigen::MatrixXd values, double cell_duration, RollKind kind)
    : values_(std::move(values)), cell_duration_(cell_duration), kind_(kind)
{
    if (values_.rows() != kPitchCount)
        throw DataError("piano roll must have 128 rows, got " + std::to_string(values_.rows()));
    if (!(cell_duration_ > 0.0))
        throw DataError("piano roll cell duration must be positive");
    for (Eigen::Index c = 0; c < values_.cols(); ++c) {
        for (Eigen::Index r = 0; r < values_.rows(); ++r) {
            const double v = values_(r, c);
            bool ok = std::isfinite(v);
            switch (kind_) {
            case RollKind::boolean: ok = ok && (v == 0.0 || v == 1.0); break;
            case RollKind::three_valued: ok = ok && (v == 0.0 || v == 1.0 || v == 2.0); break;
            case RollKind::probability: ok = ok && v >= 0.0 && v <= 1.0; break;
            }
            if (!ok)
                throw DataError("piano roll cell value " + std::to_string(v) + " invalid for its kind");
        }
    }
}

PianoRoll PianoRoll::zeros(Eigen::Index columns, double cell_duration, RollKind kind)
{
    return PianoRoll(Eigen::MatrixXd::Zero(kPitchCount, columns), cell_duration, kind);
}

std::pair<Eigen::Index, Eigen::Index> covered_cells(const NoteEvent& note, double cell_duration)
{
    const auto first = static_cast<Eigen::Index>(std::floor(snap(note.onset / cell_duration)));
    const auto last = static_cast<Eigen::Index>(std::ceil(snap(note.offset / cell_duration)));
    return {std::max<Eigen::Index>(first, 0), std::max(last, first + 1)};
}

PianoRoll notes_to_pianoroll(const NoteList& notes, double cell_duration, RollKind kind)
{
    if (!(cell_duration > 0.0))
        throw DataError("cell duration must be positive");

    Eigen::Index columns = 0;
    for (const auto& n : notes)
        columns = std::max(columns, covered_cells(n, cell_duration).second);

    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(kPitchCount, columns);
    for (const auto& n : notes) {
        const auto [first, last] = covered_cells(n, cell_duration);
        for (Eigen::Index c = first; c < last; ++c) {
            const double v = (kind == RollKind::three_valued && c == first) ? 2.0 : 1.0;
            // The onset marker survives any later sustain on the same pitch.
            values(n.pitch, c) = std::max(values(n.pitch, c), v);
        }
    }
    return PianoRoll(std::move(values), cell_duration, kind);
}

NoteList stretch_to_duration(const NoteList& notes, double target_duration)
{
    if (notes.empty())
        throw DataError("cannot stretch an empty note list");
    if (!(target_duration > 0.0))
        throw DataError("target duration must be positive");
    const double start = notes.start_time();
    const double span = notes.end_time() - start;
    if (!(span > 0.0))
        throw DataError("cannot stretch a note list with zero span");

    const double factor = target_duration / span;
    std::vector<NoteEvent> out(notes.begin(), notes.end());
    for (auto& n : out) {
        n.onset = (n.onset - start) * factor;
        n.offset = (n.offset - start) * factor;
    }
    return NoteList(std::move(out));
}

bool WarpingPath::is_valid(std::size_t n, std::size_t m) const
{
    if (pairs.empty() || n == 0 || m == 0)
        return false;
    if (pairs.front() != std::pair<std::size_t, std::size_t>{0, 0})
        return false;
    if (pairs.back() != std::pair<std::size_t, std::size_t>{n - 1, m - 1})
        return false;
    for (std::size_t k = 1; k < pairs.size(); ++k) {
        const auto [pi, pj] = pairs[k - 1];
        const auto [i, j] = pairs[k];
        if (i < pi || j < pj)
            return false;
        const std::size_t di = i - pi;
        const std::size_t dj = j - pj;
        if (di > 1 || dj > 1 || (di == 0 && dj == 0))
            return false;
    }
    return true;
}

NoteMatching identity_matching(std::size_t count)
{
    NoteMatching m;
    m.matched.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        m.matched.emplace_back(i, i);
    return m;
}

void validate(const NoteMatching& matching, std::size_t score_size, std::size_t perf_size)
{
    std::vector<bool> seen_score(score_size, false);
    std::vector<bool> seen_perf(perf_size, false);
    auto mark = [](std::vector<bool>& seen, std::size_t i, const char* side) {
        if (i >= seen.size())
            throw DataError(std::string("matching references out-of-range ") + side + " index " + std::to_string(i));
        if (seen[i])
            throw DataError(std::string("matching uses ") + side + " index " + std::to_string(i) + " twice");
        seen[i] = true;
    };
    for (const auto& [s, p] : matching.matched) {
        mark(seen_score, s, "score");
        mark(seen_perf, p, "performance");
    }
    for (auto s : matching.unmatched_score)
        mark(seen_score, s, "score");
    for (auto p : matching.unmatched_perf)
        mark(seen_perf, p, "performance");
}

}  // namespace perfkit
