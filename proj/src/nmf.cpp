#include "perfkit/notesep.hpp"

#include "perfkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace perfkit::notesep {

using Layout = TemplateLayout;

int TemplateLayout::first_column(int pitch)
{
    if (!has_pitch(pitch))
        throw DataError("pitch " + std::to_string(pitch) + " is outside the 88-key template layout");
    return (pitch - kLowestPitch) * kColumnsPerPitch;
}

int TemplateLayout::sounding_part(int frame_since_onset)
{
    if (frame_since_onset <= 0)
        return 0;
    return kAttackColumns + std::min(kSustainColumns - 1, (frame_since_onset - 1) / kFramesPerSustainColumn);
}

int frame_index(double seconds, double frame_duration)
{
    if (!(frame_duration > 0.0))
        throw DataError("frame duration must be positive");
    return static_cast<int>(std::lround(seconds / frame_duration));
}

Eigen::MatrixXd build_initial_template(std::span<const PitchReference> references)
{
    Eigen::Index bins = -1;
    for (const auto& ref : references) {
        if (bins < 0)
            bins = ref.spectrogram.rows();
        else if (ref.spectrogram.rows() != bins)
            throw DataError("reference spectrograms disagree on the bin count");
        if (!Layout::has_pitch(ref.pitch))
            throw DataError("reference pitch " + std::to_string(ref.pitch) + " is outside the template layout");
        if ((ref.spectrogram.array() < 0.0).any())
            throw DataError("reference spectrograms must be non-negative");
    }
    if (bins <= 0)
        throw DataError("no reference spectrograms given");

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(bins, Layout::kTotalColumns);
    std::vector<int> counts(Layout::kTotalColumns, 0);
    std::vector<bool> audible(Layout::kPitchCount, false);
    for (const auto& ref : references) {
        if (ref.spectrogram.maxCoeff() <= 0.0)
            continue;
        audible[ref.pitch - Layout::kLowestPitch] = true;
        const int first = Layout::first_column(ref.pitch);
        for (Eigen::Index f = 0; f < ref.spectrogram.cols(); ++f) {
            const int frame = static_cast<int>(f);
            int column;
            if (frame < ref.offset_frame)
                column = first + Layout::sounding_part(frame);
            else if (frame - ref.offset_frame < Layout::kReleaseColumns)
                column = Layout::release_column(ref.pitch, frame - ref.offset_frame);
            else
                continue;
            sums.col(column) += ref.spectrogram.col(f);
            ++counts[column];
        }
    }

    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(bins, Layout::kTotalColumns);
    for (int p = 0; p < Layout::kPitchCount; ++p) {
        if (!audible[p])
            throw DataError("no non-silent reference for pitch " + std::to_string(p + Layout::kLowestPitch));
        const int first = p * Layout::kColumnsPerPitch;
        Eigen::VectorXd filled_mean = Eigen::VectorXd::Zero(bins);
        int filled = 0;
        for (int c = first; c < first + Layout::kColumnsPerPitch; ++c) {
            if (counts[c] == 0)
                continue;
            W.col(c) = sums.col(c) / counts[c];
            filled_mean += W.col(c);
            ++filled;
        }
        filled_mean /= filled;
        for (int c = first; c < first + Layout::kColumnsPerPitch; ++c)
            if (counts[c] == 0)
                W.col(c) = filled_mean;
    }
    return W;
}

std::vector<double> synthesize_note(int pitch, double amplitude, double onset, double offset, std::size_t total_samples,
                                    const HarmonicModel& model, double sample_rate)
{
    if (!(offset > onset) || onset < 0.0)
        throw DataError("synthesized note needs 0 <= onset < offset");
    std::vector<double> out(total_samples, 0.0);
    const double f0 = 440.0 * std::pow(2.0, (pitch - 69) / 12.0);
    const double nyquist = sample_rate / 2.0;
    const auto first = static_cast<std::size_t>(std::ceil(onset * sample_rate));
    for (std::size_t n = first; n < total_samples; ++n) {
        const double t = static_cast<double>(n) / sample_rate;
        const double local = t - onset;
        double env = std::exp(-model.decay_per_second * std::min(local, offset - onset));
        if (t >= offset)
            env *= std::exp(-model.release_decay_per_second * (t - offset));
        double v = 0.0;
        for (int k = 1; k <= model.partials && k * f0 < nyquist; ++k)
            v += std::sin(2.0 * std::numbers::pi * k * f0 * local) / k;
        out[n] = amplitude * env * v;
    }
    return out;
}

std::vector<PitchReference> synthetic_piano_scale(const HarmonicModel& model, double sample_rate)
{
    const auto samples = static_cast<std::size_t>(std::ceil((model.note_seconds + model.tail_seconds) * sample_rate));
    std::vector<PitchReference> refs;
    refs.reserve(Layout::kPitchCount);
    for (int p = Layout::kLowestPitch; p < Layout::kLowestPitch + Layout::kPitchCount; ++p) {
        const auto audio = synthesize_note(p, 1.0, 0.0, model.note_seconds, samples, model, sample_rate);
        auto spec = stft_magnitude(audio, sample_rate);
        refs.push_back({p, std::move(spec.values), frame_index(model.note_seconds, spec.frame_duration)});
    }
    return refs;
}

namespace {

// Calls visit(row, frame) for every cell of the note's activation support.
template <typename Visit>
void for_each_support_cell(const NoteEvent& note, double frame_duration, Eigen::Index frames, bool with_release,
                           Visit&& visit)
{
    const int first = Layout::first_column(note.pitch);
    const int on = frame_index(note.onset, frame_duration);
    const int off = std::max(on + 1, frame_index(note.offset, frame_duration));
    for (int f = std::max(on, 0); f < off && f < frames; ++f)
        visit(first + Layout::sounding_part(f - on), f);
    if (!with_release)
        return;
    for (int r = 0; r < Layout::kReleaseColumns; ++r) {
        const int f = off + r;
        if (f >= 0 && f < frames)
            visit(Layout::release_column(note.pitch, r), f);
    }
}

}  // namespace

Eigen::MatrixXd build_initial_activation(const NoteList& notes, double frame_duration, Eigen::Index frames)
{
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(Layout::kTotalColumns, frames);
    for (const auto& note : notes) {
        const double value = note.velocity / 127.0;
        for_each_support_cell(note, frame_duration, frames, true,
                              [&](int row, int f) { H(row, f) = std::max(H(row, f), value); });
    }
    return H;
}

Eigen::MatrixXd note_activation(const NoteEvent& note, double frame_duration, Eigen::Index frames)
{
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(Layout::kTotalColumns, frames);
    const double value = note.velocity / 127.0;
    for_each_support_cell(note, frame_duration, frames, true, [&](int row, int f) { H(row, f) = value; });
    return H;
}

NMFState make_state(Eigen::MatrixXd W, const NoteList& notes, double frame_duration, Eigen::Index frames)
{
    if (W.cols() != Layout::kTotalColumns)
        throw DataError("template matrix must have 2640 columns");
    NMFState state;
    state.W = std::move(W);
    state.H = build_initial_activation(notes, frame_duration, frames);
    state.notes = notes;
    state.frame_duration = frame_duration;
    return state;
}

double euclidean_error(const Eigen::MatrixXd& S, const Eigen::MatrixXd& W, const Eigen::MatrixXd& H)
{
    return (S - W * H).norm();
}

namespace {

void normalize_max(Eigen::MatrixXd& m)
{
    const double peak = m.size() ? m.maxCoeff() : 0.0;
    if (peak > 0.0)
        m /= peak;
}

}  // namespace

NMFState nmf_fit(const Eigen::MatrixXd& S, NMFState state, const NMFOptions& options, NMFReport* report)
{
    auto& W = state.W;
    auto& H = state.H;
    if (S.rows() != W.rows() || S.cols() != H.cols() || W.cols() != H.rows())
        throw DataError("NMF dimensions are inconsistent");
    if ((S.array() < 0.0).any() || (W.array() < 0.0).any() || (H.array() < 0.0).any())
        throw DataError("NMF inputs must be non-negative");
    if (options.windows < 1 || options.iterations < 0)
        throw DataError("NMF needs at least one window and a non-negative iteration count");
    if (report)
        *report = {euclidean_error(S, W, H), {}};
    if (S.size() == 0 || S.maxCoeff() == 0.0)
        return state;

    const auto notify = [&](UpdateStage stage) {
        if (options.on_update)
            options.on_update(stage, W, H);
    };

    // A template column whose activation row is zero over the frames being
    // fit gets 0/0 from the multiplicative rule; its gradient is zero, so it
    // is left unchanged. The products only need the active rows.
    const auto active_rows = [](const Eigen::MatrixXd& h) {
        std::vector<Eigen::Index> rows;
        for (Eigen::Index r = 0; r < h.rows(); ++r)
            if (h.row(r).maxCoeff() > 0.0)
                rows.push_back(r);
        return rows;
    };
    const auto gather = [](const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& cols) {
        Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t a = 0; a < cols.size(); ++a)
            out.col(static_cast<Eigen::Index>(a)) = m.col(cols[a]);
        return out;
    };

    normalize_max(W);
    normalize_max(H);
    const Eigen::Index T = S.cols();
    const Eigen::Index windows = std::min<Eigen::Index>(options.windows, T);
    const Eigen::Index width = T / windows;
    for (Eigen::Index w = 0; w < windows; ++w) {
        const Eigen::Index start = w * width;
        const Eigen::Index len = w + 1 == windows ? T - start : width;
        const auto Sw = S.middleCols(start, len);
        const auto rows = active_rows(H.middleCols(start, len));
        if (!rows.empty()) {
            Eigen::MatrixXd Hw(static_cast<Eigen::Index>(rows.size()), len);
            for (std::size_t a = 0; a < rows.size(); ++a)
                Hw.row(static_cast<Eigen::Index>(a)) = H.block(rows[a], start, 1, len);
            Eigen::MatrixXd Wa = gather(W, rows);
            const Eigen::MatrixXd num = Sw * Hw.transpose();
            const Eigen::MatrixXd den = Wa * (Hw * Hw.transpose());
            Wa = Wa.cwiseProduct(num).cwiseQuotient((den.array() + kEpsilon).matrix());
            for (std::size_t a = 0; a < rows.size(); ++a)
                W.col(rows[a]) = Wa.col(static_cast<Eigen::Index>(a));
        }
        notify(UpdateStage::template_window);
    }

    normalize_max(W);
    normalize_max(H);
    if (report)
        report->full_errors.push_back(euclidean_error(S, W, H));

    const auto rows = active_rows(H);
    const auto R = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd Wa = gather(W, rows);
    Eigen::MatrixXd Ha(R, H.cols());
    for (Eigen::Index a = 0; a < R; ++a)
        Ha.row(a) = H.row(rows[static_cast<std::size_t>(a)]);
    const auto store = [&] {
        for (Eigen::Index a = 0; a < R; ++a) {
            W.col(rows[static_cast<std::size_t>(a)]) = Wa.col(a);
            H.row(rows[static_cast<std::size_t>(a)]) = Ha.row(a);
        }
    };
    for (int it = 0; it < options.iterations; ++it) {
        {
            const Eigen::MatrixXd num = Wa.transpose() * S;
            const Eigen::MatrixXd den = (Wa.transpose() * Wa) * Ha;
            Ha = Ha.cwiseProduct(num).cwiseQuotient((den.array() + kEpsilon).matrix());
        }
        store();
        notify(UpdateStage::full_activation);
        {
            const Eigen::MatrixXd num = S * Ha.transpose();
            const Eigen::MatrixXd den = Wa * (Ha * Ha.transpose());
            Wa = Wa.cwiseProduct(num).cwiseQuotient((den.array() + kEpsilon).matrix());
        }
        store();
        notify(UpdateStage::full_template);
        if (report)
            report->full_errors.push_back(euclidean_error(S, W, H));
    }
    return state;
}

namespace {

// Per frame, the single template column a note's activation support uses
// before its offset, or -1.
std::vector<int> note_rows(const NoteEvent& note, double frame_duration, Eigen::Index frames)
{
    std::vector<int> rows(static_cast<std::size_t>(frames), -1);
    for_each_support_cell(note, frame_duration, frames, false, [&](int row, int f) { rows[f] = row; });
    return rows;
}

}  // namespace

Eigen::MatrixXd note_reconstruction(const NMFState& state, std::size_t note_index)
{
    if (note_index >= state.notes.size())
        throw DataError("note index out of range");
    const Eigen::Index frames = state.H.cols();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(state.W.rows(), frames);
    const auto rows = note_rows(state.notes[note_index], state.frame_duration, frames);
    for (Eigen::Index f = 0; f < frames; ++f)
        if (rows[f] >= 0)
            out.col(f) = state.W.col(rows[f]) * state.H(rows[f], f);
    return out;
}

Eigen::MatrixXd extract_note_spectrogram(const NMFState& state, const NoteEvent& note)
{
    const auto it = std::find(state.notes.begin(), state.notes.end(), note);
    if (it == state.notes.end())
        throw DataError("note is not part of the separation state");
    const Eigen::Index frames = state.H.cols();
    const auto rows = note_rows(note, state.frame_duration, frames);
    const int on = frame_index(note.onset, state.frame_duration);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(state.W.rows(), kNoteFrames);
    for (Eigen::Index k = 0; k < kNoteFrames; ++k) {
        const Eigen::Index f = on + k;
        if (f >= 0 && f < frames && rows[f] >= 0)
            out.col(k) = state.W.col(rows[f]) * state.H(rows[f], f);
    }
    return out;
}

}  // namespace perfkit::notesep
