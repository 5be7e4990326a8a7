#include "perfkit/align.hpp"

#include "perfkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace perfkit::align {

namespace {

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> positive_intervals(const std::vector<double>& onsets)
{
    std::vector<double> out;
    for (std::size_t i = 1; i < onsets.size(); ++i)
        if (onsets[i] - onsets[i - 1] > 0.0)
            out.push_back(onsets[i] - onsets[i - 1]);
    return out;
}

}  // namespace

TimeMapping::TimeMapping(std::vector<double> from, std::vector<double> to) : from_(std::move(from)), to_(std::move(to))
{
    if (from_.empty() || from_.size() != to_.size())
        throw DataError("time mapping needs matching, non-empty knot lists");
    for (std::size_t i = 1; i < from_.size(); ++i)
        if (!(from_[i] > from_[i - 1]))
            throw DataError("time mapping knots must be strictly increasing");
}

double TimeMapping::operator()(double t) const
{
    if (from_.size() == 1)
        return to_[0] + (t - from_[0]);
    auto seg = static_cast<std::size_t>(std::upper_bound(from_.begin(), from_.end(), t) - from_.begin());
    seg = std::clamp<std::size_t>(seg, 1, from_.size() - 1);
    const double x0 = from_[seg - 1], x1 = from_[seg];
    const double y0 = to_[seg - 1], y1 = to_[seg];
    return y0 + (t - x0) * (y1 - y0) / (x1 - x0);
}

TimeMapping frame_align(const PianoRoll& score_roll, const PianoRoll& perf_roll, int radius)
{
    const double cell = score_roll.cell_duration();
    if (std::abs(cell - perf_roll.cell_duration()) > 1e-12 * cell)
        throw DataError("frame alignment needs rolls with equal cell durations");
    if (score_roll.columns() == 0 || perf_roll.columns() == 0)
        throw DataError("frame alignment needs non-empty rolls");
    if (score_roll.values().isZero(0.0) || perf_roll.values().isZero(0.0))
        throw DataError("cosine distance is undefined on an all-zero piano roll");

    const auto result = fastdtw(score_roll.values(), perf_roll.values(), radius, Distance::cosine);

    const auto n = static_cast<std::size_t>(score_roll.columns());
    std::vector<double> sum(n, 0.0), count(n, 0.0);
    for (const auto& [i, j] : result.path.pairs) {
        sum[i] += static_cast<double>(j);
        count[i] += 1.0;
    }
    std::vector<double> from(n), to(n);
    for (std::size_t i = 0; i < n; ++i) {
        from[i] = static_cast<double>(i) * cell;
        to[i] = sum[i] / count[i] * cell;
    }
    return TimeMapping(std::move(from), std::move(to));
}

NoteList apply_mapping(const NoteList& notes, const TimeMapping& mapping)
{
    std::vector<NoteEvent> out;
    out.reserve(notes.size());
    for (const auto& n : notes) {
        NoteEvent m = n;
        m.onset = std::max(0.0, mapping(n.onset));
        m.offset = mapping(n.offset);
        if (!(m.offset > m.onset))
            m.offset = m.onset + n.duration();
        out.push_back(m);
    }
    return NoteList(std::move(out));
}

NoteMatching match_notes(const NoteList& score, const NoteList& performance)
{
    std::map<int, std::vector<std::size_t>> score_lanes, perf_lanes;
    for (std::size_t i = 0; i < score.size(); ++i)
        score_lanes[score[i].pitch].push_back(i);
    for (std::size_t i = 0; i < performance.size(); ++i)
        perf_lanes[performance[i].pitch].push_back(i);

    NoteMatching matching;
    std::vector<bool> score_used(score.size(), false), perf_used(performance.size(), false);

    for (const auto& [pitch, s_idx] : score_lanes) {
        const auto it = perf_lanes.find(pitch);
        if (it == perf_lanes.end())
            continue;
        const auto& p_idx = it->second;

        std::vector<double> s_on, p_on;
        for (auto i : s_idx)
            s_on.push_back(score[i].onset);
        for (auto i : p_idx)
            p_on.push_back(performance[i].onset);
        auto intervals = positive_intervals(s_on);
        const auto perf_intervals = positive_intervals(p_on);
        intervals.insert(intervals.end(), perf_intervals.begin(), perf_intervals.end());
        const double skip = intervals.empty() ? 1.0 : 2.0 * median(intervals);

        const std::size_t n = s_on.size(), m = p_on.size();
        // 0 = match, 1 = skip score note, 2 = skip performance note
        std::vector<std::vector<double>> acc(n + 1, std::vector<double>(m + 1, 0.0));
        std::vector<std::vector<int>> move(n + 1, std::vector<int>(m + 1, 0));
        for (std::size_t i = 1; i <= n; ++i) {
            acc[i][0] = acc[i - 1][0] + skip;
            move[i][0] = 1;
        }
        for (std::size_t j = 1; j <= m; ++j) {
            acc[0][j] = acc[0][j - 1] + skip;
            move[0][j] = 2;
        }
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t j = 1; j <= m; ++j) {
                double best = acc[i - 1][j - 1] + std::abs(s_on[i - 1] - p_on[j - 1]);
                int mv = 0;
                if (acc[i - 1][j] + skip < best) {
                    best = acc[i - 1][j] + skip;
                    mv = 1;
                }
                if (acc[i][j - 1] + skip < best) {
                    best = acc[i][j - 1] + skip;
                    mv = 2;
                }
                acc[i][j] = best;
                move[i][j] = mv;
            }
        }
        for (std::size_t i = n, j = m; i > 0 || j > 0;) {
            const int mv = move[i][j];
            if (mv == 0) {
                matching.matched.emplace_back(s_idx[i - 1], p_idx[j - 1]);
                score_used[s_idx[i - 1]] = true;
                perf_used[p_idx[j - 1]] = true;
                --i;
                --j;
            } else if (mv == 1) {
                --i;
            } else {
                --j;
            }
        }
    }

    std::sort(matching.matched.begin(), matching.matched.end());
    for (std::size_t i = 0; i < score.size(); ++i)
        if (!score_used[i])
            matching.unmatched_score.push_back(i);
    for (std::size_t i = 0; i < performance.size(); ++i)
        if (!perf_used[i])
            matching.unmatched_perf.push_back(i);
    return matching;
}

NoteList note_align(const NoteList& score, const NoteList& performance, const NoteMatching& matching)
{
    validate(matching, score.size(), performance.size());
    if (matching.matched.size() < 2)
        throw DataError("note alignment needs at least 2 matched notes");

    // Anchors keyed by score onset; simultaneous score onsets average their
    // performance onsets.
    std::map<double, std::pair<double, int>> anchors;
    for (const auto& [s, p] : matching.matched) {
        auto& slot = anchors[score[s].onset];
        slot.first += performance[p].onset;
        slot.second += 1;
    }
    if (anchors.size() < 2)
        throw DataError("note alignment needs matched notes at 2 distinct score onsets");
    std::vector<double> from, to;
    for (const auto& [t, acc] : anchors) {
        from.push_back(t);
        const double mapped = acc.first / acc.second;
        to.push_back(to.empty() ? mapped : std::max(mapped, to.back()));
    }
    const TimeMapping mapping(std::move(from), std::move(to));

    std::vector<NoteEvent> out(score.begin(), score.end());
    std::vector<bool> matched(score.size(), false);
    for (const auto& [s, p] : matching.matched) {
        out[s].onset = performance[p].onset;
        out[s].offset = performance[p].offset;
        matched[s] = true;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (matched[i])
            continue;
        const auto& orig = score[i];
        out[i].onset = std::max(0.0, mapping(orig.onset));
        out[i].offset = mapping(orig.offset);
        if (!(out[i].offset > out[i].onset))
            out[i].offset = out[i].onset + orig.duration();
    }
    return NoteList(std::move(out));
}

EvalCurve eval_matched_ratio(const NoteList& aligned, const NoteList& ground_truth, std::span<const double> thresholds)
{
    if (aligned.size() != ground_truth.size())
        throw DataError("evaluation needs equally long note lists (" + std::to_string(aligned.size()) + " vs " +
                        std::to_string(ground_truth.size()) + ")");
    if (!std::is_sorted(thresholds.begin(), thresholds.end()))
        throw DataError("evaluation thresholds must be sorted");

    EvalCurve curve;
    curve.thresholds.assign(thresholds.begin(), thresholds.end());
    const double total = static_cast<double>(aligned.size());
    for (double th : thresholds) {
        if (aligned.empty()) {
            curve.onset_ratio.push_back(1.0);
            curve.offset_ratio.push_back(1.0);
            continue;
        }
        std::size_t on = 0, off = 0;
        for (std::size_t i = 0; i < aligned.size(); ++i) {
            on += std::abs(aligned[i].onset - ground_truth[i].onset) <= th ? 1 : 0;
            off += std::abs(aligned[i].offset - ground_truth[i].offset) <= th ? 1 : 0;
        }
        curve.onset_ratio.push_back(static_cast<double>(on) / total);
        curve.offset_ratio.push_back(static_cast<double>(off) / total);
    }
    return curve;
}

EvalCurve macro_average(std::span<const EvalCurve> curves)
{
    if (curves.empty())
        throw DataError("macro average needs at least one curve");
    EvalCurve out;
    out.thresholds = curves.front().thresholds;
    out.onset_ratio.assign(out.thresholds.size(), 0.0);
    out.offset_ratio.assign(out.thresholds.size(), 0.0);
    for (const auto& c : curves) {
        if (c.thresholds != out.thresholds)
            throw DataError("macro average needs curves with identical thresholds");
        for (std::size_t k = 0; k < out.thresholds.size(); ++k) {
            out.onset_ratio[k] += c.onset_ratio[k];
            out.offset_ratio[k] += c.offset_ratio[k];
        }
    }
    const double n = static_cast<double>(curves.size());
    for (std::size_t k = 0; k < out.thresholds.size(); ++k) {
        out.onset_ratio[k] /= n;
        out.offset_ratio[k] /= n;
    }
    return out;
}

}  // namespace perfkit::align
