#include "perfkit/misalign.hpp"

#include "perfkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace perfkit::misalign {

namespace {

constexpr int kMaxRatioRedraws = 100;
constexpr double kRatioFloor = 0.01;

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

MeanStd mean_std(std::span<const double> values)
{
    MeanStd r;
    r.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values)
        ss += (v - r.mean) * (v - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(values.size()));
    // Constant inputs can leave rounding residue in the std.
    if (r.std <= 1e-12 * std::max(1.0, std::abs(r.mean)))
        r.std = 0.0;
    return r;
}

double uniform01(Rng& rng)
{
    double u = std::generate_canonical<double, std::numeric_limits<double>::digits>(rng);
    return u >= 1.0 ? std::nextafter(1.0, 0.0) : u;
}

io::Json histogram_to_json(const Histogram& h)
{
    io::Json j;
    j["edges"] = h.edges();
    j["counts"] = h.counts();
    return j;
}

Histogram histogram_from_json(const io::Json& j, const char* name)
{
    try {
        return Histogram(j.at(name).at("edges").get<std::vector<double>>(),
                         j.at(name).at("counts").get<std::vector<double>>());
    } catch (const io::Json::exception& e) {
        throw DataError(std::string("malformed histogram '") + name + "': " + e.what());
    }
}

}  // namespace

Histogram::Histogram(std::vector<double> edges, std::vector<double> counts)
    : edges_(std::move(edges)), counts_(std::move(counts))
{
    if (edges_.empty() && counts_.empty())
        return;
    if (edges_.size() != counts_.size() + 1)
        throw DataError("histogram needs exactly one more edge than bins");
    for (std::size_t i = 1; i < edges_.size(); ++i)
        if (!(edges_[i] > edges_[i - 1]))
            throw DataError("histogram edges must be strictly increasing");
    for (double c : counts_)
        if (!(c >= 0.0) || !std::isfinite(c))
            throw DataError("histogram counts must be finite and non-negative");
}

Histogram Histogram::from_values(std::span<const double> values, std::size_t bins)
{
    if (values.empty())
        return {};
    if (bins == 0)
        throw DataError("histogram bin count must be positive");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw DataError("histogram values must be finite");
    if (lo == hi) {
        return Histogram({lo, std::nextafter(lo, std::numeric_limits<double>::infinity())},
                         {static_cast<double>(values.size())});
    }
    std::vector<double> edges(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    edges.back() = hi;
    // A range only a few ulps wide cannot hold that many distinct edges.
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    const std::size_t kept = edges.size() - 1;
    Histogram h(std::move(edges), std::vector<double>(kept, 0.0));
    for (double v : values)
        h.counts_[h.bin_of(v)] += 1.0;
    return h;
}

double Histogram::total() const
{
    return std::accumulate(counts_.begin(), counts_.end(), 0.0);
}

std::size_t Histogram::bin_of(double value) const
{
    if (counts_.empty())
        throw DataError("bin_of on an empty histogram");
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), value);
    if (it == edges_.begin())
        return 0;
    const auto idx = static_cast<std::size_t>(it - edges_.begin()) - 1;
    return std::min(idx, counts_.size() - 1);
}

double Histogram::sample(Rng& rng) const
{
    const double tot = total();
    if (!(tot > 0.0))
        throw DataError("cannot sample from a histogram with zero total count");
    const double target = uniform01(rng) * tot;
    std::size_t bin = 0;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        if (counts_[i] <= 0.0)
            continue;
        bin = i;
        cumulative += counts_[i];
        if (target < cumulative)
            break;
    }
    const double lo = edges_[bin];
    const double hi = edges_[bin + 1];
    const double v = lo + uniform01(rng) * (hi - lo);
    return v < hi ? v : lo;
}

bool MisalignmentModel::fitted() const
{
    return !x_ons.empty() && !x_dur.empty() && !y_ons_mean.empty() && !y_dur_mean.empty();
}

MisalignmentModel fit_misalignment_model(std::span<const FitPiece> pieces, std::size_t bins)
{
    if (pieces.empty())
        throw DataError("cannot fit a misalignment model without pieces");

    MisalignmentModel model;
    std::vector<double> x_ons, x_dur, ons_means, ons_stds, dur_means, dur_stds;
    for (const auto& piece : pieces) {
        validate(piece.matching, piece.score.size(), piece.performance.size());
        if (piece.matching.matched.size() < 2) {
            ++model.pieces_skipped;
            continue;
        }
        std::vector<double> ons, dur;
        for (const auto& [s, p] : piece.matching.matched) {
            const auto& sn = piece.score[s];
            const auto& pn = piece.performance[p];
            ons.push_back(sn.onset - pn.onset);
            dur.push_back(sn.duration() / pn.duration());
        }
        const auto o = mean_std(ons);
        const auto d = mean_std(dur);
        // A zero std cannot standardize; it acts as 1 and the piece adds no
        // std sample.
        const double o_scale = o.std > 0.0 ? o.std : 1.0;
        const double d_scale = d.std > 0.0 ? d.std : 1.0;
        for (double v : ons)
            x_ons.push_back((v - o.mean) / o_scale);
        for (double v : dur)
            x_dur.push_back((v - d.mean) / d_scale);
        ons_means.push_back(o.mean);
        dur_means.push_back(d.mean);
        if (o.std > 0.0)
            ons_stds.push_back(o.std);
        else
            ++model.zero_std_onset;
        if (d.std > 0.0)
            dur_stds.push_back(d.std);
        else
            ++model.zero_std_duration;
        ++model.pieces_used;
    }
    if (model.pieces_used == 0)
        throw DataError("no piece had at least 2 matched notes");

    model.x_ons = Histogram::from_values(x_ons, bins);
    model.x_dur = Histogram::from_values(x_dur, bins);
    model.y_ons_mean = Histogram::from_values(ons_means, bins);
    model.y_ons_std = Histogram::from_values(ons_stds, bins);
    model.y_dur_mean = Histogram::from_values(dur_means, bins);
    model.y_dur_std = Histogram::from_values(dur_stds, bins);
    return model;
}

double sample_histogram(const Histogram& h, Rng& rng)
{
    return h.sample(rng);
}

NoteList sample_misaligned(const NoteList& reference, const MisalignmentModel& model, Rng& rng)
{
    if (reference.empty())
        throw DataError("reference note list is empty");
    if (!model.fitted())
        throw DataError("misalignment model is not fitted");

    const double ons_mean = model.y_ons_mean.sample(rng);
    const double ons_std = model.y_ons_std.empty() ? 1.0 : model.y_ons_std.sample(rng);
    const double dur_mean = model.y_dur_mean.sample(rng);
    const double dur_std = model.y_dur_std.empty() ? 1.0 : model.y_dur_std.sample(rng);

    std::vector<NoteEvent> out;
    out.reserve(reference.size());
    double min_onset = std::numeric_limits<double>::infinity();
    for (const auto& ref : reference) {
        const double shift = model.x_ons.sample(rng) * ons_std + ons_mean;
        double ratio = 0.0;
        for (int attempt = 0; attempt < kMaxRatioRedraws && !(ratio > 0.0); ++attempt)
            ratio = model.x_dur.sample(rng) * dur_std + dur_mean;
        if (!(ratio > 0.0))
            ratio = kRatioFloor;

        NoteEvent n = ref;
        n.onset = ref.onset + shift;
        n.offset = n.onset + ref.duration() * ratio;
        min_onset = std::min(min_onset, n.onset);
        out.push_back(n);
    }
    // Onsets must stay non-negative; shift the whole piece rather than
    // clipping single notes.
    if (min_onset < 0.0) {
        for (auto& n : out) {
            n.onset -= min_onset;
            n.offset -= min_onset;
        }
    }
    return NoteList(std::move(out));
}

std::size_t MissingExtraLabels::tagged() const
{
    std::size_t n = 0;
    for (std::size_t i = 0; i < missing.size(); ++i)
        n += (missing[i] || extra[i]) ? 1 : 0;
    return n;
}

MissingExtraLabels generate_missing_extra(const NoteList& notes, Rng& rng)
{
    const std::size_t count = notes.size();
    if (count < 2)
        throw DataError("missing/extra generation needs at least 2 notes");

    // Integer tag counts strictly inside (0.1 L, 0.5 L).
    const double len = static_cast<double>(count);
    const auto lo = static_cast<std::size_t>(std::floor(0.1 * len)) + 1;
    const auto hi = static_cast<std::size_t>(std::ceil(0.5 * len)) - 1;
    std::size_t target = 1;
    if (lo <= hi)
        target = std::uniform_int_distribution<std::size_t>(lo, hi)(rng);

    MissingExtraLabels labels;
    labels.missing.assign(count, false);
    labels.extra.assign(count, false);
    std::vector<bool> taken(count, false);

    std::size_t remaining = target;
    while (remaining > 0) {
        std::size_t run = std::uniform_int_distribution<std::size_t>(1, remaining)(rng);

        // Free gaps as (start, length).
        std::vector<std::pair<std::size_t, std::size_t>> gaps;
        for (std::size_t i = 0; i < count;) {
            if (taken[i]) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < count && !taken[j])
                ++j;
            gaps.emplace_back(i, j - i);
            i = j;
        }
        std::size_t widest = 0;
        for (const auto& g : gaps)
            widest = std::max(widest, g.second);
        run = std::min(run, widest);

        std::vector<std::size_t> starts;
        for (const auto& [g_start, g_len] : gaps)
            for (std::size_t s = g_start; s + run <= g_start + g_len; ++s)
                starts.push_back(s);
        const std::size_t start = starts[std::uniform_int_distribution<std::size_t>(0, starts.size() - 1)(rng)];

        TaggedRun r;
        r.start = start;
        r.length = run;
        r.p_missing = 0.25 + 0.5 * uniform01(rng);
        r.p_extra = 1.0 - r.p_missing;
        r.missing = uniform01(rng) < r.p_missing;
        for (std::size_t i = start; i < start + run; ++i) {
            taken[i] = true;
            (r.missing ? labels.missing : labels.extra)[i] = true;
        }
        labels.runs.push_back(r);
        remaining -= run;
    }
    return labels;
}

NoteList cluster_chords(const NoteList& notes, double t)
{
    if (!(t > 0.0))
        throw DataError("chord clustering threshold must be positive");
    if (notes.empty())
        return notes;

    // Notes are sorted by onset, so 1-D single linkage reduces to cutting
    // the sorted sequence wherever consecutive onsets are >= t apart.
    std::vector<NoteEvent> out(notes.begin(), notes.end());
    std::size_t begin = 0;
    while (begin < out.size()) {
        std::size_t end = begin + 1;
        while (end < out.size() && notes[end].onset - notes[end - 1].onset < t)
            ++end;
        double sum = 0.0;
        for (std::size_t i = begin; i < end; ++i)
            sum += notes[i].onset;
        const double mean = sum / static_cast<double>(end - begin);
        for (std::size_t i = begin; i < end; ++i) {
            out[i].onset = mean;
            if (!(out[i].offset > mean))
                out[i].offset = mean + notes[i].duration();
        }
        begin = end;
    }
    return NoteList(std::move(out));
}

io::Json model_to_json(const MisalignmentModel& model)
{
    io::Json j;
    j["x_ons"] = histogram_to_json(model.x_ons);
    j["x_dur"] = histogram_to_json(model.x_dur);
    j["y_ons_mean"] = histogram_to_json(model.y_ons_mean);
    j["y_ons_std"] = histogram_to_json(model.y_ons_std);
    j["y_dur_mean"] = histogram_to_json(model.y_dur_mean);
    j["y_dur_std"] = histogram_to_json(model.y_dur_std);
    return j;
}

MisalignmentModel model_from_json(const io::Json& doc)
{
    MisalignmentModel m;
    m.x_ons = histogram_from_json(doc, "x_ons");
    m.x_dur = histogram_from_json(doc, "x_dur");
    m.y_ons_mean = histogram_from_json(doc, "y_ons_mean");
    m.y_ons_std = histogram_from_json(doc, "y_ons_std");
    m.y_dur_mean = histogram_from_json(doc, "y_dur_mean");
    m.y_dur_std = histogram_from_json(doc, "y_dur_std");
    return m;
}

}  // namespace perfkit::misalign
