#include "perfkit/evalmeasure.hpp"

#include "perfkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace perfkit::evalmeasure {

namespace {

// Kuhn's augmenting paths; adjacency lists hold target indices.
class BipartiteMatcher {
public:
    BipartiteMatcher(const std::vector<std::vector<std::size_t>>& adj, std::size_t right)
        : adj_(adj), match_right_(right, kFree)
    {
    }

    std::size_t run()
    {
        std::size_t total = 0;
        for (std::size_t u = 0; u < adj_.size(); ++u) {
            visited_.assign(match_right_.size(), false);
            if (augment(u))
                ++total;
        }
        return total;
    }

private:
    static constexpr std::size_t kFree = static_cast<std::size_t>(-1);

    bool augment(std::size_t u)
    {
        for (std::size_t v : adj_[u]) {
            if (visited_[v])
                continue;
            visited_[v] = true;
            if (match_right_[v] == kFree || augment(match_right_[v])) {
                match_right_[v] = u;
                return true;
            }
        }
        return false;
    }

    const std::vector<std::vector<std::size_t>>& adj_;
    std::vector<std::size_t> match_right_;
    std::vector<bool> visited_;
};

double ratio(std::size_t num, std::size_t den) { return den ? static_cast<double>(num) / den : 0.0; }

struct Moments {
    double mean = 0.0;
    double std = 0.0;
};

Moments moments(const std::vector<double>& v)
{
    if (v.empty())
        return {};
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / n)};
}

}  // namespace

F1Result obj_f1(const NoteList& prediction, const NoteList& target, const MatchCriteria& criteria)
{
    if (!(criteria.onset_tol > 0.0 && criteria.offset_tol > 0.0 && criteria.pitch_tol > 0.0 &&
          criteria.velocity_tol > 0.0))
        throw DataError("match tolerances must be positive");

    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        for (std::size_t j = 0; j < target.size(); ++j) {
            const auto& p = prediction[i];
            const auto& t = target[j];
            if (std::abs(p.onset - t.onset) <= criteria.onset_tol &&
                std::abs(p.offset - t.offset) <= criteria.offset_tol &&
                std::abs(p.pitch - t.pitch) <= criteria.pitch_tol)
                candidates.emplace_back(i, j);
        }
    }

    double slope = 1.0;
    double intercept = 0.0;
    if (!candidates.empty()) {
        const double n = static_cast<double>(candidates.size());
        double mp = 0.0;
        double mt = 0.0;
        for (auto [i, j] : candidates) {
            mp += prediction[i].velocity;
            mt += target[j].velocity;
        }
        mp /= n;
        mt /= n;
        double cov = 0.0;
        double var = 0.0;
        for (auto [i, j] : candidates) {
            cov += (prediction[i].velocity - mp) * (target[j].velocity - mt);
            var += (prediction[i].velocity - mp) * (prediction[i].velocity - mp);
        }
        if (var > 0.0)
            slope = cov / var;
        intercept = mt - slope * mp;
    }

    std::vector<std::vector<std::size_t>> adj(prediction.size());
    const double vel_tol = criteria.velocity_tol * 127.0;
    for (auto [i, j] : candidates) {
        const double v = slope * prediction[i].velocity + intercept;
        if (std::abs(v - target[j].velocity) <= vel_tol)
            adj[i].push_back(j);
    }

    F1Result r;
    r.matches = BipartiteMatcher(adj, target.size()).run();
    r.precision = ratio(r.matches, prediction.size());
    r.recall = ratio(r.matches, target.size());
    r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

const std::array<std::string_view, kFeatureCount>& feature_names()
{
    static const std::array<std::string_view, kFeatureCount> names{
        "pitch_mean",      "pitch_std",      "velocity_mean",   "velocity_std",
        "duration_mean",   "duration_std",   "polyphony_mean",  "polyphony_std",
        "pitch_diff_mean", "pitch_diff_std", "onsets_0.1_mean", "onsets_0.1_std",
        "onsets_1_mean",   "onsets_1_std",   "onsets_10_mean",  "onsets_10_std",
    };
    return names;
}

SymbolicFeatures symbolic_features(const NoteList& notes, double cell_duration)
{
    if (notes.empty())
        throw DataError("symbolic features need at least one note");
    if (!(cell_duration > 0.0))
        throw DataError("cell duration must be positive");

    SymbolicFeatures out{};
    std::size_t slot = 0;
    const auto put = [&](const std::vector<double>& v) {
        const auto m = moments(v);
        out[slot++] = m.mean;
        out[slot++] = m.std;
    };

    std::vector<double> pitch;
    std::vector<double> velocity;
    std::vector<double> duration;
    for (const auto& n : notes) {
        pitch.push_back(n.pitch);
        velocity.push_back(n.velocity);
        duration.push_back(n.duration());
    }
    put(pitch);
    put(velocity);
    put(duration);

    const PianoRoll roll = notes_to_pianoroll(notes, cell_duration, RollKind::boolean);
    std::vector<double> polyphony;
    std::vector<double> above_lowest;
    for (Eigen::Index c = 0; c < roll.columns(); ++c) {
        int lowest = -1;
        int count = 0;
        for (int p = 0; p < kPitchCount; ++p) {
            if (roll.values()(p, c) == 0.0)
                continue;
            if (lowest < 0)
                lowest = p;
            ++count;
            above_lowest.push_back(p - lowest);
        }
        if (count > 0)
            polyphony.push_back(count);
    }
    put(polyphony);
    put(above_lowest);

    // Window k covers hop positions [k, k + 2) measured from the first
    // onset. Positions within 1e-9 of an integer are snapped so decimal
    // window sizes do not move onsets across a boundary.
    const double first = notes.start_time();
    for (double w : kOnsetWindows) {
        const double hop = w / 2.0;
        std::vector<double> position;
        for (const auto& n : notes) {
            const double r = (n.onset - first) / hop;
            const double nearest = std::round(r);
            position.push_back(std::abs(r - nearest) < 1e-9 ? nearest : r);
        }
        const auto windows = static_cast<std::size_t>(std::floor(position.back())) + 1;
        std::vector<double> counts(windows, 0.0);
        for (std::size_t k = 0; k < windows; ++k) {
            const double a = static_cast<double>(k);
            const auto lo = std::lower_bound(position.begin(), position.end(), a);
            const auto hi = std::lower_bound(position.begin(), position.end(), a + 2.0);
            counts[k] = static_cast<double>(hi - lo);
        }
        put(counts);
    }
    return out;
}

ReferenceStats reference_stats(const std::vector<SymbolicFeatures>& corpus)
{
    if (corpus.empty())
        throw DataError("reference statistics need at least one piece");
    ReferenceStats s;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        std::vector<double> v;
        for (const auto& piece : corpus)
            v.push_back(piece[f]);
        const auto m = moments(v);
        s.mean[f] = m.mean;
        s.std[f] = m.std;
    }
    return s;
}

Eigen::VectorXd measure_row(const SymbolicFeatures& prediction, const SymbolicFeatures& target, double f1,
                            const ReferenceStats& stats)
{
    Eigen::VectorXd row(kRowSize);
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        const double scale = stats.std[f] > 0.0 ? stats.std[f] : 1.0;
        row[static_cast<Eigen::Index>(f)] = (target[f] - stats.mean[f]) / scale - (prediction[f] - stats.mean[f]) / scale;
    }
    row[kFeatureCount] = f1;
    return row;
}

}  // namespace perfkit::evalmeasure
