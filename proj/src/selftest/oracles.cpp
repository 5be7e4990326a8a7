#include "oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace perfkit::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double brute_force_dtw_cost(const Eigen::MatrixXd& cost)
{
    const auto n = static_cast<std::size_t>(cost.rows());
    const auto m = static_cast<std::size_t>(cost.cols());
    double best = kInf;
    std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double acc) {
        acc += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (i + 1 == n && j + 1 == m) {
            best = std::min(best, acc);
            return;
        }
        if (i + 1 < n && j + 1 < m)
            walk(i + 1, j + 1, acc);
        if (i + 1 < n)
            walk(i + 1, j, acc);
        if (j + 1 < m)
            walk(i, j + 1, acc);
    };
    walk(0, 0, 0.0);
    return best;
}

std::size_t monotone_path_count(std::size_t n, std::size_t m)
{
    // Delannoy numbers.
    std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(m, 1));
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 1; j < m; ++j)
            d[i][j] = d[i - 1][j] + d[i][j - 1] + d[i - 1][j - 1];
    return d[n - 1][m - 1];
}

std::vector<NaiveEdge> melody_graph_edges(const NoteList& notes, const std::vector<double>& probs, double threshold)
{
    std::vector<std::size_t> node_note;
    std::vector<double> end_time{0.0};
    for (std::size_t i = 0; i < notes.size(); ++i) {
        if (probs[i] >= threshold) {
            node_note.push_back(i);
            end_time.push_back(notes[i].offset);
        }
    }
    const std::size_t end = node_note.size() + 1;
    std::vector<NaiveEdge> edges;
    for (std::size_t u = 0; u < end; ++u) {
        double min_onset = kInf;
        for (const auto& n : notes)
            if (n.onset >= end_time[u])
                min_onset = std::min(min_onset, n.onset);
        if (min_onset == kInf) {
            edges.push_back({u, end, 0.5});
            continue;
        }
        for (std::size_t k = 0; k < node_note.size(); ++k) {
            const auto& n = notes[node_note[k]];
            if (n.onset == min_onset)
                edges.push_back({u, k + 1, -probs[node_note[k]]});
        }
    }
    return edges;
}

PathOptimum best_path_by_enumeration(std::size_t node_count, const std::vector<NaiveEdge>& edges)
{
    PathOptimum best;
    best.weight = kInf;
    std::vector<std::size_t> stack{0};
    std::function<void(std::size_t, double)> walk = [&](std::size_t u, double acc) {
        if (u + 1 == node_count) {
            if (acc < best.weight) {
                best.weight = acc;
                best.nodes = stack;
                best.reachable = true;
            }
            return;
        }
        for (const auto& e : edges) {
            if (e.from != u)
                continue;
            stack.push_back(e.to);
            walk(e.to, acc + e.weight);
            stack.pop_back();
        }
    };
    walk(0, 0.0);
    if (!best.reachable)
        best.weight = 0.0;
    return best;
}

std::vector<std::size_t> naive_single_linkage(const std::vector<double>& sorted_values, double t)
{
    std::vector<std::vector<double>> clusters;
    for (double v : sorted_values)
        clusters.push_back({v});
    while (clusters.size() > 1) {
        double best = kInf;
        std::size_t a = 0;
        std::size_t b = 0;
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                double gap = kInf;
                for (double x : clusters[i])
                    for (double y : clusters[j])
                        gap = std::min(gap, std::abs(x - y));
                if (gap < best) {
                    best = gap;
                    a = i;
                    b = j;
                }
            }
        }
        if (best >= t)
            break;
        clusters[a].insert(clusters[a].end(), clusters[b].begin(), clusters[b].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(b));
    }
    std::vector<std::size_t> id(sorted_values.size());
    for (std::size_t i = 0; i < sorted_values.size(); ++i)
        for (std::size_t c = 0; c < clusters.size(); ++c)
            if (std::find(clusters[c].begin(), clusters[c].end(), sorted_values[i]) != clusters[c].end())
                id[i] = c;
    return id;
}

double brute_force_dispersion_value(const Eigen::MatrixXd& points, std::size_t p, bool manhattan)
{
    const auto n = static_cast<std::size_t>(points.rows());
    double best = -kInf;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != p)
            continue;
        double worst = kInf;
        for (std::size_t a = 0; a < n; ++a) {
            if (!(mask >> a & 1u))
                continue;
            for (std::size_t b = a + 1; b < n; ++b) {
                if (!(mask >> b & 1u))
                    continue;
                const auto diff = points.row(static_cast<Eigen::Index>(a)) - points.row(static_cast<Eigen::Index>(b));
                worst = std::min(worst, manhattan ? diff.cwiseAbs().sum() : diff.norm());
            }
        }
        best = std::max(best, worst);
    }
    return best;
}

std::vector<double> direct_mfcc(const std::vector<double>& spectrum, double sample_rate)
{
    constexpr int bands = 40;
    constexpr int coeffs = 13;
    const std::size_t bins = spectrum.size();
    const double nyquist = sample_rate / 2.0;
    const auto mel = [](double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); };
    const auto hz = [](double m) { return 700.0 * (std::exp(m / 1127.0) - 1.0); };

    std::vector<double> log_energy(bands);
    for (int b = 0; b < bands; ++b) {
        const double lo = hz(mel(nyquist) * b / (bands + 1));
        const double mid = hz(mel(nyquist) * (b + 1) / (bands + 1));
        const double hi = hz(mel(nyquist) * (b + 2) / (bands + 1));
        double weighted = 0.0;
        double weight_sum = 0.0;
        for (std::size_t k = 0; k < bins; ++k) {
            const double f = nyquist * static_cast<double>(k) / static_cast<double>(bins - 1);
            double w = 0.0;
            if (f >= lo && f <= mid)
                w = (f - lo) / (mid - lo);
            else if (f > mid && f <= hi)
                w = (hi - f) / (hi - mid);
            weighted += w * spectrum[k];
            weight_sum += w;
        }
        const double energy = weight_sum > 0.0 ? weighted / weight_sum : 0.0;
        log_energy[b] = std::log(std::max(energy, 1e-10));
    }

    const double pi = std::acos(-1.0);
    std::vector<double> out(coeffs);
    for (int k = 0; k < coeffs; ++k) {
        double s = 0.0;
        for (int n = 0; n < bands; ++n)
            s += log_energy[n] * std::cos(pi * k * (n + 0.5) / bands);
        out[k] = s * (k == 0 ? std::sqrt(1.0 / bands) : std::sqrt(2.0 / bands));
    }
    return out;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b)
{
    const double ta = std::accumulate(a.begin(), a.end(), 0.0);
    const double tb = std::accumulate(b.begin(), b.end(), 0.0);
    double tv = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        tv += std::abs(a[i] / ta - b[i] / tb);
    return 0.5 * tv;
}

NoteList random_notes(std::mt19937_64& rng, std::size_t count, double step, int low_pitch, int high_pitch)
{
    std::uniform_int_distribution<int> slot(0, static_cast<int>(count) * 2);
    std::uniform_int_distribution<int> length(1, 8);
    std::uniform_int_distribution<int> pitch(low_pitch, high_pitch);
    std::uniform_int_distribution<int> velocity(20, 120);
    std::vector<NoteEvent> notes;
    for (std::size_t i = 0; i < count; ++i) {
        const double onset = slot(rng) * step;
        notes.push_back({pitch(rng), onset, onset + length(rng) * step, velocity(rng)});
    }
    return NoteList(std::move(notes));
}

}  // namespace perfkit::oracle
