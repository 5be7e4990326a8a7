#include "perfkit/melody.hpp"

#include "perfkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace perfkit::melody {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<bool> skyline(const NoteList& notes)
{
    std::vector<bool> melody(notes.size(), true);
    for (std::size_t i = 0; i < notes.size(); ++i) {
        const double t = notes[i].onset;
        // Sorted by onset: only notes before the first later onset can be
        // sounding at t.
        for (std::size_t j = 0; j < notes.size() && notes[j].onset <= t; ++j) {
            if (j != i && notes[j].offset > t && notes[j].pitch > notes[i].pitch) {
                melody[i] = false;
                break;
            }
        }
    }
    return melody;
}

NoteProbabilities note_probabilities(const PianoRoll& prob_roll, const NoteList& notes)
{
    NoteProbabilities probs;
    probs.reserve(notes.size());
    const auto& values = prob_roll.values();
    for (std::size_t i = 0; i < notes.size(); ++i) {
        const auto [first, last] = covered_cells(notes[i], prob_roll.cell_duration());
        const Eigen::Index stop = std::min(last, values.cols());
        if (first >= stop)
            throw DataError("note " + std::to_string(i) + " covers no cell of the probability roll");
        std::vector<double> cells;
        for (Eigen::Index c = first; c < stop; ++c)
            cells.push_back(values(notes[i].pitch, c));
        probs.push_back(median(std::move(cells)));
    }
    return probs;
}

double cluster_threshold(const NoteProbabilities& probs)
{
    std::vector<double> distinct(probs.begin(), probs.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2)
        return -kInf;

    // Single linkage on a line merges the smallest gaps first, so stopping
    // at two clusters cuts at the widest gap (the lowest one on ties).
    std::size_t cut = 1;
    for (std::size_t i = 2; i < distinct.size(); ++i)
        if (distinct[i] - distinct[i - 1] > distinct[cut] - distinct[cut - 1])
            cut = i;
    return distinct[cut - 1];
}

std::vector<bool> retain_over_threshold(const NoteProbabilities& probs, double threshold)
{
    std::vector<bool> keep(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i)
        keep[i] = probs[i] > threshold;
    return keep;
}

std::vector<std::vector<std::size_t>> MeloDigraph::successors() const
{
    std::vector<std::vector<std::size_t>> out(nodes.size());
    for (const auto& e : edges)
        out[e.from].push_back(e.to);
    return out;
}

MeloDigraph build_melo_digraph(const NoteList& notes, const NoteProbabilities& probs, double threshold)
{
    if (probs.size() != notes.size())
        throw DataError("note probabilities do not match the note list");
    for (double p : probs)
        if (!(p >= 0.0 && p <= 1.0))
            throw DataError("note probabilities must lie in [0,1]");

    MeloDigraph g;
    g.nodes.push_back({0.0, 0.0, 0.0, 0});
    std::vector<std::size_t> node_of(notes.size(), 0);
    for (std::size_t i = 0; i < notes.size(); ++i) {
        if (probs[i] >= threshold) {
            node_of[i] = g.nodes.size();
            g.nodes.push_back({notes[i].onset, notes[i].offset, probs[i], i});
        }
    }
    g.nodes.push_back({kInf, kInf, kEndProbability, 0});
    const std::size_t end = g.end();

    // Candidate successors are taken over every note, passing or not; a
    // node whose earliest followers all fail the threshold gets no edge.
    for (std::size_t u = 0; u < end; ++u) {
        const double end_time = g.nodes[u].end_time;
        const auto first = std::lower_bound(notes.begin(), notes.end(), end_time,
                                            [](const NoteEvent& n, double t) { return n.onset < t; });
        if (first == notes.end()) {
            g.edges.push_back({u, end, -kEndProbability});
            continue;
        }
        const double min_onset = first->onset;
        for (auto it = first; it != notes.end() && it->onset == min_onset; ++it) {
            const auto i = static_cast<std::size_t>(it - notes.begin());
            if (probs[i] >= threshold)
                g.edges.push_back({u, node_of[i], -probs[i]});
        }
    }
    return g;
}

std::vector<std::size_t> extract_monophonic_indices(const MeloDigraph& graph)
{
    const std::size_t n = graph.nodes.size();
    std::vector<double> dist(n, kInf);
    std::vector<std::size_t> pred(n, n);
    dist[graph.start()] = 0.0;
    for (std::size_t round = 0; round + 1 < n; ++round) {
        bool changed = false;
        for (const auto& e : graph.edges) {
            if (dist[e.from] == kInf)
                continue;
            const double cand = dist[e.from] + e.weight;
            if (cand < dist[e.to]) {
                dist[e.to] = cand;
                pred[e.to] = e.from;
                changed = true;
            }
        }
        if (!changed)
            break;
    }
    for (const auto& e : graph.edges)
        if (dist[e.from] != kInf && dist[e.from] + e.weight < dist[e.to])
            throw DataError("melo-digraph contains a negative cycle");

    std::vector<std::size_t> path;
    if (dist[graph.end()] == kInf)
        return path;
    for (std::size_t v = pred[graph.end()]; v != graph.start(); v = pred[v])
        path.push_back(graph.nodes[v].note_index);
    std::reverse(path.begin(), path.end());
    return path;
}

NoteList extract_monophonic(const MeloDigraph& graph, const NoteList& notes)
{
    std::vector<NoteEvent> out;
    for (auto i : extract_monophonic_indices(graph))
        out.push_back(notes[i]);
    return NoteList(std::move(out));
}

}  // namespace perfkit::melody
