#include "perfkit/error.hpp"
#include "perfkit/melody.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace perfkit;
using namespace perfkit::melody;

TEST_CASE("skyline keeps the top of each chord")
{
    const NoteList notes({{60, 0.0, 1.0, 64}, {64, 0.0, 1.0, 64}, {67, 0.0, 1.0, 64}, {55, 1.0, 2.0, 64}});
    CHECK(skyline(notes) == std::vector<bool>{false, false, true, true});
}

TEST_CASE("skyline sees notes still sounding")
{
    const NoteList notes({{72, 0.0, 2.0, 64}, {60, 0.5, 1.0, 64}, {62, 2.0, 2.5, 64}});
    CHECK(skyline(notes) == std::vector<bool>{true, false, true});
    CHECK(skyline(NoteList()).empty());
}

TEST_CASE("skyline against a direct scan")
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const auto notes = oracle::random_notes(rng, 40);
        const auto flags = skyline(notes);
        for (std::size_t i = 0; i < notes.size(); ++i) {
            bool top = true;
            for (std::size_t j = 0; j < notes.size(); ++j)
                if (j != i && notes[j].onset <= notes[i].onset && notes[j].offset > notes[i].onset &&
                    notes[j].pitch > notes[i].pitch)
                    top = false;
            CHECK(flags[i] == top);
        }
    }
}

TEST_CASE("note probabilities are cell medians")
{
    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(128, 4);
    values.row(60) << 0.1, 0.9, 0.3, 0.7;
    values.row(62) << 0.2, 0.4, 0.6, 0.0;
    const PianoRoll roll(values, 0.5, RollKind::probability);
    const NoteList notes({{60, 0.0, 2.0, 64}, {62, 0.0, 1.5, 64}, {60, 0.5, 1.0, 64}});
    const auto probs = note_probabilities(roll, notes);
    CHECK(probs[0] == doctest::Approx(0.5));
    CHECK(probs[1] == doctest::Approx(0.4));
    CHECK(probs[2] == doctest::Approx(0.9));

    const NoteList late({{60, 5.0, 6.0, 64}});
    CHECK_THROWS_AS(note_probabilities(roll, late), DataError);
}

TEST_CASE("cluster threshold cuts at the widest gap")
{
    CHECK(cluster_threshold({0.1, 0.9, 0.2, 0.8}) == 0.2);
    CHECK(cluster_threshold({0.25, 0.5, 0.75}) == 0.25);
    CHECK(cluster_threshold({0.4, 0.4}) == -std::numeric_limits<double>::infinity());
    CHECK(cluster_threshold({}) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("cluster threshold agrees with naive single linkage")
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> probs(2 + trial % 15);
        for (auto& p : probs)
            p = u(rng);
        std::vector<double> sorted = probs;
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> gaps;
        for (std::size_t i = 1; i < sorted.size(); ++i)
            gaps.push_back(sorted[i] - sorted[i - 1]);
        const double widest = *std::max_element(gaps.begin(), gaps.end());
        // Merging every gap narrower than the widest leaves exactly two clusters.
        const auto ids = oracle::naive_single_linkage(sorted, widest);
        double lower_max = -1.0;
        for (std::size_t i = 0; i < sorted.size(); ++i)
            if (ids[i] == ids.front())
                lower_max = std::max(lower_max, sorted[i]);
        REQUIRE(ids.back() != ids.front());
        CHECK(cluster_threshold(probs) == lower_max);
    }
}

TEST_CASE("threshold retention is strict")
{
    CHECK(retain_over_threshold({0.2, 0.5, 0.7}, 0.5) == std::vector<bool>{false, false, true});
}

TEST_CASE("graph on a simple line")
{
    const NoteList notes({{60, 0.0, 1.0, 64}, {64, 0.0, 1.0, 64}, {62, 1.0, 2.0, 64}});
    const std::vector<double> probs{0.2, 0.9, 0.8};
    const auto g = build_melo_digraph(notes, probs, 0.0);
    CHECK(g.nodes.size() == 5);
    CHECK(g.nodes.back().probability == kEndProbability);
    CHECK(extract_monophonic_indices(g) == std::vector<std::size_t>{1, 2});
    const auto line = extract_monophonic(g, notes);
    REQUIRE(line.size() == 2);
    CHECK(line[0].pitch == 64);
}

TEST_CASE("graph drops notes under the threshold")
{
    const NoteList notes({{60, 0.0, 1.0, 64}, {62, 1.0, 2.0, 64}});
    const auto g = build_melo_digraph(notes, {0.9, 0.1}, 0.5);
    CHECK(g.nodes.size() == 3);
    // The only follower of the first note fails the threshold, so the end
    // node cannot be reached.
    CHECK(extract_monophonic_indices(g).empty());
    CHECK_THROWS_AS(build_melo_digraph(notes, {0.5}, 0.0), DataError);
    CHECK_THROWS_AS(build_melo_digraph(notes, {0.5, 1.5}, 0.0), DataError);
}

TEST_CASE("graph edges and paths against enumeration")
{
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<int> q(0, 32);
    for (int trial = 0; trial < 150; ++trial) {
        const auto notes = oracle::random_notes(rng, 1 + static_cast<std::size_t>(trial % 10));
        std::vector<double> probs;
        for (std::size_t i = 0; i < notes.size(); ++i)
            probs.push_back(q(rng) / 32.0);
        const double threshold = trial % 3 == 0 ? cluster_threshold(probs) : q(rng) / 64.0;
        const auto g = build_melo_digraph(notes, probs, threshold);
        auto naive = oracle::melody_graph_edges(notes, probs, threshold);
        std::vector<oracle::NaiveEdge> built;
        for (const auto& e : g.edges)
            built.push_back({e.from, e.to, e.weight});
        const auto less = [](const oracle::NaiveEdge& a, const oracle::NaiveEdge& b) {
            return std::tie(a.from, a.to, a.weight) < std::tie(b.from, b.to, b.weight);
        };
        std::sort(built.begin(), built.end(), less);
        std::sort(naive.begin(), naive.end(), less);
        CHECK(built == naive);

        const auto best = oracle::best_path_by_enumeration(g.nodes.size(), naive);
        const auto path = extract_monophonic_indices(g);
        CHECK(path.empty() == !best.reachable);
        if (!best.reachable)
            continue;
        double weight = -kEndProbability;
        for (auto i : path) {
            weight -= probs[i];
            CHECK(probs[i] >= threshold);
        }
        CHECK(weight == doctest::Approx(best.weight));
        for (std::size_t k = 1; k < path.size(); ++k)
            CHECK(notes[path[k]].onset >= notes[path[k - 1]].offset);
    }
}

TEST_CASE("pitch height predictor")
{
    Eigen::MatrixXd input = Eigen::MatrixXd::Zero(4, 2);
    input(0, 0) = 1.0;
    input(3, 0) = 1.0;
    input(1, 1) = 1.0;
    const auto out = pitch_height_predictor(input);
    CHECK(out(0, 0) == doctest::Approx(0.25));
    CHECK(out(3, 0) == doctest::Approx(1.0));
    CHECK(out(1, 1) == doctest::Approx(1.0));
    CHECK(out(2, 0) == 0.0);
}

TEST_CASE("saliency of a single-cell linear predictor")
{
    // The query reads w * x at one anchor cell; zeroing the anchor drops
    // the query mean by exactly w / area, anything else drops it by zero.
    const Eigen::Index rows = 16, cols = 24;
    const double w = 3.0;
    const Eigen::Index ar = 9, ac = 14;
    const QueryRegion query{2, 2, 3, 4};
    const Predictor linear = [&](const Eigen::MatrixXd& x) {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), x.cols());
        out.block(query.top(), query.left(), 2, 3).setConstant(w * x(ar, ac) / 6.0);
        return out;
    };
    const Eigen::MatrixXd input = Eigen::MatrixXd::Ones(rows, cols);
    SaliencyOptions opt;
    opt.iterations = 4000;
    opt.rects_per_iter = 1;
    opt.seed = 5;
    const auto map = saliency_map(linear, input, query, opt);
    const double expected = w / static_cast<double>(query.area());
    CHECK(map(ar, ac) == doctest::Approx(expected).epsilon(1e-12));
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            CHECK(map(r, c) >= -1e-12);
            CHECK(map(r, c) <= expected + 1e-12);
            // A rectangle spans at most rows/4 x cols/4 cells.
            if (std::abs(r - ar) >= rows / 4 || std::abs(c - ac) >= cols / 4)
                CHECK(map(r, c) == 0.0);
        }
    }
}

TEST_CASE("saliency is independent of the thread count")
{
    std::mt19937_64 rng(31);
    std::bernoulli_distribution on(0.3);
    Eigen::MatrixXd input(20, 30);
    for (Eigen::Index r = 0; r < input.rows(); ++r)
        for (Eigen::Index c = 0; c < input.cols(); ++c)
            input(r, c) = on(rng) ? 1.0 : 0.0;
    const QueryRegion query{10, 3, 12, 5};
    SaliencyOptions one;
    one.iterations = 500;
    one.seed = 77;
    one.threads = 1;
    SaliencyOptions many = one;
    many.threads = 4;
    const auto a = saliency_map(pitch_height_predictor, input, query, one);
    const auto b = saliency_map(pitch_height_predictor, input, query, many);
    CHECK(a == b);
    for (Eigen::Index r = 0; r < input.rows(); ++r)
        for (Eigen::Index c = 0; c < input.cols(); ++c)
            if (input(r, c) == 0.0)
                CHECK(a(r, c) == 0.0);
}

TEST_CASE("saliency input checks")
{
    const Eigen::MatrixXd input = Eigen::MatrixXd::Ones(4, 4);
    CHECK_THROWS_AS(saliency_map(pitch_height_predictor, input, QueryRegion{0, 0, 4, 0}), DataError);
    CHECK_THROWS_AS(saliency_map(pitch_height_predictor, Eigen::MatrixXd(), QueryRegion{}), DataError);
    const Predictor wrong = [](const Eigen::MatrixXd&) { return Eigen::MatrixXd::Zero(2, 2); };
    CHECK_THROWS_AS(saliency_map(wrong, input, QueryRegion{}), DataError);
}
