#include "perfkit/error.hpp"
#include "perfkit/misalign.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

using namespace perfkit;
using namespace perfkit::misalign;

namespace {

FitPiece shifted_piece(double shift, std::size_t count = 6)
{
    std::vector<NoteEvent> perf, score;
    for (std::size_t i = 0; i < count; ++i) {
        const double t = 1.0 + static_cast<double>(i);
        perf.push_back({60 + static_cast<int>(i), t, t + 0.5, 64});
        score.push_back({60 + static_cast<int>(i), t + shift, t + shift + 0.5, 64});
    }
    return {NoteList(score), NoteList(perf), identity_matching(count)};
}

}  // namespace

TEST_CASE("histogram construction")
{
    const std::vector<double> values{0.0, 0.5, 1.0, 1.0};
    const auto h = Histogram::from_values(values, 2);
    REQUIRE(h.bins() == 2);
    CHECK(h.edges() == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(h.counts() == std::vector<double>{1.0, 3.0});
    CHECK(h.bin_of(-5.0) == 0);
    CHECK(h.bin_of(1.0) == 1);
    CHECK(Histogram::from_values(std::vector<double>{}, 4).empty());
    CHECK_THROWS_AS(Histogram({0.0, 0.0}, {1.0}), DataError);
    CHECK_THROWS_AS(Histogram({0.0, 1.0}, {-1.0}), DataError);
}

TEST_CASE("single-bin samples stay inside the bin")
{
    const Histogram h({0.0, 1.0}, {5.0});
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        const double v = sample_histogram(h, rng);
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("bin frequencies follow the counts")
{
    const Histogram h({0.0, 1.0, 2.0}, {1.0, 3.0});
    Rng rng(99);
    int second = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i)
        second += sample_histogram(h, rng) >= 1.0 ? 1 : 0;
    CHECK(std::abs(static_cast<double>(second) / draws - 0.75) < 0.01);
}

TEST_CASE("sampling is deterministic and rejects empty histograms")
{
    const Histogram h({0.0, 1.0, 2.0}, {1.0, 3.0});
    Rng a(5), b(5);
    for (int i = 0; i < 100; ++i)
        CHECK(sample_histogram(h, a) == sample_histogram(h, b));
    CHECK_THROWS_AS(sample_histogram(Histogram(), a), DataError);
    CHECK_THROWS_AS(sample_histogram(Histogram({0.0, 1.0}, {0.0}), a), DataError);
}

TEST_CASE("point-mass histograms sample back exactly")
{
    const std::vector<double> values{0.1, 0.1, 0.1};
    const auto h = Histogram::from_values(values, 10);
    Rng rng(3);
    for (int i = 0; i < 100; ++i)
        CHECK(sample_histogram(h, rng) == 0.1);
}

TEST_CASE("identity pair fits zero misalignment and unit ratio")
{
    const auto piece = shifted_piece(0.0);
    const std::vector<FitPiece> pieces{piece};
    const auto model = fit_misalignment_model(pieces);
    Rng rng(1);
    CHECK(sample_histogram(model.y_ons_mean, rng) == 0.0);
    CHECK(sample_histogram(model.y_dur_mean, rng) == 1.0);
    CHECK(model.zero_std_onset == 1);
    CHECK(model.zero_std_duration == 1);
    CHECK(model.y_ons_std.empty());
}

TEST_CASE("constant shifts land in the piece-mean histogram")
{
    const std::vector<FitPiece> pieces{shifted_piece(0.1), shifted_piece(-0.1)};
    const auto model = fit_misalignment_model(pieces, 4);
    Rng rng(2);
    std::set<long long> seen;
    for (int i = 0; i < 200; ++i)
        seen.insert(std::llround(sample_histogram(model.y_ons_mean, rng) * 1000));
    CHECK(model.y_ons_mean.edges().front() == doctest::Approx(-0.1));
    CHECK(model.y_ons_mean.edges().back() == doctest::Approx(0.1));
    CHECK(model.y_ons_mean.counts().front() == 1.0);
    CHECK(model.y_ons_mean.counts().back() == 1.0);
    CHECK(seen.size() > 2);
}

TEST_CASE("fitting errors")
{
    CHECK_THROWS_AS(fit_misalignment_model(std::vector<FitPiece>{}), DataError);
    auto piece = shifted_piece(0.0, 3);
    piece.matching.matched.resize(1);
    const std::vector<FitPiece> one{piece};
    CHECK_THROWS_AS(fit_misalignment_model(one), DataError);
    const std::vector<FitPiece> two{piece, shifted_piece(0.2)};
    const auto model = fit_misalignment_model(two);
    CHECK(model.pieces_skipped == 1);
    CHECK(model.pieces_used == 1);
}

TEST_CASE("degenerate model reproduces the reference")
{
    const std::vector<FitPiece> pieces{shifted_piece(0.0)};
    const auto model = fit_misalignment_model(pieces);
    std::mt19937_64 gen(4);
    const auto reference = oracle::random_notes(gen, 20);
    Rng rng(8);
    CHECK(sample_misaligned(reference, model, rng) == reference);
}

TEST_CASE("constant-shift model moves every onset")
{
    // Performance = score - 0.5, so the fitted misalignment is +0.5.
    const std::vector<FitPiece> pieces{shifted_piece(0.5)};
    const auto model = fit_misalignment_model(pieces);
    std::mt19937_64 gen(4);
    const auto reference = oracle::random_notes(gen, 20);
    Rng rng(8);
    const auto out = sample_misaligned(reference, model, rng);
    REQUIRE(out.size() == reference.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out[i].onset == doctest::Approx(reference[i].onset + 0.5));
        CHECK(out[i].duration() == doctest::Approx(reference[i].duration()));
    }
}

TEST_CASE("sampling preserves pitches, velocities and count")
{
    const std::vector<FitPiece> pieces{shifted_piece(0.05, 10), shifted_piece(-0.2, 12), shifted_piece(0.3, 8)};
    auto model = fit_misalignment_model(pieces);
    // Give the per-note histograms some spread.
    model.x_ons = Histogram({-2.0, 0.0, 2.0}, {1.0, 1.0});
    model.x_dur = Histogram({-1.0, 1.0}, {1.0});
    std::mt19937_64 gen(11);
    const auto reference = oracle::random_notes(gen, 30);
    Rng rng(12);
    const auto out = sample_misaligned(reference, model, rng);
    std::multiset<std::pair<int, int>> a, b;
    for (const auto& n : reference)
        a.insert({n.pitch, n.velocity});
    for (const auto& n : out) {
        b.insert({n.pitch, n.velocity});
        CHECK(n.onset >= 0.0);
        CHECK(n.offset > n.onset);
    }
    CHECK(a == b);

    Rng again(12);
    CHECK(sample_misaligned(reference, model, again) == out);
    CHECK_THROWS_AS(sample_misaligned(NoteList(), model, again), DataError);
    CHECK_THROWS_AS(sample_misaligned(reference, MisalignmentModel{}, again), DataError);
}

TEST_CASE("missing/extra labels")
{
    std::mt19937_64 gen(21);
    const auto notes = oracle::random_notes(gen, 100);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        const auto labels = generate_missing_extra(notes, rng);
        CHECK(labels.tagged() > 10);
        CHECK(labels.tagged() < 50);
        std::size_t covered = 0;
        for (const auto& run : labels.runs) {
            CHECK(run.p_missing + run.p_extra == doctest::Approx(1.0));
            CHECK(run.p_missing >= 0.25);
            CHECK(run.p_missing <= 0.75);
            covered += run.length;
        }
        CHECK(covered == labels.tagged());
        for (std::size_t i = 0; i < notes.size(); ++i)
            CHECK_FALSE((labels.missing[i] && labels.extra[i]));
    }
    Rng a(3), b(3);
    const auto la = generate_missing_extra(notes, a);
    const auto lb = generate_missing_extra(notes, b);
    CHECK(la.missing == lb.missing);
    CHECK(la.extra == lb.extra);
    CHECK_THROWS_AS(generate_missing_extra(NoteList({{60, 0, 1, 1}}), a), DataError);
}

TEST_CASE("chord clustering examples")
{
    const NoteList notes({{60, 0.00, 1.0, 64}, {64, 0.01, 1.0, 64}, {67, 0.50, 1.0, 64}});
    const auto out = cluster_chords(notes, 0.05);
    CHECK(out[0].onset == doctest::Approx(0.005));
    CHECK(out[1].onset == doctest::Approx(0.005));
    CHECK(out[2].onset == 0.5);
    CHECK(out[0].offset == 1.0);

    const NoteList single({{60, 0.3, 1.0, 64}});
    CHECK(cluster_chords(single, 0.05) == single);
    const NoteList chord({{60, 0.3, 1.0, 64}, {64, 0.3, 1.0, 64}});
    CHECK(cluster_chords(chord, 0.05) == chord);
    CHECK(cluster_chords(NoteList(), 0.05).empty());
    CHECK_THROWS_AS(cluster_chords(chord, 0.0), DataError);
}

TEST_CASE("chord clustering chains through close onsets")
{
    const NoteList notes({{60, 0.00, 1.0, 64}, {61, 0.04, 1.0, 64}, {62, 0.08, 1.0, 64}, {63, 0.2, 1.0, 64}});
    const auto out = cluster_chords(notes, 0.05);
    CHECK(out[0].onset == doctest::Approx(0.04));
    CHECK(out[2].onset == doctest::Approx(0.04));
    CHECK(out[3].onset == 0.2);
}

TEST_CASE("model JSON round trip")
{
    const std::vector<FitPiece> pieces{shifted_piece(0.05, 10), shifted_piece(-0.2, 12)};
    const auto model = fit_misalignment_model(pieces, 7);
    const auto doc = model_to_json(model);
    const auto keys = std::vector<std::string>{"x_ons", "x_dur", "y_ons_mean", "y_ons_std", "y_dur_mean", "y_dur_std"};
    std::size_t k = 0;
    for (auto it = doc.begin(); it != doc.end(); ++it)
        CHECK(it.key() == keys[k++]);
    const auto back = model_from_json(doc);
    CHECK(back.x_ons == model.x_ons);
    CHECK(back.y_dur_std == model.y_dur_std);
    CHECK_THROWS_AS(model_from_json(io::Json::parse("{}")), DataError);
}

TEST_CASE("nearly equal values still give a valid histogram")
{
    const std::vector<double> values{1.0, std::nextafter(1.0, 2.0), std::nextafter(std::nextafter(1.0, 2.0), 2.0)};
    const auto h = Histogram::from_values(values, 100);
    CHECK(h.bins() <= 2);
    CHECK(h.total() == 3.0);
}
