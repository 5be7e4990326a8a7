#include "perfkit/error.hpp"
#include "perfkit/notesep.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace perfkit;
using namespace perfkit::notesep;

namespace {

using L = TemplateLayout;

constexpr double kFd = static_cast<double>(kHopSize) / kSampleRate;

double at_frame(int f)
{
    return static_cast<double>(f) * kFd;
}

Eigen::MatrixXd random_nonnegative(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            m(i, j) = u(rng);
    return m;
}

}  // namespace

TEST_CASE("layout arithmetic")
{
    CHECK(L::kColumnsPerPitch == 30);
    CHECK(L::kTotalColumns == 2640);
    CHECK(L::first_column(21) == 0);
    CHECK(L::first_column(108) == 87 * 30);
    CHECK(L::release_column(22, 0) == 30 + 15);
    CHECK_THROWS_AS(L::first_column(20), DataError);
    CHECK_THROWS_AS(L::first_column(109), DataError);
    CHECK(L::sounding_part(0) == 0);
    CHECK(L::sounding_part(1) == 1);
    CHECK(L::sounding_part(2) == 1);
    CHECK(L::sounding_part(3) == 2);
    CHECK(L::sounding_part(28) == 14);
    CHECK(L::sounding_part(500) == 14);
}

TEST_CASE("STFT shape and values")
{
    const std::vector<double> zeros(kFrameSize + 3 * kHopSize, 0.0);
    const auto z = stft_magnitude(zeros);
    CHECK(z.values.rows() == 1025);
    CHECK(z.values.cols() == 4);
    CHECK(z.values.isZero(0.0));
    CHECK(z.frame_duration == doctest::Approx(512.0 / 22050.0));

    std::vector<double> sine(22050);
    for (std::size_t n = 0; n < sine.size(); ++n)
        sine[n] = std::sin(2.0 * std::numbers::pi * 440.0 * static_cast<double>(n) / 22050.0);
    const auto s = stft_magnitude(sine);
    for (Eigen::Index c = 0; c < s.values.cols(); ++c) {
        Eigen::Index arg = 0;
        s.values.col(c).maxCoeff(&arg);
        CHECK(arg == 41);
    }
    const std::vector<double> short_input(kFrameSize - 1, 1.0);
    CHECK_THROWS_AS(stft_magnitude(short_input), DataError);
}

TEST_CASE("STFT matches a direct DFT of one frame")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n = 64;
    std::vector<double> x(n);
    for (auto& v : x)
        v = u(rng);
    const auto s = stft_magnitude(x, 8000.0, n, 16);
    REQUIRE(s.values.cols() == 1);
    for (std::size_t k = 0; k <= n / 2; ++k) {
        double re = 0.0, im = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / (n - 1.0));
            const double a = -2.0 * std::numbers::pi * static_cast<double>(k * t) / static_cast<double>(n);
            re += w * x[t] * std::cos(a);
            im += w * x[t] * std::sin(a);
        }
        CHECK(s.values(static_cast<Eigen::Index>(k), 0) == doctest::Approx(std::hypot(re, im)).epsilon(1e-9));
    }
}

TEST_CASE("single-partial template has one dominant bin")
{
    HarmonicModel model;
    model.partials = 1;
    const auto refs = synthetic_piano_scale(model);
    REQUIRE(refs.size() == 88);
    const auto W = build_initial_template(refs);
    CHECK(W.rows() == 1025);
    CHECK(W.cols() == 2640);
    CHECK((W.array() >= 0.0).all());
    const int pitch = 69;
    const auto col = W.col(L::sustain_column(pitch, 2));
    Eigen::Index arg = 0;
    const double peak = col.maxCoeff(&arg);
    CHECK(arg == 41);
    // Hann main lobe spans +-2 bins.
    double outside = 0.0;
    for (Eigen::Index b = 0; b < col.size(); ++b)
        if (std::abs(b - arg) > 2)
            outside = std::max(outside, col(b));
    CHECK(outside < 0.05 * peak);
}

TEST_CASE("template construction errors")
{
    auto refs = synthetic_piano_scale();
    auto silent = refs;
    silent[10].spectrogram.setZero();
    CHECK_THROWS_AS(build_initial_template(silent), DataError);
    auto missing = refs;
    missing.pop_back();
    CHECK_THROWS_AS(build_initial_template(missing), DataError);
    auto ragged = refs;
    ragged[3].spectrogram = Eigen::MatrixXd::Ones(10, 5);
    CHECK_THROWS_AS(build_initial_template(ragged), DataError);
}

TEST_CASE("activation of a 10-frame note")
{
    const NoteList notes({{60, 0.0, at_frame(10), 127}});
    const auto H = build_initial_activation(notes, kFd, 40);
    CHECK(H.rows() == 2640);
    const int a = L::attack_column(60);
    CHECK(H(a, 0) == 1.0);
    CHECK(H.row(a).sum() == 1.0);
    for (int f = 1; f < 10; ++f)
        CHECK(H(L::sustain_column(60, (f - 1) / 2), f) == 1.0);
    for (int k = 0; k < 15; ++k)
        CHECK(H(L::release_column(60, k), 10 + k) == 1.0);
    CHECK(H.sum() == doctest::Approx(1.0 + 9.0 + 15.0));
    CHECK(build_initial_activation(NoteList(), kFd, 10).isZero(0.0));
    const NoteList low({{20, 0.0, 0.5, 64}});
    CHECK_THROWS_AS(build_initial_activation(low, kFd, 40), DataError);
}

TEST_CASE("long notes fill the last sustain column")
{
    const NoteList notes({{70, 0.0, at_frame(40), 64}});
    const auto H = build_initial_activation(notes, kFd, 60);
    const int last = L::sustain_column(70, 13);
    for (int f = 27; f < 40; ++f)
        CHECK(H(last, f) == doctest::Approx(64.0 / 127.0));
    CHECK(H(last, 40) == 0.0);
}

TEST_CASE("overlapping notes keep the larger activation")
{
    const NoteList notes({{60, 0.0, at_frame(5), 40}, {60, 0.0, at_frame(5), 100}});
    const auto H = build_initial_activation(notes, kFd, 30);
    CHECK(H(L::attack_column(60), 0) == doctest::Approx(100.0 / 127.0));
}

TEST_CASE("NMF on an exactly factorizable input")
{
    std::mt19937_64 rng(3);
    const Eigen::Index F = 48, T = 60;
    const NoteList notes({{60, 0.0, at_frame(20), 90}, {64, at_frame(10), at_frame(35), 70}, {67, at_frame(30), at_frame(44), 80}});
    const Eigen::MatrixXd W0 = random_nonnegative(rng, F, L::kTotalColumns);
    const Eigen::MatrixXd H0 = build_initial_activation(notes, kFd, T);
    const Eigen::MatrixXd S = W0 * H0;

    const Eigen::MatrixXd noise = random_nonnegative(rng, F, L::kTotalColumns);
    auto state = make_state(W0 + 0.5 * noise, notes, kFd, T);
    bool nonnegative = true;
    NMFOptions options;
    options.on_update = [&](UpdateStage, const Eigen::MatrixXd& W, const Eigen::MatrixXd& H) {
        nonnegative = nonnegative && (W.array() >= 0.0).all() && (H.array() >= 0.0).all();
    };
    NMFReport report;
    const auto fitted = nmf_fit(S, state, options, &report);
    CHECK(nonnegative);
    REQUIRE(report.full_errors.size() == 6);
    for (std::size_t k = 1; k < report.full_errors.size(); ++k)
        CHECK(report.full_errors[k] <= report.full_errors[k - 1] + 1e-9 * report.full_errors.front());
    const double final_error = euclidean_error(S, fitted.W, fitted.H);
    CHECK(final_error == doctest::Approx(report.full_errors.back()));
    CHECK(final_error < report.input_error);
    CHECK(fitted.W.maxCoeff() <= 1.0 + 1e-9);
}

TEST_CASE("NMF leaves a zero input alone and checks shapes")
{
    const NoteList notes({{60, 0.0, at_frame(5), 90}});
    const auto state = make_state(Eigen::MatrixXd::Ones(8, L::kTotalColumns), notes, kFd, 20);
    const auto out = nmf_fit(Eigen::MatrixXd::Zero(8, 20), state);
    CHECK(out.W == state.W);
    CHECK(out.H == state.H);
    CHECK_THROWS_AS(nmf_fit(Eigen::MatrixXd::Ones(9, 20), state), DataError);
    CHECK_THROWS_AS(nmf_fit(-Eigen::MatrixXd::Ones(8, 20), state), DataError);
    CHECK_THROWS_AS(make_state(Eigen::MatrixXd::Ones(8, 10), notes, kFd, 20), DataError);
}

TEST_CASE("note extraction")
{
    std::mt19937_64 rng(4);
    const Eigen::Index F = 16, T = 50;
    const NoteList notes({{60, 0.0, at_frame(10), 90}, {62, at_frame(12), at_frame(45), 90}});
    const auto state = make_state(random_nonnegative(rng, F, L::kTotalColumns), notes, kFd, T);
    const auto first = extract_note_spectrogram(state, notes[0]);
    CHECK(first.rows() == F);
    CHECK(first.cols() == kNoteFrames);
    CHECK(first.leftCols(10).minCoeff() > 0.0);
    CHECK(first.rightCols(20).isZero(0.0));
    CHECK(extract_note_spectrogram(state, notes[1]).cols() == kNoteFrames);
    CHECK_THROWS_AS(extract_note_spectrogram(state, NoteEvent{61, 0.0, 0.5, 90}), DataError);
}

TEST_CASE("note reconstructions add up")
{
    std::mt19937_64 rng(5);
    const Eigen::Index F = 12, T = 80;
    const NoteList notes({{60, 0.0, at_frame(30), 90}, {60, at_frame(40), at_frame(60), 50}, {72, at_frame(5), at_frame(25), 70}});
    const auto state = make_state(random_nonnegative(rng, F, L::kTotalColumns), notes, kFd, T);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(F, T);
    Eigen::MatrixXd mask = Eigen::MatrixXd::Zero(L::kTotalColumns, T);
    for (std::size_t i = 0; i < notes.size(); ++i) {
        sum += note_reconstruction(state, i);
        // Attack and sustain support only.
        NoteEvent n = notes[i];
        const Eigen::MatrixXd a = note_activation(n, kFd, T);
        const int first = L::first_column(n.pitch);
        mask.block(first, 0, 1 + L::kSustainColumns, T) += a.block(first, 0, 1 + L::kSustainColumns, T);
    }
    const Eigen::MatrixXd masked = ((mask.array() > 0.0).cast<double>() * state.H.array()).matrix();
    CHECK((sum - state.W * masked).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("MFCC against the direct formulas")
{
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    const Mfcc m(1025);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> spectrum(1025);
        for (auto& v : spectrum)
            v = u(rng);
        const Eigen::VectorXd col = Eigen::Map<const Eigen::VectorXd>(spectrum.data(), 1025);
        const auto got = m(col);
        const auto want = oracle::direct_mfcc(spectrum, kSampleRate);
        REQUIRE(got.size() == 13);
        for (Eigen::Index k = 0; k < 13; ++k)
            CHECK(got(k) == doctest::Approx(want[static_cast<std::size_t>(k)]).epsilon(1e-6));
        CHECK(mfcc(col) == got);
    }
}

TEST_CASE("MFCC of a flat spectrum")
{
    const Eigen::VectorXd flat = Eigen::VectorXd::Constant(1025, 2.0);
    const auto c = mfcc(flat);
    CHECK(c.size() == 13);
    CHECK(std::abs(c(0)) > 1.0);
    for (Eigen::Index k = 1; k < 13; ++k)
        CHECK(std::abs(c(k)) < 1e-9);
    const Eigen::VectorXd silent = Eigen::VectorXd::Zero(1025);
    CHECK(mfcc(silent)(0) == doctest::Approx(std::log(1e-10) * std::sqrt(40.0)));
    const Mfcc m(1025);
    for (Eigen::Index b = 0; b < m.filterbank().rows(); ++b)
        CHECK(m.filterbank().row(b).sum() == doctest::Approx(1.0));
}
