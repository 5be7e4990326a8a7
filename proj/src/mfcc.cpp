#include "perfkit/notesep.hpp"

#include "perfkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace perfkit::notesep {

namespace {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

Mfcc::Mfcc(Eigen::Index bins, double sample_rate)
{
    if (bins < 2)
        throw DataError("MFCC needs at least two spectral bins");
    if (!(sample_rate > 0.0))
        throw DataError("sample rate must be positive");
    const double nyquist = sample_rate / 2.0;
    const double bin_hz = nyquist / static_cast<double>(bins - 1);

    std::vector<double> edges(kMelBands + 2);
    const double top = hz_to_mel(nyquist);
    for (int i = 0; i < kMelBands + 2; ++i)
        edges[i] = mel_to_hz(top * i / (kMelBands + 1));

    filters_ = Eigen::MatrixXd::Zero(kMelBands, bins);
    for (int b = 0; b < kMelBands; ++b) {
        const double lo = edges[b];
        const double mid = edges[b + 1];
        const double hi = edges[b + 2];
        for (Eigen::Index k = 0; k < bins; ++k) {
            const double f = static_cast<double>(k) * bin_hz;
            if (f >= lo && f <= mid && mid > lo)
                filters_(b, k) = (f - lo) / (mid - lo);
            else if (f > mid && f <= hi)
                filters_(b, k) = (hi - f) / (hi - mid);
        }
        const double total = filters_.row(b).sum();
        if (total > 0.0)
            filters_.row(b) /= total;
    }

    dct_.resize(kMfccCount, kMelBands);
    for (int k = 0; k < kMfccCount; ++k) {
        const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / kMelBands);
        for (int n = 0; n < kMelBands; ++n)
            dct_(k, n) = scale * std::cos(std::numbers::pi * k * (2 * n + 1) / (2.0 * kMelBands));
    }
}

Eigen::VectorXd Mfcc::operator()(const Eigen::Ref<const Eigen::VectorXd>& spectrum) const
{
    if (spectrum.size() != filters_.cols())
        throw DataError("spectrum length does not match the filterbank");
    const Eigen::VectorXd energies = (filters_ * spectrum).cwiseMax(kLogFloor).array().log().matrix();
    return dct_ * energies;
}

Eigen::VectorXd mfcc(const Eigen::Ref<const Eigen::VectorXd>& spectral_column, double sample_rate)
{
    return Mfcc(spectral_column.size(), sample_rate)(spectral_column);
}

}  // namespace perfkit::notesep
