#include "perfkit/notesep.hpp"

#include "perfkit/error.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

namespace perfkit::notesep {

namespace {

// The FFTW planner is not thread-safe.
std::mutex planner_mutex;

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const
    {
        std::lock_guard lock(planner_mutex);
        fftw_destroy_plan(p);
    }
};

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

SpectrogramMatrix stft_magnitude(std::span<const double> samples, double sample_rate, std::size_t frame_size,
                                 std::size_t hop)
{
    if (frame_size < 2 || hop == 0)
        throw DataError("STFT needs a frame size of at least 2 and a positive hop");
    if (!(sample_rate > 0.0))
        throw DataError("sample rate must be positive");

    SpectrogramMatrix out;
    out.sample_rate = sample_rate;
    out.frame_duration = static_cast<double>(hop) / sample_rate;
    const auto bins = static_cast<Eigen::Index>(frame_size / 2 + 1);
    if (samples.size() < frame_size)
        throw DataError("audio is shorter than one STFT frame (" + std::to_string(samples.size()) + " < " +
                        std::to_string(frame_size) + " samples)");
    const auto frames = static_cast<Eigen::Index>((samples.size() - frame_size) / hop + 1);
    out.values = Eigen::MatrixXd::Zero(bins, frames);

    // Symmetric Hann window.
    std::vector<double> window(frame_size);
    for (std::size_t n = 0; n < frame_size; ++n)
        window[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                         static_cast<double>(frame_size - 1));

    std::unique_ptr<double, FftwFree> in(fftw_alloc_real(frame_size));
    std::unique_ptr<fftw_complex, FftwFree> spec(fftw_alloc_complex(static_cast<std::size_t>(bins)));
    std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
    {
        std::lock_guard lock(planner_mutex);
        plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(frame_size), in.get(), spec.get(), FFTW_ESTIMATE));
    }
    if (!plan)
        throw DataError("FFTW could not create a plan");

    for (Eigen::Index k = 0; k < frames; ++k) {
        const std::size_t start = static_cast<std::size_t>(k) * hop;
        for (std::size_t n = 0; n < frame_size; ++n)
            in.get()[n] = samples[start + n] * window[n];
        fftw_execute(plan.get());
        for (Eigen::Index b = 0; b < bins; ++b)
            out.values(b, k) = std::hypot(spec.get()[b][0], spec.get()[b][1]);
    }
    return out;
}

}  // namespace perfkit::notesep
