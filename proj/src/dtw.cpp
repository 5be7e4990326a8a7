#include "perfkit/align.hpp"

#include "perfkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace perfkit::align {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Inclusive column range [lo, hi] allowed in each row.
struct Band {
    std::vector<std::size_t> lo;
    std::vector<std::size_t> hi;
};

Band full_band(std::size_t n, std::size_t m)
{
    return Band{std::vector<std::size_t>(n, 0), std::vector<std::size_t>(n, m - 1)};
}

enum Step : std::uint8_t { kStart, kDiag, kUp, kLeft };

// DP restricted to a band whose rows overlap their neighbours, so a valid
// path from (0,0) to (n-1,m-1) always exists inside it.
template <class CostFn>
DtwResult banded_dtw(std::size_t n, std::size_t m, const Band& band, CostFn&& cost)
{
    std::vector<std::vector<double>> acc(n);
    std::vector<std::vector<std::uint8_t>> step(n);
    auto at = [&](std::size_t i, std::size_t j) {
        if (j < band.lo[i] || j > band.hi[i])
            return kInf;
        return acc[i][j - band.lo[i]];
    };

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t width = band.hi[i] - band.lo[i] + 1;
        acc[i].assign(width, kInf);
        step[i].assign(width, kStart);
        for (std::size_t j = band.lo[i]; j <= band.hi[i]; ++j) {
            const double c = cost(i, j);
            double best = kInf;
            std::uint8_t dir = kStart;
            if (i == 0 && j == 0) {
                best = 0.0;
            } else {
                if (i > 0 && j > 0) {
                    best = at(i - 1, j - 1);
                    dir = kDiag;
                }
                if (i > 0) {
                    const double up = at(i - 1, j);
                    if (up < best) {
                        best = up;
                        dir = kUp;
                    }
                }
                if (j > 0 && j > band.lo[i]) {
                    const double left = acc[i][j - 1 - band.lo[i]];
                    if (left < best) {
                        best = left;
                        dir = kLeft;
                    }
                }
            }
            acc[i][j - band.lo[i]] = c + best;
            step[i][j - band.lo[i]] = dir;
        }
    }

    DtwResult result;
    result.cost = at(n - 1, m - 1);
    if (!std::isfinite(result.cost))
        throw DataError("DTW band does not connect the sequence ends");
    std::size_t i = n - 1;
    std::size_t j = m - 1;
    while (true) {
        result.path.pairs.emplace_back(i, j);
        const auto dir = step[i][j - band.lo[i]];
        if (dir == kStart)
            break;
        if (dir == kDiag) {
            --i;
            --j;
        } else if (dir == kUp) {
            --i;
        } else {
            --j;
        }
    }
    std::reverse(result.path.pairs.begin(), result.path.pairs.end());
    return result;
}

void check_sequences(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    if (a.cols() == 0 || b.cols() == 0)
        throw DataError("DTW needs non-empty sequences");
    if (a.rows() != b.rows())
        throw DataError("DTW sequences have different dimensions: " + std::to_string(a.rows()) + " vs " +
                        std::to_string(b.rows()));
}

Eigen::MatrixXd halve(const Eigen::MatrixXd& seq)
{
    const Eigen::Index n = seq.cols();
    Eigen::MatrixXd out(seq.rows(), (n + 1) / 2);
    for (Eigen::Index k = 0; k < out.cols(); ++k) {
        const Eigen::Index i = 2 * k;
        out.col(k) = (i + 1 < n) ? Eigen::VectorXd((seq.col(i) + seq.col(i + 1)) * 0.5) : Eigen::VectorXd(seq.col(i));
    }
    return out;
}

// Projects a coarse path to full resolution and widens it by `radius`
// coarse cells on every side.
Band project_band(const WarpingPath& coarse, std::size_t coarse_n, std::size_t coarse_m, std::size_t n,
                  std::size_t m, std::size_t radius)
{
    std::vector<std::size_t> min_j(coarse_n, coarse_m), max_j(coarse_n, 0);
    for (const auto& [i, j] : coarse.pairs) {
        min_j[i] = std::min(min_j[i], j);
        max_j[i] = std::max(max_j[i], j);
    }
    Band band{std::vector<std::size_t>(n), std::vector<std::size_t>(n)};
    for (std::size_t ci = 0; ci < coarse_n; ++ci) {
        const std::size_t first_row = ci >= radius ? ci - radius : 0;
        const std::size_t last_row = std::min(coarse_n - 1, ci + radius);
        const std::size_t lo = min_j[first_row] >= radius ? min_j[first_row] - radius : 0;
        const std::size_t hi = std::min(coarse_m - 1, max_j[last_row] + radius);
        for (std::size_t r = 2 * ci; r < std::min(n, 2 * ci + 2); ++r) {
            band.lo[r] = std::min(2 * lo, m - 1);
            band.hi[r] = std::min(2 * hi + 1, m - 1);
        }
    }
    return band;
}

}  // namespace

Distance distance_from_name(std::string_view name)
{
    if (name == "euclidean")
        return Distance::euclidean;
    if (name == "sqeuclidean")
        return Distance::sqeuclidean;
    if (name == "manhattan" || name == "cityblock")
        return Distance::manhattan;
    if (name == "cosine")
        return Distance::cosine;
    throw DataError("unknown distance: " + std::string(name));
}

double distance(Distance kind, const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b)
{
    switch (kind) {
    case Distance::euclidean:
        return (a - b).norm();
    case Distance::sqeuclidean:
        return (a - b).squaredNorm();
    case Distance::manhattan:
        return (a - b).cwiseAbs().sum();
    case Distance::cosine: {
        const double na = a.squaredNorm();
        const double nb = b.squaredNorm();
        if (na == 0.0 && nb == 0.0)
            return 0.0;
        if (na == 0.0 || nb == 0.0)
            return 1.0;
        const double d = 1.0 - a.dot(b) / std::sqrt(na * nb);
        return std::clamp(d, 0.0, 2.0);
    }
    }
    return 0.0;
}

DtwResult dtw_from_cost(const Eigen::MatrixXd& cost)
{
    if (cost.rows() == 0 || cost.cols() == 0)
        throw DataError("DTW needs a non-empty cost matrix");
    const auto n = static_cast<std::size_t>(cost.rows());
    const auto m = static_cast<std::size_t>(cost.cols());
    return banded_dtw(n, m, full_band(n, m), [&](std::size_t i, std::size_t j) {
        return cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    });
}

DtwResult dtw(const Eigen::MatrixXd& seq_a, const Eigen::MatrixXd& seq_b, Distance dist)
{
    check_sequences(seq_a, seq_b);
    const auto n = static_cast<std::size_t>(seq_a.cols());
    const auto m = static_cast<std::size_t>(seq_b.cols());
    return banded_dtw(n, m, full_band(n, m), [&](std::size_t i, std::size_t j) {
        return distance(dist, seq_a.col(static_cast<Eigen::Index>(i)), seq_b.col(static_cast<Eigen::Index>(j)));
    });
}

DtwResult fastdtw(const Eigen::MatrixXd& seq_a, const Eigen::MatrixXd& seq_b, int radius, Distance dist)
{
    check_sequences(seq_a, seq_b);
    if (radius < 0)
        throw DataError("FastDTW radius must be non-negative");
    const auto n = static_cast<std::size_t>(seq_a.cols());
    const auto m = static_cast<std::size_t>(seq_b.cols());
    const auto r = static_cast<std::size_t>(radius);
    if (n < r + 2 || m < r + 2)
        return dtw(seq_a, seq_b, dist);

    const Eigen::MatrixXd coarse_a = halve(seq_a);
    const Eigen::MatrixXd coarse_b = halve(seq_b);
    const DtwResult coarse = fastdtw(coarse_a, coarse_b, radius, dist);
    const Band band = project_band(coarse.path, static_cast<std::size_t>(coarse_a.cols()),
                                   static_cast<std::size_t>(coarse_b.cols()), n, m, r);
    return banded_dtw(n, m, band, [&](std::size_t i, std::size_t j) {
        return distance(dist, seq_a.col(static_cast<Eigen::Index>(i)), seq_b.col(static_cast<Eigen::Index>(j)));
    });
}

}  // namespace perfkit::align
