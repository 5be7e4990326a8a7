#include "perfkit/melody.hpp"

#include "perfkit/error.hpp"
#include "perfkit/parallel.hpp"

#include <algorithm>
#include <random>

namespace perfkit::melody {

namespace {

struct Rect {
    Eigen::Index row = 0;
    Eigen::Index col = 0;
    Eigen::Index height = 0;
    Eigen::Index width = 0;

    bool intersects(const QueryRegion& q) const
    {
        return row <= q.bottom() && row + height - 1 >= q.top() && col <= q.right() && col + width - 1 >= q.left();
    }
};

struct Draw {
    bool accepted = false;
    double difference = 0.0;
    std::vector<Rect> rects;
};

Eigen::Index uniform_index(std::mt19937_64& rng, Eigen::Index lo, Eigen::Index hi)
{
    return std::uniform_int_distribution<Eigen::Index>(lo, hi)(rng);
}

}  // namespace

Eigen::MatrixXd pitch_height_predictor(const Eigen::MatrixXd& input)
{
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(input.rows(), input.cols());
    for (Eigen::Index c = 0; c < input.cols(); ++c) {
        Eigen::Index top = -1;
        for (Eigen::Index r = 0; r < input.rows(); ++r)
            if (input(r, c) != 0.0)
                top = r;
        for (Eigen::Index r = 0; r <= top; ++r)
            if (input(r, c) != 0.0)
                out(r, c) = static_cast<double>(r + 1) / static_cast<double>(top + 1);
    }
    return out;
}

Eigen::MatrixXd saliency_map(const Predictor& predictor, const Eigen::MatrixXd& input, const QueryRegion& query,
                             const SaliencyOptions& options)
{
    const Eigen::Index rows = input.rows();
    const Eigen::Index cols = input.cols();
    if (rows == 0 || cols == 0)
        throw DataError("saliency needs a non-empty input");
    if (query.top() < 0 || query.left() < 0 || query.bottom() >= rows || query.right() >= cols)
        throw DataError("saliency query region lies outside the input");

    const Eigen::MatrixXd base = predictor(input);
    if (base.rows() != rows || base.cols() != cols)
        throw DataError("predictor output shape differs from its input");
    const double base_query =
        base.block(query.top(), query.left(), query.bottom() - query.top() + 1, query.right() - query.left() + 1).sum();

    const Eigen::Index max_h = std::max<Eigen::Index>(1, rows / 4);
    const Eigen::Index max_w = std::max<Eigen::Index>(1, cols / 4);

    std::vector<Draw> draws(options.iterations);
    const std::size_t threads = options.threads ? options.threads : thread_count();
    parallel_for(options.iterations, threads, [&](std::size_t k) {
        std::mt19937_64 rng(mix_seed(options.seed, k));
        Draw& d = draws[k];
        d.rects.resize(options.rects_per_iter);
        bool hits_query = false;
        for (auto& r : d.rects) {
            r.height = uniform_index(rng, 1, max_h);
            r.width = uniform_index(rng, 1, max_w);
            r.row = uniform_index(rng, 0, rows - r.height);
            r.col = uniform_index(rng, 0, cols - r.width);
            hits_query = hits_query || r.intersects(query);
        }
        if (hits_query)
            return;
        Eigen::MatrixXd occluded = input;
        for (const auto& r : d.rects)
            occluded.block(r.row, r.col, r.height, r.width).setZero();
        const Eigen::MatrixXd pred = predictor(occluded);
        if (pred.rows() != rows || pred.cols() != cols)
            throw DataError("predictor output shape differs from its input");
        const double occluded_query =
            pred.block(query.top(), query.left(), query.bottom() - query.top() + 1, query.right() - query.left() + 1)
                .sum();
        d.accepted = true;
        d.difference = (base_query - occluded_query) / static_cast<double>(query.area());
    });

    // Accumulate in iteration order so the sums are reproducible.
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::MatrixXd zeroed = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask(rows, cols);
    for (const auto& d : draws) {
        if (!d.accepted)
            continue;
        mask.setConstant(false);
        for (const auto& r : d.rects)
            mask.block(r.row, r.col, r.height, r.width).setConstant(true);
        for (Eigen::Index c = 0; c < cols; ++c) {
            for (Eigen::Index r = 0; r < rows; ++r) {
                if (mask(r, c) && input(r, c) != 0.0) {
                    total(r, c) += d.difference;
                    zeroed(r, c) += 1.0;
                }
            }
        }
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            if (zeroed(r, c) > 0.0)
                out(r, c) = total(r, c) / zeroed(r, c);
    return out;
}

}  // namespace perfkit::melody
