#include "perfkit/error.hpp"
#include "perfkit/evalmeasure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace perfkit::evalmeasure {

namespace {

double soft_threshold(double x, double t)
{
    if (x > t)
        return x - t;
    if (x < -t)
        return x + t;
    return 0.0;
}

}  // namespace

double elastic_net_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double b,
                             double l1, double l2)
{
    const Eigen::VectorXd r = y - X * w - Eigen::VectorXd::Constant(y.size(), b);
    return r.squaredNorm() / (2.0 * static_cast<double>(y.size())) + l1 * w.lpNorm<1>() + 0.5 * l2 * w.squaredNorm();
}

ElasticNetFit elastic_net(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const ElasticNetOptions& options)
{
    if (X.rows() != y.size())
        throw DataError("elastic net: row count differs from target count");
    if (X.rows() < 1)
        throw DataError("elastic net needs at least one row");
    if (options.l1 < 0.0 || options.l2 < 0.0)
        throw DataError("elastic net penalties must be non-negative");

    const double n = static_cast<double>(X.rows());
    const Eigen::RowVectorXd x_mean = X.colwise().mean();
    const double y_mean = y.mean();
    const Eigen::MatrixXd Xc = X.rowwise() - x_mean;
    const Eigen::VectorXd yc = y.array() - y_mean;
    const Eigen::VectorXd z = Xc.colwise().squaredNorm().transpose() / n;

    ElasticNetFit fit;
    fit.weights = Eigen::VectorXd::Zero(X.cols());
    Eigen::VectorXd residual = yc;
    const auto objective = [&] {
        return residual.squaredNorm() / (2.0 * n) + options.l1 * fit.weights.lpNorm<1>() +
               0.5 * options.l2 * fit.weights.squaredNorm();
    };

    for (fit.sweeps = 0; fit.sweeps < options.max_sweeps;) {
        double largest = 0.0;
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            const double old = fit.weights[j];
            const double denom = z[j] + options.l2;
            double updated = 0.0;
            if (denom > 0.0) {
                const double rho = Xc.col(j).dot(residual) / n + z[j] * old;
                updated = soft_threshold(rho, options.l1) / denom;
            }
            if (updated != old) {
                residual -= Xc.col(j) * (updated - old);
                fit.weights[j] = updated;
                largest = std::max(largest, std::abs(updated - old));
            }
        }
        ++fit.sweeps;
        fit.objective.push_back(objective());
        if (largest <= options.tolerance)
            break;
    }
    fit.intercept = y_mean - x_mean.dot(fit.weights);
    return fit;
}

LinearMeasure fit_linear_measure(const Eigen::MatrixXd& rows, const Eigen::VectorXd& ratings, double l1, double l2)
{
    if (rows.rows() < 2)
        throw DataError("the linear measure needs at least two rows");
    if (rows.rows() != ratings.size())
        throw DataError("row count differs from rating count");

    const Eigen::Index d = rows.cols();
    LinearMeasure m;
    m.weights = Eigen::VectorXd::Zero(d);
    m.active.assign(static_cast<std::size_t>(d), false);
    if (ratings.maxCoeff() == ratings.minCoeff()) {
        m.intercept = ratings[0];
        return m;
    }

    const ElasticNetOptions options{l1, l2};
    const ElasticNetFit first = elastic_net(rows, ratings, options);
    const double mean_error =
        (ratings - rows * first.weights - Eigen::VectorXd::Constant(ratings.size(), first.intercept))
            .cwiseAbs()
            .mean();

    std::vector<Eigen::Index> kept;
    for (Eigen::Index j = 0; j < d; ++j)
        if (first.weights[j] != 0.0 && std::abs(first.weights[j]) >= 0.1 * mean_error)
            kept.push_back(j);

    Eigen::MatrixXd sub(rows.rows(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k)
        sub.col(static_cast<Eigen::Index>(k)) = rows.col(kept[k]);
    const ElasticNetFit refit = elastic_net(sub, ratings, options);
    for (std::size_t k = 0; k < kept.size(); ++k) {
        m.weights[kept[k]] = refit.weights[static_cast<Eigen::Index>(k)];
        m.active[static_cast<std::size_t>(kept[k])] = true;
    }
    m.intercept = refit.intercept;
    m.training_l1_error =
        (ratings - rows * m.weights - Eigen::VectorXd::Constant(ratings.size(), m.intercept)).cwiseAbs().mean();
    return m;
}

double apply_measure(const LinearMeasure& measure, const Eigen::Ref<const Eigen::VectorXd>& row)
{
    if (row.size() != measure.weights.size())
        throw DataError("measure row has " + std::to_string(row.size()) + " entries, the model expects " +
                        std::to_string(measure.weights.size()));
    return measure.intercept + measure.weights.dot(row);
}

}  // namespace perfkit::evalmeasure
