#include "perfkit/dispersion.hpp"

#include "perfkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace perfkit::dispersion {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::vector<std::size_t>> members_of(const Assignment& assignment, std::size_t k)
{
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < assignment.size(); ++i)
        members[assignment[i]].push_back(i);
    return members;
}

Eigen::RowVectorXd centroid(const PointSet& ps, const std::vector<std::size_t>& idx)
{
    Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(ps.points.cols());
    for (auto i : idx)
        c += ps.points.row(static_cast<Eigen::Index>(i));
    return c / static_cast<double>(idx.size());
}

// C(n, p), saturating at max uint64.
std::uint64_t binomial(std::uint64_t n, std::uint64_t p)
{
    p = std::min(p, n - p);
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= p; ++i) {
        const std::uint64_t num = n - p + i;
        if (r > std::numeric_limits<std::uint64_t>::max() / num)
            return std::numeric_limits<std::uint64_t>::max();
        r = r * num / i;
    }
    return r;
}

}  // namespace

Metric metric_from_name(std::string_view name)
{
    if (name == "euclidean")
        return Metric::euclidean;
    if (name == "manhattan" || name == "cityblock")
        return Metric::manhattan;
    throw DataError("unknown metric: " + std::string(name));
}

Method method_from_name(std::string_view name)
{
    if (name == "A" || name == "a")
        return Method::A;
    if (name == "B" || name == "b")
        return Method::B;
    if (name == "C" || name == "c")
        return Method::C;
    if (name == "D" || name == "d")
        return Method::D;
    throw DataError("unknown dispersion method: " + std::string(name));
}

PointSet::PointSet(Eigen::MatrixXd pts, Metric m) : points(std::move(pts)), metric(m)
{
    if (points.rows() < 1 || points.cols() < 1)
        throw DataError("point set needs at least one point and one dimension");
    if (!points.allFinite())
        throw DataError("point coordinates must be finite");
}

double PointSet::distance(std::size_t a, std::size_t b) const
{
    return distance_to(a, points.row(static_cast<Eigen::Index>(b)));
}

double PointSet::distance_to(std::size_t a, const Eigen::RowVectorXd& point) const
{
    const auto diff = points.row(static_cast<Eigen::Index>(a)) - point;
    return metric == Metric::euclidean ? diff.norm() : diff.cwiseAbs().sum();
}

Assignment ward_cluster(const PointSet& ps, std::size_t k)
{
    const std::size_t n = ps.size();
    if (k < 1 || k > n)
        throw DataError("cluster count must lie in [1, " + std::to_string(n) + "]");

    // Slot i holds the cluster whose lowest point index is i.
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            d[i][j] = d[j][i] = (ps.points.row(static_cast<Eigen::Index>(i)) - ps.points.row(static_cast<Eigen::Index>(j)))
                                    .squaredNorm();
    std::vector<double> size(n, 1.0);
    std::vector<bool> active(n, true);
    std::vector<std::size_t> owner(n);
    for (std::size_t i = 0; i < n; ++i)
        owner[i] = i;

    for (std::size_t clusters = n; clusters > k; --clusters) {
        std::size_t bi = 0, bj = 0;
        double best = kInf;
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i])
                continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (active[j] && d[i][j] < best) {
                    best = d[i][j];
                    bi = i;
                    bj = j;
                }
            }
        }
        for (std::size_t m = 0; m < n; ++m) {
            if (!active[m] || m == bi || m == bj)
                continue;
            const double nm = size[m];
            const double updated =
                ((size[bi] + nm) * d[m][bi] + (size[bj] + nm) * d[m][bj] - nm * d[bi][bj]) / (size[bi] + size[bj] + nm);
            d[m][bi] = d[bi][m] = updated;
        }
        size[bi] += size[bj];
        active[bj] = false;
        for (auto& o : owner)
            if (o == bj)
                o = bi;
    }

    std::vector<std::size_t> label(n, 0);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (active[i])
            label[i] = next++;
    Assignment out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = label[owner[i]];
    return out;
}

double min_pairwise(const PointSet& ps, const std::vector<std::size_t>& indices)
{
    double best = kInf;
    for (std::size_t a = 0; a < indices.size(); ++a)
        for (std::size_t b = a + 1; b < indices.size(); ++b)
            best = std::min(best, ps.distance(indices[a], indices[b]));
    return best;
}

DispersionResult select_dispersed(const PointSet& ps, std::size_t p, Method method, const SelectOptions& options)
{
    const std::size_t n = ps.size();
    if (p < 2 || p > n)
        throw DataError("p must lie in [2, " + std::to_string(n) + "]");

    const Assignment assignment = ward_cluster(ps, p);
    const auto members = members_of(assignment, p);
    std::vector<Eigen::RowVectorXd> centroids;
    for (const auto& m : members)
        centroids.push_back(centroid(ps, m));
    const Eigen::RowVectorXd total = ps.points.colwise().sum();

    auto score = [&](std::size_t i) {
        const std::size_t own = assignment[i];
        switch (method) {
        case Method::A: {
            if (options.method_a_exclude_cluster) {
                const Eigen::RowVectorXd own_sum = centroids[own] * static_cast<double>(members[own].size());
                const double others = static_cast<double>(n - members[own].size());
                return ps.distance_to(i, (total - own_sum) / others);
            }
            const Eigen::RowVectorXd rest = (total - ps.points.row(static_cast<Eigen::Index>(i))) / static_cast<double>(n - 1);
            return ps.distance_to(i, rest);
        }
        case Method::B: {
            double best = kInf;
            for (std::size_t c = 0; c < p; ++c)
                if (c != own)
                    best = std::min(best, ps.distance_to(i, centroids[c]));
            return best;
        }
        case Method::C: {
            double best = kInf;
            for (std::size_t j = 0; j < n; ++j)
                if (assignment[j] != own)
                    best = std::min(best, ps.distance(i, j));
            return best;
        }
        case Method::D: {
            double best = kInf;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i)
                    best = std::min(best, ps.distance(i, j));
            return best;
        }
        }
        return 0.0;
    };

    DispersionResult result;
    for (const auto& m : members) {
        std::size_t pick = m.front();
        double best = score(pick);
        for (std::size_t k = 1; k < m.size(); ++k) {
            const double s = score(m[k]);
            if (s > best) {
                best = s;
                pick = m[k];
            }
        }
        result.selected.push_back(pick);
    }
    std::sort(result.selected.begin(), result.selected.end());
    result.min_dist = min_pairwise(ps, result.selected);
    return result;
}

DispersionResult brute_force_pdispersion(const PointSet& ps, std::size_t p, std::uint64_t budget)
{
    const std::size_t n = ps.size();
    if (p < 2 || p > n)
        throw DataError("p must lie in [2, " + std::to_string(n) + "]");
    if (binomial(n, p) > budget)
        throw DataError("exhaustive p-dispersion exceeds the subset budget");

    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            dist[i][j] = dist[j][i] = ps.distance(i, j);

    DispersionResult best;
    best.min_dist = -kInf;
    std::vector<std::size_t> current;
    current.reserve(p);

    // Lexicographic enumeration; a branch is cut as soon as its partial
    // minimum cannot strictly beat the incumbent, which keeps the first
    // (smallest) optimal subset.
    auto search = [&](auto& self, std::size_t next, double partial) -> void {
        if (current.size() == p) {
            if (partial > best.min_dist) {
                best.min_dist = partial;
                best.selected = current;
            }
            return;
        }
        for (std::size_t i = next; i + (p - current.size()) <= n; ++i) {
            double m = partial;
            for (auto j : current)
                m = std::min(m, dist[i][j]);
            if (m <= best.min_dist)
                continue;
            current.push_back(i);
            self(self, i + 1, m);
            current.pop_back();
        }
    };
    search(search, 0, kInf);
    return best;
}

std::size_t medoid(const PointSet& ps)
{
    const std::size_t n = ps.size();
    std::size_t best_i = 0;
    double best = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            sum += ps.distance(i, j);
        if (sum < best) {
            best = sum;
            best_i = i;
        }
    }
    return best_i;
}

Assignment robin_hood(Assignment assignment, const PointSet& ps, std::size_t t)
{
    if (t < 1)
        throw DataError("target cardinality must be at least 1");
    if (assignment.size() != ps.size())
        throw DataError("assignment size does not match the point set");
    if (assignment.empty())
        return assignment;
    const std::size_t k = *std::max_element(assignment.begin(), assignment.end()) + 1;

    while (true) {
        bool moved = false;
        for (std::size_t poor = 0; poor < k; ++poor) {
            const auto members = members_of(assignment, k);
            if (members[poor].size() >= t)
                continue;
            const Eigen::RowVectorXd target =
                members[poor].empty() ? Eigen::RowVectorXd(ps.points.colwise().mean()) : centroid(ps, members[poor]);
            std::size_t pick = ps.size();
            double best = kInf;
            for (std::size_t i = 0; i < ps.size(); ++i) {
                if (members[assignment[i]].size() <= t)
                    continue;
                const double d = ps.distance_to(i, target);
                if (d < best) {
                    best = d;
                    pick = i;
                }
            }
            if (pick == ps.size())
                return assignment;
            assignment[pick] = poor;
            moved = true;
        }
        if (!moved)
            return assignment;
    }
}

KMeansResult kmeans(const PointSet& ps, std::size_t k, std::mt19937_64& rng, std::size_t max_iterations)
{
    const std::size_t n = ps.size();
    if (k < 1 || k > n)
        throw DataError("cluster count must lie in [1, " + std::to_string(n) + "]");
    const auto& X = ps.points;
    const Eigen::Index d = X.cols();

    Eigen::MatrixXd centers(static_cast<Eigen::Index>(k), d);
    std::vector<double> nearest(n, kInf);
    std::vector<bool> chosen(n, false);
    std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    centers.row(0) = X.row(static_cast<Eigen::Index>(first));
    chosen[first] = true;
    for (std::size_t c = 1; c < k; ++c) {
        for (std::size_t i = 0; i < n; ++i)
            nearest[i] = std::min(nearest[i], (X.row(static_cast<Eigen::Index>(i)) - centers.row(static_cast<Eigen::Index>(c - 1))).squaredNorm());
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            total += chosen[i] ? 0.0 : nearest[i];
        std::size_t pick = n;
        if (total > 0.0) {
            std::vector<double> w(n);
            for (std::size_t i = 0; i < n; ++i)
                w[i] = chosen[i] ? 0.0 : nearest[i];
            pick = std::discrete_distribution<std::size_t>(w.begin(), w.end())(rng);
        } else {
            // Remaining points coincide with centers; take any unused one.
            std::vector<std::size_t> unused;
            for (std::size_t i = 0; i < n; ++i)
                if (!chosen[i])
                    unused.push_back(i);
            pick = unused[std::uniform_int_distribution<std::size_t>(0, unused.size() - 1)(rng)];
        }
        chosen[pick] = true;
        centers.row(static_cast<Eigen::Index>(c)) = X.row(static_cast<Eigen::Index>(pick));
    }

    KMeansResult result;
    result.assignment.assign(n, k);
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best_c = 0;
            double best = kInf;
            for (std::size_t c = 0; c < k; ++c) {
                const double dist =
                    (X.row(static_cast<Eigen::Index>(i)) - centers.row(static_cast<Eigen::Index>(c))).squaredNorm();
                if (dist < best) {
                    best = dist;
                    best_c = c;
                }
            }
            if (result.assignment[i] != best_c) {
                result.assignment[i] = best_c;
                changed = true;
            }
        }
        if (!changed)
            break;
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), d);
        std::vector<double> counts(k, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            sums.row(static_cast<Eigen::Index>(result.assignment[i])) += X.row(static_cast<Eigen::Index>(i));
            counts[result.assignment[i]] += 1.0;
        }
        for (std::size_t c = 0; c < k; ++c)
            if (counts[c] > 0.0)
                centers.row(static_cast<Eigen::Index>(c)) = sums.row(static_cast<Eigen::Index>(c)) / counts[c];
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            inertia += (X.row(static_cast<Eigen::Index>(i)) - centers.row(static_cast<Eigen::Index>(result.assignment[i])))
                           .squaredNorm();
        result.inertia_history.push_back(inertia);
    }
    result.centroids = centers;
    result.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        result.inertia +=
            (X.row(static_cast<Eigen::Index>(i)) - centers.row(static_cast<Eigen::Index>(result.assignment[i]))).squaredNorm();
    return result;
}

}  // namespace perfkit::dispersion
