#include "perfkit/dispersion.hpp"
#include "perfkit/error.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <map>
#include <random>
#include <set>

using namespace perfkit;
using namespace perfkit::dispersion;

namespace {

PointSet line(std::initializer_list<double> xs)
{
    Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), 1);
    Eigen::Index i = 0;
    for (double x : xs)
        m(i++, 0) = x;
    return PointSet(m);
}

PointSet random_points(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d, Metric metric = Metric::euclidean)
{
    std::uniform_real_distribution<double> u(0.0, 10.0);
    Eigen::MatrixXd m(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            m(i, j) = u(rng);
    return PointSet(m, metric);
}

PointSet two_blobs(std::mt19937_64& rng, Eigen::Index per_blob)
{
    std::normal_distribution<double> noise(0.0, 0.1);
    Eigen::MatrixXd m(2 * per_blob, 2);
    for (Eigen::Index i = 0; i < 2 * per_blob; ++i) {
        const double cx = i % 2 ? 100.0 : 0.0;
        m(i, 0) = cx + noise(rng);
        m(i, 1) = noise(rng);
    }
    return PointSet(m);
}

// Ward by recomputing every merge cost from cluster sizes and centroids.
Assignment naive_ward(const PointSet& ps, std::size_t k)
{
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < ps.size(); ++i)
        clusters.push_back({i});
    auto centroid = [&](const std::vector<std::size_t>& c) {
        Eigen::RowVectorXd s = Eigen::RowVectorXd::Zero(ps.points.cols());
        for (auto i : c)
            s += ps.points.row(static_cast<Eigen::Index>(i));
        return Eigen::RowVectorXd(s / static_cast<double>(c.size()));
    };
    while (clusters.size() > k) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t ba = 0, bb = 0;
        for (std::size_t a = 0; a < clusters.size(); ++a) {
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                const double na = static_cast<double>(clusters[a].size());
                const double nb = static_cast<double>(clusters[b].size());
                const double cost = na * nb / (na + nb) * (centroid(clusters[a]) - centroid(clusters[b])).squaredNorm();
                if (cost < best) {
                    best = cost;
                    ba = a;
                    bb = b;
                }
            }
        }
        clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
    }
    for (auto& c : clusters)
        std::sort(c.begin(), c.end());
    std::sort(clusters.begin(), clusters.end());
    Assignment out(ps.size());
    for (std::size_t c = 0; c < clusters.size(); ++c)
        for (auto i : clusters[c])
            out[i] = c;
    return out;
}

std::vector<std::size_t> sizes(const Assignment& a)
{
    std::map<std::size_t, std::size_t> count;
    for (auto c : a)
        ++count[c];
    std::vector<std::size_t> out;
    for (const auto& [c, n] : count)
        out.push_back(n);
    return out;
}

}  // namespace

TEST_CASE("metrics")
{
    const PointSet e(Eigen::MatrixXd{{0.0, 0.0}, {3.0, 4.0}});
    const PointSet m(e.points, Metric::manhattan);
    CHECK(e.distance(0, 1) == doctest::Approx(5.0));
    CHECK(m.distance(0, 1) == doctest::Approx(7.0));
    CHECK(metric_from_name("manhattan") == Metric::manhattan);
    CHECK_THROWS_AS(metric_from_name("cosine"), DataError);
    CHECK_THROWS_AS(PointSet(Eigen::MatrixXd(0, 2)), DataError);
    CHECK_THROWS_AS(PointSet(Eigen::MatrixXd::Constant(2, 2, std::numeric_limits<double>::quiet_NaN())), DataError);
}

TEST_CASE("ward trivial cases")
{
    std::mt19937_64 rng(1);
    const auto ps = random_points(rng, 8, 3);
    const auto single = ward_cluster(ps, 8);
    for (std::size_t i = 0; i < 8; ++i)
        CHECK(single[i] == i);
    for (auto c : ward_cluster(ps, 1))
        CHECK(c == 0);
    CHECK_THROWS_AS(ward_cluster(ps, 0), DataError);
    CHECK_THROWS_AS(ward_cluster(ps, 9), DataError);
}

TEST_CASE("ward recovers two blobs")
{
    std::mt19937_64 rng(2);
    const auto ps = two_blobs(rng, 10);
    const auto a = ward_cluster(ps, 2);
    for (std::size_t i = 0; i < ps.size(); ++i)
        CHECK(a[i] == i % 2);
}

TEST_CASE("ward matches recomputed merge costs")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const auto ps = random_points(rng, 12, 2 + trial % 3);
        for (std::size_t k : {1, 2, 3, 5, 12})
            CHECK(ward_cluster(ps, k) == naive_ward(ps, k));
    }
}

TEST_CASE("dispersion examples on a line")
{
    const auto ps = line({0, 1, 2, 10, 11, 12});
    const auto exact = brute_force_pdispersion(ps, 2);
    CHECK(exact.selected == std::vector<std::size_t>{0, 5});
    CHECK(exact.min_dist == 12.0);
    const auto d = select_dispersed(ps, 2, Method::D);
    CHECK(d.selected == std::vector<std::size_t>{0, 3});
    CHECK(d.min_dist == 10.0);
    for (auto m : {Method::A, Method::B, Method::C, Method::D}) {
        const auto all = select_dispersed(ps, 6, m);
        CHECK(all.selected == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
    }
    CHECK(brute_force_pdispersion(line({3, 7}), 2).selected == std::vector<std::size_t>{0, 1});
    CHECK(brute_force_pdispersion(ps, 6).min_dist == 1.0);
    CHECK_THROWS_AS(select_dispersed(ps, 1, Method::A), DataError);
    CHECK_THROWS_AS(select_dispersed(ps, 7, Method::A), DataError);
    std::mt19937_64 rng_big(0);
    CHECK_THROWS_AS(brute_force_pdispersion(random_points(rng_big, 60, 2), 30, 1000), DataError);
    CHECK(method_from_name("C") == Method::C);
}

TEST_CASE("heuristics never beat the exhaustive optimum")
{
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 40; ++trial) {
        const auto metric = trial % 2 ? Metric::manhattan : Metric::euclidean;
        const auto ps = random_points(rng, 10, 3, metric);
        const std::size_t p = 2 + static_cast<std::size_t>(trial % 4);
        const auto exact = brute_force_pdispersion(ps, p);
        CHECK(exact.min_dist == doctest::Approx(oracle::brute_force_dispersion_value(ps.points, p, trial % 2)));
        CHECK(exact.min_dist == doctest::Approx(min_pairwise(ps, exact.selected)));
        const auto clusters = ward_cluster(ps, p);
        for (auto m : {Method::A, Method::B, Method::C, Method::D}) {
            for (bool exclude : {false, true}) {
                const auto r = select_dispersed(ps, p, m, {exclude});
                CHECK(r.selected.size() == p);
                CHECK(std::is_sorted(r.selected.begin(), r.selected.end()));
                CHECK(r.min_dist <= exact.min_dist + 1e-12);
                CHECK(r.min_dist == doctest::Approx(min_pairwise(ps, r.selected)));
                std::set<std::size_t> hit;
                for (auto i : r.selected)
                    hit.insert(clusters[i]);
                CHECK(hit.size() == p);
            }
        }
    }
}

TEST_CASE("selection is invariant under positive scaling")
{
    std::mt19937_64 rng(5);
    const auto ps = random_points(rng, 15, 2);
    const PointSet big(ps.points * 4.0);
    for (auto m : {Method::A, Method::B, Method::C, Method::D}) {
        const auto a = select_dispersed(ps, 4, m);
        const auto b = select_dispersed(big, 4, m);
        CHECK(a.selected == b.selected);
        CHECK(b.min_dist == doctest::Approx(4.0 * a.min_dist));
    }
}

TEST_CASE("medoid")
{
    CHECK(medoid(line({5})) == 0);
    CHECK(medoid(line({0, 1})) == 0);
    CHECK(medoid(line({0, 1, 10})) == 1);
    CHECK(medoid(line({10, 0, 1})) == 2);
}

TEST_CASE("robin hood example")
{
    Eigen::MatrixXd m(12, 1);
    for (Eigen::Index i = 0; i < 10; ++i)
        m(i, 0) = static_cast<double>(i);
    m(10, 0) = 20.0;
    m(11, 0) = 21.0;
    const PointSet ps(m);
    Assignment a(12, 0);
    a[10] = a[11] = 1;
    const auto out = robin_hood(a, ps, 6);
    CHECK(sizes(out) == std::vector<std::size_t>{6, 6});
    // Points nearest the poor cluster move first: the top four of the line.
    for (std::size_t i = 6; i < 10; ++i)
        CHECK(out[i] == 1);
}

TEST_CASE("robin hood trivial and degenerate cases")
{
    std::mt19937_64 rng(6);
    const auto ps = random_points(rng, 9, 2);
    const Assignment even{0, 0, 0, 1, 1, 1, 2, 2, 2};
    CHECK(robin_hood(even, ps, 3) == even);
    // Not enough points for every cluster to reach t: stops without a donor.
    const auto out = robin_hood(even, ps, 5);
    CHECK(out.size() == 9);
    CHECK_THROWS_AS(robin_hood(even, ps, 0), DataError);
}

TEST_CASE("robin hood keeps counts and never shrinks the smallest cluster")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const auto ps = random_points(rng, 30, 2);
        std::uniform_int_distribution<std::size_t> pick(0, 3);
        Assignment a(30);
        for (std::size_t i = 0; i < 30; ++i)
            a[i] = i < 4 ? i : pick(rng);
        const std::size_t t = 1 + static_cast<std::size_t>(trial % 12);
        const auto before = sizes(a);
        const auto after = sizes(robin_hood(a, ps, t));
        CHECK(after.size() == before.size());
        std::size_t total = 0;
        for (auto s : after)
            total += s;
        CHECK(total == 30);
        CHECK(*std::min_element(after.begin(), after.end()) >= *std::min_element(before.begin(), before.end()));
    }
}

TEST_CASE("kmeans")
{
    std::mt19937_64 rng(8);
    const auto ps = random_points(rng, 7, 2);
    std::mt19937_64 g1(1);
    const auto single = kmeans(ps, 7, g1);
    CHECK(single.inertia == doctest::Approx(0.0));
    CHECK(std::set<std::size_t>(single.assignment.begin(), single.assignment.end()).size() == 7);

    const auto blobs = two_blobs(rng, 15);
    std::mt19937_64 g2(2), g3(2);
    const auto r = kmeans(blobs, 2, g2);
    for (std::size_t i = 2; i < blobs.size(); ++i)
        CHECK(r.assignment[i] == r.assignment[i % 2]);
    CHECK(r.assignment[0] != r.assignment[1]);
    const auto again = kmeans(blobs, 2, g3);
    CHECK(again.assignment == r.assignment);
    CHECK(again.centroids == r.centroids);
    CHECK_THROWS_AS(kmeans(ps, 0, g1), DataError);
    CHECK_THROWS_AS(kmeans(ps, 8, g1), DataError);
}

TEST_CASE("kmeans inertia never increases")
{
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const auto ps = random_points(rng, 60, 3);
        const auto r = kmeans(ps, 5, rng);
        for (std::size_t k = 1; k < r.inertia_history.size(); ++k)
            CHECK(r.inertia_history[k] <= r.inertia_history[k - 1] + 1e-9);
        CHECK(r.inertia == doctest::Approx(r.inertia_history.back()));
    }
}
