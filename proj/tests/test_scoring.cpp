#include "doctest.h"

#include "tsgad/errors.hpp"
#include "tsgad/scoring.hpp"

#include <algorithm>
#include <random>

using namespace tsgad;

namespace {

// every monotone warp path between two segments, evaluated directly
double dtw_oracle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const int n = int(a.size()), m = int(b.size());
    double best = std::numeric_limits<double>::infinity();
    struct Frame {
        int i, j, k;
        double sum;
    };
    std::vector<Frame> stack{{0, 0, 1, (a(0) - b(0)) * (a(0) - b(0))}};
    while (!stack.empty()) {
        auto f = stack.back();
        stack.pop_back();
        if (f.i == n - 1 && f.j == m - 1) {
            best = std::min(best, std::sqrt(f.sum) / double(f.k));
            continue;
        }
        auto push = [&](int i, int j) {
            if (i < n && j < m) {
                const double w = (a(i) - b(j)) * (a(i) - b(j));
                stack.push_back({i, j, f.k + 1, f.sum + w});
            }
        };
        push(f.i + 1, f.j);
        push(f.i, f.j + 1);
        push(f.i + 1, f.j + 1);
    }
    return best;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

}  // namespace

TEST_CASE("aggregate_reconstructions takes the lower median") {
    StepCollections coll = {{1, 2, 9}, {3, 1}, {7}};
    auto out = aggregate_reconstructions(coll);
    CHECK(out(0) == 2.0);
    CHECK(out(1) == 1.0);  // lower median of even-sized collection
    CHECK(out(2) == 7.0);

    StepCollections uncovered = {{1}, {}};
    CHECK_THROWS_AS(aggregate_reconstructions(uncovered), DataError);
}

TEST_CASE("median is invariant to per-step permutations") {
    std::mt19937 rng(12);
    StepCollections coll(20);
    for (auto& c : coll) {
        std::uniform_int_distribution<int> len(1, 9);
        std::uniform_real_distribution<double> val(-5, 5);
        const int n = len(rng);
        for (int i = 0; i < n; ++i) c.push_back(val(rng));
    }
    auto base = aggregate_reconstructions(coll);
    for (auto& c : coll) std::shuffle(c.begin(), c.end(), rng);
    CHECK(aggregate_reconstructions(coll) == base);
}

TEST_CASE("error_pointwise") {
    auto x = vec({1, 2, 3});
    CHECK(error_pointwise(x, x).isZero());
    CHECK(error_pointwise(vec({3}), vec({5}))(0) == 2.0);
    auto a = vec({1, -2, 0.5}), b = vec({0, 1, 2});
    CHECK((error_pointwise(3 * a, 3 * b) - 3 * error_pointwise(a, b)).norm() <
          1e-12);  // homogeneity
}

TEST_CASE("error_area closed forms") {
    const int T = 41, l = 5;
    SUBCASE("constant difference gives |d| in the interior") {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(T);
        Eigen::VectorXd xh = Eigen::VectorXd::Constant(T, -0.7);
        auto s = error_area(x, xh, l);
        for (int t = l; t < T - l; ++t) CHECK(s(t) == doctest::Approx(0.7));
        // boundary uses the truncated interval, still |d| for a constant
        CHECK(s(0) == doctest::Approx(0.7));
    }
    SUBCASE("alternating +-1 cancels pairwise in the interior") {
        Eigen::VectorXd x(T), xh = Eigen::VectorXd::Zero(T);
        for (int t = 0; t < T; ++t) x(t) = (t % 2 == 0) ? 1.0 : -1.0;
        auto s = error_area(x, xh, l);
        for (int t = l; t < T - l; ++t) CHECK(s(t) == doctest::Approx(0.0));
    }
    SUBCASE("identical series give zeros") {
        Eigen::VectorXd x = Eigen::VectorXd::Random(T);
        CHECK(error_area(x, x, l).isZero());
    }
    SUBCASE("matches analytic integral for linear difference") {
        // d(t) = 0.3 t - 2: trapezoid is exact on piecewise-linear signals
        Eigen::VectorXd x(T), xh = Eigen::VectorXd::Zero(T);
        for (int t = 0; t < T; ++t) x(t) = 0.3 * t - 2.0;
        auto s = error_area(x, xh, l);
        for (int t = 0; t < T; ++t) {
            const double a = std::max(0, t - l), b = std::min(T - 1, t + l);
            const double integral =
                0.15 * (b * b - a * a) - 2.0 * (b - a);  // closed-form antiderivative
            CHECK(s(t) == doctest::Approx(std::abs(integral) / (b - a)).epsilon(1e-9));
        }
    }
    CHECK_THROWS_AS(error_area(vec({1, 2}), vec({1, 2}), 1), ConfigError);
}

TEST_CASE("error_dtw") {
    SUBCASE("identical series give zeros") {
        Eigen::VectorXd x = Eigen::VectorXd::Random(30);
        CHECK(error_dtw(x, x, 4).isZero());
    }
    SUBCASE("matches exhaustive enumeration on short segments") {
        std::mt19937 rng(77);
        std::uniform_real_distribution<double> d(-2, 2);
        std::uniform_int_distribution<int> len(1, 6);
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::VectorXd a(len(rng)), b(len(rng));
            for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = d(rng);
            for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = d(rng);
            CHECK(dtw_distance(a, b) == doctest::Approx(dtw_oracle(a, b)).epsilon(1e-12));
        }
    }
    SUBCASE("spec example [0,0,1] vs [0,1,1]") {
        auto a = vec({0, 0, 1}), b = vec({0, 1, 1});
        CHECK(dtw_distance(a, b) == doctest::Approx(dtw_oracle(a, b)));
    }
    SUBCASE("tolerates time shift better than point-wise error") {
        // identical pulse shifted by two steps inside the window
        const int T = 21, l = 10;
        Eigen::VectorXd x = Eigen::VectorXd::Zero(T), xh = Eigen::VectorXd::Zero(T);
        x.segment(8, 3).setConstant(1.0);
        xh.segment(10, 3).setConstant(1.0);
        const double dtw_mid = error_dtw(x, xh, l)(T / 2);
        const double point_mean = error_pointwise(x, xh).mean();
        CHECK(dtw_mid < point_mean);
    }
}

TEST_CASE("smooth_critic") {
    CHECK(smooth_critic({{5, 5, 5}})(0) == 5.0);
    CHECK(smooth_critic({{3.25}})(0) == 3.25);
    // outlier suppressed: the dense cluster wins the density argmax
    CHECK(smooth_critic({{1, 1, 1, 10}})(0) == 1.0);
    CHECK(smooth_critic({{1, 1, 1, 10}}, SmoothMode::raw_max)(0) == 10.0);
    CHECK_THROWS_AS(smooth_critic({{}}), DataError);
}

TEST_CASE("zscore") {
    auto hi = zscore(vec({0, 0, 10, 0, 0}), ZDirection::high_is_anomalous);
    Eigen::Index argmax;
    hi.maxCoeff(&argmax);
    CHECK(argmax == 2);
    CHECK(std::abs(hi.mean()) < 1e-12);

    auto lo = zscore(vec({1, 1, -5, 1}), ZDirection::low_is_anomalous);
    lo.maxCoeff(&argmax);
    CHECK(argmax == 2);

    CHECK_THROWS_AS(zscore(vec({2, 2, 2}), ZDirection::high_is_anomalous), DataError);

    // mean 0, population std 1
    std::mt19937 rng(3);
    std::normal_distribution<double> d(4.0, 2.5);
    Eigen::VectorXd v(500);
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = d(rng);
    auto z = zscore(v, ZDirection::high_is_anomalous);
    CHECK(std::abs(z.mean()) < 1e-9);
    CHECK(std::abs(std::sqrt(z.array().square().mean()) - 1.0) < 1e-9);
}

TEST_CASE("fuse") {
    auto z_re = vec({2, 0}), z_c = vec({4, 1});
    FusionConfig convex{FusionMode::convex, 0.5, 1.0};
    CHECK(fuse(z_re, z_c, convex)(0) == doctest::Approx(3.0));

    FusionConfig product{FusionMode::product, 0.5, 1.0};
    CHECK(fuse(z_re, z_c, product)(0) == doctest::Approx(8.0));

    FusionConfig pure{FusionMode::convex, 1.0, 1.0};
    CHECK(fuse(z_re, z_c, pure) == z_re);

    // argmax invariant to alpha <-> 1-alpha with swapped inputs
    FusionConfig a{FusionMode::convex, 0.3, 1.0}, b{FusionMode::convex, 0.7, 1.0};
    auto u = vec({0.1, 2.0, -1.0, 0.4}), w = vec({1.5, -0.2, 0.8, 0.3});
    Eigen::Index i1, i2;
    fuse(u, w, a).maxCoeff(&i1);
    fuse(w, u, b).maxCoeff(&i2);
    CHECK(i1 == i2);
}

TEST_CASE("collect_window_values coverage counts") {
    // 3 windows of size 2 with step 1 over 4 steps
    auto coll = collect_window_values({10, 20, 30}, {0, 1, 2}, 2, 4);
    CHECK(coll[0].size() == 1);
    CHECK(coll[1].size() == 2);
    CHECK(coll[2].size() == 2);
    CHECK(coll[3].size() == 1);
    CHECK(coll[1] == std::vector<double>{10, 20});
}
