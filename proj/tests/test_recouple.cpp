#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "polymax/recouple.hpp"

using namespace polymax;

TEST_CASE("cubic recoupling hits the 2/9 factor") {
    SymTensor t(3, 3);
    t.add({1, 2, 3}, 6.0);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
    auto d = recouple_cubic(ones, ones, ones);
    CHECK(d.expect(t) == doctest::Approx(2.0 / 9.0 * 6.0));
    CHECK(recouple_factor(3) == doctest::Approx(2.0 / 9.0));
}

TEST_CASE("cubic recoupling identities on random inputs") {
    Rng rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 3 + static_cast<int>(rng.below(6));  // up to 8
        SymTensor f = oracles::random_tensor(3, n, rng);
        SymTensor g = oracles::random_tensor(2, n, rng);
        Eigen::VectorXd x(n), y(n), z(n);
        for (int i = 0; i < n; ++i) {
            x[i] = rng.sign();
            y[i] = rng.sign();
            z[i] = rng.sign();
        }
        auto d = recouple_cubic(x, y, z);

        double want_f = (2.0 / 9.0) * eval_decoupled(f, x, y, z);
        CHECK(d.expect(f) == doctest::Approx(want_f).epsilon(1e-12));

        auto eval_g = [&](const Eigen::VectorXd& v) {
            return eval_coupled(g, Assignment(Domain::hypercube, v));
        };
        double want_g = (eval_g(x) + eval_g(y) + eval_g(z)) / 9.0;
        CHECK(d.expect([&](const Eigen::VectorXd& v) { return eval_g(v); }) ==
              doctest::Approx(want_g).epsilon(1e-12));

        CHECK(d.mean().lpNorm<Eigen::Infinity>() <= 1e-14);
    }
}

TEST_CASE("empirical recouple mean tracks the analytic value") {
    Rng rng(7);
    SymTensor f = oracles::random_tensor(3, 5, rng);
    Eigen::VectorXd x(5), y(5), z(5);
    for (int i = 0; i < 5; ++i) {
        x[i] = rng.sign();
        y[i] = rng.sign();
        z[i] = rng.sign();
    }
    auto d = recouple_cubic(x, y, z);
    const double analytic = d.expect(f);

    const int samples = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd v = d.sample(rng);
        double fv = eval_coupled(f, Assignment(Domain::hypercube, v));
        sum += fv;
        sumsq += fv * fv;
    }
    double mean = sum / samples;
    double var = sumsq / samples - mean * mean;
    double se = std::sqrt(var / samples);
    CHECK(std::abs(mean - analytic) <= 3.0 * se + 1e-12);
}

TEST_CASE("odd-degree recoupling") {
    // d = 3 reduces exactly to the cubic rule
    Rng rng(23);
    SymTensor f = oracles::random_tensor(3, 4, rng);
    Eigen::VectorXd x(4), y(4), z(4);
    for (int i = 0; i < 4; ++i) {
        x[i] = rng.sign();
        y[i] = rng.sign();
        z[i] = rng.sign();
    }
    auto d3 = recouple_odd_d({x, y, z});
    CHECK(d3.expect(f) == doctest::Approx(recouple_cubic(x, y, z).expect(f)).epsilon(1e-14));

    // d = 5, single monomial, all groups all-ones: 120/3125 x coefficient
    SymTensor f5(5, 5);
    f5.add({1, 2, 3, 4, 5}, 2.5);
    std::vector<Eigen::VectorXd> groups(5, Eigen::VectorXd::Ones(5));
    auto d5 = recouple_odd_d(groups);
    CHECK(d5.expect(f5) == doctest::Approx(120.0 / 3125.0 * 2.5).epsilon(1e-12));
    CHECK(recouple_factor(5) == doctest::Approx(120.0 / 3125.0));

    // zero tensor
    SymTensor zero(5, 5);
    CHECK(d5.expect(zero) == 0.0);

    // even degree has no coupling
    std::vector<Eigen::VectorXd> four(4, Eigen::VectorXd::Ones(3));
    CHECK_THROWS_AS(recouple_odd_d(four), UnsupportedDegreeError);
}

TEST_CASE("d=5 factor holds on random inputs") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 5 + static_cast<int>(rng.below(2));  // 5..6
        SymTensor f = oracles::random_tensor(5, n, rng);
        std::vector<Eigen::VectorXd> groups;
        for (int j = 0; j < 5; ++j) {
            Eigen::VectorXd g(n);
            for (int i = 0; i < n; ++i) g[i] = rng.sign();
            groups.push_back(g);
        }
        auto d = recouple_odd_d(groups);
        CHECK(d.expect(f) ==
              doctest::Approx((120.0 / 3125.0) * eval_decoupled(f, groups)).epsilon(1e-12));
    }
}

TEST_CASE("non-decouplability of even degree (regression)") {
    // Q = I - 11^T: coupled max n (even n), decoupled max n^2 - n
    for (int n : {2, 4, 6}) {
        SymTensor q(2, n);
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) q.add({i, j}, -2.0);  // -x_i x_j twice (i<j and j<i)
        double coupled = oracles::brute_coupled_max(q);
        CHECK(coupled == doctest::Approx(static_cast<double>(n)));
        // decoupled bilinear max via brute force over both sign vectors
        auto pts = oracles::all_sign_vectors(n);
        double dec = -1e300;
        for (const auto& x : pts)
            for (const auto& y : pts)
                dec = std::max(dec, eval_decoupled(q, std::vector<Eigen::VectorXd>{x, y}));
        CHECK(dec == doctest::Approx(static_cast<double>(n) * n - n));
    }
}

TEST_CASE("decoupled absolute-value rounding") {
    // Example-style quadratic: decoupled max n^2 - n, guarantee (n^2-n)/2
    const int n = 4;
    SymTensor q(2, n);
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) q.add({i, j}, -2.0);
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n), y = -Eigen::VectorXd::Ones(n);
    double dec = eval_decoupled(q, std::vector<Eigen::VectorXd>{x, y});
    CHECK(dec == doctest::Approx(static_cast<double>(n) * n - n));
    auto res = decouple_abs_round(q, {x, y});
    CHECK(res.abs_value >= (2.0 / 4.0) * dec - 1e-12);

    // all groups equal reproduces |f(group)| among candidates
    Rng rng(3);
    SymTensor t = oracles::random_tensor(3, 4, rng);
    Eigen::VectorXd w(4);
    for (int i = 0; i < 4; ++i) w[i] = rng.sign();
    auto r2 = decouple_abs_round(t, {w, w, w});
    double fw = std::abs(eval_coupled(t, Assignment(Domain::hypercube, w)));
    CHECK(r2.abs_value >= fw - 1e-12);
}

TEST_CASE("abs-round guarantee vs brute force, d = 4") {
    Rng rng(17);
    const int n = 4;
    for (int trial = 0; trial < 5; ++trial) {
        SymTensor t = oracles::random_tensor(4, n, rng);
        // brute-force decoupled max over {-1,1}^{4n}
        auto pts = oracles::all_sign_vectors(n);
        double dec = -1e300;
        std::vector<Eigen::VectorXd> arg(4);
        for (const auto& a : pts)
            for (const auto& b : pts)
                for (const auto& c : pts)
                    for (const auto& d : pts) {
                        double v = eval_decoupled(t, std::vector<Eigen::VectorXd>{a, b, c, d});
                        if (v > dec) {
                            dec = v;
                            arg = {a, b, c, d};
                        }
                    }
        auto res = decouple_abs_round(t, arg);
        const double factor = 24.0 / 256.0;  // d!/d^d at d = 4
        CHECK(res.abs_value >= factor * dec - 1e-9);
        // the [-1,1] -> {-1,1} companion preserves expectation; spot-check mean
        Rng sampler(5);
        double mean = 0.0;
        const int samples = 20000;
        for (int s = 0; s < samples; ++s) {
            Eigen::VectorXd v = round_unit_box(res.y, sampler);
            mean += eval_coupled(t, Assignment(Domain::hypercube, v));
        }
        mean /= samples;
        CHECK(std::abs(mean - res.value) <= 0.2 * (1.0 + std::abs(res.value)));
    }
}
