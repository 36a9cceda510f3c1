#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "polymax/assemble.hpp"
#include "polymax/baselines.hpp"
#include "polymax/roundings.hpp"

using namespace polymax;

namespace {

PseudoDistribution bilinear_rank1(const Eigen::VectorXd& y, const Eigen::VectorXd& z) {
    auto u = std::make_shared<Universe>();
    u->add_group("y", static_cast<int>(y.size()), VarKind::cube);
    u->add_group("z", static_cast<int>(z.size()), VarKind::cube);
    MonomialBasis b = build_basis(u, 1, Domain::hypercube);
    Eigen::VectorXd point(y.size() + z.size());
    point << y, z;
    return rank1_lift(b, point, 2, Domain::hypercube);
}

PseudoDistribution solve_bilinear(const Eigen::MatrixXd& m, double* sdp_value) {
    SosRelaxation rel = assemble_bilinear_sdp(m, Domain::hypercube);
    SolveParams p;
    p.max_iter = 8000;
    SolveResult res = solve(rel.problem, p);
    REQUIRE(res.usable());
    if (sdp_value) *sdp_value = res.objective;
    return extract_pseudodistribution(rel, res);
}

// mixture of rank-1 lifts over the decoupled cubic universe
PseudoDistribution decoupled_mixture(int n, int points, Rng& rng) {
    auto u = make_decoupled_universe(n, 3, Domain::hypercube);
    MonomialBasis b = build_basis(u, 3, Domain::hypercube, decoupled_cubic_filter());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(b.size(), b.size());
    for (int p = 0; p < points; ++p) {
        Eigen::VectorXd x(3 * n);
        for (int i = 0; i < 3 * n; ++i) x[i] = static_cast<double>(rng.sign());
        Eigen::VectorXd lift(b.size());
        for (int i = 0; i < b.size(); ++i) lift[i] = eval_monomial(b.at(i), x);
        m += lift * lift.transpose() / points;
    }
    return PseudoDistribution(b, std::move(m), 6, Domain::hypercube);
}

}  // namespace

TEST_CASE("grothendieck_round on integral inputs") {
    // n = 1, M = [1], pE[y1 z1] = 1
    Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    PseudoDistribution mu = bilinear_rank1(one, one);
    Eigen::MatrixXd m = Eigen::MatrixXd::Ones(1, 1);
    BilinearRounding r = grothendieck_round(mu, m, 4, Rng(1));
    CHECK(r.value == doctest::Approx(1.0));

    // M = e1 e2^T with the rank-1 lift of y=(1,-1), z=(-1,1)
    Eigen::VectorXd y(2), z(2);
    y << 1, -1;
    z << -1, 1;
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(2, 2);
    m2(0, 1) = 1.0;
    PseudoDistribution mu2 = bilinear_rank1(y, z);
    BilinearRounding r2 = grothendieck_round(mu2, m2, 8, Rng(2));
    CHECK(r2.value == doctest::Approx(y[0] * z[1]));  // direct evaluation
}

TEST_CASE("grothendieck_round clears 0.56 x pE on SDP optima") {
    Rng rng(11);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 4;
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = rng.gaussian();
        double sdp_value = 0.0;
        PseudoDistribution mu = solve_bilinear(m, &sdp_value);
        double opt = oracles::brute_bilinear_max(m);
        CHECK(sdp_value >= opt - 1e-5 * m.cwiseAbs().sum());  // pE is an upper bound
        BilinearRounding r = grothendieck_round(mu, m, 64, rng.child(trial));
        CHECK(r.value >= 0.56 * sdp_value - 1e-9);
        CHECK(r.value <= opt + 1e-9);  // roundings never exceed the truth
    }
}

TEST_CASE("sphere_eigen_round") {
    auto u = make_coupled_universe(2, Domain::sphere);
    MonomialBasis b = build_basis(u, 1, Domain::sphere);

    // X = diag(1/2, 1/2), M = diag(2, 1): the best eigenvector gives 2
    Eigen::MatrixXd mm = Eigen::MatrixXd::Identity(3, 3);
    mm(1, 1) = 0.5;
    mm(2, 2) = 0.5;
    PseudoDistribution mu(b, mm, 2, Domain::sphere);
    Eigen::MatrixXd m = Eigen::Vector2d(2.0, 1.0).asDiagonal();
    Eigen::VectorXd x = sphere_eigen_round(mu, m);
    CHECK(x.dot(m * x) == doctest::Approx(2.0));
    CHECK(x.dot(m * x) >= 1.5 - 1e-8);  // >= <X, M>

    // rank-1 X = v v^T: returns +-v, value equals pE exactly
    Eigen::VectorXd v(2);
    v << 0.6, 0.8;
    PseudoDistribution point = rank1_lift(b, v, 2, Domain::sphere);
    Eigen::MatrixXd msym(2, 2);
    msym << 1.0, 0.3, 0.3, -0.5;
    Eigen::VectorXd xr = sphere_eigen_round(point, msym);
    CHECK(xr.dot(msym * xr) == doctest::Approx(v.dot(msym * v)).epsilon(1e-8));

    // property: value >= <X, M> for random valid trace-1 X
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::MatrixXd g(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) g(i, j) = rng.gaussian();
        Eigen::MatrixXd x2 = g * g.transpose();
        x2 /= x2.trace();
        Eigen::MatrixXd full = Eigen::MatrixXd::Zero(3, 3);
        full(0, 0) = 1.0;
        full.bottomRightCorner(2, 2) = x2;
        PseudoDistribution rv(b, full, 2, Domain::sphere);
        Eigen::MatrixXd rm(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = i; j < 2; ++j) rm(i, j) = rm(j, i) = rng.gaussian();
        Eigen::VectorXd xx = sphere_eigen_round(rv, rm);
        CHECK(xx.dot(rm * xx) >= (x2 * rm).trace() - 1e-8);
    }
}

TEST_CASE("sphere_bilinear_round is lossless") {
    Rng rng(7);
    Eigen::MatrixXd m(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = rng.gaussian();
    BilinearRounding r = sphere_bilinear_round(m);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    CHECK(r.value == doctest::Approx(svd.singularValues()[0]));
    CHECK(std::abs(r.y.norm() - 1.0) <= 1e-12);
    CHECK(std::abs(r.z.norm() - 1.0) <= 1e-12);
}

TEST_CASE("charikar_wirth bound") {
    // n = 2, off-diagonal ones, rank-1 at (1,1): pE = 2, T = 3
    auto u = make_coupled_universe(2, Domain::hypercube);
    MonomialBasis b = build_basis(u, 1, Domain::hypercube);
    PseudoDistribution mu = rank1_lift(b, Eigen::VectorXd::Ones(2), 2, Domain::hypercube);

    // M = 0: bound 0, totality
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2, 2);
    CharikarWirthResult r0 = charikar_wirth_sample(mu, z, 3.0, 10, Rng(5));
    CHECK(r0.bound == doctest::Approx(0.0));

    Eigen::MatrixXd m(2, 2);
    m << 0, 1, 1, 0;
    CharikarWirthResult r = charikar_wirth_sample(mu, m, 3.0, 100000, Rng(6));
    const double bound = 2.0 / 9.0 - 16.0 * std::exp(-4.5);
    CHECK(r.bound == doctest::Approx(bound));
    // 3 standard errors at 1e5 samples: values live in [-2, 2]
    CHECK(r.empirical_mean >= bound - 3.0 * 2.0 / std::sqrt(1e5));

    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(charikar_wirth_sample(mu, bad, 3.0, 10, Rng(7)), RoundingError);
}

TEST_CASE("charikar_wirth at T = sqrt(2 ln n) recovers an Omega(1/log n) ratio") {
    Rng rng(17);
    const int n = 8;
    for (int trial = 0; trial < 3; ++trial) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) m(i, j) = m(j, i) = rng.gaussian();
        SosRelaxation rel = assemble_quadratic_sdp(m, Domain::hypercube);
        SolveParams sp;
        sp.max_iter = 6000;
        SolveResult res = solve(rel.problem, sp);
        REQUIRE(res.usable());
        PseudoDistribution mu = extract_pseudodistribution(rel, res);
        const double t = std::sqrt(2.0 * std::log(static_cast<double>(n)));
        CharikarWirthResult cw = charikar_wirth_sample(mu, m, t, 2000, rng.child(trial));
        double opt = -1e300;
        for (const auto& x : oracles::all_sign_vectors(n))
            opt = std::max(opt, x.dot(m * x));
        CHECK(cw.best_value >= 0.1 * opt / std::log(static_cast<double>(n)));
        CHECK(cw.best_value <= opt + 1e-9);
    }
}

TEST_CASE("scalar_fix spec cases") {
    // uniform on {-1,1}: branch (p+m)^2 fixes pE'[x1] = 1
    auto u = make_coupled_universe(1, Domain::hypercube);
    MonomialBasis b = build_basis(u, 1, Domain::hypercube);
    PseudoDistribution uni(b, Eigen::MatrixXd::Identity(2, 2), 6, Domain::hypercube);
    SparsePoly p = SparsePoly::variable(u, u->var(std::size_t{0}, 0));
    ScalarFixResult r = scalar_fix(uni, p, 1);
    CHECK(r.achieved == doctest::Approx(1.0));
    CHECK(std::abs(r.achieved) >= r.target - 1e-12);
    CHECK(r.branch == "(p+m)^2 p^2k-2");

    // point mass: branch (i), no reweight
    PseudoDistribution point = rank1_lift(b, Eigen::VectorXd::Ones(1), 6, Domain::hypercube);
    ScalarFixResult r2 = scalar_fix(point, p, 1);
    CHECK(r2.branch == "none");
    CHECK(r2.achieved == doctest::Approx(1.0));

    // zero moments: invalid
    SparsePoly zero(u);
    CHECK_THROWS_AS(scalar_fix(uni, zero, 1), InvalidMomentError);
}

TEST_CASE("scalar_fix guarantee property suite") {
    Rng rng(23);
    int runs = 0;
    for (int trial = 0; trial < 200 && runs < 100; ++trial) {
        const int n = 3;
        for (int k : {1, 2}) {
            auto u = make_coupled_universe(n, Domain::hypercube);
            MonomialBasis b = build_basis(u, n, Domain::hypercube);
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(b.size(), b.size());
            const int pts = 4;
            for (int pt = 0; pt < pts; ++pt) {
                Eigen::VectorXd x(n);
                for (int i = 0; i < n; ++i) x[i] = static_cast<double>(rng.sign());
                Eigen::VectorXd lift(b.size());
                for (int i = 0; i < b.size(); ++i) lift[i] = eval_monomial(b.at(i), x);
                m += lift * lift.transpose() / pts;
            }
            PseudoDistribution mu(b, std::move(m), (2 * k + 2) * 2, Domain::hypercube);
            SparsePoly p(u);
            for (int i = 0; i < n; ++i) {
                p += SparsePoly::variable(u, u->var(std::size_t{0}, i)) * rng.gaussian();
                for (int j = i + 1; j < n; ++j) {
                    p.add_term({u->var(std::size_t{0}, i), u->var(std::size_t{0}, j)},
                               rng.gaussian());
                }
            }
            double p2k = mu.pseudo_expectation(pow(p, 2 * k));
            if (p2k <= 1e-9) continue;
            ScalarFixResult r = scalar_fix(mu, p, k);
            CHECK(std::abs(r.achieved) >= std::pow(p2k, 1.0 / (2.0 * k)) / 3.0 - 1e-8);
            ++runs;
        }
    }
    CHECK(runs >= 100);
}

TEST_CASE("round_cubic_deg6 on a planted integral distribution") {
    Rng rng(31);
    const int n = 4;
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) s[i] = static_cast<double>(rng.sign());
    SymTensor t = oracles::planted_tensor(n, s);

    auto u = make_decoupled_universe(n, 3, Domain::hypercube);
    MonomialBasis b = build_basis(u, 3, Domain::hypercube, decoupled_cubic_filter());
    Eigen::VectorXd point(3 * n);
    point << s, s, s;
    PseudoDistribution mu = rank1_lift(b, point, 6, Domain::hypercube);

    double planted_value = eval_decoupled(t, s, s, s);
    RoundingOutcome out = round_cubic_deg6(t, mu, 64, Rng(77));
    REQUIRE(out.ok);
    CHECK(out.sos == doctest::Approx(planted_value));
    CHECK(out.value >= planted_value / 8.0 - 1e-9);
    CHECK(out.value <= oracles::brute_decoupled_max(t) + 1e-9);
    // recomputed by eval_decoupled
    CHECK(out.value == doctest::Approx(eval_decoupled(t, out.assignment[0], out.assignment[1],
                                                      out.assignment[2])));
}

TEST_CASE("round_cubic_deg6 via the solver at n=3") {
    Rng rng(41);
    for (int trial = 0; trial < 3; ++trial) {
        const int n = 3;
        SymTensor t = oracles::random_tensor(3, n, rng);
        SosRelaxation rel = assemble_sos_sdp(t, 6, Domain::hypercube, true);
        SolveParams sp;
        sp.max_iter = 6000;
        SolveResult res = solve(rel.problem, sp);
        REQUIRE(res.usable());
        PseudoDistribution mu = extract_pseudodistribution(rel, res);
        RoundingOutcome out = round_cubic_deg6(t, mu, 64 * n, rng.child(trial));
        REQUIRE(out.ok);
        double opt = oracles::brute_decoupled_max(t);
        CHECK(out.sos >= opt - 1e-5 * t.norm1());
        CHECK(out.value >= out.sos / (8.0 * std::sqrt(static_cast<double>(n))));
        CHECK(out.value <= opt + 1e-9);
        CHECK(out.paley_zygmund_hits >= out.trials / 648);
    }
}

TEST_CASE("round_cubic_deg6k at k=1 matches round_cubic_deg6") {
    Rng rng(51);
    const int n = 3;
    SymTensor t = oracles::random_tensor(3, n, rng);
    PseudoDistribution mu = decoupled_mixture(n, 4, rng);
    RoundingOutcome a = round_cubic_deg6(t, mu, 32, Rng(9));
    RoundingOutcome b = round_cubic_deg6k(t, mu, 1, 32, Rng(9));
    CHECK(a.ok == b.ok);
    if (a.ok) {
        CHECK(a.value == b.value);
        CHECK(a.best_trial == b.best_trial);
    }
}

TEST_CASE("round_cubic_deg6k at k=2 on the full basis, planted") {
    Rng rng(61);
    const int n = 3;
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) s[i] = static_cast<double>(rng.sign());
    SymTensor t = oracles::planted_tensor(n, s);

    auto u = make_decoupled_universe(n, 3, Domain::hypercube);
    MonomialBasis b = build_basis(
        u, 6, Domain::hypercube, [](const Monomial&, const Universe&) { return true; });
    Eigen::VectorXd point(3 * n);
    point << s, s, s;
    PseudoDistribution mu = rank1_lift(b, point, 12, Domain::hypercube);
    RoundingOutcome out = round_cubic_deg6k(t, mu, 2, 64, Rng(3));
    REQUIRE(out.ok);
    const double c = default_constants().rounding_gate;
    CHECK(out.value >= c * std::sqrt(2.0 / n) * out.sos - 1e-9);

    // degree guard
    PseudoDistribution low = rank1_lift(
        build_basis(u, 3, Domain::hypercube, decoupled_cubic_filter()), point, 6,
        Domain::hypercube);
    CHECK_THROWS_AS(round_cubic_deg6k(t, low, 2, 8, Rng(4)), DegreeOverflowError);
}

TEST_CASE("round_cubic_sphere") {
    Rng rng(71);
    const int n = 3;
    SymTensor t = oracles::random_tensor(3, n, rng);
    SosRelaxation rel = assemble_sos_sdp(t, 6, Domain::sphere, true);
    SolveParams sp;
    sp.max_iter = 6000;
    SolveResult res = solve(rel.problem, sp);
    REQUIRE(res.usable());
    PseudoDistribution mu = extract_pseudodistribution(rel, res);
    RoundingOutcome out = round_cubic_sphere(t, mu, 1, 64 * n, rng.child("round"));
    REQUIRE(out.ok);
    CHECK(out.value >= out.sos / (8.0 * std::sqrt(static_cast<double>(n))) - 1e-9);
    // ALS lower bound cross-check
    OracleResult als = als_sphere_lower_bound(t, 8, rng.child("als"));
    CHECK(out.sos >= als.value - 1e-5 * t.norm1());
    CHECK(out.value <= als.value + 1e-6);

    // zero tensor rejects
    SymTensor zero(3, n);
    RoundingOutcome bad = round_cubic_sphere(zero, mu, 1, 8, Rng(1));
    CHECK_FALSE(bad.ok);
}

TEST_CASE("round_high_degree d=4 planted vs brute force") {
    Rng rng(81);
    const int n = 4;
    SymTensor t = oracles::random_tensor(4, n, rng);

    auto pts = oracles::all_sign_vectors(n);
    double opt = -1e300;
    std::vector<Eigen::VectorXd> arg(4);
    for (const auto& a : pts)
        for (const auto& bb : pts)
            for (const auto& c : pts)
                for (const auto& d : pts) {
                    double v = eval_decoupled(t, std::vector<Eigen::VectorXd>{a, bb, c, d});
                    if (v > opt) {
                        opt = v;
                        arg = {a, bb, c, d};
                    }
                }

    auto u = make_decoupled_universe(n, 4, Domain::hypercube);
    MonomialBasis b = build_basis(u, 4, Domain::hypercube, decoupled_hd_filter());
    Eigen::VectorXd point(4 * n);
    point << arg[0], arg[1], arg[2], arg[3];
    PseudoDistribution mu = rank1_lift(b, point, 8, Domain::hypercube);

    RoundingOutcome out = round_high_degree(t, mu, 128, Rng(5));
    REQUIRE(out.ok);
    CHECK(out.sos == doctest::Approx(opt));
    CHECK(out.value >= out.sos / (8.0 * n) - 1e-9);  // n^{d/2-1} = n at d = 4
    CHECK(out.value <= opt + 1e-9);
}

TEST_CASE("round_high_degree d=5 single monomial meets the n^{d/2-1} gate") {
    const int n = 5, d = 5;
    SymTensor t(d, n);
    t.add({1, 2, 3, 4, 5}, 2.0);

    auto u = make_decoupled_universe(n, d, Domain::hypercube);
    // test-sized basis: full bipartite part plus short cross terms
    BasisFilter filter = [](const Monomial& m, const Universe& uu) {
        int bip = group_degree(m, uu, 0) + group_degree(m, uu, 1);
        int rest = degree(m) - bip;
        for (std::size_t g = 2; g < uu.groups().size(); ++g)
            if (group_degree(m, uu, g) > 1) return false;
        return (rest == 0 && bip <= 3) || (rest <= 2 && bip <= 1);
    };
    MonomialBasis b = build_basis(u, 5, Domain::hypercube, filter);
    Eigen::VectorXd point = Eigen::VectorXd::Ones(d * n);
    PseudoDistribution mu = rank1_lift(b, point, 10, Domain::hypercube);

    RoundingOutcome out = round_high_degree(t, mu, 64, Rng(13));
    REQUIRE(out.ok);
    CHECK(out.sos == doctest::Approx(2.0));  // the planted optimum = |coeff| = |T|_1
    CHECK(out.value >= out.sos / (8.0 * std::pow(n, 1.5)) - 1e-9);
    CHECK(out.value <= 2.0 + 1e-9);  // f~ never exceeds |T|_1
}
