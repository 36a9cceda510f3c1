#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "polymax/basis.hpp"
#include "polymax/pseudo.hpp"

using namespace polymax;

namespace {

// moment matrix of the uniform distribution on {-1,1}^n: pE[u v] = [u == v]
PseudoDistribution uniform_cube(int n, int degree) {
    auto u = make_coupled_universe(n, Domain::hypercube);
    MonomialBasis b = build_basis(u, degree / 2, Domain::hypercube);
    return PseudoDistribution(b, Eigen::MatrixXd::Identity(b.size(), b.size()), degree,
                              Domain::hypercube);
}

// random valid pseudo-distribution: a mixture of rank-1 lifts of cube points
PseudoDistribution random_mixture(int n, int degree, int points, Rng& rng,
                                  Eigen::VectorXd* first_point = nullptr) {
    auto u = make_coupled_universe(n, Domain::hypercube);
    MonomialBasis b = build_basis(u, degree / 2, Domain::hypercube);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(b.size(), b.size());
    Eigen::VectorXd w(points);
    for (int p = 0; p < points; ++p) w[p] = rng.uniform(0.1, 1.0);
    w /= w.sum();
    for (int p = 0; p < points; ++p) {
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) x[i] = static_cast<double>(rng.sign());
        if (p == 0 && first_point) *first_point = x;
        Eigen::VectorXd lift(b.size());
        for (int i = 0; i < b.size(); ++i) lift[i] = eval_monomial(b.at(i), x);
        m += w[p] * lift * lift.transpose();
    }
    return PseudoDistribution(b, std::move(m), degree, Domain::hypercube);
}

SparsePoly random_poly(const std::shared_ptr<const Universe>& u, int degree, Rng& rng) {
    SparsePoly p(u);
    const int nv = u->num_vars();
    for (int t = 0; t < 2 * nv; ++t) {
        Monomial m;
        int d = static_cast<int>(rng.below(degree + 1));
        for (int i = 0; i < d; ++i) m.push_back(static_cast<VarId>(rng.below(nv)));
        p.add_term(reduce_monomial(std::move(m), *u), rng.gaussian());
    }
    return p;
}

}  // namespace

TEST_CASE("build_basis counts") {
    auto u3 = make_coupled_universe(3, Domain::hypercube);
    MonomialBasis b1 = build_basis(u3, 1, Domain::hypercube);
    CHECK(b1.size() == 4);  // {1, x1, x2, x3}
    CHECK(b1.at(0).empty());

    auto u4 = make_coupled_universe(4, Domain::hypercube);
    CHECK(build_basis(u4, 2, Domain::hypercube).size() == 11);  // 1 + 4 + 6

    auto s2 = make_coupled_universe(2, Domain::sphere);
    CHECK(build_basis(s2, 2, Domain::sphere).size() == 6);  // stars and bars

    CHECK_THROWS_AS(build_basis(u4, 2, Domain::hypercube, {}, 5), SizeCapError);
}

TEST_CASE("decoupled pattern filter sizes") {
    auto u = make_decoupled_universe(2, 3, Domain::hypercube);
    MonomialBasis b = build_basis(u, 3, Domain::hypercube, decoupled_cubic_filter());
    // (y,z) deg <= 3 over 4 vars: 1+4+6+4 = 15; x_i (y,z)-deg <= 2: 2*(1+4+6) = 22
    CHECK(b.size() == 15 + 22);
}

TEST_CASE("pseudo_expectation basics") {
    PseudoDistribution mu = uniform_cube(2, 2);
    auto u = mu.basis().universe();
    CHECK(mu.pseudo_expectation(SparsePoly::constant(u, 1.0)) == 1.0);

    // p = x1^2 reduces to 1
    SparsePoly p(u);
    p.add_term({u->var(std::size_t{0}, 0), u->var(std::size_t{0}, 0)}, 1.0);
    CHECK(mu.pseudo_expectation(p) == 1.0);

    // uniform: pE[x1 x2] = 0
    SparsePoly q(u);
    q.add_term({u->var(std::size_t{0}, 0), u->var(std::size_t{0}, 1)}, 1.0);
    CHECK(mu.pseudo_expectation(q) == 0.0);

    // degree overflow
    SparsePoly cube(u);
    cube.add_term({u->var(std::size_t{0}, 0), u->var(std::size_t{0}, 1)}, 1.0);
    CHECK_THROWS_AS(
        (void)PseudoDistribution(uniform_cube(3, 2)).pseudo_expectation([&] {
            auto uu = make_coupled_universe(3, Domain::hypercube);
            SparsePoly r(uu);
            r.add_term({uu->var(std::size_t{0}, 0), uu->var(std::size_t{0}, 1),
                        uu->var(std::size_t{0}, 2)},
                       1.0);
            return r;
        }()),
        DegreeOverflowError);
}

TEST_CASE("reweight identity and the uniform example") {
    // r = 1 keeps the distribution (restricted)
    Rng rng(5);
    PseudoDistribution mu = random_mixture(3, 4, 3, rng);
    auto u = mu.basis().universe();
    PseudoDistribution id = reweight(mu, SparsePoly::constant(u, 1.0));
    SparsePoly x1 = SparsePoly::variable(u, u->var(std::size_t{0}, 0));
    CHECK(id.pseudo_expectation(x1) == doctest::Approx(mu.pseudo_expectation(x1)));

    // uniform on {-1,1}, r = (x1+1)^2: pE'[x1] = 2/2 = 1
    PseudoDistribution uni = uniform_cube(1, 4);
    auto uu = uni.basis().universe();
    SparsePoly xp1 = SparsePoly::variable(uu, uu->var(std::size_t{0}, 0)) +
                     SparsePoly::constant(uu, 1.0);
    PseudoDistribution rw = reweight(uni, xp1 * xp1);
    SparsePoly xv = SparsePoly::variable(uu, uu->var(std::size_t{0}, 0));
    CHECK(rw.pseudo_expectation(xv) == doctest::Approx(1.0));

    // degenerate reweight: r = (x1-1)^2 has pE[r (x1+1)... ] fine but
    // r with pE[r] = 0 under a point mass at +1
    Eigen::VectorXd pt = Eigen::VectorXd::Ones(1);
    PseudoDistribution point = rank1_lift(uni.basis(), pt, 4, Domain::hypercube);
    SparsePoly xm1 = xv - SparsePoly::constant(uu, 1.0);
    CHECK_THROWS_AS(reweight(point, xm1 * xm1), DegenerateReweightError);
}

TEST_CASE("reweighted mixtures stay valid") {
    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        PseudoDistribution mu = random_mixture(4, 6, 4, rng);
        auto u = mu.basis().universe();
        SparsePoly s = random_poly(u, 2, rng);
        if (s.empty()) continue;
        SparsePoly r = s * s;
        double er = mu.pseudo_expectation(r);
        if (er <= 1e-9) continue;
        PseudoDistribution nu = reweight(mu, r);
        ValidationReport rep = validate(nu);
        CHECK(rep.min_eigenvalue >= -1e-6);
        CHECK(rep.max_consistency_violation <= 1e-7);
        CHECK(rep.normalization_residual <= 1e-7);
    }
}

TEST_CASE("validate reports residuals") {
    PseudoDistribution mu = uniform_cube(3, 2);
    ValidationReport rep = validate(mu);
    CHECK(rep.pass);
    CHECK(rep.normalization_residual <= 1e-12);
    CHECK(rep.max_consistency_violation <= 1e-12);

    // broken normalization
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
    m(0, 0) = 0.9;
    PseudoDistribution bad(mu.basis(), m, 2, Domain::hypercube);
    ValidationReport rep2 = validate(bad);
    CHECK(rep2.normalization_residual == doctest::Approx(0.1));
    CHECK_FALSE(rep2.pass);

    // rank-1 lift of a true point passes
    Rng rng(1);
    Eigen::VectorXd x(3);
    for (int i = 0; i < 3; ++i) x[i] = static_cast<double>(rng.sign());
    auto u = make_coupled_universe(3, Domain::hypercube);
    MonomialBasis b = build_basis(u, 2, Domain::hypercube);
    CHECK(validate(rank1_lift(b, x, 4, Domain::hypercube)).pass);
}

TEST_CASE("sphere validation checks the norm identities") {
    auto u = make_coupled_universe(2, Domain::sphere);
    MonomialBasis b = build_basis(u, 1, Domain::sphere);
    Eigen::VectorXd x(2);
    x << 0.6, 0.8;
    PseudoDistribution mu = rank1_lift(b, x, 2, Domain::sphere);
    ValidationReport rep = validate(mu);
    CHECK(rep.max_domain_violation <= 1e-12);
    CHECK(rep.pass);

    // violating the identity: pE[x1^2 + x2^2] != 1
    Eigen::MatrixXd m = mu.blocks()[0].m;
    m(1, 1) += 0.5;
    PseudoDistribution bad(b, m, 2, Domain::sphere);
    CHECK(validate(bad).max_domain_violation > 1e-3);
}

TEST_CASE("Cauchy-Schwarz for pseudo-distributions") {
    Rng rng(7);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        PseudoDistribution mu = random_mixture(4, 4, 3, rng);
        auto u = mu.basis().universe();
        SparsePoly f = random_poly(u, 2, rng);
        SparsePoly g = random_poly(u, 2, rng);
        double fg = mu.pseudo_expectation(f * g);
        double f2 = mu.pseudo_expectation(f * f);
        double g2 = mu.pseudo_expectation(g * g);
        CHECK(fg <= std::sqrt(std::max(0.0, f2)) * std::sqrt(std::max(0.0, g2)) + 1e-8);
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("Hoelder for pseudo-distributions") {
    Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        PseudoDistribution mu = random_mixture(3, 8, 3, rng);
        auto u = mu.basis().universe();
        SparsePoly f = random_poly(u, 1, rng);
        for (int t : {2, 3, 4}) {  // pE[f^{2t-2}] <= pE[f^{2t}]^{(t-1)/t}
            if (2 * t > 8) continue;
            double low = mu.pseudo_expectation(pow(f, 2 * t - 2));
            double high = mu.pseudo_expectation(pow(f, 2 * t));
            CHECK(low <= std::pow(std::max(0.0, high), (t - 1.0) / t) + 1e-8);
        }
    }
}

TEST_CASE("blockwise moment inequality, exact h-average") {
    // E_h pE<h,v>^{2k} >= (k/4n)^k pE<x,v>^{2k} for degree-<=1 vector polys
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3 + static_cast<int>(rng.below(3));  // 3..5
        for (int k : {1, 2}) {
            PseudoDistribution mu = random_mixture(n, 4 * k + 2, 4, rng);
            auto u = mu.basis().universe();
            // v_i = a_i + sum_j b_ij x_j, degree <= 1
            std::vector<SparsePoly> v;
            for (int i = 0; i < n; ++i) {
                SparsePoly vi = SparsePoly::constant(u, rng.gaussian());
                for (int j = 0; j < n; ++j) {
                    vi += SparsePoly::variable(u, u->var(std::size_t{0}, j)) * rng.gaussian();
                }
                v.push_back(vi);
            }
            SparsePoly xv(u);
            for (int i = 0; i < n; ++i)
                xv += SparsePoly::variable(u, u->var(std::size_t{0}, i)) * v[i];
            double rhs = mu.pseudo_expectation(pow(xv, 2 * k));

            double lhs = 0.0;
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                SparsePoly hv(u);
                for (int i = 0; i < n; ++i) {
                    double hi = (mask >> i) & 1 ? -1.0 : 1.0;
                    hv += v[i] * hi;
                }
                lhs += mu.pseudo_expectation(pow(hv, 2 * k));
            }
            lhs /= static_cast<double>(1u << n);
            double factor = std::pow(static_cast<double>(k) / (4.0 * n), k);
            CHECK(lhs >= factor * rhs - 1e-8);
        }
    }
}

TEST_CASE("moment matrix text format round-trips") {
    PseudoDistribution mu = uniform_cube(2, 2);
    std::ostringstream os;
    write_moments(os, mu);
    std::istringstream is(os.str());
    PseudoDistribution mu2 = read_moments(is, mu.basis());
    CHECK((mu2.blocks()[0].m - mu.blocks()[0].m).norm() == 0.0);
    CHECK(mu2.degree() == mu.degree());
}
