#include "polymax/roundings.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "polymax/errors.hpp"

namespace polymax {

namespace {

Eigen::MatrixXd psd_floor(Eigen::MatrixXd m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    if (es.eigenvalues().minCoeff() >= 0.0) return m;
    return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() *
           es.eigenvectors().transpose();
}

// Factor G = F F^T (rows are the Gram vectors).
Eigen::MatrixXd gram_factor(const Eigen::MatrixXd& g) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()));
    Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * vals.asDiagonal();
}

}  // namespace

BilinearRounding grothendieck_round(const PseudoDistribution& mu, const Eigen::MatrixXd& m,
                                    int trials, Rng rng) {
    const Universe& u = *mu.basis().universe();
    if (u.groups().size() < 2) throw RoundingError("grothendieck_round needs two groups");
    const std::size_t gy = u.groups().size() == 3 ? 1 : 0;
    const std::size_t gz = u.groups().size() == 3 ? 2 : 1;
    const int ny = u.groups()[gy].count;
    const int nz = u.groups()[gz].count;
    if (m.rows() != ny || m.cols() != nz) throw DimensionError("matrix does not match groups");

    // Joint second-moment matrix of (y, z).
    const int dim = ny + nz;
    Eigen::MatrixXd g(dim, dim);
    auto var_at = [&](int i) {
        return i < ny ? u.var(gy, i) : u.var(gz, i - ny);
    };
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            Monomial mm = multiply({var_at(i)}, {var_at(j)}, u);
            double v = mu.moment(mm);
            g(i, j) = g(j, i) = v;
        }
    }
    g = psd_floor(std::move(g));
    // unit diagonal for the Krivine transform
    Eigen::VectorXd d = g.diagonal().cwiseMax(1e-12).cwiseSqrt();
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) /= d[i] * d[j];
    for (int i = 0; i < dim; ++i) g(i, i) = 1.0;
    g = g.cwiseMin(1.0).cwiseMax(-1.0);

    // Krivine: same-side entries through sinh, cross entries through sin, with
    // c = asinh(1) so the diagonal stays 1. The transformed matrix is a Gram
    // matrix by the series construction.
    const double c = std::log(1.0 + std::sqrt(2.0));
    Eigen::MatrixXd gk(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            bool cross = (i < ny) != (j < ny);
            gk(i, j) = cross ? std::sin(c * g(i, j)) : std::sinh(c * g(i, j));
        }
    }
    Eigen::MatrixXd f = gram_factor(gk);

    BilinearRounding best;
    best.value = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < std::max(1, trials); ++t) {
        Eigen::VectorXd dir(f.cols());
        for (int i = 0; i < dir.size(); ++i) dir[i] = rng.gaussian();
        Eigen::VectorXd s = f * dir;
        Eigen::VectorXd y(ny), z(nz);
        for (int i = 0; i < ny; ++i) y[i] = s[i] >= 0.0 ? 1.0 : -1.0;
        for (int i = 0; i < nz; ++i) z[i] = s[ny + i] >= 0.0 ? 1.0 : -1.0;
        double v = y.dot(m * z);
        if (v > best.value) {
            best.value = v;
            best.y = std::move(y);
            best.z = std::move(z);
        }
    }
    return best;
}

Eigen::VectorXd sphere_eigen_round(const PseudoDistribution& mu, const Eigen::MatrixXd& m) {
    const Universe& u = *mu.basis().universe();
    const int n = u.groups()[0].count;
    if (m.rows() != n || m.cols() != n) throw DimensionError("matrix dimension mismatch");
    Eigen::MatrixXd x(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double v = mu.moment(multiply({u.var(std::size_t{0}, i)},
                                          {u.var(std::size_t{0}, j)}, u));
            x(i, j) = x(j, i) = v;
        }
    }
    if (std::abs(x.trace() - 1.0) > 1e-4)
        throw RoundingError("second-moment matrix is not trace-1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
    double best = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd arg;
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd v = es.eigenvectors().col(i);
        v.normalize();
        double val = v.dot(m * v);
        if (val > best) {
            best = val;
            arg = v;
        }
    }
    return arg;
}

BilinearRounding sphere_bilinear_round(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    BilinearRounding r;
    r.y = svd.matrixU().col(0);
    r.z = svd.matrixV().col(0);
    r.value = r.y.dot(m * r.z);
    if (r.value < 0.0) {
        r.z = -r.z;
        r.value = -r.value;
    }
    return r;
}

CharikarWirthResult charikar_wirth_sample(const PseudoDistribution& mu,
                                          const Eigen::MatrixXd& m, double t, int samples,
                                          Rng rng) {
    for (int i = 0; i < m.rows(); ++i) {
        if (m(i, i) != 0.0) throw RoundingError("charikar_wirth requires a zero diagonal");
    }
    const Universe& u = *mu.basis().universe();
    int n = 0;
    std::vector<VarId> vars;
    for (const auto& g : u.groups()) {
        for (int i = 0; i < g.count; ++i) vars.push_back(g.first + static_cast<VarId>(i));
        n += g.count;
    }
    if (m.rows() != n) throw DimensionError("matrix does not match variable count");

    Eigen::MatrixXd sigma(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double v = mu.moment(multiply({vars[i]}, {vars[j]}, u));
            sigma(i, j) = sigma(j, i) = v;
        }
    }
    Eigen::MatrixXd f = gram_factor(psd_floor(std::move(sigma)));

    CharikarWirthResult res;
    res.samples = samples;
    const double pe = [&] {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (m(i, j) != 0.0)
                    s += m(i, j) * mu.moment(multiply({vars[i]}, {vars[j]}, u));
        return s;
    }();
    res.bound = pe / (t * t) - 8.0 * std::exp(-t * t / 2.0) * m.cwiseAbs().sum();
    res.best_value = -std::numeric_limits<double>::infinity();
    double mean = 0.0;
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd dir(f.cols());
        for (int i = 0; i < dir.size(); ++i) dir[i] = rng.gaussian();
        Eigen::VectorXd g = f * dir;
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) {
            double trunc = std::abs(g[i]) <= t ? g[i] / t : (g[i] > 0 ? 1.0 : -1.0);
            double p = 0.5 * (1.0 + trunc);
            x[i] = rng.uniform() < p ? 1.0 : -1.0;
        }
        double v = x.dot(m * x);
        mean += v;
        if (v > res.best_value) {
            res.best_value = v;
            res.best = std::move(x);
        }
    }
    res.empirical_mean = samples > 0 ? mean / samples : 0.0;
    return res;
}

ScalarFixResult scalar_fix(const PseudoDistribution& mu, const SparsePoly& p, int k,
                           const Tolerances& tol) {
    if (k < 1) throw DimensionError("scalar_fix needs k >= 1");
    const double m2k = mu.pseudo_expectation(pow(p, 2 * k));
    if (!(m2k > 0.0))
        throw InvalidMomentError("pE[p^2k] must be positive in scalar_fix");
    const double m = std::pow(m2k, 1.0 / (2.0 * k));
    const double target = m / 3.0;

    ScalarFixResult best{mu, "none", mu.pseudo_expectation(p), target};
    if (std::abs(best.achieved) >= target) return best;

    auto try_branch = [&](const SparsePoly& r, const char* name) -> bool {
        try {
            PseudoDistribution nu = reweight(mu, r, tol);
            double val = nu.pseudo_expectation(p);
            if (std::abs(val) > std::abs(best.achieved)) {
                best.mu = std::move(nu);
                best.branch = name;
                best.achieved = val;
            }
            return std::abs(val) >= target;
        } catch (const DegenerateReweightError&) {
            return false;
        }
    };

    // paper order: p^2k, then p^(2k-2) (k >= 2), then (p+m)^2 p^(2k-2)
    if (try_branch(pow(p, 2 * k), "p^2k")) return best;
    if (k >= 2 && try_branch(pow(p, 2 * k - 2), "p^2k-2")) return best;
    SparsePoly pm = p + SparsePoly::constant(p.universe(), m);
    SparsePoly r = pm * pm;
    if (k >= 2) r = r * pow(p, 2 * k - 2);
    try_branch(r, "(p+m)^2 p^2k-2");
    // keep the branch maximizing |pE'[p]| even if the guarantee missed
    return best;
}

SparsePoly hq_polynomial(const SymTensor& t, const Eigen::VectorXd& h,
                         const std::shared_ptr<const Universe>& u, std::size_t y_group,
                         std::size_t z_group) {
    SparsePoly p(u);
    for (const auto& [tuple, c] : t.entries()) {
        const double pos = c / 6.0;
        const int i = tuple[0] - 1, j = tuple[1] - 1, k = tuple[2] - 1;
        auto term = [&](int hi, int yj, int zk) {
            p.add_term({u->var(y_group, yj), u->var(z_group, zk)}, pos * h[hi]);
        };
        term(i, j, k);
        term(i, k, j);
        term(j, i, k);
        term(j, k, i);
        term(k, i, j);
        term(k, j, i);
    }
    return p;
}

namespace {

struct CubicContext {
    const SymTensor* t;
    const PseudoDistribution* mu;
    std::shared_ptr<const Universe> universe;
    int n;
    double sos;
    Eigen::MatrixXd g2;      // pE[q_i q_j]
    double eq_norm;          // pE |q|^2 = sum_i g2(i,i)
};

// pE[q_i q_j] for all pairs via moment lookups.
CubicContext make_cubic_context(const SymTensor& t, const PseudoDistribution& mu) {
    CubicContext ctx;
    ctx.t = &t;
    ctx.mu = &mu;
    ctx.universe = mu.basis().universe();
    ctx.n = t.dimension();
    const Universe& u = *ctx.universe;

    // q_i as sparse polynomials over (y, z)
    std::vector<SparsePoly> q(ctx.n, SparsePoly(ctx.universe));
    for (const auto& [tuple, c] : t.entries()) {
        const double pos = c / 6.0;
        const int i = tuple[0] - 1, j = tuple[1] - 1, k = tuple[2] - 1;
        auto add = [&](int qi, int yj, int zk) {
            q[qi].add_term({u.var(std::size_t{1}, yj), u.var(std::size_t{2}, zk)}, pos);
        };
        add(i, j, k);
        add(i, k, j);
        add(j, i, k);
        add(j, k, i);
        add(k, i, j);
        add(k, j, i);
    }

    ctx.g2.resize(ctx.n, ctx.n);
    for (int i = 0; i < ctx.n; ++i) {
        for (int j = i; j < ctx.n; ++j) {
            double v = mu.pseudo_expectation(q[i] * q[j]);
            ctx.g2(i, j) = ctx.g2(j, i) = v;
        }
    }
    ctx.eq_norm = ctx.g2.trace();

    // SOS = sum_i pE[x_i q_i]
    double sos = 0.0;
    for (int i = 0; i < ctx.n; ++i) {
        SparsePoly xi = SparsePoly::variable(ctx.universe, u.var(std::size_t{0}, i));
        sos += mu.pseudo_expectation(xi * q[i]);
    }
    ctx.sos = sos;
    return ctx;
}

Eigen::MatrixXd contracted_matrix(const SymTensor& t, const Eigen::VectorXd& h) {
    const int n = t.dimension();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [tuple, c] : t.entries()) {
        const double pos = c / 6.0;
        const int i = tuple[0] - 1, j = tuple[1] - 1, k = tuple[2] - 1;
        auto add = [&](int hi, int yj, int zk) { a(yj, zk) += pos * h[hi]; };
        add(i, j, k);
        add(i, k, j);
        add(j, i, k);
        add(j, k, i);
        add(k, i, j);
        add(k, j, i);
    }
    return a;
}

RoundingOutcome round_cubic_impl(const SymTensor& t, const PseudoDistribution& mu, int k,
                                 int trials, Rng rng, bool sphere) {
    RoundingOutcome out;
    CubicContext ctx = make_cubic_context(t, mu);
    out.sos = ctx.sos;
    if (!(ctx.sos > 0.0)) {
        out.failure = "SOS = pE[f~] must be positive before rounding";
        return out;
    }
    const Constants& cc = default_constants();
    if (trials <= 0) {
        trials = cc.trials_per_n * ctx.n;
        for (int i = 1; i < k; ++i) trials *= 4;
    }
    out.trials = trials;
    const double pz_threshold = ctx.sos * ctx.sos / (2.0 * ctx.n);

    out.value = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < trials; ++trial) {
        Rng trng = rng.child(static_cast<std::uint64_t>(trial));
        Eigen::VectorXd h(ctx.n);
        if (sphere) {
            for (int i = 0; i < ctx.n; ++i) h[i] = trng.gaussian();
        } else {
            for (int i = 0; i < ctx.n; ++i) h[i] = static_cast<double>(trng.sign());
        }
        const double pe_qh2 = h.dot(ctx.g2 * h);
        if (k == 1 && pe_qh2 >= pz_threshold) ++out.paley_zygmund_hits;
        if (!(pe_qh2 > 0.0)) continue;

        SparsePoly p = hq_polynomial(t, h, ctx.universe, 1, 2);
        ScalarFixResult fix = [&]() -> ScalarFixResult {
            try {
                return scalar_fix(mu, p, k);
            } catch (const InvalidMomentError&) {
                ++out.degenerate_reweights;
                return ScalarFixResult{mu, "degenerate", 0.0, 0.0};
            }
        }();
        if (fix.branch == "degenerate") continue;

        Eigen::MatrixXd a = contracted_matrix(t, h);
        Eigen::VectorXd ybar, zbar;
        if (sphere) {
            BilinearRounding br = sphere_bilinear_round(a);
            ybar = br.y;
            zbar = br.z;
        } else {
            BilinearRounding br =
                grothendieck_round(fix.mu, a, 16, trng.child("grothendieck"));
            ybar = br.y;
            zbar = br.z;
        }

        // both h and -h are evaluated; the better sign wins
        Eigen::VectorXd xbar = sphere ? Eigen::VectorXd(h / h.norm()) : h;
        double v = eval_decoupled(t, xbar, ybar, zbar);
        if (-v > v) {
            xbar = -xbar;
            v = -v;
        }
        if (v > out.value) {
            out.value = v;
            out.assignment = {xbar, ybar, zbar};
            out.direction = h;
            out.best_trial = trial;
            out.branch = fix.branch;
        }
    }
    out.ok = out.best_trial >= 0;
    if (!out.ok) out.failure = "all trials degenerated";
    return out;
}

}  // namespace

RoundingOutcome round_cubic_deg6(const SymTensor& t, const PseudoDistribution& mu, int trials,
                                 Rng rng) {
    return round_cubic_impl(t, mu, 1, trials, rng, false);
}

RoundingOutcome round_cubic_deg6k(const SymTensor& t, const PseudoDistribution& mu, int k,
                                  int trials, Rng rng) {
    if (mu.degree() < 6 * k)
        throw DegreeOverflowError("round_cubic_deg6k needs a degree-6k pseudo-distribution");
    return round_cubic_impl(t, mu, k, trials, rng, false);
}

RoundingOutcome round_cubic_sphere(const SymTensor& t, const PseudoDistribution& mu, int k,
                                   int trials, Rng rng) {
    return round_cubic_impl(t, mu, k, trials, rng, true);
}

RoundingOutcome round_high_degree(const SymTensor& t, const PseudoDistribution& mu, int trials,
                                  Rng rng) {
    const int d = t.order();
    if (d < 3) throw DimensionError("round_high_degree needs order >= 3");
    if (d == 3) return round_cubic_deg6(t, mu, trials, rng);

    RoundingOutcome out;
    const auto universe = mu.basis().universe();
    const Universe& u = *universe;
    const int n = t.dimension();

    double dfact = 1.0;
    for (int i = 2; i <= d; ++i) dfact *= i;

    // SOS = pE[f~]
    {
        SparsePoly obj(universe);
        std::vector<int> perm(d);
        for (const auto& [tuple, c] : t.entries()) {
            for (int i = 0; i < d; ++i) perm[i] = i;
            do {
                Monomial mn;
                for (int pos = 0; pos < d; ++pos)
                    mn.push_back(u.var(static_cast<std::size_t>(pos), tuple[perm[pos]] - 1));
                obj.add_term(std::move(mn), c / dfact);
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
        out.sos = mu.pseudo_expectation(obj);
    }
    if (!(out.sos > 0.0)) {
        out.failure = "SOS = pE[f~] must be positive before rounding";
        return out;
    }
    if (trials <= 0) trials = default_constants().trials_per_n * n * (1 << (d - 3));
    out.trials = trials;

    out.value = -std::numeric_limits<double>::infinity();
    std::vector<int> perm(d);
    for (int trial = 0; trial < trials; ++trial) {
        Rng trng = rng.child(static_cast<std::uint64_t>(trial));
        std::vector<Eigen::VectorXd> hs(d);  // modes 3..d hold sign vectors
        for (int mode = 2; mode < d; ++mode) {
            hs[mode] = Eigen::VectorXd(n);
            for (int i = 0; i < n; ++i) hs[mode][i] = static_cast<double>(trng.sign());
        }

        // A(H)_{ab} = sum over positions with mode1 -> a, mode2 -> b
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        for (const auto& [tuple, c] : t.entries()) {
            for (int i = 0; i < d; ++i) perm[i] = i;
            do {
                double w = c / dfact;
                for (int mode = 2; mode < d; ++mode) w *= hs[mode][tuple[perm[mode]] - 1];
                a(tuple[perm[0]] - 1, tuple[perm[1]] - 1) += w;
            } while (std::next_permutation(perm.begin(), perm.end()));
        }

        SparsePoly p(universe);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (a(i, j) == 0.0) continue;
                p.add_term({u.var(std::size_t{0}, i), u.var(std::size_t{1}, j)}, a(i, j));
            }
        }
        if (p.empty()) continue;

        ScalarFixResult fix = [&]() -> ScalarFixResult {
            try {
                return scalar_fix(mu, p, 1);
            } catch (const InvalidMomentError&) {
                ++out.degenerate_reweights;
                return ScalarFixResult{mu, "degenerate", 0.0, 0.0};
            }
        }();
        if (fix.branch == "degenerate") continue;

        BilinearRounding br = grothendieck_round(fix.mu, a, 16, trng.child("grothendieck"));
        std::vector<Eigen::VectorXd> assign(d);
        assign[0] = br.y;
        assign[1] = br.z;
        for (int mode = 2; mode < d; ++mode) assign[mode] = hs[mode];
        double v = eval_decoupled(t, assign);
        if (-v > v) {
            assign[2] = -assign[2];  // flip h^(3)
            v = -v;
        }
        if (v > out.value) {
            out.value = v;
            out.assignment = assign;
            out.best_trial = trial;
            out.branch = fix.branch;
        }
    }
    out.ok = out.best_trial >= 0;
    if (!out.ok) out.failure = "all trials degenerated";
    return out;
}

}  // namespace polymax
