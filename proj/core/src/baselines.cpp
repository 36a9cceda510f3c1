#include "polymax/baselines.hpp"

#include <cmath>

#include "polymax/assemble.hpp"
#include "polymax/errors.hpp"

namespace polymax {

namespace {

Eigen::VectorXd mask_to_signs(unsigned mask, int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = (mask >> i) & 1 ? -1.0 : 1.0;
    return v;
}

}  // namespace

OracleResult brute_force_cubic_hypercube(const SymTensor& t, int n_cap) {
    if (t.order() != 3) throw DimensionError("brute_force_cubic_hypercube needs order 3");
    const int n = t.dimension();
    if (n > n_cap) throw SizeCapError("dimension exceeds the brute-force cap", n);

    const auto slices = all_slices(t);
    OracleResult best;
    best.method = "brute-force";
    best.value = -std::numeric_limits<double>::infinity();
    best.enumeration_size = std::size_t{1} << (2 * n);

    Eigen::VectorXd y(n), z(n), u(n);
    for (unsigned ymask = 0; ymask < (1u << n); ++ymask) {
        y = mask_to_signs(ymask, n);
        // u_i = y^T T_i z, updated by Gray-code flips of z
        z.setOnes();
        for (int i = 0; i < n; ++i) u[i] = y.dot(slices[i] * z);
        unsigned zmask = 0;
        while (true) {
            double v = u.cwiseAbs().sum();
            if (v > best.value) {
                best.value = v;
                Eigen::VectorXd x(n);
                for (int i = 0; i < n; ++i) x[i] = u[i] >= 0.0 ? 1.0 : -1.0;
                best.argmax = {x, y, z};
            }
            if (zmask + 1 == (1u << n)) break;
            // Gray code: flip the lowest zero-run bit of the counter
            unsigned next = zmask + 1;
            int flip = __builtin_ctz(next);
            zmask = next;
            double delta = -2.0 * z[flip];
            z[flip] = -z[flip];
            for (int i = 0; i < n; ++i) u[i] += delta * slices[i].col(flip).dot(y);
        }
    }
    return best;
}

OracleResult brute_force_bilinear(const Eigen::MatrixXd& m, int n_cap) {
    const int rows = static_cast<int>(m.rows());
    const int cols = static_cast<int>(m.cols());
    if (std::max(rows, cols) > n_cap)
        throw SizeCapError("dimension exceeds the brute-force cap",
                           static_cast<std::size_t>(std::max(rows, cols)));
    OracleResult best;
    best.method = "brute-force-bilinear";
    best.value = -std::numeric_limits<double>::infinity();
    best.enumeration_size = std::size_t{1} << cols;
    for (unsigned zmask = 0; zmask < (1u << cols); ++zmask) {
        Eigen::VectorXd z = mask_to_signs(zmask, cols);
        Eigen::VectorXd mz = m * z;
        double v = mz.cwiseAbs().sum();
        if (v > best.value) {
            best.value = v;
            Eigen::VectorXd y(rows);
            for (int i = 0; i < rows; ++i) y[i] = mz[i] >= 0.0 ? 1.0 : -1.0;
            best.argmax = {y, z};
        }
    }
    return best;
}

RoundingOutcome khot_naor_baseline(const SymTensor& t, int trials, Rng rng) {
    if (t.order() != 3) throw DimensionError("khot_naor_baseline needs order 3");
    const int n = t.dimension();
    RoundingOutcome out;
    out.trials = trials;
    out.value = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < trials; ++trial) {
        Rng trng = rng.child(static_cast<std::uint64_t>(trial));
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) x[i] = static_cast<double>(trng.sign());
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) a += x[i] * slice_matrix(t, i + 1);

        SosRelaxation rel = assemble_bilinear_sdp(a, Domain::hypercube);
        SolveParams params;
        params.max_iter = 4000;
        SolveResult res = solve(rel.problem, params);
        if (!res.usable() && res.status != SolveStatus::iteration_limit) continue;
        PseudoDistribution mu = extract_pseudodistribution(rel, res);
        BilinearRounding br = grothendieck_round(mu, a, 16, trng.child("round"));
        double v = eval_decoupled(t, x, br.y, br.z);
        if (-v > v) {
            x = -x;
            v = -v;
        }
        if (v > out.value) {
            out.value = v;
            out.assignment = {x, br.y, br.z};
            out.best_trial = trial;
            out.direction = x;
        }
    }
    out.ok = out.best_trial >= 0;
    return out;
}

OracleResult als_sphere_lower_bound(const SymTensor& t, int restarts, Rng rng) {
    if (t.order() != 3) throw DimensionError("als_sphere_lower_bound needs order 3");
    const int n = t.dimension();
    OracleResult best;
    best.method = "als";
    best.value = -std::numeric_limits<double>::infinity();

    for (int restart = 0; restart < restarts; ++restart) {
        Rng rrng = rng.child(static_cast<std::uint64_t>(restart));
        Eigen::VectorXd x(n), y(n), z(n);
        for (int i = 0; i < n; ++i) {
            x[i] = rrng.gaussian();
            y[i] = rrng.gaussian();
            z[i] = rrng.gaussian();
        }
        x.normalize();
        y.normalize();
        z.normalize();
        double prev = eval_decoupled(t, x, y, z);
        for (int sweep = 0; sweep < 500; ++sweep) {
            // full symmetry of the per-position tensor: one contraction serves
            // every mode
            Eigen::VectorXd cx = slice_values(t, y, z);
            if (cx.norm() > 1e-300) x = cx.normalized();
            Eigen::VectorXd cy = slice_values(t, x, z);
            if (cy.norm() > 1e-300) y = cy.normalized();
            Eigen::VectorXd cz = slice_values(t, x, y);
            if (cz.norm() > 1e-300) z = cz.normalized();
            double v = eval_decoupled(t, x, y, z);
            if (v + 1e-12 < prev)
                throw Error("ALS sweep decreased the objective");
            if (v - prev < 1e-10) {
                prev = v;
                break;
            }
            prev = v;
        }
        if (prev > best.value) {
            best.value = prev;
            best.argmax = {x, y, z};
        }
    }
    return best;
}

AntiConcentrationEstimate anticoncentration_estimate(const SparsePoly& p, SampleLaw law,
                                                     int samples, Rng rng) {
    AntiConcentrationEstimate est;
    est.samples = samples;
    // multilinear: the mean is the constant coefficient under both laws
    est.mean = p.coefficient(Monomial{});
    const int nv = p.universe() ? p.universe()->num_vars() : 0;
    Eigen::VectorXd point(nv);
    long long above = 0;
    double sum = 0.0, sumsq = 0.0;
    for (int s = 0; s < samples; ++s) {
        for (int i = 0; i < nv; ++i) {
            point[i] = law == SampleLaw::cube ? static_cast<double>(rng.sign())
                                              : rng.gaussian();
        }
        double v = p.eval(point);
        sum += v;
        sumsq += v * v;
        if (v > est.mean) ++above;
    }
    double mean_hat = sum / samples;
    est.variance = sumsq / samples - mean_hat * mean_hat;
    est.degenerate = est.variance < 1e-12;
    est.frequency = static_cast<double>(above) / samples;
    return est;
}

}  // namespace polymax
