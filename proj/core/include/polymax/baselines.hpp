#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "polymax/monomial.hpp"
#include "polymax/roundings.hpp"
#include "polymax/rng.hpp"
#include "polymax/tensor.hpp"

namespace polymax {

struct OracleResult {
    double value = 0.0;
    std::vector<Eigen::VectorXd> argmax;  // witness assignment(s)
    std::size_t enumeration_size = 0;
    std::string method;
};

// Exact decoupled optimum over the hypercube. Uses the sign-optimality
// identity x*_i = sgn(<T_i, y* (x) z*>) to cut 2^{3n} to 2^{2n}.
OracleResult brute_force_cubic_hypercube(const SymTensor& t, int n_cap = 12);

// Exact max of y^T M z over sign vectors (y = sign(M z) per z).
OracleResult brute_force_bilinear(const Eigen::MatrixXd& m, int n_cap = 12);

// Random xbar + Grothendieck rounding of the contracted bilinear form,
// best of `trials`.
RoundingOutcome khot_naor_baseline(const SymTensor& t, int trials, Rng rng);

// Alternating maximization over the three sphere factors; a certified lower
// bound on the sphere optimum. Monotone per sweep.
OracleResult als_sphere_lower_bound(const SymTensor& t, int restarts, Rng rng);

enum class SampleLaw { cube, gaussian };

struct AntiConcentrationEstimate {
    double frequency = 0.0;   // empirical Pr[p(x) > E p]
    double mean = 0.0;        // E p (exact for multilinear p)
    double variance = 0.0;    // sample variance
    bool degenerate = false;  // variance guard tripped (constant p)
    int samples = 0;
};

// Empirical Pr[p > E p] for a multilinear polynomial under the cube or
// standard Gaussian law.
AntiConcentrationEstimate anticoncentration_estimate(const SparsePoly& p, SampleLaw law,
                                                     int samples, Rng rng);

}  // namespace polymax
