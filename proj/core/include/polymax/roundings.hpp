#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "polymax/config.hpp"
#include "polymax/pseudo.hpp"
#include "polymax/rng.hpp"
#include "polymax/tensor.hpp"

namespace polymax {

struct RoundingOutcome {
    std::vector<Eigen::VectorXd> assignment;  // one vector per tensor mode
    double value = 0.0;                       // recomputed by eval_decoupled
    double sos = 0.0;
    int trials = 0;
    Eigen::VectorXd direction;      // the h that produced the best trial
    int best_trial = -1;
    int paley_zygmund_hits = 0;     // trials with pE<q,h>^2 >= SOS^2/(2n)
    int degenerate_reweights = 0;
    std::string branch;             // scalar-fix branch of the best trial
    bool ok = false;
    std::string failure;
};

struct BilinearRounding {
    Eigen::VectorXd y;
    Eigen::VectorXd z;
    double value = 0.0;
};

// Krivine-scheme rounding of a degree-2 pseudo-distribution over two
// hypercube groups: ybar^T M zbar >= pE[y^T M z] / K_G in expectation,
// sharpened by best-of-trials.
BilinearRounding grothendieck_round(const PseudoDistribution& mu, const Eigen::MatrixXd& m,
                                    int trials, Rng rng);

// Deterministic lossless rounding of x^T M x over the sphere via the
// eigenvectors of X = pE[x x^T] (trace 1).
Eigen::VectorXd sphere_eigen_round(const PseudoDistribution& mu, const Eigen::MatrixXd& m);

// Lossless bilinear analog: the top singular pair of M dominates
// pE[y^T M z] for any sphere-valid degree-2 pseudo-distribution.
BilinearRounding sphere_bilinear_round(const Eigen::MatrixXd& m);

struct CharikarWirthResult {
    Eigen::VectorXd best;        // sign vector with the largest quadratic value
    double best_value = 0.0;
    double empirical_mean = 0.0; // mean of x^T M x over the samples
    double bound = 0.0;          // pE/T^2 - 8 exp(-T^2/2) sum|M_ij|
    int samples = 0;
};

// Truncated-Gaussian sign rounding for zero-diagonal quadratic forms.
CharikarWirthResult charikar_wirth_sample(const PseudoDistribution& mu,
                                          const Eigen::MatrixXd& m, double t, int samples,
                                          Rng rng);

struct ScalarFixResult {
    PseudoDistribution mu;       // the reweighted pseudo-distribution
    std::string branch;          // "none", "p^2k", "p^2k-2", "(p+m)^2 p^2k-2"
    double achieved;             // pE_mu'[p]
    double target;               // (pE[p^2k])^(1/2k) / 3
};

// Reweighting that forces |pE'[p]| >= (1/3) (pE[p^2k])^(1/2k). Cases are tried
// in order; if the numerically best branch differs it is kept and recorded.
ScalarFixResult scalar_fix(const PseudoDistribution& mu, const SparsePoly& p, int k,
                           const Tolerances& tol = default_tolerances());

// Builds <q,h> = sum_i h_i y^T T_i z as a polynomial over mu's universe
// (groups y and z at the given indices).
SparsePoly hq_polynomial(const SymTensor& t, const Eigen::VectorXd& h,
                         const std::shared_ptr<const Universe>& u, std::size_t y_group,
                         std::size_t z_group);

struct CubicRoundParams {
    int trials = 0;              // 0 -> 64 n (x 4^k for k > 1)
    int k = 1;
    int grothendieck_trials = 16;
    Constants constants = default_constants();
};

// Reweighting-based rounding of the decoupled degree-6k relaxation over the
// hypercube: sample h, scalar-fix <q,h>, Grothendieck-round sum_i h_i T_i,
// flip the sign of h as needed.
RoundingOutcome round_cubic_deg6(const SymTensor& t, const PseudoDistribution& mu, int trials,
                                 Rng rng);
RoundingOutcome round_cubic_deg6k(const SymTensor& t, const PseudoDistribution& mu, int k,
                                  int trials, Rng rng);

// Sphere variant: Gaussian h, scalar-fix, lossless bilinear rounding,
// xbar = h / |h|.
RoundingOutcome round_cubic_sphere(const SymTensor& t, const PseudoDistribution& mu, int k,
                                   int trials, Rng rng);

// Order-d >= 3 decoupled hypercube rounding: sample h^(3..d), scalar-fix
// <Q,H>, Grothendieck-round the contracted bilinear form.
RoundingOutcome round_high_degree(const SymTensor& t, const PseudoDistribution& mu, int trials,
                                  Rng rng);

}  // namespace polymax
