#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polymax/assemble.hpp"
#include "polymax/hitting.hpp"
#include "polymax/roundings.hpp"

namespace polymax {

struct Certificate {
    double upper_bound = 0.0;
    double alpha_star = 0.0;      // largest feasible guess
    double alpha_infeasible = 0.0;
    int n = 0;
    int k = 0;
    Domain domain = Domain::hypercube;
    std::string relaxation;       // degree / basis sizes / hitting-set parameters
    double solver_primal_residual = 0.0;
    double solver_psd_residual = 0.0;
    double rounding_lower_bound = 0.0;
    double soundness_ratio = 0.0;  // upper / max(lower, tiny)
    bool approximate = false;      // residuals above thresholds
    int solves = 0;

    void write(std::ostream& os) const;  // key: value lines
};

// How much moment structure the per-point blocks carry. `rounding` supports
// the reweight + scalar-fix chain; `certificate` is enough for the upper
// bound and is much smaller.
enum class CompressedGrade { rounding, certificate };

struct CompressedSdp {
    SDPProblem problem;
    MonomialBasis basis;                 // union basis: (y,z) monomials + M_c m
    std::shared_ptr<const Universe> universe;
    std::vector<Eigen::VectorXd> class_reps;  // sign-deduplicated support points
    std::vector<double> class_probs;
    std::vector<std::vector<int>> block_indices;  // per block: indices into basis
    std::vector<std::vector<int>> block_entry_vars;
    int degree = 12;
    Domain domain = Domain::hypercube;
    double alpha = 0.0;
};

// Feasibility program with auxiliary M_x variables, the aggregated constraint
// E_D[M_x^2 (<x,q>^2 - alpha^2)] >= 0 and the normalization E_D[M_x^2] = 1
// (without it, M = 0 satisfies the aggregate vacuously). Support points are
// deduplicated by sign; +-x carry identical constraints.
CompressedSdp assemble_compressed(const SymTensor& t, int k, double alpha,
                                  const HittingSet& d, Domain domain,
                                  CompressedGrade grade = CompressedGrade::rounding,
                                  bool per_point_inequalities = false);

PseudoDistribution extract_compressed(const CompressedSdp& sdp, const SolveResult& res);

// Scan for the support point achieving pE[M^2 <x,q>^2] >= alpha^2 pE[M^2],
// reweight by M^2, scalar-fix, then Grothendieck (cube) or lossless (sphere).
RoundingOutcome round_compressed(const SymTensor& t, const PseudoDistribution& mu,
                                 const CompressedSdp& sdp, double alpha, Rng rng);

struct CertifyParams {
    double alpha_hi = -1.0;   // < 0 -> |T|_1
    int iters = 40;
    double bracket_rel = 1e-3;  // stop when the bracket is below this x |T|_1
    CompressedGrade grade = CompressedGrade::rounding;
    SolveParams solve;
    bool do_rounding = true;
    CertifyParams() { solve.max_iter = 4000; }
};

Certificate certify_binary_search(const SymTensor& t, int k, Domain domain,
                                  const CertifyParams& params, Rng rng);

// Appendix-style sqrt(n) certificate: r = max over the pairwise-independent
// set of the bilinear SDP value at fixed xhat; upper bound r sqrt(n).
Certificate simple_sqrtn_certificate(const SymTensor& t, Rng rng, int round_trials = 64);

}  // namespace polymax
