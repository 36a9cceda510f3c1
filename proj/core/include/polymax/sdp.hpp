#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <string>
#include <vector>

namespace polymax {

struct LinTerm {
    int var;
    double coeff;
};

// Affine expression over the solver's scalar variables.
struct LinExpr {
    std::vector<LinTerm> terms;
    double constant = 0.0;
};

// PSD block whose entries are affine in the variables. Entries are stored for
// the upper triangle only (row-major, i <= j); the matrix is symmetric by
// construction. Tying two block entries to one variable is how moment-matrix
// consistency is enforced structurally instead of via equality constraints.
struct SDPBlock {
    int dim = 0;
    std::vector<LinExpr> entries;  // size dim*(dim+1)/2

    static int ut_index(int i, int j, int dim) {  // i <= j
        return i * dim - i * (i - 1) / 2 + (j - i);
    }
    LinExpr& at(int i, int j) { return entries[ut_index(i, j, dim)]; }
    const LinExpr& at(int i, int j) const { return entries[ut_index(i, j, dim)]; }
};

struct LinearConstraint {
    std::vector<LinTerm> terms;
    double rhs = 0.0;
};

enum class SolveMode { maximize, feasibility };

struct SDPProblem {
    int num_vars = 0;
    std::vector<SDPBlock> blocks;
    std::vector<LinearConstraint> equalities;    // a.v = rhs
    std::vector<LinearConstraint> inequalities;  // a.v >= rhs
    std::vector<LinTerm> objective;
    double objective_constant = 0.0;
    SolveMode mode = SolveMode::maximize;

    int new_var() { return num_vars++; }
    SDPBlock& add_block(int dim);
    std::size_t total_psd_dim() const;
};

enum class SolveStatus { optimal, feasible, infeasible_certificate, iteration_limit };

std::string to_string(SolveStatus s);

struct SolveParams {
    int max_iter = 50000;
    double eps_primal = 1e-6;
    double eps_gap = 1e-6;
    double over_relaxation = 1.6;  // alpha in (1, 2)
    double rho = 1.0;
    bool adaptive_rho = true;
    double infeasibility_band = 10.0;  // declare infeasible only past band x tolerance
    int check_every = 1;
    std::optional<std::vector<Eigen::MatrixXd>> initial_blocks;  // warm start
};

struct SolveResult {
    std::vector<Eigen::MatrixXd> block_matrices;  // recomputed from variables
    Eigen::VectorXd variables;
    double objective = 0.0;
    double primal_residual = 0.0;  // equality + inequality violation, inf-norm
    double psd_residual = 0.0;     // most negative eigenvalue over blocks (<= 0)
    double gap_estimate = 0.0;
    int iterations = 0;
    SolveStatus status = SolveStatus::iteration_limit;

    bool usable() const {
        return status == SolveStatus::optimal || status == SolveStatus::feasible;
    }
};

SolveResult solve(const SDPProblem& problem, const SolveParams& params = {});

// Band rule for binary searches: a solve counts as infeasible only when the
// residual exceeds band x tolerance after the iteration budget; anything in
// between is resolved conservatively toward feasibility.
bool counts_as_feasible(const SolveResult& r, const SolveParams& params);

}  // namespace polymax
