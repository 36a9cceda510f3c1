#pragma once

#include <iosfwd>
#include <memory>
#include <unordered_map>
#include <vector>

#include "polymax/basis.hpp"
#include "polymax/pseudo.hpp"
#include "polymax/sdp.hpp"
#include "polymax/tensor.hpp"

namespace polymax {

// Shared moment-variable table plus block builders. Consistency is structural:
// every occurrence of a product monomial maps to one solver variable, so no
// consistency equality constraints reach the solver.
class MomentAssembler {
public:
    MomentAssembler(std::shared_ptr<const Universe> universe, Domain domain);

    const std::shared_ptr<const Universe>& universe() const { return universe_; }
    int var_of(const Monomial& reduced);       // get-or-add
    int find_var(const Monomial& reduced) const;  // -1 when absent
    const std::vector<Monomial>& var_monomials() const { return var_monomials_; }

    // Moment block M[u,v] = var(u*v); returns the block index.
    int add_moment_block(const std::vector<Monomial>& monomials);
    // Localizing block L[u,v] = pE[g u v] for an axiom g >= 0.
    int add_localizing_block(const SparsePoly& g, const std::vector<Monomial>& monomials);

    void add_normalization();               // var(1) = 1
    void add_equality(const SparsePoly& g); // pE[g] = 0
    void add_inequality(const SparsePoly& g);  // pE[g] >= 0
    // Rows sum_i var(g_i^2 m) = var(m) for every sphere group and every
    // expressible monomial m of degree <= max_degree.
    void add_sphere_identities(int max_degree);

    void set_objective_maximize(const SparsePoly& f);
    void set_feasibility();

    SDPProblem& problem() { return problem_; }
    const SDPProblem& problem() const { return problem_; }

    // Entry -> variable ids of a moment block (for extraction repair).
    const std::vector<std::vector<int>>& moment_block_vars() const { return block_vars_; }
    const std::vector<int>& moment_block_ids() const { return moment_blocks_; }

private:
    std::shared_ptr<const Universe> universe_;
    Domain domain_;
    SDPProblem problem_;
    std::vector<Monomial> var_monomials_;
    std::unordered_map<Monomial, int, MonomialHash> var_ids_;
    std::vector<int> moment_blocks_;             // block indices that are moment blocks
    std::vector<std::vector<int>> block_vars_;   // per moment block: entry var ids
};

struct Axiom {
    SparsePoly poly;       // constraint poly >= 0 (or = 0)
    bool equality = false;
    BasisFilter localizing_filter;  // restricts the localizing basis; empty = all
};

// A fully assembled SoS relaxation of max f (or max f~) over the domain.
struct SosRelaxation {
    SDPProblem problem;
    MonomialBasis basis;   // main moment basis
    int main_block = 0;
    std::vector<int> main_entry_vars;  // upper-triangle entry -> var id
    int degree = 0;
    Domain domain = Domain::hypercube;
    double tensor_norm1 = 0.0;
    double sos_value = 0.0;  // filled by callers after solving
};

// Canonical (or pattern-restricted) degree-l moment relaxation for a
// multilinear tensor objective. decoupled=true optimizes the decoupled form
// f~ over one variable group per tensor mode.
SosRelaxation assemble_sos_sdp(const SymTensor& t, int degree, Domain domain, bool decoupled,
                               const std::vector<Axiom>& axioms = {},
                               const BasisFilter& filter = {},
                               std::size_t basis_cap = default_constants().basis_cap);

// Degree-2 relaxation of max y^T M z over the domain (the Grothendieck SDP).
SosRelaxation assemble_bilinear_sdp(const Eigen::MatrixXd& m, Domain domain);

// Degree-2 relaxation of max x^T M x (zero-diagonal allowed) over the domain.
SosRelaxation assemble_quadratic_sdp(const Eigen::MatrixXd& m, Domain domain,
                                     const std::vector<Axiom>& axioms = {},
                                     SolveMode mode = SolveMode::maximize);

// Eigenvalue-floor projection plus re-tying of entries that share a product
// monomial; renormalizes pE[1] = 1. Throws ExtractionError when the repair
// moves the objective by more than extraction_obj_rel x |T|_1.
PseudoDistribution extract_pseudodistribution(const SosRelaxation& rel, const SolveResult& res,
                                              const Tolerances& tol = default_tolerances());

// Repair helper shared with the compressed extractor.
Eigen::MatrixXd floor_and_retie(Eigen::MatrixXd m, const std::vector<int>& entry_vars,
                                int rounds = 3);

void write_sdp(std::ostream& os, const SDPProblem& p);

}  // namespace polymax
