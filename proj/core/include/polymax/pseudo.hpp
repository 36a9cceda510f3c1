#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "polymax/basis.hpp"
#include "polymax/config.hpp"

namespace polymax {

struct ValidationReport {
    double normalization_residual = 0.0;
    double max_consistency_violation = 0.0;
    double min_eigenvalue = 0.0;
    std::vector<double> block_min_eigenvalues;
    double max_domain_violation = 0.0;
    bool pass = false;
    std::string summary() const;
};

// Pseudo-distribution realized as one or more PSD moment blocks over a shared
// monomial basis. Values are immutable after construction; queries are pure.
class PseudoDistribution {
public:
    struct Block {
        std::vector<int> indices;  // into basis
        Eigen::MatrixXd m;
    };

    PseudoDistribution(MonomialBasis basis, Eigen::MatrixXd moment_matrix, int degree,
                       Domain domain);
    PseudoDistribution(MonomialBasis basis, std::vector<Block> blocks, int degree,
                       Domain domain);

    const MonomialBasis& basis() const { return basis_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    int degree() const { return degree_; }
    Domain domain() const { return domain_; }

    // pE of a single (reduced) monomial; throws BasisCoverageError when the
    // monomial cannot be factored inside one block.
    double moment(const Monomial& m) const;
    bool has_moment(const Monomial& m) const;

    double operator()(const SparsePoly& p) const { return pseudo_expectation(p); }
    double pseudo_expectation(const SparsePoly& p) const;

    // Negates every odd-degree moment (the pseudo-distribution of -x).
    PseudoDistribution negated() const;

private:
    void build_product_map();

    MonomialBasis basis_;
    std::vector<Block> blocks_;
    int degree_;
    Domain domain_;

    struct EntryRef {
        int block;
        int i;
        int j;
    };
    std::unordered_map<Monomial, EntryRef, MonomialHash> product_map_;

    friend ValidationReport validate(const PseudoDistribution&, const Tolerances&);
};

double pseudo_expectation(const PseudoDistribution& mu, const SparsePoly& p);

// Reweighting by an explicit sum-of-squares polynomial r of degree 2s:
// pE'[p] = pE[p r] / pE[r] on the degree-(l-2s) sub-basis. Throws
// DegenerateReweightError when pE[r] <= reweight_min.
PseudoDistribution reweight(const PseudoDistribution& mu, const SparsePoly& r,
                            const Tolerances& tol = default_tolerances());

ValidationReport validate(const PseudoDistribution& mu,
                          const Tolerances& tol = default_tolerances());

// Rank-1 lift of a concrete point (indexed by VarId): always a valid
// pseudo-distribution when the point satisfies the domain constraints.
PseudoDistribution rank1_lift(const MonomialBasis& basis, const Eigen::VectorXd& point,
                              int degree, Domain domain);

// Moment-matrix text format: header "basis-size degree domain", then dense
// row-major values of the first block. Round-trips bit-exactly.
void write_moments(std::ostream& os, const PseudoDistribution& mu);
PseudoDistribution read_moments(std::istream& is, MonomialBasis basis);

}  // namespace polymax
