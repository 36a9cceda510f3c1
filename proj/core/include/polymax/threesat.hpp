#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polymax/config.hpp"
#include "polymax/monomial.hpp"
#include "polymax/pseudo.hpp"
#include "polymax/rng.hpp"
#include "polymax/tensor.hpp"

namespace polymax {

struct Clause {
    std::array<int, 3> vars;   // 1-based, strictly increasing after parsing
    std::array<int, 3> signs;  // +1 = positive literal (x), -1 = negated (~x)
};

struct CnfFormula {
    int n = 0;
    std::vector<Clause> clauses;
};

// DIMACS CNF, exactly three distinct variables per clause; a variable triple
// may appear in at most one clause. Convention: -1 is True, +1 is False, and
// literal sigma in the polynomial encoding is +1 for a positive literal.
CnfFormula parse_dimacs(std::istream& is);
CnfFormula parse_dimacs(const std::string& text);

struct Rational {
    long long num = 0;
    long long den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

// psi(x) = 7/8 + f1 + f2 + f3 with exact coefficients over denominator 8m.
struct SatDecomposition {
    int n = 0;
    long long m = 0;
    double delta = 0.0;
    // integer numerators over 8m, keyed by sorted 1-based index tuples
    std::map<std::vector<int>, long long> f1_num, f2_num, f3_num;
    std::shared_ptr<const Universe> universe;  // x group, hypercube
    SparsePoly f1, f2, f3;                     // double views over `universe`

    // exact evaluation at x in {-1,1}^n: (num over 8m)
    long long f1_eval8m(const Eigen::VectorXd& x) const;
    long long f2_eval8m(const Eigen::VectorXd& x) const;
    long long f3_eval8m(const Eigen::VectorXd& x) const;
    Rational psi(const Eigen::VectorXd& x) const;  // 7/8 + f1 + f2 + f3, exact
};

SatDecomposition decompose(const CnfFormula& f,
                           double delta_c = default_constants().threesat_c);

// Exact satisfied fraction, by direct clause counting.
Rational fraction_satisfied(const CnfFormula& f, const Eigen::VectorXd& x);

// The decoupled tensor of f3 (coefficients over 8m as doubles).
SymTensor f3_tensor(const SatDecomposition& d);

struct ThreeSatParams {
    int outer_repeats_per_n = 20;  // poly(n) outer loop: 20 n
    int gaussian_samples = 50;
    int recouple_samples = 50;
    std::size_t deg3_basis_cap = 2000;  // skip the degree-6 branch above this
    int sdp_max_iter = 4000;
    Constants constants = default_constants();
};

struct ThreeSatResult {
    Eigen::VectorXd assignment;
    Rational fraction;
    std::string branch;  // "deg3" | "deg2" | "deg1" | "baseline"
    std::string diagnostics;
};

// Branches. Each returns candidate assignments (possibly none) and never
// throws on infeasibility; solve_3sat takes the exact-fraction argmax.
std::optional<Eigen::VectorXd> branch_deg1(const SatDecomposition& d, Rng rng,
                                           const ThreeSatParams& params = {});
Eigen::VectorXd branch_deg2(const SatDecomposition& d, Rng rng,
                            const ThreeSatParams& params = {});
std::optional<Eigen::VectorXd> branch_deg3(const SatDecomposition& d, Rng rng,
                                           const ThreeSatParams& params = {});

ThreeSatResult solve_3sat(const CnfFormula& f, std::uint64_t seed,
                          const ThreeSatParams& params = {});

// Planted satisfiable instance: clauses on distinct triples, each satisfied by
// the planted assignment.
struct PlantedInstance {
    CnfFormula formula;
    Eigen::VectorXd assignment;
};
PlantedInstance planted_3sat(int n, int m, Rng rng);

// Pieces of the degree-1 rounding, exposed for the identity tests.
Eigen::VectorXd truncated_gaussian_round(const PseudoDistribution& mu, double t, Rng& rng);
Eigen::VectorXd bias_sample(const Eigen::VectorXd& xbar, double p, Rng& rng);

}  // namespace polymax
