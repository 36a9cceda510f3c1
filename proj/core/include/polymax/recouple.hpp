#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "polymax/rng.hpp"
#include "polymax/tensor.hpp"

namespace polymax {

// Recoupling distribution over {-1,1}^n built from d hypercube assignments.
// Conditioned on the branch b (the sign tuple with b_d = b_1...b_{d-1}),
// coordinates are independent with mean (1/d) sum_j b_j x^{(j)}_i, so the
// expectation of any multilinear polynomial is the average of its evaluations
// at the branch mean vectors. Sampling is a secondary interface.
class RecoupleDistribution {
public:
    RecoupleDistribution(std::vector<Eigen::VectorXd> groups, int order);

    int order() const { return order_; }
    int dimension() const { return static_cast<int>(groups_[0].size()); }
    int branch_count() const { return static_cast<int>(branch_means_.size()); }
    const std::vector<Eigen::VectorXd>& branch_means() const { return branch_means_; }

    // Exact expectation of a multilinear polynomial given by its evaluator.
    double expect(const std::function<double(const Eigen::VectorXd&)>& multilinear) const;
    // Exact expectation of a homogeneous multilinear tensor polynomial.
    double expect(const SymTensor& f) const;
    // Componentwise E[x'].
    Eigen::VectorXd mean() const;

    Eigen::VectorXd sample(Rng& rng) const;

private:
    int order_;
    std::vector<Eigen::VectorXd> groups_;
    std::vector<Eigen::VectorXd> branch_means_;
    std::vector<std::vector<double>> branch_signs_;
};

// Lemma-style cubic recoupling: for multilinear homogeneous cubic f,
// E f(x') = (2/9) f~(x,y,z); for quadratic g, E g(x') = (g(x)+g(y)+g(z))/9;
// E x' = 0.
RecoupleDistribution recouple_cubic(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& z);

// Odd-degree generalization with factor d!/d^d. Throws UnsupportedDegreeError
// for even d (no such coupling exists there).
RecoupleDistribution recouple_odd_d(const std::vector<Eigen::VectorXd>& groups);

double recouple_factor(int d);  // d!/d^d

struct AbsRoundResult {
    Eigen::VectorXd y;         // in [-1,1]^n, |f(y)| >= (d!/d^d) f~(groups)
    double abs_value;          // |f(y)|
    double value;              // f(y)
    std::vector<int> epsilon;  // the sign pattern that won
};

// Polarization search over eps in {-1,1}^d; works for any order d.
AbsRoundResult decouple_abs_round(const SymTensor& t,
                                  const std::vector<Eigen::VectorXd>& groups);

// Companion: randomized rounding of y in [-1,1]^n to {-1,1}^n; preserves the
// expectation of every multilinear polynomial.
Eigen::VectorXd round_unit_box(const Eigen::VectorXd& y, Rng& rng);

}  // namespace polymax
