#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "polymax/errors.hpp"

namespace polymax {

using IndexTuple = std::vector<int>;  // 1-based, strictly increasing

enum class Domain { hypercube, sphere };

// Sparse symmetric multilinear coefficient tensor. Each stored entry is keyed
// by the sorted tuple of its orbit and holds the TOTAL monomial coefficient
// (the sum over all d! symmetric positions). Evaluation never multiplies by
// d!; per-position values are c / d! and only slice_matrix re-expands them.
class SymTensor {
public:
    SymTensor(int order, int dimension);

    int order() const { return order_; }
    int dimension() const { return dimension_; }

    const std::map<IndexTuple, double>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    // Adds to the coefficient of the orbit of `tuple` (any permutation, distinct
    // indices). Zero results are erased.
    void add(IndexTuple tuple, double coeff);
    double coefficient(IndexTuple tuple) const;

    double norm1() const;  // sum |c| over stored orbits
    SymTensor negated() const;

private:
    int order_;
    int dimension_;
    std::map<IndexTuple, double> entries_;
};

// A point of the domain: one group of n reals for coupled evaluation, or d
// groups for decoupled evaluation. Values are immutable after construction.
struct Assignment {
    Domain domain = Domain::hypercube;
    std::vector<Eigen::VectorXd> groups;

    Assignment() = default;
    Assignment(Domain dom, Eigen::VectorXd single) : domain(dom) {
        groups.push_back(std::move(single));
    }
    Assignment(Domain dom, std::vector<Eigen::VectorXd> gs)
        : domain(dom), groups(std::move(gs)) {}

    int dimension() const { return groups.empty() ? 0 : static_cast<int>(groups[0].size()); }
    // Throws if hypercube entries are not +-1 or sphere groups are not unit norm.
    void check_valid(double tol = 1e-9) const;
};

struct RawEntry {
    IndexTuple indices;  // 1-based, any order; repeats mark a diagonal entry
    double value;
};

// Canonicalizes raw per-position data: sums every permutation of an orbit into
// one sorted tuple. Repeated-index entries raise DiagonalEntryError unless
// drop_diagonal is set.
SymTensor symmetrize(int order, int dimension, const std::vector<RawEntry>& raw,
                     bool drop_diagonal = false);

// f(x) = sum over orbits c * x_{i1} ... x_{id}
double eval_coupled(const SymTensor& t, const Assignment& x);

// Decoupled form: each tensor position draws from its own group, i.e. the
// stored total coefficient is spread as c/d! over all d! position assignments.
double eval_decoupled(const SymTensor& t, const std::vector<Eigen::VectorXd>& groups);
double eval_decoupled(const SymTensor& t, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& y, const Eigen::VectorXd& z);

// Order-3 slice T_i with per-position values: f~(x,y,z) = sum_i x_i y^T T_i z.
Eigen::MatrixXd slice_matrix(const SymTensor& t, int i);

// All order-3 slices at once.
std::vector<Eigen::MatrixXd> all_slices(const SymTensor& t);

// q_i(y,z) = y^T T_i z evaluated for all i.
Eigen::VectorXd slice_values(const SymTensor& t, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& z);

// Line-oriented text format: header "d n", then "i1 ... id coeff" per entry
// (1-based, sorted tuples), comments starting with '#'. Round-trips bit-exactly.
void write_tensor(std::ostream& os, const SymTensor& t);
SymTensor read_tensor(std::istream& is);
void save_tensor(const std::string& path, const SymTensor& t);
SymTensor load_tensor(const std::string& path);

}  // namespace polymax
