#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "polymax/config.hpp"
#include "polymax/tensor.hpp"

namespace polymax {

// Explicit small-support distribution with large directional moments.
struct HittingSet {
    Domain domain = Domain::hypercube;
    std::vector<Eigen::VectorXd> support;  // vectors of length padded_n
    std::vector<double> probabilities;     // uniform by construction
    int n = 0;         // requested dimension
    int padded_n = 0;  // next multiple of k (zero tensor coordinates pad the rest)
    int k = 0;
    int block_length = 0;
    std::size_t seed_space = 0;
    bool negation_closed = false;
};

// Exactly 4-wise independent +-1 vectors of length m: degree-3 polynomial
// evaluations over GF(2^r) (full cube for m <= 4). Support size <= (2m)^2.
std::vector<Eigen::VectorXd> fourwise_support(int m);

// D = { c (x) b : c in {-1,1}^k, b 4-wise independent of length n/k }.
HittingSet blockwise_hypercube_set(int n, int k);

// Sphere analog: sqrt(k/n) c (x) b with c from a symmetric eps-net of S^{k-1}.
HittingSet blockwise_sphere_set(int n, int k, double eps = default_constants().net_eps);

// Greedy maximal eps-separated (hence eps-covering) symmetric subset of S^{k-1}.
std::vector<Eigen::VectorXd> epsilon_net_sphere(int k, double eps);

// Pairwise-independent +-1 support of size O(n), closed under negation;
// E <x,v>^2 = |v|^2 exactly.
HittingSet pairwise_set(int n);

// Exact average of <x,w>^{2k} over the support (w is zero-padded if needed).
double directional_moment(const HittingSet& d, const Eigen::VectorXd& w, int k);

}  // namespace polymax
