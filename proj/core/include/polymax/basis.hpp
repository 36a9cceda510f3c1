#pragma once

#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "polymax/config.hpp"
#include "polymax/monomial.hpp"

namespace polymax {

using BasisFilter = std::function<bool(const Monomial&, const Universe&)>;

// Ordered monomial basis with a bijective lookup. Hypercube bases contain the
// multilinear monomials of degree <= D; sphere bases keep powers. An optional
// filter restricts the set (restricting to a principal submatrix of the
// canonical relaxation is always still a relaxation).
class MonomialBasis {
public:
    MonomialBasis() = default;
    MonomialBasis(std::shared_ptr<const Universe> universe, int max_degree, Domain domain,
                  std::vector<Monomial> monomials);

    const std::shared_ptr<const Universe>& universe() const { return universe_; }
    int max_degree() const { return max_degree_; }
    Domain domain() const { return domain_; }
    int size() const { return static_cast<int>(monomials_.size()); }
    const std::vector<Monomial>& monomials() const { return monomials_; }
    const Monomial& at(int i) const { return monomials_[i]; }

    // -1 when absent.
    int index_of(const Monomial& m) const;
    bool contains(const Monomial& m) const { return index_of(m) >= 0; }

private:
    std::shared_ptr<const Universe> universe_;
    int max_degree_ = 0;
    Domain domain_ = Domain::hypercube;
    std::vector<Monomial> monomials_;
    std::unordered_map<Monomial, int, MonomialHash> lookup_;
};

MonomialBasis build_basis(std::shared_ptr<const Universe> universe, int max_degree,
                          Domain domain, const BasisFilter& filter = {},
                          std::size_t size_cap = default_constants().basis_cap);

// Degree of the monomial restricted to one variable group.
int group_degree(const Monomial& m, const Universe& u, std::size_t group_idx);

// Filter for the decoupled cubic degree-6 relaxation: monomials in (y,z) of
// degree <= 3 together with x_i times (y,z)-monomials of degree <= 2. Every
// pseudo-expectation the cubic rounding queries factors inside this set.
BasisFilter decoupled_cubic_filter();

// Filter for decoupled degree-d relaxations (groups 1,2 carry the bilinear
// part up to total degree 3; groups 3..d appear with degree <= 1 each).
BasisFilter decoupled_hd_filter();

}  // namespace polymax
