#include "polymax/basis.hpp"

#include <algorithm>

#include "polymax/errors.hpp"

namespace polymax {

MonomialBasis::MonomialBasis(std::shared_ptr<const Universe> universe, int max_degree,
                             Domain domain, std::vector<Monomial> monomials)
    : universe_(std::move(universe)),
      max_degree_(max_degree),
      domain_(domain),
      monomials_(std::move(monomials)) {
    lookup_.reserve(monomials_.size() * 2);
    for (std::size_t i = 0; i < monomials_.size(); ++i) {
        auto [it, inserted] = lookup_.emplace(monomials_[i], static_cast<int>(i));
        if (!inserted) throw Error("duplicate monomial in basis");
    }
}

int MonomialBasis::index_of(const Monomial& m) const {
    auto it = lookup_.find(m);
    return it == lookup_.end() ? -1 : it->second;
}

namespace {

// Depth-first enumeration in graded-lexicographic order: extend the current
// monomial by variables >= the last one used (strictly greater for involutory
// variables).
void enumerate(const Universe& u, int max_degree, bool multilinear, const BasisFilter& filter,
               std::size_t size_cap, Monomial& current, VarId min_var,
               std::vector<Monomial>& out) {
    if (!filter || filter(current, u)) {
        out.push_back(current);
        if (out.size() > size_cap)
            throw SizeCapError("monomial basis exceeds the size cap", out.size());
    }
    if (degree(current) == max_degree) return;
    const VarId nv = static_cast<VarId>(u.num_vars());
    for (VarId v = min_var; v < nv; ++v) {
        current.push_back(v);
        VarId next_min = multilinear || u.is_involutory(v) ? v + 1 : v;
        enumerate(u, max_degree, multilinear, filter, size_cap, current, next_min, out);
        current.pop_back();
    }
}

}  // namespace

MonomialBasis build_basis(std::shared_ptr<const Universe> universe, int max_degree,
                          Domain domain, const BasisFilter& filter, std::size_t size_cap) {
    if (max_degree < 0) throw DimensionError("basis degree must be >= 0");
    std::vector<Monomial> monomials;
    Monomial current;
    const bool multilinear = domain == Domain::hypercube;
    enumerate(*universe, max_degree, multilinear, filter, size_cap, current, 0, monomials);
    std::stable_sort(monomials.begin(), monomials.end(),
                     [](const Monomial& a, const Monomial& b) {
                         if (a.size() != b.size()) return a.size() < b.size();
                         return a < b;
                     });
    return MonomialBasis(std::move(universe), max_degree, domain, std::move(monomials));
}

int group_degree(const Monomial& m, const Universe& u, std::size_t group_idx) {
    const auto& g = u.groups().at(group_idx);
    int d = 0;
    for (VarId v : m) {
        if (v >= g.first && v < g.first + static_cast<VarId>(g.count)) ++d;
    }
    return d;
}

BasisFilter decoupled_cubic_filter() {
    return [](const Monomial& m, const Universe& u) {
        int dx = group_degree(m, u, 0);
        int dyz = degree(m) - dx;
        if (dx == 0) return dyz <= 3;
        if (dx == 1) return dyz <= 2;
        return false;
    };
}

BasisFilter decoupled_hd_filter() {
    return [](const Monomial& m, const Universe& u) {
        int d12 = group_degree(m, u, 0) + group_degree(m, u, 1);
        if (d12 > 3) return false;
        for (std::size_t g = 2; g < u.groups().size(); ++g) {
            if (group_degree(m, u, g) > 1) return false;
        }
        return true;
    };
}

}  // namespace polymax
