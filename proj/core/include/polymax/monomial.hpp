#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "polymax/errors.hpp"
#include "polymax/tensor.hpp"

namespace polymax {

using VarId = std::uint32_t;

// cube variables reduce v^2 -> 1; sphere_coord variables keep powers and take
// part in the unit-norm identities; free variables (the auxiliary M's) keep
// powers and carry no domain constraint.
enum class VarKind { cube, sphere_coord, free_var };

// Variable universe: named groups of scalar variables.
class Universe {
public:
    struct Group {
        std::string name;
        VarId first;
        int count;
        VarKind kind;
    };

    VarId add_group(const std::string& name, int count, VarKind kind);
    VarId var(const std::string& group, int index) const;  // index is 0-based
    VarId var(std::size_t group_idx, int index) const;

    int num_vars() const { return static_cast<int>(kinds_.size()); }
    bool is_involutory(VarId v) const { return kinds_[v] == VarKind::cube; }
    VarKind kind(VarId v) const { return kinds_[v]; }
    const std::vector<Group>& groups() const { return groups_; }
    const Group& group_of(VarId v) const;
    std::string var_name(VarId v) const;

private:
    std::vector<Group> groups_;
    std::vector<VarKind> kinds_;
};

// A monomial is the sorted multiset of its variable ids. The empty monomial
// is 1. Reduction (involutory squares cancelled) is applied on construction
// through reduce/multiply, never stored unreduced.
using Monomial = std::vector<VarId>;

Monomial reduce_monomial(Monomial m, const Universe& u);
Monomial multiply(const Monomial& a, const Monomial& b, const Universe& u);
int degree(const Monomial& m);
bool divides(const Monomial& a, const Monomial& b);         // a | b as multisets
Monomial quotient(const Monomial& b, const Monomial& a);    // b / a, a must divide b
double eval_monomial(const Monomial& m, const Eigen::VectorXd& point);
std::string to_string(const Monomial& m, const Universe& u);

struct MonomialHash {
    std::size_t operator()(const Monomial& m) const {
        std::size_t h = 1469598103934665603ull;
        for (VarId v : m) {
            h ^= v + 0x9e3779b9 + (h << 6) + (h >> 2);
        }
        return h;
    }
};

// Sparse polynomial over a shared universe. Zero coefficients are never stored.
class SparsePoly {
public:
    SparsePoly() = default;
    explicit SparsePoly(std::shared_ptr<const Universe> u) : universe_(std::move(u)) {}

    static SparsePoly constant(std::shared_ptr<const Universe> u, double c);
    static SparsePoly variable(std::shared_ptr<const Universe> u, VarId v);

    const std::map<Monomial, double>& terms() const { return terms_; }
    const std::shared_ptr<const Universe>& universe() const { return universe_; }
    bool empty() const { return terms_.empty(); }
    int degree() const;

    void add_term(Monomial m, double c);
    double coefficient(const Monomial& m) const;

    SparsePoly& operator+=(const SparsePoly& other);
    SparsePoly& operator-=(const SparsePoly& other);
    SparsePoly& operator*=(double s);
    SparsePoly operator*(const SparsePoly& other) const;
    SparsePoly operator+(const SparsePoly& other) const;
    SparsePoly operator-(const SparsePoly& other) const;

    // Evaluation at a full variable vector (indexed by VarId).
    double eval(const Eigen::VectorXd& point) const;

    double norm1() const;

private:
    std::shared_ptr<const Universe> universe_;
    std::map<Monomial, double> terms_;
};

SparsePoly pow(const SparsePoly& p, int k);

inline SparsePoly operator*(SparsePoly p, double s) {
    p *= s;
    return p;
}
inline SparsePoly operator*(double s, SparsePoly p) {
    p *= s;
    return p;
}

// Common universes.
std::shared_ptr<Universe> make_coupled_universe(int n, Domain domain);      // x[0..n)
std::shared_ptr<Universe> make_decoupled_universe(int n, int d, Domain domain);  // x1..xd groups

}  // namespace polymax
