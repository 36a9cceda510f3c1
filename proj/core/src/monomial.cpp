#include "polymax/monomial.hpp"

#include <algorithm>
#include <cmath>

namespace polymax {

VarId Universe::add_group(const std::string& name, int count, VarKind kind) {
    VarId first = static_cast<VarId>(kinds_.size());
    groups_.push_back({name, first, count, kind});
    kinds_.insert(kinds_.end(), count, kind);
    return first;
}

VarId Universe::var(const std::string& group, int index) const {
    for (const auto& g : groups_) {
        if (g.name == group) {
            if (index < 0 || index >= g.count) throw DimensionError("variable index out of range");
            return g.first + static_cast<VarId>(index);
        }
    }
    throw DimensionError("unknown variable group: " + group);
}

VarId Universe::var(std::size_t group_idx, int index) const {
    const auto& g = groups_.at(group_idx);
    if (index < 0 || index >= g.count) throw DimensionError("variable index out of range");
    return g.first + static_cast<VarId>(index);
}

const Universe::Group& Universe::group_of(VarId v) const {
    for (const auto& g : groups_) {
        if (v >= g.first && v < g.first + static_cast<VarId>(g.count)) return g;
    }
    throw DimensionError("variable id out of range");
}

std::string Universe::var_name(VarId v) const {
    const auto& g = group_of(v);
    return g.name + std::to_string(v - g.first + 1);
}

Monomial reduce_monomial(Monomial m, const Universe& u) {
    std::sort(m.begin(), m.end());
    Monomial out;
    out.reserve(m.size());
    std::size_t i = 0;
    while (i < m.size()) {
        std::size_t j = i;
        while (j < m.size() && m[j] == m[i]) ++j;
        std::size_t count = j - i;
        if (u.is_involutory(m[i])) count %= 2;
        out.insert(out.end(), count, m[i]);
        i = j;
    }
    return out;
}

Monomial multiply(const Monomial& a, const Monomial& b, const Universe& u) {
    Monomial m;
    m.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(m));
    return reduce_monomial(std::move(m), u);
}

int degree(const Monomial& m) { return static_cast<int>(m.size()); }

bool divides(const Monomial& a, const Monomial& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

Monomial quotient(const Monomial& b, const Monomial& a) {
    Monomial out;
    out.reserve(b.size() - a.size());
    std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(out));
    return out;
}

double eval_monomial(const Monomial& m, const Eigen::VectorXd& point) {
    double p = 1.0;
    for (VarId v : m) p *= point[v];
    return p;
}

std::string to_string(const Monomial& m, const Universe& u) {
    if (m.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i) s += "*";
        s += u.var_name(m[i]);
    }
    return s;
}

SparsePoly SparsePoly::constant(std::shared_ptr<const Universe> u, double c) {
    SparsePoly p(std::move(u));
    p.add_term({}, c);
    return p;
}

SparsePoly SparsePoly::variable(std::shared_ptr<const Universe> u, VarId v) {
    SparsePoly p(std::move(u));
    p.add_term({v}, 1.0);
    return p;
}

int SparsePoly::degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, polymax::degree(m));
    return d;
}

void SparsePoly::add_term(Monomial m, double c) {
    if (c == 0.0) return;
    if (universe_) m = reduce_monomial(std::move(m), *universe_);
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(std::move(m), c);
    } else {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

double SparsePoly::coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? 0.0 : it->second;
}

SparsePoly& SparsePoly::operator+=(const SparsePoly& other) {
    if (!universe_) universe_ = other.universe_;
    for (const auto& [m, c] : other.terms_) add_term(m, c);
    return *this;
}

SparsePoly& SparsePoly::operator-=(const SparsePoly& other) {
    if (!universe_) universe_ = other.universe_;
    for (const auto& [m, c] : other.terms_) add_term(m, -c);
    return *this;
}

SparsePoly& SparsePoly::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
}

SparsePoly SparsePoly::operator*(const SparsePoly& other) const {
    SparsePoly out(universe_ ? universe_ : other.universe_);
    for (const auto& [ma, ca] : terms_) {
        for (const auto& [mb, cb] : other.terms_) {
            out.add_term(multiply(ma, mb, *out.universe()), ca * cb);
        }
    }
    return out;
}

SparsePoly SparsePoly::operator+(const SparsePoly& other) const {
    SparsePoly out = *this;
    out += other;
    return out;
}

SparsePoly SparsePoly::operator-(const SparsePoly& other) const {
    SparsePoly out = *this;
    out -= other;
    return out;
}

double SparsePoly::eval(const Eigen::VectorXd& point) const {
    double s = 0.0;
    for (const auto& [m, c] : terms_) s += c * eval_monomial(m, point);
    return s;
}

double SparsePoly::norm1() const {
    double s = 0.0;
    for (const auto& [m, c] : terms_) s += std::abs(c);
    return s;
}

SparsePoly pow(const SparsePoly& p, int k) {
    SparsePoly out = SparsePoly::constant(p.universe(), 1.0);
    for (int i = 0; i < k; ++i) out = out * p;
    return out;
}

std::shared_ptr<Universe> make_coupled_universe(int n, Domain domain) {
    auto u = std::make_shared<Universe>();
    u->add_group("x", n, domain == Domain::hypercube ? VarKind::cube : VarKind::sphere_coord);
    return u;
}

std::shared_ptr<Universe> make_decoupled_universe(int n, int d, Domain domain) {
    auto u = std::make_shared<Universe>();
    const VarKind kind =
        domain == Domain::hypercube ? VarKind::cube : VarKind::sphere_coord;
    if (d == 3) {
        u->add_group("x", n, kind);
        u->add_group("y", n, kind);
        u->add_group("z", n, kind);
    } else {
        for (int j = 1; j <= d; ++j) u->add_group("x" + std::to_string(j) + "_", n, kind);
    }
    return u;
}

}  // namespace polymax
