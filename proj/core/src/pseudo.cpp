#include "polymax/pseudo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

#include "polymax/errors.hpp"

namespace polymax {

std::string ValidationReport::summary() const {
    std::ostringstream os;
    os << (pass ? "pass" : "fail") << " normalization=" << normalization_residual
       << " consistency=" << max_consistency_violation << " min_eig=" << min_eigenvalue
       << " domain=" << max_domain_violation;
    return os.str();
}

PseudoDistribution::PseudoDistribution(MonomialBasis basis, Eigen::MatrixXd moment_matrix,
                                       int degree, Domain domain)
    : basis_(std::move(basis)), degree_(degree), domain_(domain) {
    Block b;
    b.indices.resize(basis_.size());
    std::iota(b.indices.begin(), b.indices.end(), 0);
    b.m = std::move(moment_matrix);
    if (b.m.rows() != basis_.size() || b.m.cols() != basis_.size())
        throw DimensionError("moment matrix does not match basis size");
    blocks_.push_back(std::move(b));
    build_product_map();
}

PseudoDistribution::PseudoDistribution(MonomialBasis basis, std::vector<Block> blocks,
                                       int degree, Domain domain)
    : basis_(std::move(basis)), blocks_(std::move(blocks)), degree_(degree), domain_(domain) {
    for (const auto& b : blocks_) {
        if (b.m.rows() != static_cast<Eigen::Index>(b.indices.size()) ||
            b.m.cols() != static_cast<Eigen::Index>(b.indices.size()))
            throw DimensionError("block matrix does not match its index set");
    }
    build_product_map();
}

void PseudoDistribution::build_product_map() {
    const Universe& u = *basis_.universe();
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        const auto& idx = blocks_[bi].indices;
        const int dim = static_cast<int>(idx.size());
        for (int i = 0; i < dim; ++i) {
            for (int j = i; j < dim; ++j) {
                Monomial w = multiply(basis_.at(idx[i]), basis_.at(idx[j]), u);
                product_map_.emplace(std::move(w),
                                     EntryRef{static_cast<int>(bi), i, j});
            }
        }
    }
}

double PseudoDistribution::moment(const Monomial& m) const {
    auto it = product_map_.find(m);
    if (it == product_map_.end())
        throw BasisCoverageError("monomial not factorizable in basis: " +
                                 to_string(m, *basis_.universe()));
    const auto& r = it->second;
    return blocks_[r.block].m(r.i, r.j);
}

bool PseudoDistribution::has_moment(const Monomial& m) const {
    return product_map_.count(m) > 0;
}

double PseudoDistribution::pseudo_expectation(const SparsePoly& p) const {
    double s = 0.0;
    for (const auto& [m, c] : p.terms()) {
        if (polymax::degree(m) > degree_)
            throw DegreeOverflowError("polynomial degree exceeds pseudo-distribution degree");
        s += c * moment(m);
    }
    return s;
}

PseudoDistribution PseudoDistribution::negated() const {
    std::vector<Block> nb = blocks_;
    for (auto& b : nb) {
        const int dim = static_cast<int>(b.indices.size());
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
                int d = polymax::degree(basis_.at(b.indices[i])) + polymax::degree(basis_.at(b.indices[j]));
                if (d % 2 == 1) b.m(i, j) = -b.m(i, j);
            }
        }
    }
    return PseudoDistribution(basis_, std::move(nb), degree_, domain_);
}

double pseudo_expectation(const PseudoDistribution& mu, const SparsePoly& p) {
    return mu.pseudo_expectation(p);
}

PseudoDistribution reweight(const PseudoDistribution& mu, const SparsePoly& r,
                            const Tolerances& tol) {
    const int two_s = r.degree();
    const int new_degree = mu.degree() - two_s;
    if (new_degree < 2) throw DegreeOverflowError("reweighting drops degree below 2");

    const double er = mu.pseudo_expectation(r);
    if (!(er > tol.reweight_min))
        throw DegenerateReweightError("pE[r] <= reweight tolerance in reweight()");

    const Universe& u = *mu.basis().universe();
    const int half = new_degree / 2;

    // Keep the old-basis monomials of low enough degree whose products with r
    // stay factorizable.
    std::vector<Monomial> kept;
    for (const auto& m : mu.basis().monomials()) {
        if (degree(m) > half) continue;
        bool ok = true;
        Monomial mm = multiply(m, m, u);
        for (const auto& [w, c] : r.terms()) {
            (void)c;
            if (!mu.has_moment(multiply(mm, w, u)) || !mu.has_moment(multiply(m, w, u))) {
                ok = false;
                break;
            }
        }
        if (ok) kept.push_back(m);
    }
    if (kept.empty() || !kept.front().empty())
        throw BasisCoverageError("reweight basis lost the unit monomial");

    MonomialBasis nb(mu.basis().universe(), half, mu.basis().domain(), kept);
    const int dim = nb.size();
    Eigen::MatrixXd m2(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            Monomial uv = multiply(nb.at(i), nb.at(j), u);
            double s = 0.0;
            for (const auto& [w, c] : r.terms()) s += c * mu.moment(multiply(uv, w, u));
            m2(i, j) = m2(j, i) = s / er;
        }
    }
    return PseudoDistribution(std::move(nb), std::move(m2), new_degree, mu.domain());
}

ValidationReport validate(const PseudoDistribution& mu, const Tolerances& tol) {
    ValidationReport rep;
    const Universe& u = *mu.basis().universe();

    Monomial unit;
    rep.normalization_residual =
        mu.has_moment(unit) ? std::abs(mu.moment(unit) - 1.0) : 1.0;

    // Consistency: entries sharing a reduced product monomial must agree, both
    // inside a block and across blocks.
    std::unordered_map<Monomial, std::pair<double, double>, MonomialHash> ranges;
    for (const auto& b : mu.blocks_) {
        const int dim = static_cast<int>(b.indices.size());
        for (int i = 0; i < dim; ++i) {
            for (int j = i; j < dim; ++j) {
                Monomial w = multiply(mu.basis().at(b.indices[i]),
                                      mu.basis().at(b.indices[j]), u);
                double v = b.m(i, j);
                auto [it, inserted] = ranges.emplace(std::move(w), std::make_pair(v, v));
                if (!inserted) {
                    it->second.first = std::min(it->second.first, v);
                    it->second.second = std::max(it->second.second, v);
                }
                // symmetry of the stored matrix counts as consistency too
                double asym = std::abs(b.m(i, j) - b.m(j, i));
                rep.max_consistency_violation = std::max(rep.max_consistency_violation, asym);
            }
        }
    }
    for (const auto& [w, range] : ranges) {
        rep.max_consistency_violation =
            std::max(rep.max_consistency_violation, range.second - range.first);
    }

    rep.min_eigenvalue = 0.0;
    for (const auto& b : mu.blocks_) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            0.5 * (b.m + b.m.transpose()), Eigen::EigenvaluesOnly);
        double me = es.eigenvalues().minCoeff();
        rep.block_min_eigenvalues.push_back(me);
        rep.min_eigenvalue = std::min(rep.min_eigenvalue, me);
    }

    // Sphere identities pE[|g|^2 m] = pE[m] for every expressible product m.
    if (mu.domain() == Domain::sphere) {
        for (const auto& [w, range] : ranges) {
            (void)range;
            if (degree(w) > mu.degree() - 2) continue;
            for (const auto& g : u.groups()) {
                if (g.kind != VarKind::sphere_coord) continue;
                double s = 0.0;
                bool all = true;
                for (int i = 0; i < g.count && all; ++i) {
                    VarId v = g.first + static_cast<VarId>(i);
                    Monomial wi = multiply(w, Monomial{v, v}, u);
                    if (!mu.has_moment(wi)) {
                        all = false;
                        break;
                    }
                    s += mu.moment(wi);
                }
                if (!all) continue;
                rep.max_domain_violation =
                    std::max(rep.max_domain_violation, std::abs(s - mu.moment(w)));
            }
        }
    }

    rep.pass = rep.normalization_residual <= tol.normalization &&
               rep.max_consistency_violation <= tol.consistency &&
               rep.min_eigenvalue >= -tol.psd_min_eig &&
               rep.max_domain_violation <= tol.domain_identity;
    return rep;
}

PseudoDistribution rank1_lift(const MonomialBasis& basis, const Eigen::VectorXd& point,
                              int degree, Domain domain) {
    const int dim = basis.size();
    Eigen::VectorXd b(dim);
    for (int i = 0; i < dim; ++i) b[i] = eval_monomial(basis.at(i), point);
    Eigen::MatrixXd m = b * b.transpose();
    return PseudoDistribution(basis, std::move(m), degree, domain);
}

namespace {
std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

void write_moments(std::ostream& os, const PseudoDistribution& mu) {
    const auto& b = mu.blocks().front();
    os << b.indices.size() << ' ' << mu.degree() << ' '
       << (mu.domain() == Domain::hypercube ? "cube" : "sphere") << '\n';
    os << "# basis:";
    for (int idx : b.indices) os << ' ' << to_string(mu.basis().at(idx), *mu.basis().universe());
    os << '\n';
    for (Eigen::Index i = 0; i < b.m.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.m.cols(); ++j) {
            if (j) os << ' ';
            os << format_double(b.m(i, j));
        }
        os << '\n';
    }
}

PseudoDistribution read_moments(std::istream& is, MonomialBasis basis) {
    std::string line;
    int size = -1, degree = -1;
    std::string domain_str;
    Domain domain = Domain::hypercube;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        if (size < 0) {
            if (ls >> size >> degree >> domain_str) {
                domain = domain_str == "sphere" ? Domain::sphere : Domain::hypercube;
                break;
            }
        }
    }
    if (size < 0) throw ParseError("moment stream has no header");
    if (size != basis.size()) throw ParseError("moment header does not match basis size");
    Eigen::MatrixXd m(size, size);
    int row = 0;
    while (row < size && std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double v;
        int col = 0;
        while (ls >> v) {
            if (col >= size) throw ParseError("moment row too long");
            m(row, col++) = v;
        }
        if (col == 0) continue;
        if (col != size) throw ParseError("moment row too short");
        ++row;
    }
    if (row != size) throw ParseError("moment matrix truncated");
    return PseudoDistribution(std::move(basis), std::move(m), degree, domain);
}

}  // namespace polymax
