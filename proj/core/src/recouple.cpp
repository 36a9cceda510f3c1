#include "polymax/recouple.hpp"

#include <cmath>

#include "polymax/errors.hpp"

namespace polymax {

RecoupleDistribution::RecoupleDistribution(std::vector<Eigen::VectorXd> groups, int order)
    : order_(order), groups_(std::move(groups)) {
    const int d = order_;
    if (static_cast<int>(groups_.size()) != d)
        throw DimensionError("recoupling needs one group per mode");
    const auto n = groups_[0].size();
    for (const auto& g : groups_) {
        if (g.size() != n) throw DimensionError("recoupling groups have mismatched lengths");
    }
    const int branches = 1 << (d - 1);
    branch_means_.reserve(branches);
    branch_signs_.reserve(branches);
    for (int mask = 0; mask < branches; ++mask) {
        std::vector<double> b(d, 1.0);
        double prod = 1.0;
        for (int j = 0; j < d - 1; ++j) {
            b[j] = (mask >> j) & 1 ? -1.0 : 1.0;
            prod *= b[j];
        }
        b[d - 1] = prod;  // forces b_1 ... b_d = 1
        Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < d; ++j) m += b[j] * groups_[j];
        m /= static_cast<double>(d);
        branch_means_.push_back(std::move(m));
        branch_signs_.push_back(std::move(b));
    }
}

double RecoupleDistribution::expect(
    const std::function<double(const Eigen::VectorXd&)>& multilinear) const {
    double s = 0.0;
    for (const auto& m : branch_means_) s += multilinear(m);
    return s / static_cast<double>(branch_means_.size());
}

double RecoupleDistribution::expect(const SymTensor& f) const {
    return expect([&](const Eigen::VectorXd& v) {
        return eval_coupled(f, Assignment(Domain::hypercube, v));
    });
}

Eigen::VectorXd RecoupleDistribution::mean() const {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(dimension());
    for (const auto& b : branch_means_) m += b;
    return m / static_cast<double>(branch_means_.size());
}

Eigen::VectorXd RecoupleDistribution::sample(Rng& rng) const {
    const int d = order_;
    const auto branch = static_cast<std::size_t>(rng.below(branch_signs_.size()));
    const auto& b = branch_signs_[branch];
    Eigen::VectorXd out(dimension());
    for (int i = 0; i < out.size(); ++i) {
        int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
        out[i] = b[j] * groups_[j][i];
    }
    return out;
}

RecoupleDistribution recouple_cubic(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& z) {
    return RecoupleDistribution({x, y, z}, 3);
}

RecoupleDistribution recouple_odd_d(const std::vector<Eigen::VectorXd>& groups) {
    const int d = static_cast<int>(groups.size());
    if (d < 3 || d % 2 == 0)
        throw UnsupportedDegreeError("recoupling requires odd order >= 3");
    return RecoupleDistribution(groups, d);
}

double recouple_factor(int d) {
    double fact = 1.0;
    for (int i = 2; i <= d; ++i) fact *= i;
    return fact / std::pow(static_cast<double>(d), d);
}

AbsRoundResult decouple_abs_round(const SymTensor& t,
                                  const std::vector<Eigen::VectorXd>& groups) {
    const int d = t.order();
    if (static_cast<int>(groups.size()) != d)
        throw DimensionError("decouple_abs_round needs one group per mode");
    const auto n = groups[0].size();
    AbsRoundResult best;
    best.abs_value = -1.0;
    for (int mask = 0; mask < (1 << d); ++mask) {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
        std::vector<int> eps(d);
        for (int j = 0; j < d; ++j) {
            eps[j] = (mask >> j) & 1 ? -1 : 1;
            y += eps[j] * groups[j];
        }
        y /= static_cast<double>(d);
        double v = eval_coupled(t, Assignment(Domain::hypercube, y));
        if (std::abs(v) > best.abs_value) {
            best.abs_value = std::abs(v);
            best.value = v;
            best.y = std::move(y);
            best.epsilon = std::move(eps);
        }
    }
    return best;
}

Eigen::VectorXd round_unit_box(const Eigen::VectorXd& y, Rng& rng) {
    Eigen::VectorXd out(y.size());
    for (int i = 0; i < y.size(); ++i) {
        double p = 0.5 * (1.0 + y[i]);
        out[i] = rng.uniform() < p ? 1.0 : -1.0;
    }
    return out;
}

}  // namespace polymax
