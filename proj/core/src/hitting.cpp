#include "polymax/hitting.hpp"

#include <cmath>

#include "polymax/errors.hpp"
#include "polymax/rng.hpp"

namespace polymax {

namespace {

// GF(2^r) with a fixed irreducible polynomial per degree.
struct GF2 {
    int r;
    std::uint32_t poly;  // reduction polynomial including the leading bit

    explicit GF2(int r_) : r(r_) {
        static const std::uint32_t polys[] = {
            0,      0x3,    0x7,    0xb,    0x13,   0x25,   0x43,
            0x83,   0x11b,  0x211,  0x409,  0x805,  0x1053, 0x201b,
            0x4143, 0x8003, 0x1002b};
        if (r < 1 || r > 16) throw DimensionError("GF(2^r) degree out of range");
        poly = polys[r];
    }

    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
        std::uint32_t acc = 0;
        while (b) {
            if (b & 1) acc ^= a;
            b >>= 1;
            a <<= 1;
            if (a & (1u << r)) a ^= poly;
        }
        return acc;
    }

    int trace(std::uint32_t a) const {
        std::uint32_t s = 0, x = a;
        for (int i = 0; i < r; ++i) {
            s ^= x;
            x = mul(x, x);
        }
        // the trace lands in {0, 1}
        return static_cast<int>(s & 1);
    }
};

}  // namespace

std::vector<Eigen::VectorXd> fourwise_support(int m) {
    if (m < 1) throw DimensionError("fourwise_support needs m >= 1");
    std::vector<Eigen::VectorXd> out;
    if (m <= 4) {  // small-m fallback: the full cube
        out.reserve(1u << m);
        for (unsigned mask = 0; mask < (1u << m); ++mask) {
            Eigen::VectorXd v(m);
            for (int i = 0; i < m; ++i) v[i] = (mask >> i) & 1 ? -1.0 : 1.0;
            out.push_back(std::move(v));
        }
        return out;
    }
    int r = 1;
    while ((1 << r) - 1 < m) ++r;
    GF2 gf(r);
    // b_i = (-1)^{tr(s1 a_i + s2 a_i^3)} at distinct nonzero field points a_i;
    // any <= 4 of the functionals are linearly independent, so the bits are
    // exactly 4-wise independent.
    std::vector<std::uint32_t> cubes(m + 1);
    for (int i = 1; i <= m; ++i) cubes[i] = gf.mul(gf.mul(i, i), i);
    const std::uint32_t q = 1u << r;
    out.reserve(static_cast<std::size_t>(q) * q);
    for (std::uint32_t s1 = 0; s1 < q; ++s1) {
        for (std::uint32_t s2 = 0; s2 < q; ++s2) {
            Eigen::VectorXd v(m);
            for (int i = 1; i <= m; ++i) {
                int bit = gf.trace(gf.mul(s1, static_cast<std::uint32_t>(i)) ^
                                   gf.mul(s2, cubes[i]));
                v[i - 1] = bit ? -1.0 : 1.0;
            }
            out.push_back(std::move(v));
        }
    }
    return out;
}

HittingSet blockwise_hypercube_set(int n, int k) {
    if (n < 1 || k < 1 || k > n) throw DimensionError("blockwise set needs 1 <= k <= n");
    HittingSet hs;
    hs.domain = Domain::hypercube;
    hs.n = n;
    hs.k = k;
    hs.padded_n = ((n + k - 1) / k) * k;
    hs.block_length = hs.padded_n / k;

    auto bs = fourwise_support(hs.block_length);
    hs.seed_space = bs.size() << k;
    hs.support.reserve(bs.size() << k);
    for (unsigned cmask = 0; cmask < (1u << k); ++cmask) {
        for (const auto& b : bs) {
            Eigen::VectorXd x(hs.padded_n);
            for (int blk = 0; blk < k; ++blk) {
                double c = (cmask >> blk) & 1 ? -1.0 : 1.0;
                x.segment(blk * hs.block_length, hs.block_length) = c * b;
            }
            hs.support.push_back(std::move(x));
        }
    }
    hs.probabilities.assign(hs.support.size(), 1.0 / static_cast<double>(hs.support.size()));
    hs.negation_closed = true;  // c ranges over the full cube
    return hs;
}

std::vector<Eigen::VectorXd> epsilon_net_sphere(int k, double eps) {
    if (k < 1 || eps <= 0.0 || eps >= 1.0) throw DimensionError("bad net parameters");
    std::vector<Eigen::VectorXd> net;
    if (k == 1) {
        net.push_back(Eigen::VectorXd::Constant(1, 1.0));
        net.push_back(Eigen::VectorXd::Constant(1, -1.0));
        return net;
    }
    // greedy maximal eps-separated symmetric set with a fixed shuffle seed
    Rng rng(0x9e37u + static_cast<std::uint64_t>(k));
    int rejections = 0;
    const int needed_rejections = 20000;
    while (rejections < needed_rejections) {
        Eigen::VectorXd v(k);
        for (int i = 0; i < k; ++i) v[i] = rng.gaussian();
        double norm = v.norm();
        if (norm < 1e-12) continue;
        v /= norm;
        bool separated = true;
        for (const auto& p : net) {
            if ((p - v).norm() < eps) {
                separated = false;
                break;
            }
        }
        if (separated) {
            net.push_back(v);
            net.push_back(-v);
            rejections = 0;
        } else {
            ++rejections;
        }
    }
    return net;
}

HittingSet blockwise_sphere_set(int n, int k, double eps) {
    if (n < 1 || k < 1 || k > n) throw DimensionError("blockwise set needs 1 <= k <= n");
    HittingSet hs;
    hs.domain = Domain::sphere;
    hs.n = n;
    hs.k = k;
    hs.padded_n = ((n + k - 1) / k) * k;
    hs.block_length = hs.padded_n / k;

    auto bs = fourwise_support(hs.block_length);
    auto net = epsilon_net_sphere(k, eps);
    const double scale = std::sqrt(static_cast<double>(k) / hs.padded_n);
    hs.seed_space = bs.size() * net.size();
    hs.support.reserve(hs.seed_space);
    for (const auto& c : net) {
        for (const auto& b : bs) {
            Eigen::VectorXd x(hs.padded_n);
            for (int blk = 0; blk < k; ++blk)
                x.segment(blk * hs.block_length, hs.block_length) = scale * c[blk] * b;
            hs.support.push_back(std::move(x));
        }
    }
    hs.probabilities.assign(hs.support.size(), 1.0 / static_cast<double>(hs.support.size()));
    hs.negation_closed = true;  // the net is symmetric by construction
    return hs;
}

HittingSet pairwise_set(int n) {
    if (n < 1) throw DimensionError("pairwise_set needs n >= 1");
    // Sylvester-Hadamard rows restricted to n distinct odd-weight columns;
    // odd weight makes the complement row realize -x.
    int t = 1;
    while ((1 << (t - 1)) < n) ++t;
    std::vector<unsigned> columns;
    for (unsigned c = 1; columns.size() < static_cast<std::size_t>(n); ++c) {
        if (__builtin_popcount(c) % 2 == 1) columns.push_back(c);
    }
    HittingSet hs;
    hs.domain = Domain::hypercube;
    hs.n = n;
    hs.padded_n = n;
    hs.k = 1;
    hs.block_length = n;
    const unsigned rows = 1u << t;
    hs.seed_space = rows;
    hs.support.reserve(rows);
    for (unsigned rmask = 0; rmask < rows; ++rmask) {
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) {
            int parity = __builtin_popcount(rmask & columns[i]) % 2;
            x[i] = parity ? -1.0 : 1.0;
        }
        hs.support.push_back(std::move(x));
    }
    hs.probabilities.assign(hs.support.size(), 1.0 / static_cast<double>(hs.support.size()));
    hs.negation_closed = true;
    return hs;
}

double directional_moment(const HittingSet& d, const Eigen::VectorXd& w, int k) {
    if (w.size() > d.padded_n) throw DimensionError("direction longer than the support vectors");
    double s = 0.0;
    for (std::size_t i = 0; i < d.support.size(); ++i) {
        double dot = d.support[i].head(w.size()).dot(w);
        s += d.probabilities[i] * std::pow(dot, 2 * k);
    }
    return s;
}

}  // namespace polymax
