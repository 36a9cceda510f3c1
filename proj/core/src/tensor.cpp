#include "polymax/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace polymax {

SymTensor::SymTensor(int order, int dimension) : order_(order), dimension_(dimension) {
    if (order < 2) throw DimensionError("tensor order must be >= 2");
    if (dimension < 1) throw DimensionError("tensor dimension must be >= 1");
}

namespace {

IndexTuple sorted_checked(IndexTuple tuple, int order, int dimension) {
    if (static_cast<int>(tuple.size()) != order)
        throw DimensionError("index tuple length does not match tensor order");
    std::sort(tuple.begin(), tuple.end());
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        if (tuple[i] < 1 || tuple[i] > dimension)
            throw DimensionError("tensor index out of range");
        if (i > 0 && tuple[i] == tuple[i - 1])
            throw DiagonalEntryError("repeated index in tensor entry");
    }
    return tuple;
}

}  // namespace

void SymTensor::add(IndexTuple tuple, double coeff) {
    tuple = sorted_checked(std::move(tuple), order_, dimension_);
    if (coeff == 0.0) return;
    auto it = entries_.find(tuple);
    if (it == entries_.end()) {
        entries_.emplace(std::move(tuple), coeff);
    } else {
        it->second += coeff;
        if (it->second == 0.0) entries_.erase(it);
    }
}

double SymTensor::coefficient(IndexTuple tuple) const {
    tuple = sorted_checked(std::move(tuple), order_, dimension_);
    auto it = entries_.find(tuple);
    return it == entries_.end() ? 0.0 : it->second;
}

double SymTensor::norm1() const {
    double s = 0.0;
    for (const auto& [k, v] : entries_) s += std::abs(v);
    return s;
}

SymTensor SymTensor::negated() const {
    SymTensor t(order_, dimension_);
    for (const auto& [k, v] : entries_) t.entries_[k] = -v;
    return t;
}

void Assignment::check_valid(double tol) const {
    for (const auto& g : groups) {
        if (domain == Domain::hypercube) {
            for (int i = 0; i < g.size(); ++i) {
                if (std::abs(std::abs(g[i]) - 1.0) > tol)
                    throw DimensionError("hypercube assignment entry is not +-1");
            }
        } else {
            if (std::abs(g.norm() - 1.0) > tol)
                throw DimensionError("sphere assignment group is not unit norm");
        }
    }
}

SymTensor symmetrize(int order, int dimension, const std::vector<RawEntry>& raw,
                     bool drop_diagonal) {
    SymTensor t(order, dimension);
    for (const auto& e : raw) {
        if (static_cast<int>(e.indices.size()) != order)
            throw DimensionError("raw entry length does not match order");
        IndexTuple s = e.indices;
        std::sort(s.begin(), s.end());
        bool diagonal = std::adjacent_find(s.begin(), s.end()) != s.end();
        if (diagonal) {
            if (drop_diagonal) continue;
            throw DiagonalEntryError("raw tensor has a repeated-index entry");
        }
        t.add(s, e.value);
    }
    return t;
}

double eval_coupled(const SymTensor& t, const Assignment& x) {
    if (x.groups.size() != 1)
        throw DimensionError("coupled evaluation expects a single group");
    const Eigen::VectorXd& v = x.groups[0];
    if (v.size() != t.dimension()) throw DimensionError("assignment dimension mismatch");
    double total = 0.0;
    for (const auto& [tuple, c] : t.entries()) {
        double prod = c;
        for (int idx : tuple) prod *= v[idx - 1];
        total += prod;
    }
    return total;
}

double eval_decoupled(const SymTensor& t, const std::vector<Eigen::VectorXd>& groups) {
    const int d = t.order();
    if (static_cast<int>(groups.size()) != d)
        throw DimensionError("decoupled evaluation expects one group per tensor mode");
    for (const auto& g : groups) {
        if (g.size() != t.dimension()) throw DimensionError("group dimension mismatch");
    }
    double dfact = 1.0;
    for (int i = 2; i <= d; ++i) dfact *= i;

    std::vector<int> perm(d);
    double total = 0.0;
    for (const auto& [tuple, c] : t.entries()) {
        std::iota(perm.begin(), perm.end(), 0);
        double orbit = 0.0;
        do {
            double prod = 1.0;
            for (int pos = 0; pos < d; ++pos) prod *= groups[pos][tuple[perm[pos]] - 1];
            orbit += prod;
        } while (std::next_permutation(perm.begin(), perm.end()));
        total += (c / dfact) * orbit;
    }
    return total;
}

double eval_decoupled(const SymTensor& t, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& y, const Eigen::VectorXd& z) {
    return eval_decoupled(t, std::vector<Eigen::VectorXd>{x, y, z});
}

Eigen::MatrixXd slice_matrix(const SymTensor& t, int i) {
    if (t.order() != 3) throw DimensionError("slice_matrix requires an order-3 tensor");
    if (i < 1 || i > t.dimension()) throw DimensionError("slice index out of range");
    const int n = t.dimension();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [tuple, c] : t.entries()) {
        if (tuple[0] != i && tuple[1] != i && tuple[2] != i) continue;
        double pos = c / 6.0;
        // distribute over the permutations of the orbit that put i first
        int a, b;
        if (tuple[0] == i) { a = tuple[1]; b = tuple[2]; }
        else if (tuple[1] == i) { a = tuple[0]; b = tuple[2]; }
        else { a = tuple[0]; b = tuple[1]; }
        m(a - 1, b - 1) += pos;
        m(b - 1, a - 1) += pos;
    }
    return m;
}

std::vector<Eigen::MatrixXd> all_slices(const SymTensor& t) {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(t.dimension());
    for (int i = 1; i <= t.dimension(); ++i) out.push_back(slice_matrix(t, i));
    return out;
}

Eigen::VectorXd slice_values(const SymTensor& t, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& z) {
    if (t.order() != 3) throw DimensionError("slice_values requires an order-3 tensor");
    const int n = t.dimension();
    if (y.size() != n || z.size() != n) throw DimensionError("group dimension mismatch");
    Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
    for (const auto& [tuple, c] : t.entries()) {
        double pos = c / 6.0;
        int i = tuple[0], j = tuple[1], k = tuple[2];
        q[i - 1] += pos * (y[j - 1] * z[k - 1] + y[k - 1] * z[j - 1]);
        q[j - 1] += pos * (y[i - 1] * z[k - 1] + y[k - 1] * z[i - 1]);
        q[k - 1] += pos * (y[i - 1] * z[j - 1] + y[j - 1] * z[i - 1]);
    }
    return q;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_tensor(std::ostream& os, const SymTensor& t) {
    os << t.order() << ' ' << t.dimension() << '\n';
    for (const auto& [tuple, c] : t.entries()) {
        for (int idx : tuple) os << idx << ' ';
        os << format_double(c) << '\n';
    }
}

SymTensor read_tensor(std::istream& is) {
    std::string line;
    int d = -1, n = -1;
    SymTensor t(2, 1);
    bool have_header = false;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        if (!have_header) {
            if (!(ls >> d >> n)) {
                std::string rest;
                if (ls.clear(), ls >> rest) throw ParseError("malformed tensor header");
                continue;  // blank/comment line before header
            }
            t = SymTensor(d, n);
            have_header = true;
            continue;
        }
        IndexTuple tuple(d);
        bool any = false;
        for (int i = 0; i < d; ++i) {
            if (!(ls >> tuple[i])) {
                if (i == 0) { any = false; break; }
                throw ParseError("truncated tensor entry");
            }
            any = true;
        }
        if (!any) continue;
        double c;
        if (!(ls >> c)) throw ParseError("tensor entry missing coefficient");
        t.add(tuple, c);
    }
    if (!have_header) throw ParseError("tensor stream has no header");
    return t;
}

void save_tensor(const std::string& path, const SymTensor& t) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    write_tensor(f, t);
}

SymTensor load_tensor(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open for reading: " + path);
    return read_tensor(f);
}

}  // namespace polymax
