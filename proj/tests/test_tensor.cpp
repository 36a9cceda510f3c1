#include <doctest.h>

#include <Eigen/Dense>
#include <sstream>

#include "oracles.hpp"
#include "polymax/rng.hpp"
#include "polymax/tensor.hpp"

using namespace polymax;

namespace {
Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}
}  // namespace

TEST_CASE("symmetrize collects orbits") {
    // single orbit
    SymTensor t = symmetrize(3, 3, {{{1, 2, 3}, 6.0}});
    CHECK(t.coefficient({1, 2, 3}) == 6.0);
    CHECK(eval_coupled(t, Assignment(Domain::hypercube, vec({1, 1, 1}))) == 6.0);

    // empty input
    SymTensor z = symmetrize(3, 3, {});
    CHECK(z.empty());

    // permuted entries sum into one orbit: enumerate by hand, 2 + 1 = 3
    SymTensor s = symmetrize(3, 3, {{{2, 1, 3}, 1.0}, {{1, 2, 3}, 2.0}});
    CHECK(s.coefficient({1, 2, 3}) == 3.0);

    CHECK_THROWS_AS(symmetrize(3, 3, {{{1, 1, 2}, 1.0}}), DiagonalEntryError);
    CHECK(symmetrize(3, 3, {{{1, 1, 2}, 1.0}}, true).empty());
}

TEST_CASE("symmetrize is idempotent") {
    Rng rng(7);
    SymTensor t = oracles::random_tensor(3, 4, rng);
    std::vector<RawEntry> raw;
    for (const auto& [tuple, c] : t.entries()) raw.push_back({tuple, c});
    SymTensor t2 = symmetrize(3, 4, raw);
    for (const auto& [tuple, c] : t.entries()) CHECK(t2.coefficient(tuple) == doctest::Approx(c));
}

TEST_CASE("eval_coupled basics") {
    SymTensor t(3, 3);
    t.add({1, 2, 3}, 6.0);
    CHECK(eval_coupled(t, Assignment(Domain::hypercube, vec({1, 1, 1}))) == 6.0);
    CHECK(eval_coupled(t, Assignment(Domain::hypercube, vec({1, -1, 1}))) == -6.0);
    CHECK_THROWS_AS(eval_coupled(t, Assignment(Domain::hypercube, vec({1, 1}))), DimensionError);
}

TEST_CASE("eval_coupled matches the naive triple loop") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        SymTensor t = oracles::random_tensor(3, 5, rng);
        Eigen::VectorXd x(5);
        for (int i = 0; i < 5; ++i) x[i] = rng.gaussian();
        CHECK(eval_coupled(t, Assignment(Domain::hypercube, x)) ==
              doctest::Approx(oracles::naive_coupled_eval(t, x)).epsilon(1e-10));
    }
}

TEST_CASE("eval_decoupled expands all position assignments") {
    SymTensor t(3, 3);
    t.add({1, 2, 3}, 6.0);
    Eigen::VectorXd ones = vec({1, 1, 1});
    CHECK(eval_decoupled(t, ones, ones, ones) == doctest::Approx(6.0));

    // expanding the 6 position terms by hand for x=(+,+,+), y=(+,-,+), z=(+,+,-)
    // gives 1+1-1+1+1-1 = 2 at per-position value 1
    CHECK(eval_decoupled(t, vec({1, 1, 1}), vec({1, -1, 1}), vec({1, 1, -1})) ==
          doctest::Approx(2.0));

    Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
    CHECK(eval_decoupled(t, zero, ones, ones) == 0.0);

    CHECK_THROWS_AS(eval_decoupled(t, std::vector<Eigen::VectorXd>{ones, ones}), DimensionError);
}

TEST_CASE("eval_decoupled equals eval_coupled on equal groups") {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        SymTensor t = oracles::random_tensor(3, 4, rng);
        Eigen::VectorXd w(4);
        for (int i = 0; i < 4; ++i) w[i] = rng.gaussian();
        CHECK(eval_decoupled(t, w, w, w) ==
              doctest::Approx(eval_coupled(t, Assignment(Domain::hypercube, w))).epsilon(1e-10));
    }
}

TEST_CASE("slice_matrix matches the decoupled form") {
    SymTensor t(3, 3);
    t.add({1, 2, 3}, 6.0);
    Eigen::MatrixXd t1 = slice_matrix(t, 1);
    CHECK(t1(1, 2) == doctest::Approx(1.0));
    CHECK(t1(2, 1) == doctest::Approx(1.0));
    CHECK(t1.cwiseAbs().sum() == doctest::Approx(2.0));

    SymTensor z(3, 3);
    CHECK(slice_matrix(z, 2).isZero());

    SymTensor q(2, 3);
    q.add({1, 2}, 1.0);
    CHECK_THROWS_AS(slice_matrix(q, 1), DimensionError);

    // sum_i x_i (y^T T_i z) = f~(x, y, z) on random sign vectors
    Rng rng(5);
    SymTensor r = oracles::random_tensor(3, 4, rng);
    auto slices = all_slices(r);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd x(4), y(4), zz(4);
        for (int i = 0; i < 4; ++i) {
            x[i] = rng.sign();
            y[i] = rng.sign();
            zz[i] = rng.sign();
        }
        double via_slices = 0.0;
        for (int i = 0; i < 4; ++i) via_slices += x[i] * y.dot(slices[i] * zz);
        CHECK(via_slices == doctest::Approx(eval_decoupled(r, x, y, zz)).epsilon(1e-10));
        // slice_values agrees entry-wise
        Eigen::VectorXd qv = slice_values(r, y, zz);
        for (int i = 0; i < 4; ++i) CHECK(qv[i] == doctest::Approx(y.dot(slices[i] * zz)));
    }
}

TEST_CASE("tensor text format round-trips bit-exactly") {
    Rng rng(19);
    SymTensor t = oracles::random_tensor(3, 5, rng);
    std::ostringstream os;
    write_tensor(os, t);
    std::istringstream is(os.str());
    SymTensor t2 = read_tensor(is);
    CHECK(t2.order() == t.order());
    CHECK(t2.dimension() == t.dimension());
    CHECK(t2.size() == t.size());
    for (const auto& [tuple, c] : t.entries()) {
        CHECK(t2.coefficient(tuple) == c);  // bit-exact
    }
    // comments and blank lines are tolerated
    std::istringstream is2("# comment\n\n3 3\n1 2 3 1.5 # inline\n");
    SymTensor t3 = read_tensor(is2);
    CHECK(t3.coefficient({1, 2, 3}) == 1.5);
}

TEST_CASE("assignment validation") {
    Assignment good(Domain::hypercube, vec({1, -1, 1}));
    CHECK_NOTHROW(good.check_valid());
    Assignment bad(Domain::hypercube, vec({1, 0.5, 1}));
    CHECK_THROWS(bad.check_valid());
    Eigen::VectorXd u = vec({3, 4});
    u /= 5.0;
    CHECK_NOTHROW(Assignment(Domain::sphere, u).check_valid());
}
