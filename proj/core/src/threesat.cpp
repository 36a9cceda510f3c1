#include "polymax/threesat.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "polymax/assemble.hpp"
#include "polymax/errors.hpp"
#include "polymax/recouple.hpp"
#include "polymax/roundings.hpp"

namespace polymax {

CnfFormula parse_dimacs(std::istream& is) {
    CnfFormula f;
    long long declared_clauses = -1;
    bool have_header = false;
    std::set<std::array<int, 3>> seen_triples;
    std::string line;
    std::vector<int> pending;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == 'c' || line[0] == '%') continue;
        std::istringstream ls(line);
        if (line[0] == 'p') {
            std::string p, cnf;
            if (!(ls >> p >> cnf >> f.n >> declared_clauses) || cnf != "cnf")
                throw ParseError("malformed DIMACS header");
            if (f.n < 1) throw ParseError("malformed DIMACS header");
            have_header = true;
            continue;
        }
        int lit;
        while (ls >> lit) {
            if (lit == 0) {
                if (pending.size() != 3)
                    throw ParseError("clause does not have exactly 3 literals");
                Clause c;
                for (int i = 0; i < 3; ++i) {
                    c.vars[i] = std::abs(pending[i]);
                    c.signs[i] = pending[i] > 0 ? 1 : -1;
                }
                // sort by variable, keep literal signs attached
                for (int a = 0; a < 3; ++a)
                    for (int b = a + 1; b < 3; ++b)
                        if (c.vars[a] > c.vars[b]) {
                            std::swap(c.vars[a], c.vars[b]);
                            std::swap(c.signs[a], c.signs[b]);
                        }
                if (c.vars[0] == c.vars[1] || c.vars[1] == c.vars[2])
                    throw ParseError("clause repeats a variable");
                if (!have_header) throw ParseError("clause before DIMACS header");
                for (int v : c.vars)
                    if (v < 1 || v > f.n) throw ParseError("literal out of range");
                if (!seen_triples.insert(c.vars).second)
                    throw ParseError("variable triple appears in two clauses");
                f.clauses.push_back(c);
                pending.clear();
            } else {
                pending.push_back(lit);
            }
        }
    }
    if (!have_header) throw ParseError("missing DIMACS header");
    if (!pending.empty()) throw ParseError("trailing literals without clause terminator");
    return f;
}

CnfFormula parse_dimacs(const std::string& text) {
    std::istringstream is(text);
    return parse_dimacs(is);
}

namespace {

long long eval_num(const std::map<std::vector<int>, long long>& num,
                   const Eigen::VectorXd& x) {
    long long s = 0;
    for (const auto& [key, c] : num) {
        long long prod = c;
        for (int idx : key) prod *= x[idx - 1] > 0 ? 1 : -1;
        s += prod;
    }
    return s;
}

}  // namespace

long long SatDecomposition::f1_eval8m(const Eigen::VectorXd& x) const {
    return eval_num(f1_num, x);
}
long long SatDecomposition::f2_eval8m(const Eigen::VectorXd& x) const {
    return eval_num(f2_num, x);
}
long long SatDecomposition::f3_eval8m(const Eigen::VectorXd& x) const {
    return eval_num(f3_num, x);
}

Rational SatDecomposition::psi(const Eigen::VectorXd& x) const {
    Rational r;
    r.num = 7 * m + f1_eval8m(x) + f2_eval8m(x) + f3_eval8m(x);
    r.den = 8 * m;
    return r;
}

SatDecomposition decompose(const CnfFormula& f, double delta_c) {
    SatDecomposition d;
    d.n = f.n;
    d.m = static_cast<long long>(f.clauses.size());
    if (d.m == 0) throw DimensionError("formula has no clauses");
    d.delta = delta_c / (std::sqrt(static_cast<double>(f.n)) *
                         std::max(1.0, std::log(static_cast<double>(f.n))));
    d.universe = make_coupled_universe(f.n, Domain::hypercube);

    // psi_C = 7/8 - (1/8)(s1 x1 + s2 x2 + s3 x3 + s1 s2 x1 x2 + s2 s3 x2 x3
    //                     + s1 s3 x1 x3 + s1 s2 s3 x1 x2 x3), averaged over C
    for (const auto& c : f.clauses) {
        for (int i = 0; i < 3; ++i) d.f1_num[{c.vars[i]}] -= c.signs[i];
        const int pairs[3][2] = {{0, 1}, {1, 2}, {0, 2}};
        for (const auto& pr : pairs) {
            std::vector<int> key = {c.vars[pr[0]], c.vars[pr[1]]};
            d.f2_num[key] -= c.signs[pr[0]] * c.signs[pr[1]];
        }
        d.f3_num[{c.vars[0], c.vars[1], c.vars[2]}] -= c.signs[0] * c.signs[1] * c.signs[2];
    }
    for (auto it = d.f1_num.begin(); it != d.f1_num.end();)
        it = it->second == 0 ? d.f1_num.erase(it) : std::next(it);
    for (auto it = d.f2_num.begin(); it != d.f2_num.end();)
        it = it->second == 0 ? d.f2_num.erase(it) : std::next(it);
    for (auto it = d.f3_num.begin(); it != d.f3_num.end();)
        it = it->second == 0 ? d.f3_num.erase(it) : std::next(it);

    const double scale = 1.0 / (8.0 * static_cast<double>(d.m));
    auto build = [&](const std::map<std::vector<int>, long long>& num) {
        SparsePoly p(d.universe);
        for (const auto& [key, c] : num) {
            Monomial mono;
            for (int idx : key) mono.push_back(d.universe->var(std::size_t{0}, idx - 1));
            p.add_term(std::move(mono), static_cast<double>(c) * scale);
        }
        return p;
    };
    d.f1 = build(d.f1_num);
    d.f2 = build(d.f2_num);
    d.f3 = build(d.f3_num);
    return d;
}

Rational fraction_satisfied(const CnfFormula& f, const Eigen::VectorXd& x) {
    if (x.size() != f.n) throw DimensionError("assignment length mismatch");
    long long sat = 0;
    for (const auto& c : f.clauses) {
        bool falsified = true;
        for (int i = 0; i < 3; ++i) {
            int xi = x[c.vars[i] - 1] > 0 ? 1 : -1;
            if (c.signs[i] * xi != 1) {  // sigma_i x_i != +1 means the literal is true
                falsified = false;
                break;
            }
        }
        if (!falsified) ++sat;
    }
    Rational r;
    r.num = sat;
    r.den = static_cast<long long>(f.clauses.size());
    return r;
}

SymTensor f3_tensor(const SatDecomposition& d) {
    SymTensor t(3, d.n);
    const double scale = 1.0 / (8.0 * static_cast<double>(d.m));
    for (const auto& [key, c] : d.f3_num) t.add(key, static_cast<double>(c) * scale);
    return t;
}

Eigen::VectorXd truncated_gaussian_round(const PseudoDistribution& mu, double t, Rng& rng) {
    const Universe& u = *mu.basis().universe();
    const int n = u.groups()[0].count;
    Eigen::VectorXd mean(n);
    Eigen::MatrixXd cov(n, n);
    for (int i = 0; i < n; ++i) mean[i] = mu.moment({u.var(std::size_t{0}, i)});
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double second = mu.moment(
                multiply({u.var(std::size_t{0}, i)}, {u.var(std::size_t{0}, j)}, u));
            cov(i, j) = cov(j, i) = second - mean[i] * mean[j];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    Eigen::MatrixXd fac =
        es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    Eigen::VectorXd dir(n);
    for (int i = 0; i < n; ++i) dir[i] = rng.gaussian();
    Eigen::VectorXd g = mean + fac * dir;
    Eigen::VectorXd xbar(n);
    for (int i = 0; i < n; ++i)
        xbar[i] = std::abs(g[i]) <= t ? g[i] / t : (g[i] > 0 ? 1.0 : -1.0);
    return xbar;
}

Eigen::VectorXd bias_sample(const Eigen::VectorXd& xbar, double p, Rng& rng) {
    Eigen::VectorXd x(xbar.size());
    for (int i = 0; i < xbar.size(); ++i) {
        double prob = 0.5 * (1.0 + p * xbar[i]);
        x[i] = rng.uniform() < prob ? 1.0 : -1.0;
    }
    return x;
}

std::optional<Eigen::VectorXd> branch_deg1(const SatDecomposition& d, Rng rng,
                                           const ThreeSatParams& params) {
    const int n = d.n;
    SparsePoly f12 = d.f1 + d.f2;
    SparsePoly delta_poly = SparsePoly::constant(d.universe, d.delta);

    auto solve_program = [&](bool positive) -> std::optional<PseudoDistribution> {
        std::vector<Axiom> axioms;
        axioms.push_back({f12, false, {}});
        SparsePoly side = positive ? d.f1 - delta_poly : (d.f1 * -1.0) - delta_poly;
        SparsePoly scaled = side;
        axioms.push_back({scaled, false, {}});
        Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(n, n);
        SosRelaxation rel =
            assemble_quadratic_sdp(zero, Domain::hypercube, axioms, SolveMode::feasibility);
        SolveParams sp;
        sp.max_iter = params.sdp_max_iter;
        SolveResult res = solve(rel.problem, sp);
        if (!counts_as_feasible(res, sp)) return std::nullopt;
        try {
            return extract_pseudodistribution(rel, res);
        } catch (const Error&) {
            return std::nullopt;
        }
    };

    std::optional<PseudoDistribution> mu = solve_program(true);
    if (!mu) {
        auto neg = solve_program(false);
        if (!neg) return std::nullopt;  // both infeasible: branch skipped
        mu = neg->negated();
    }

    const double t = std::sqrt(48.0 * std::max(1.0, std::log(static_cast<double>(n))));
    const double p = std::pow(static_cast<double>(n), -0.25) /
                     std::max(1.0, std::log(static_cast<double>(n)));
    Eigen::VectorXd best;
    long long best_num = std::numeric_limits<long long>::min();
    for (int s = 0; s < params.gaussian_samples; ++s) {
        Eigen::VectorXd xbar = truncated_gaussian_round(*mu, t, rng);
        Eigen::VectorXd x1 = bias_sample(xbar, p, rng);
        long long num = d.f1_eval8m(x1) + d.f2_eval8m(x1) + d.f3_eval8m(x1);
        if (num > best_num) {
            best_num = num;
            best = std::move(x1);
        }
    }
    return best;
}

Eigen::VectorXd branch_deg2(const SatDecomposition& d, Rng rng, const ThreeSatParams& params) {
    const int n = d.n;
    // zero-diagonal coefficient matrix of f2
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [key, c] : d.f2_num) {
        double v = static_cast<double>(c) / (8.0 * static_cast<double>(d.m));
        m(key[0] - 1, key[1] - 1) += 0.5 * v;
        m(key[1] - 1, key[0] - 1) += 0.5 * v;
    }
    SosRelaxation rel = assemble_quadratic_sdp(m, Domain::hypercube);
    SolveParams sp;
    sp.max_iter = params.sdp_max_iter;
    SolveResult res = solve(rel.problem, sp);

    Eigen::VectorXd best = Eigen::VectorXd::Ones(n);
    long long best_num = std::numeric_limits<long long>::min();
    auto consider = [&](const Eigen::VectorXd& x) {
        long long num = d.f1_eval8m(x) + d.f2_eval8m(x) + d.f3_eval8m(x);
        if (num > best_num) {
            best_num = num;
            best = x;
        }
    };
    try {
        PseudoDistribution mu = extract_pseudodistribution(rel, res);
        const double t = std::sqrt(2.0 * std::max(1.0, std::log(static_cast<double>(n))));
        CharikarWirthResult cw =
            charikar_wirth_sample(mu, m, t, params.gaussian_samples, rng.child("cw"));
        // the sign is chosen by total psi value; f2 is even, f1 + f3 flip
        consider(cw.best);
        consider(Eigen::VectorXd(-cw.best));
    } catch (const Error&) {
        // degraded: fall through to the random candidate below
    }
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) r[i] = static_cast<double>(rng.sign());
    consider(r);
    consider(Eigen::VectorXd(-r));
    return best;
}

std::optional<Eigen::VectorXd> branch_deg3(const SatDecomposition& d, Rng rng,
                                           const ThreeSatParams& params) {
    const int n = d.n;
    // pattern-restricted degree-6 basis size: (1 + 2n + C(2n,2) + C(2n,3)) + n (1 + 2n + C(2n,2))
    auto choose = [](long long a, int b) {
        long long r = 1;
        for (int i = 0; i < b; ++i) r = r * (a - i) / (i + 1);
        return r;
    };
    long long yz = 1 + 2LL * n + choose(2 * n, 2) + choose(2 * n, 3);
    long long size = yz + static_cast<long long>(n) * (1 + 2LL * n + choose(2 * n, 2));
    if (size > static_cast<long long>(params.deg3_basis_cap)) return std::nullopt;

    SymTensor t3 = f3_tensor(d);
    if (t3.empty()) return std::nullopt;

    auto universe = make_decoupled_universe(n, 3, Domain::hypercube);
    auto lift_f2 = [&](std::size_t group) {
        SparsePoly p(universe);
        const double scale = 1.0 / (8.0 * static_cast<double>(d.m));
        for (const auto& [key, c] : d.f2_num) {
            p.add_term({universe->var(group, key[0] - 1), universe->var(group, key[1] - 1)},
                       static_cast<double>(c) * scale);
        }
        p.add_term({}, d.delta);  // f2 + delta >= 0
        return p;
    };
    BasisFilter yz_only = [](const Monomial& m, const Universe& u) {
        return group_degree(m, u, 0) == 0 && degree(m) <= 2;
    };
    std::vector<Axiom> axioms;
    axioms.push_back({lift_f2(1), false, yz_only});
    axioms.push_back({lift_f2(2), false, yz_only});

    SosRelaxation rel;
    try {
        rel = assemble_sos_sdp(t3, 6, Domain::hypercube, true, axioms);
    } catch (const SizeCapError&) {
        return std::nullopt;
    }
    SolveParams sp;
    sp.max_iter = params.sdp_max_iter;
    SolveResult res = solve(rel.problem, sp);
    if (res.status == SolveStatus::infeasible_certificate) return std::nullopt;
    PseudoDistribution mu = [&]() {
        try {
            return extract_pseudodistribution(rel, res);
        } catch (const Error&) {
            // fall back to the unrepaired moment block
            return PseudoDistribution(rel.basis, res.block_matrices.at(rel.main_block),
                                      rel.degree, rel.domain);
        }
    }();

    // pE[q_i q_j] for the Paley-Zygmund check on sampled xbar
    const Universe& u = *rel.basis.universe();
    std::vector<SparsePoly> q(n, SparsePoly(rel.basis.universe()));
    for (const auto& [tuple, c] : t3.entries()) {
        const double pos = c / 6.0;
        const int i = tuple[0] - 1, j = tuple[1] - 1, k = tuple[2] - 1;
        auto add = [&](int qi, int yj, int zk) {
            q[qi].add_term({u.var(std::size_t{1}, yj), u.var(std::size_t{2}, zk)}, pos);
        };
        add(i, j, k);
        add(i, k, j);
        add(j, i, k);
        add(j, k, i);
        add(k, i, j);
        add(k, j, i);
    }
    Eigen::MatrixXd g2(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double v = mu.pseudo_expectation(q[i] * q[j]);
            g2(i, j) = g2(j, i) = v;
        }
    const double eq2 = g2.trace();
    const double cdelta = params.constants.threesat_f2_slack * d.delta;

    Eigen::VectorXd best;
    long long best_num = std::numeric_limits<long long>::min();
    bool found = false;
    const int outer = std::max(8, 2 * n);
    for (int trial = 0; trial < outer; ++trial) {
        Rng trng = rng.child(static_cast<std::uint64_t>(trial));
        Eigen::VectorXd xbar(n);
        for (int i = 0; i < n; ++i) xbar[i] = static_cast<double>(trng.sign());
        if (static_cast<double>(d.f2_eval8m(xbar)) / (8.0 * d.m) < -cdelta) continue;
        const double pz = xbar.dot(g2 * xbar);
        if (pz < 0.5 * eq2 / std::max(1, n) && trial + 1 < outer) continue;

        SparsePoly p = hq_polynomial(t3, xbar, rel.basis.universe(), 1, 2);
        ScalarFixResult fix = [&]() -> ScalarFixResult {
            try {
                return scalar_fix(mu, p, 1);
            } catch (const Error&) {
                return ScalarFixResult{mu, "degenerate", 0.0, 0.0};
            }
        }();
        if (fix.branch == "degenerate") continue;
        if (fix.achieved < 0) xbar = -xbar;  // f2 is even, so the gate above survives

        // Charikar-Wirth on the joint (y,z) quadratic form of f3(xbar, ., .)
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) a += xbar[i] * slice_matrix(t3, i + 1);
        Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        joint.topRightCorner(n, n) = 0.5 * a;
        joint.bottomLeftCorner(n, n) = 0.5 * a.transpose();
        const double t_cw = std::sqrt(8.0 * std::max(1.0, std::log(static_cast<double>(n))));
        CharikarWirthResult cw;
        try {
            cw = charikar_wirth_sample(fix.mu, joint, t_cw, 8, trng.child("cw"));
        } catch (const Error&) {
            continue;
        }
        Eigen::VectorXd ybar = cw.best.head(n);
        Eigen::VectorXd zbar = cw.best.tail(n);

        auto dist = recouple_cubic(xbar, ybar, zbar);
        for (int s = 0; s < params.recouple_samples; ++s) {
            Eigen::VectorXd x3 = dist.sample(trng);
            long long num = d.f1_eval8m(x3) + d.f2_eval8m(x3) + d.f3_eval8m(x3);
            if (num > best_num) {
                best_num = num;
                best = std::move(x3);
                found = true;
            }
        }
    }
    if (!found) return std::nullopt;
    return best;
}

ThreeSatResult solve_3sat(const CnfFormula& f, std::uint64_t seed,
                          const ThreeSatParams& params) {
    SatDecomposition d = decompose(f, params.constants.threesat_c);
    Rng rng(seed);
    ThreeSatResult out;
    std::ostringstream diag;

    long long best_num = std::numeric_limits<long long>::min();
    auto consider = [&](const Eigen::VectorXd& x, const char* branch) {
        long long num = 7 * d.m + d.f1_eval8m(x) + d.f2_eval8m(x) + d.f3_eval8m(x);
        // branch-order tie break: deg3 > deg2 > deg1 > baseline, in call order
        if (num > best_num) {
            best_num = num;
            out.assignment = x;
            out.branch = branch;
        }
    };

    if (auto x3 = branch_deg3(d, rng.child("deg3"), params)) {
        consider(*x3, "deg3");
    } else {
        diag << "deg3 skipped; ";
    }
    consider(branch_deg2(d, rng.child("deg2"), params), "deg2");
    if (auto x1 = branch_deg1(d, rng.child("deg1"), params)) {
        consider(*x1, "deg1");
    } else {
        diag << "deg1 infeasible (expected when |f1| is small); ";
    }

    Rng brng = rng.child("baseline");
    const int repeats = params.outer_repeats_per_n * f.n;
    for (int r = 0; r < repeats; ++r) {
        Eigen::VectorXd x(f.n);
        for (int i = 0; i < f.n; ++i) x[i] = static_cast<double>(brng.sign());
        consider(x, "baseline");
    }

    out.fraction = Rational{best_num, 8 * d.m};
    diag << "delta=" << d.delta;
    out.diagnostics = diag.str();
    return out;
}

PlantedInstance planted_3sat(int n, int m, Rng rng) {
    if (n < 3) throw DimensionError("planted_3sat needs n >= 3");
    long long triples = static_cast<long long>(n) * (n - 1) * (n - 2) / 6;
    if (m > triples) throw DimensionError("more clauses than distinct variable triples");
    PlantedInstance out;
    out.formula.n = n;
    out.assignment.resize(n);
    for (int i = 0; i < n; ++i) out.assignment[i] = static_cast<double>(rng.sign());

    std::set<std::array<int, 3>> used;
    while (static_cast<int>(out.formula.clauses.size()) < m) {
        int a = 1 + static_cast<int>(rng.below(n));
        int b = 1 + static_cast<int>(rng.below(n));
        int c = 1 + static_cast<int>(rng.below(n));
        if (a == b || b == c || a == c) continue;
        std::array<int, 3> key = {a, b, c};
        std::sort(key.begin(), key.end());
        if (used.count(key)) continue;
        Clause cl;
        cl.vars = key;
        // reject the unique falsifying pattern sigma_i = x*_i
        while (true) {
            for (int i = 0; i < 3; ++i) cl.signs[i] = rng.sign();
            bool falsifies = true;
            for (int i = 0; i < 3; ++i) {
                int xi = out.assignment[cl.vars[i] - 1] > 0 ? 1 : -1;
                if (cl.signs[i] * xi != 1) falsifies = false;
            }
            if (!falsifies) break;
        }
        used.insert(key);
        out.formula.clauses.push_back(cl);
    }
    return out;
}

}  // namespace polymax
