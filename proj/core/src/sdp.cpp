#include "polymax/sdp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#ifdef POLYMAX_USE_LAPACK
#include <lapacke.h>
#endif

#include "polymax/errors.hpp"

namespace polymax {

SDPBlock& SDPProblem::add_block(int dim) {
    SDPBlock b;
    b.dim = dim;
    b.entries.resize(static_cast<std::size_t>(dim) * (dim + 1) / 2);
    blocks.push_back(std::move(b));
    return blocks.back();
}

std::size_t SDPProblem::total_psd_dim() const {
    std::size_t s = 0;
    for (const auto& b : blocks) s += b.dim;
    return s;
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::feasible: return "feasible";
        case SolveStatus::infeasible_certificate: return "infeasible-certificate";
        case SolveStatus::iteration_limit: return "iteration-limit";
    }
    return "?";
}

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

struct BlockData {
    int dim;
    int svec_dim;
    Eigen::SparseMatrix<double> B;   // svec_dim x p
    Eigen::VectorXd constant;        // svec offsets
};

Eigen::MatrixXd from_svec(const Eigen::VectorXd& s, int dim) {
    Eigen::MatrixXd m(dim, dim);
    int idx = 0;
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j, ++idx) {
            double v = (i == j) ? s[idx] : s[idx] / kSqrt2;
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

Eigen::VectorXd to_svec(const Eigen::MatrixXd& m) {
    const int dim = static_cast<int>(m.rows());
    Eigen::VectorXd s(dim * (dim + 1) / 2);
    int idx = 0;
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j, ++idx) {
            s[idx] = (i == j) ? m(i, i) : m(i, j) * kSqrt2;
        }
    }
    return s;
}

// Symmetric eigendecomposition, LAPACK divide-and-conquer when available.
void eig_sym(const Eigen::MatrixXd& m, Eigen::VectorXd& vals, Eigen::MatrixXd& vecs) {
#ifdef POLYMAX_USE_LAPACK
    const int n = static_cast<int>(m.rows());
    vecs = m;
    vals.resize(n);
    int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, vecs.data(), n, vals.data());
    if (info == 0) return;
    // fall through to Eigen on LAPACK failure
#endif
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    vals = es.eigenvalues();
    vecs = es.eigenvectors();
}

// Projection onto the PSD cone; returns the most negative eigenvalue seen.
double project_psd(Eigen::MatrixXd& m) {
    if (m.rows() == 1) {
        double v = m(0, 0);
        m(0, 0) = std::max(0.0, v);
        return std::min(0.0, v);
    }
    Eigen::VectorXd vals;
    Eigen::MatrixXd vecs;
    eig_sym(m, vals, vecs);
    double min_eig = vals.minCoeff();
    if (min_eig >= 0.0) return 0.0;
    m = vecs * vals.cwiseMax(0.0).asDiagonal() * vecs.transpose();
    return min_eig;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
    if (m.rows() == 1) return m(0, 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace

SolveResult solve(const SDPProblem& input, const SolveParams& params) {
    // Slack variables turn inequalities into equalities plus 1x1 blocks.
    SDPProblem prob = input;
    for (const auto& ineq : prob.inequalities) {
        int s = prob.new_var();
        LinearConstraint eq;
        eq.terms = ineq.terms;
        eq.terms.push_back({s, -1.0});
        eq.rhs = ineq.rhs;
        prob.equalities.push_back(std::move(eq));
        auto& blk = prob.add_block(1);
        blk.entries[0].terms.push_back({s, 1.0});
    }

    const int p = prob.num_vars;
    const int num_blocks = static_cast<int>(prob.blocks.size());

    std::vector<BlockData> bd(num_blocks);
    std::vector<Eigen::Triplet<double>> trip;
    for (int bi = 0; bi < num_blocks; ++bi) {
        const auto& blk = prob.blocks[bi];
        const int dim = blk.dim;
        const int sd = dim * (dim + 1) / 2;
        bd[bi].dim = dim;
        bd[bi].svec_dim = sd;
        bd[bi].constant = Eigen::VectorXd::Zero(sd);
        trip.clear();
        int idx = 0;
        for (int i = 0; i < dim; ++i) {
            for (int j = i; j < dim; ++j, ++idx) {
                const double scale = (i == j) ? 1.0 : kSqrt2;
                const auto& e = blk.entries[idx];
                for (const auto& t : e.terms) trip.emplace_back(idx, t.var, t.coeff * scale);
                bd[bi].constant[idx] = e.constant * scale;
            }
        }
        bd[bi].B.resize(sd, p);
        bd[bi].B.setFromTriplets(trip.begin(), trip.end());
        bd[bi].B.makeCompressed();
    }

    const int me = static_cast<int>(prob.equalities.size());
    Eigen::SparseMatrix<double> A(me, p);
    Eigen::VectorXd b_eq(me);
    {
        trip.clear();
        for (int r = 0; r < me; ++r) {
            for (const auto& t : prob.equalities[r].terms) trip.emplace_back(r, t.var, t.coeff);
            b_eq[r] = prob.equalities[r].rhs;
        }
        A.setFromTriplets(trip.begin(), trip.end());
        A.makeCompressed();
    }

    Eigen::VectorXd c = Eigen::VectorXd::Zero(p);
    if (prob.mode == SolveMode::maximize) {
        for (const auto& t : prob.objective) c[t.var] += t.coeff;
    }

    // KKT = [[D, A^T], [A, -delta I]] with D = sum B^T B; quasi-definite, so the
    // LDL^T factorization is cached once and reused every iteration.
    Eigen::SparseMatrix<double> D(p, p);
    for (const auto& blk : bd) {
        Eigen::SparseMatrix<double> bt = blk.B.transpose();
        D += bt * blk.B;
    }
    const int kn = p + me;
    Eigen::SparseMatrix<double> kkt(kn, kn);
    {
        trip.clear();
        for (int k = 0; k < D.outerSize(); ++k) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(D, k); it; ++it) {
                trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                                  it.value());
            }
        }
        for (int i = 0; i < p; ++i) trip.emplace_back(i, i, 1e-12);
        for (int k = 0; k < A.outerSize(); ++k) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
                trip.emplace_back(p + static_cast<int>(it.row()), static_cast<int>(it.col()),
                                  it.value());
                trip.emplace_back(static_cast<int>(it.col()), p + static_cast<int>(it.row()),
                                  it.value());
            }
        }
        for (int i = 0; i < me; ++i) trip.emplace_back(p + i, p + i, -1e-9);
        kkt.setFromTriplets(trip.begin(), trip.end());
        kkt.makeCompressed();
    }
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> kkt_solver;
    kkt_solver.compute(kkt);
    if (kkt_solver.info() != Eigen::Success)
        throw Error("KKT factorization failed");
    // one step of iterative refinement cancels the -delta I regularization error
    auto kkt_solve = [&](const Eigen::VectorXd& rhs) {
        Eigen::VectorXd x = kkt_solver.solve(rhs);
        x += kkt_solver.solve(rhs - kkt * x);
        // the refined solution solves the regularized system; correct the
        // equality rows for the -delta nu term explicitly
        if (me > 0) {
            Eigen::VectorXd fix = rhs;
            fix.tail(me) += 1e-9 * x.tail(me);
            Eigen::VectorXd x2 = kkt_solver.solve(fix);
            x2 += kkt_solver.solve(fix - kkt * x2);
            return x2;
        }
        return x;
    };

    std::vector<Eigen::VectorXd> z(num_blocks), u(num_blocks);
    for (int bi = 0; bi < num_blocks; ++bi) {
        z[bi] = Eigen::VectorXd::Zero(bd[bi].svec_dim);
        u[bi] = Eigen::VectorXd::Zero(bd[bi].svec_dim);
    }
    if (params.initial_blocks && static_cast<int>(params.initial_blocks->size()) >= 1) {
        const auto& init = *params.initial_blocks;
        for (int bi = 0; bi < num_blocks && bi < static_cast<int>(init.size()); ++bi) {
            if (init[bi].rows() == bd[bi].dim) {
                Eigen::MatrixXd m = init[bi];
                project_psd(m);
                z[bi] = to_svec(m);
            }
        }
    }

    double rho = params.rho;
    const double alpha = params.over_relaxation;
    Eigen::VectorXd kkt_rhs(kn), sol(kn), v(p), nu(me);
    double r_prim = 1.0, r_dual = 1.0;
    double last_obj = std::numeric_limits<double>::infinity();
    int iter = 0;
    bool converged = false;
    const bool trace = std::getenv("POLYMAX_SDP_TRACE") != nullptr;

    for (iter = 1; iter <= params.max_iter; ++iter) {
        kkt_rhs.setZero();
        for (int bi = 0; bi < num_blocks; ++bi) {
            kkt_rhs.head(p).noalias() +=
                bd[bi].B.transpose() * (z[bi] - u[bi] - bd[bi].constant);
        }
        kkt_rhs.head(p) += c / rho;
        kkt_rhs.tail(me) = b_eq;
        sol = kkt_solve(kkt_rhs);
        v = sol.head(p);
        nu = sol.tail(me);

        double prim_num = 0.0, prim_den = 1.0, dual_num = 0.0, dual_den = 1.0;
        for (int bi = 0; bi < num_blocks; ++bi) {
            Eigen::VectorXd w = bd[bi].B * v + bd[bi].constant;
            Eigen::VectorXd w_rel = alpha * w + (1.0 - alpha) * z[bi];
            Eigen::MatrixXd m = from_svec(w_rel + u[bi], bd[bi].dim);
            project_psd(m);
            Eigen::VectorXd z_new = to_svec(m);
            u[bi] += w_rel - z_new;
            prim_num += (w - z_new).squaredNorm();
            prim_den = std::max({prim_den, w.norm(), z_new.norm()});
            dual_num += (bd[bi].B.transpose() * (z_new - z[bi])).squaredNorm();
            dual_den = std::max(dual_den, rho * u[bi].norm());
            z[bi] = std::move(z_new);
        }
        r_prim = std::sqrt(prim_num) / prim_den;
        r_dual = rho * std::sqrt(dual_num) / dual_den;

        if (trace && iter % 100 == 0) {
            std::fprintf(stderr, "iter %6d rho %.3g r_prim %.3e r_dual %.3e obj %.8f\n", iter,
                         rho, r_prim, r_dual, c.dot(v));
        }
        if (r_prim <= params.eps_primal && r_dual <= params.eps_gap) {
            converged = true;
            break;
        }
        // objective plateau at primal feasibility counts as convergence
        if (iter % 50 == 0) {
            double obj_now = c.dot(v);
            if (r_prim <= params.eps_primal &&
                std::abs(obj_now - last_obj) <= params.eps_gap * (1.0 + std::abs(obj_now))) {
                converged = true;
                break;
            }
            last_obj = obj_now;
        }
        if (params.adaptive_rho && r_prim > 1e-5 && iter % 25 == 0 && r_dual > 0.0 &&
            r_prim > 0.0) {
            double factor = std::sqrt(r_prim / r_dual);
            factor = std::min(3.0, std::max(1.0 / 3.0, factor));
            double next = std::min(1e3, std::max(1e-3, rho * factor));
            if (next != rho) {
                double ratio = rho / next;
                rho = next;
                for (auto& ub : u) ub *= ratio;
            }
        }
    }
    if (iter > params.max_iter) iter = params.max_iter;

    SolveResult res;
    res.iterations = iter;
    res.variables = v;

    // Residuals are recomputed from the returned matrices, never trusted from
    // the loop internals.
    res.psd_residual = 0.0;
    double x_scale = 1.0;
    res.block_matrices.reserve(input.blocks.size());
    for (std::size_t bi = 0; bi < input.blocks.size(); ++bi) {
        Eigen::MatrixXd m = from_svec(bd[bi].B * v + bd[bi].constant, bd[bi].dim);
        res.psd_residual = std::min(res.psd_residual, min_eigenvalue(m));
        x_scale = std::max(x_scale, m.norm());
        res.block_matrices.push_back(std::move(m));
    }
    for (std::size_t bi = input.blocks.size(); bi < bd.size(); ++bi) {
        Eigen::MatrixXd m = from_svec(bd[bi].B * v + bd[bi].constant, bd[bi].dim);
        res.psd_residual = std::min(res.psd_residual, min_eigenvalue(m));
    }

    double prim = 0.0;
    for (const auto& eq : input.equalities) {
        double s = -eq.rhs;
        for (const auto& t : eq.terms) s += t.coeff * v[t.var];
        prim = std::max(prim, std::abs(s));
    }
    for (const auto& ineq : input.inequalities) {
        double s = -ineq.rhs;
        for (const auto& t : ineq.terms) s += t.coeff * v[t.var];
        prim = std::max(prim, std::max(0.0, -s));
    }
    res.primal_residual = prim;

    res.objective = input.objective_constant;
    for (const auto& t : input.objective) res.objective += t.coeff * v[t.var];

    // Dual estimates for the gap: y = rho nu, s_b = rho u_b (<= 0 side).
    double pobj = -c.dot(v);
    double dobj = -b_eq.dot(rho * nu);
    for (int bi = 0; bi < num_blocks; ++bi) dobj += rho * u[bi].dot(bd[bi].constant);
    res.gap_estimate = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    // Status is decided by the recomputed residuals; hitting the iteration cap
    // with residuals inside tolerance still counts, stalling outside it never
    // silently claims optimality.
    const double feas_scale = params.eps_primal * (1.0 + x_scale);
    const bool primal_ok = res.primal_residual <= feas_scale &&
                           res.psd_residual >= -params.infeasibility_band * feas_scale;
    const bool settled = converged || (r_prim <= 10.0 * params.eps_primal);
    if (settled && primal_ok) {
        if (input.mode == SolveMode::maximize) {
            res.status = res.gap_estimate <= 100.0 * params.eps_gap || converged
                             ? SolveStatus::optimal
                             : SolveStatus::iteration_limit;
        } else {
            res.status = SolveStatus::feasible;
        }
        if (res.status != SolveStatus::iteration_limit) return res;
    }

    // Iteration limit. For feasibility problems, test the multipliers as an
    // improving ray before claiming anything.
    res.status = SolveStatus::iteration_limit;
    if (input.mode == SolveMode::feasibility) {
        Eigen::VectorXd dres = A.transpose() * (rho * nu);
        for (int bi = 0; bi < num_blocks; ++bi)
            dres += bd[bi].B.transpose() * (rho * u[bi]);
        double improve = -b_eq.dot(rho * nu);
        for (int bi = 0; bi < num_blocks; ++bi)
            improve += rho * u[bi].dot(bd[bi].constant);
        double ray_scale = 0.0;
        ray_scale = std::max(ray_scale, (rho * nu).lpNorm<Eigen::Infinity>());
        for (int bi = 0; bi < num_blocks; ++bi)
            ray_scale = std::max(ray_scale, (rho * u[bi]).lpNorm<Eigen::Infinity>());
        bool cone_ok = true;
        for (int bi = 0; bi < num_blocks && cone_ok; ++bi) {
            Eigen::MatrixXd s = from_svec(rho * u[bi], bd[bi].dim);
            // dual block must be negative semidefinite
            if (-min_eigenvalue(-s) > 1e-6 * (1.0 + ray_scale)) cone_ok = false;
        }
        if (ray_scale > 0.0 && cone_ok &&
            dres.lpNorm<Eigen::Infinity>() <= 1e-6 * (1.0 + ray_scale) &&
            improve > 1e-6 * (1.0 + ray_scale)) {
            res.status = SolveStatus::infeasible_certificate;
        }
    }
    return res;
}

bool counts_as_feasible(const SolveResult& r, const SolveParams& params) {
    if (r.status == SolveStatus::feasible || r.status == SolveStatus::optimal) return true;
    if (r.status == SolveStatus::infeasible_certificate) return false;
    double scale = 1.0;
    for (const auto& m : r.block_matrices) scale = std::max(scale, m.norm());
    const double tol = params.eps_primal * scale;
    const double resid = std::max(r.primal_residual, -r.psd_residual);
    // conservative toward feasibility inside the band
    return resid < params.infeasibility_band * tol;
}

}  // namespace polymax
