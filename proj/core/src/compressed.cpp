#include "polymax/compressed.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "polymax/errors.hpp"

namespace polymax {

void Certificate::write(std::ostream& os) const {
    os << "upper-bound: " << upper_bound << '\n'
       << "alpha-star: " << alpha_star << '\n'
       << "alpha-infeasible: " << alpha_infeasible << '\n'
       << "n: " << n << '\n'
       << "k: " << k << '\n'
       << "domain: " << (domain == Domain::hypercube ? "cube" : "sphere") << '\n'
       << "relaxation: " << relaxation << '\n'
       << "solver-primal-residual: " << solver_primal_residual << '\n'
       << "solver-psd-residual: " << solver_psd_residual << '\n'
       << "rounding-lower-bound: " << rounding_lower_bound << '\n'
       << "soundness-ratio: " << soundness_ratio << '\n'
       << "approximate: " << (approximate ? "yes" : "no") << '\n'
       << "solves: " << solves << '\n';
}

namespace {

// canonical representative of {x, -x}: first nonzero coordinate positive
bool canonical_sign(const Eigen::VectorXd& x) {
    for (int i = 0; i < x.size(); ++i) {
        if (x[i] > 1e-12) return true;
        if (x[i] < -1e-12) return false;
    }
    return true;
}

SymTensor padded_tensor(const SymTensor& t, int padded_n) {
    if (padded_n == t.dimension()) return t;
    SymTensor p(t.order(), padded_n);
    for (const auto& [tuple, c] : t.entries()) p.add(tuple, c);
    return p;
}

}  // namespace

CompressedSdp assemble_compressed(const SymTensor& t, int k, double alpha,
                                  const HittingSet& d, Domain domain,
                                  CompressedGrade grade, bool per_point_inequalities) {
    if (t.order() != 3) throw DimensionError("compressed relaxation needs an order-3 tensor");
    if (alpha < 0.0) throw DimensionError("alpha must be nonnegative");
    const int n = t.dimension();
    (void)k;

    CompressedSdp out;
    out.domain = domain;
    out.alpha = alpha;

    // sign-deduplicated support classes
    std::vector<Eigen::VectorXd> reps;
    std::vector<double> probs;
    for (std::size_t i = 0; i < d.support.size(); ++i) {
        Eigen::VectorXd x = d.support[i];
        if (!canonical_sign(x)) x = -x;
        bool found = false;
        for (std::size_t j = 0; j < reps.size(); ++j) {
            if ((reps[j] - x).lpNorm<Eigen::Infinity>() < 1e-12) {
                probs[j] += d.probabilities[i];
                found = true;
                break;
            }
        }
        if (!found) {
            reps.push_back(std::move(x));
            probs.push_back(d.probabilities[i]);
        }
    }
    out.class_reps = reps;
    out.class_probs = probs;
    const int classes = static_cast<int>(reps.size());

    auto universe = std::make_shared<Universe>();
    const VarKind kind = domain == Domain::hypercube ? VarKind::cube : VarKind::sphere_coord;
    universe->add_group("y", n, kind);
    universe->add_group("z", n, kind);
    universe->add_group("M", classes, VarKind::free_var);
    out.universe = universe;

    const int m_deg = grade == CompressedGrade::rounding ? 3 : 2;

    // B0: (y,z) monomials of degree <= 3 (certificate grade: <= 2)
    MonomialBasis yz_basis = build_basis(
        universe, m_deg, domain,
        [](const Monomial& m, const Universe& u) {
            return group_degree(m, u, 2) == 0;  // no M variables
        });

    MomentAssembler as(universe, domain);
    std::vector<Monomial> union_basis = yz_basis.monomials();
    out.block_indices.push_back({});
    auto& b0_idx = out.block_indices.back();
    for (int i = 0; i < yz_basis.size(); ++i) b0_idx.push_back(i);
    as.add_moment_block(yz_basis.monomials());

    // per-class blocks over {M_c m : deg m <= m_deg}
    for (int c = 0; c < classes; ++c) {
        VarId mvar = universe->var(std::size_t{2}, c);
        std::vector<Monomial> blockb;
        std::vector<int> idx;
        for (const auto& m : yz_basis.monomials()) {
            Monomial mm = m;
            mm.push_back(mvar);
            std::sort(mm.begin(), mm.end());
            idx.push_back(static_cast<int>(union_basis.size()));
            union_basis.push_back(mm);
            blockb.push_back(std::move(mm));
        }
        out.block_indices.push_back(std::move(idx));
        as.add_moment_block(blockb);
    }

    as.add_normalization();
    as.add_sphere_identities(2 * m_deg - 2);

    // the aggregated inequality E_D[M^2(<x,q>^2 - alpha^2)] >= 0 and the
    // normalization E_D[M^2] = 1
    SparsePoly aggregated(universe);
    SparsePoly m_norm(universe);
    for (int c = 0; c < classes; ++c) {
        SparsePoly p(universe);
        {
            // <x_c, q> as a polynomial in (y, z)
            Eigen::VectorXd h = reps[c];
            SymTensor tp = padded_tensor(t, static_cast<int>(h.size()));
            p = hq_polynomial(tp, h, universe, 0, 1);
        }
        SparsePoly m_c = SparsePoly::variable(universe, universe->var(std::size_t{2}, c));
        SparsePoly m2 = m_c * m_c;
        SparsePoly m2p2 = m2 * (p * p);
        SparsePoly term = m2p2 - m2 * SparsePoly::constant(universe, alpha * alpha);
        term *= probs[c];
        aggregated += term;
        SparsePoly mn = m2;
        mn *= probs[c];
        m_norm += mn;
        if (per_point_inequalities) {
            SparsePoly pt = m2p2 - m2 * SparsePoly::constant(universe, alpha * alpha);
            as.add_inequality(pt);
        }
    }
    as.add_inequality(aggregated);
    m_norm -= SparsePoly::constant(universe, 1.0);
    as.add_equality(m_norm);
    as.set_feasibility();

    out.problem = std::move(as.problem());
    out.basis = MonomialBasis(universe, m_deg + 1, domain, union_basis);
    out.block_entry_vars = as.moment_block_vars();
    out.degree = 12;
    return out;
}

PseudoDistribution extract_compressed(const CompressedSdp& sdp, const SolveResult& res) {
    std::vector<PseudoDistribution::Block> blocks;
    for (std::size_t b = 0; b < sdp.block_indices.size(); ++b) {
        PseudoDistribution::Block blk;
        blk.indices = sdp.block_indices[b];
        blk.m = floor_and_retie(res.block_matrices.at(b), sdp.block_entry_vars.at(b), 4);
        blocks.push_back(std::move(blk));
    }
    // renormalize pE[1] = 1 across every block sharing degree-0 structure
    double unit = blocks.front().m(0, 0);
    if (!(unit > 0.0)) throw ExtractionError("compressed extraction lost normalization");
    for (auto& b : blocks) b.m /= unit;
    return PseudoDistribution(sdp.basis, std::move(blocks), sdp.degree, sdp.domain);
}

RoundingOutcome round_compressed(const SymTensor& t, const PseudoDistribution& mu,
                                 const CompressedSdp& sdp, double alpha, Rng rng) {
    RoundingOutcome out;
    const auto universe = sdp.universe;
    const Universe& u = *universe;
    const int classes = static_cast<int>(sdp.class_reps.size());
    const int n = t.dimension();

    // pick the support point with the largest pE[M^2 <x,q>^2] / pE[M^2]
    int best_c = -1;
    double best_ratio = -1.0;
    SparsePoly best_p(universe);
    for (int c = 0; c < classes; ++c) {
        SparsePoly m_c = SparsePoly::variable(universe, u.var(std::size_t{2}, c));
        SparsePoly m2 = m_c * m_c;
        double em2 = mu.pseudo_expectation(m2);
        if (em2 < 1e-9) {
            ++out.degenerate_reweights;
            continue;
        }
        Eigen::VectorXd h = sdp.class_reps[c];
        SymTensor tp = t;
        if (static_cast<int>(h.size()) != n) {
            SymTensor padded(3, static_cast<int>(h.size()));
            for (const auto& [tuple, cc] : t.entries()) padded.add(tuple, cc);
            tp = padded;
        }
        SparsePoly p = hq_polynomial(tp, h, universe, 0, 1);
        double num = mu.pseudo_expectation(m2 * (p * p));
        double ratio = num / em2;
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best_c = c;
            best_p = p;
        }
    }
    if (best_c < 0) {
        out.failure = "all pE[M^2] degenerate";
        return out;
    }
    out.sos = std::sqrt(std::max(0.0, best_ratio));

    SparsePoly m_c = SparsePoly::variable(universe, u.var(std::size_t{2}, best_c));
    PseudoDistribution mu1 = reweight(mu, m_c * m_c);
    ScalarFixResult fix = scalar_fix(mu1, best_p, 1);
    out.branch = fix.branch;

    const Eigen::VectorXd& hfull = sdp.class_reps[best_c];
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) a += hfull[i] * slice_matrix(t, i + 1);

    Eigen::VectorXd ybar, zbar;
    if (sdp.domain == Domain::hypercube) {
        BilinearRounding br = grothendieck_round(fix.mu, a, 64, rng.child("grothendieck"));
        ybar = br.y;
        zbar = br.z;
    } else {
        BilinearRounding br = sphere_bilinear_round(a);
        ybar = br.y;
        zbar = br.z;
    }

    // padded coordinates multiply zero tensor entries; restrict and, on the
    // sphere, renormalize (which can only increase the value)
    Eigen::VectorXd xbar = hfull.head(n);
    if (sdp.domain == Domain::sphere) {
        if (xbar.norm() < 1e-9) {
            out.failure = "support point concentrated on padding";
            return out;
        }
        xbar.normalize();
    }
    double value = eval_decoupled(t, xbar, ybar, zbar);
    if (-value > value) {
        xbar = -xbar;
        value = -value;
    }
    out.assignment = {xbar, ybar, zbar};
    out.value = value;
    out.direction = xbar;
    out.ok = true;
    out.trials = 1;
    (void)alpha;
    return out;
}

Certificate certify_binary_search(const SymTensor& t, int k, Domain domain,
                                  const CertifyParams& params, Rng rng) {
    Certificate cert;
    cert.n = t.dimension();
    cert.k = k;
    cert.domain = domain;

    const double norm1 = t.norm1();
    HittingSet d = domain == Domain::hypercube ? blockwise_hypercube_set(t.dimension(), k)
                                               : blockwise_sphere_set(t.dimension(), k);

    if (norm1 == 0.0) {
        cert.upper_bound = 0.0;
        cert.alpha_star = 0.0;
        cert.relaxation = "zero tensor";
        return cert;
    }

    double lo = 0.0;  // alpha = 0 is always feasible
    double hi = params.alpha_hi > 0.0 ? params.alpha_hi : norm1;
    bool hi_infeasible = false;

    std::optional<CompressedSdp> best_sdp;
    std::optional<SolveResult> best_res;
    std::optional<std::vector<Eigen::MatrixXd>> warm;

    auto probe = [&](double alpha) {
        CompressedSdp sdp = assemble_compressed(t, k, alpha, d, domain, params.grade);
        SolveParams sp = params.solve;
        if (warm) sp.initial_blocks = warm;
        SolveResult res = solve(sdp.problem, sp);
        ++cert.solves;
        bool feasible = counts_as_feasible(res, sp);
        if (feasible) {
            warm = res.block_matrices;
            best_sdp = std::move(sdp);
            best_res = std::move(res);
        }
        return feasible;
    };

    // establish an infeasible upper end before bisection
    if (probe(hi)) {
        lo = hi;
    } else {
        hi_infeasible = true;
    }
    int iters = params.iters;
    while (iters-- > 0 && hi_infeasible && (hi - lo) > params.bracket_rel * norm1) {
        double mid = 0.5 * (lo + hi);
        if (probe(mid)) lo = mid;
        else hi = mid;
    }
    cert.alpha_star = lo;
    cert.alpha_infeasible = hi_infeasible ? hi : -1.0;

    // Completeness chain: some support point sees c sqrt(k/n) of the optimum
    // (c = 3/32 on the cube via 4-wise Paley-Zygmund, 1 - eps on the sphere via
    // the net), and Markov over the support adds the p_min^{1/2k} correction.
    // The planted lift is feasible below chain x OPT, so infeasibility at
    // alpha bounds OPT above by alpha / chain.
    const double c_dir = domain == Domain::hypercube
                             ? default_constants().hitting_const
                             : 1.0 - default_constants().net_eps;
    const double p_min = 2.0 / static_cast<double>(d.support.size());  // sign classes
    const double chain = c_dir * std::sqrt(static_cast<double>(k) / d.padded_n) *
                         std::pow(p_min, 1.0 / (2.0 * k));
    double upper = norm1;
    if (hi_infeasible) upper = std::min(norm1, hi / chain);
    cert.upper_bound = upper;

    std::ostringstream desc;
    desc << "degree-12 compressed, classes=" << (best_sdp ? best_sdp->class_reps.size() : 0)
         << ", grade=" << (params.grade == CompressedGrade::rounding ? "rounding" : "certificate")
         << ", support=" << d.support.size() << ", block-len=" << d.block_length;
    cert.relaxation = desc.str();

    if (best_res) {
        cert.solver_primal_residual = best_res->primal_residual;
        cert.solver_psd_residual = best_res->psd_residual;
        cert.approximate = best_res->primal_residual > 1e-5;
    }

    if (params.do_rounding && best_sdp && best_res && params.grade == CompressedGrade::rounding &&
        cert.alpha_star > 0.0) {
        try {
            PseudoDistribution mu = extract_compressed(*best_sdp, *best_res);
            RoundingOutcome ro = round_compressed(t, mu, *best_sdp, cert.alpha_star,
                                                  rng.child("round"));
            if (ro.ok) cert.rounding_lower_bound = ro.value;
        } catch (const Error&) {
            cert.rounding_lower_bound = 0.0;
        }
    }
    cert.soundness_ratio =
        cert.rounding_lower_bound > 1e-12 ? cert.upper_bound / cert.rounding_lower_bound : 0.0;
    return cert;
}

Certificate simple_sqrtn_certificate(const SymTensor& t, Rng rng, int round_trials) {
    if (t.order() != 3) throw DimensionError("simple_sqrtn_certificate needs order 3");
    Certificate cert;
    const int n = t.dimension();
    cert.n = n;
    cert.k = 1;
    cert.domain = Domain::hypercube;

    if (t.norm1() == 0.0) {
        cert.relaxation = "zero tensor";
        return cert;
    }

    HittingSet d = pairwise_set(n);
    double r = 0.0;
    double best_value = -std::numeric_limits<double>::infinity();
    std::size_t idx = 0;
    for (const auto& xhat : d.support) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) a += xhat[i] * slice_matrix(t, i + 1);
        SosRelaxation rel = assemble_bilinear_sdp(a, Domain::hypercube);
        SolveParams sp;
        sp.max_iter = 4000;
        SolveResult res = solve(rel.problem, sp);
        ++cert.solves;
        r = std::max(r, res.objective);
        cert.solver_primal_residual = std::max(cert.solver_primal_residual, res.primal_residual);
        cert.solver_psd_residual = std::min(cert.solver_psd_residual, res.psd_residual);
        try {
            PseudoDistribution mu = extract_pseudodistribution(rel, res);
            BilinearRounding br =
                grothendieck_round(mu, a, round_trials, rng.child(idx));
            double v = eval_decoupled(t, xhat, br.y, br.z);
            if (v > best_value) best_value = v;
        } catch (const Error&) {
        }
        ++idx;
    }
    cert.alpha_star = r;
    cert.upper_bound = r * std::sqrt(static_cast<double>(n));
    cert.rounding_lower_bound = best_value;
    cert.soundness_ratio = best_value > 1e-12 ? cert.upper_bound / best_value : 0.0;
    std::ostringstream desc;
    desc << "pairwise sqrt(n) certificate, support=" << d.support.size();
    cert.relaxation = desc.str();
    return cert;
}

}  // namespace polymax
