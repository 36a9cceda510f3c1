#include "polymax/assemble.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "polymax/errors.hpp"

namespace polymax {

MomentAssembler::MomentAssembler(std::shared_ptr<const Universe> universe, Domain domain)
    : universe_(std::move(universe)), domain_(domain) {}

int MomentAssembler::var_of(const Monomial& reduced) {
    auto it = var_ids_.find(reduced);
    if (it != var_ids_.end()) return it->second;
    int id = problem_.new_var();
    var_ids_.emplace(reduced, id);
    var_monomials_.push_back(reduced);
    return id;
}

int MomentAssembler::find_var(const Monomial& reduced) const {
    auto it = var_ids_.find(reduced);
    return it == var_ids_.end() ? -1 : it->second;
}

int MomentAssembler::add_moment_block(const std::vector<Monomial>& monomials) {
    const int dim = static_cast<int>(monomials.size());
    auto& blk = problem_.add_block(dim);
    std::vector<int> entry_vars(static_cast<std::size_t>(dim) * (dim + 1) / 2);
    int idx = 0;
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j, ++idx) {
            int v = var_of(multiply(monomials[i], monomials[j], *universe_));
            blk.entries[idx].terms.push_back({v, 1.0});
            entry_vars[idx] = v;
        }
    }
    int block_id = static_cast<int>(problem_.blocks.size()) - 1;
    moment_blocks_.push_back(block_id);
    block_vars_.push_back(std::move(entry_vars));
    return block_id;
}

int MomentAssembler::add_localizing_block(const SparsePoly& g,
                                          const std::vector<Monomial>& monomials) {
    const int dim = static_cast<int>(monomials.size());
    auto& blk = problem_.add_block(dim);
    int idx = 0;
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j, ++idx) {
            Monomial uv = multiply(monomials[i], monomials[j], *universe_);
            for (const auto& [w, c] : g.terms()) {
                int v = var_of(multiply(uv, w, *universe_));
                blk.entries[idx].terms.push_back({v, c});
            }
        }
    }
    return static_cast<int>(problem_.blocks.size()) - 1;
}

void MomentAssembler::add_normalization() {
    LinearConstraint eq;
    eq.terms.push_back({var_of(Monomial{}), 1.0});
    eq.rhs = 1.0;
    problem_.equalities.push_back(std::move(eq));
}

void MomentAssembler::add_equality(const SparsePoly& g) {
    LinearConstraint eq;
    eq.rhs = 0.0;
    for (const auto& [m, c] : g.terms()) {
        if (m.empty()) {
            eq.rhs -= c;
            continue;
        }
        eq.terms.push_back({var_of(m), c});
    }
    // move constant to rhs with the right sign: sum c var = -const
    problem_.equalities.push_back(std::move(eq));
}

void MomentAssembler::add_inequality(const SparsePoly& g) {
    LinearConstraint ineq;
    ineq.rhs = 0.0;
    for (const auto& [m, c] : g.terms()) {
        if (m.empty()) {
            ineq.rhs -= c;
            continue;
        }
        ineq.terms.push_back({var_of(m), c});
    }
    problem_.inequalities.push_back(std::move(ineq));
}

void MomentAssembler::add_sphere_identities(int max_degree) {
    if (domain_ != Domain::sphere) return;
    // snapshot: identity rows must not mint new variables
    const auto monomials = var_monomials_;
    for (const auto& m : monomials) {
        if (degree(m) > max_degree) continue;
        for (const auto& g : universe_->groups()) {
            if (g.kind != VarKind::sphere_coord) continue;
            LinearConstraint eq;
            bool ok = true;
            for (int i = 0; i < g.count; ++i) {
                VarId v = g.first + static_cast<VarId>(i);
                int id = find_var(multiply(m, Monomial{v, v}, *universe_));
                if (id < 0) {
                    ok = false;
                    break;
                }
                eq.terms.push_back({id, 1.0});
            }
            if (!ok) continue;
            eq.terms.push_back({find_var(m), -1.0});
            eq.rhs = 0.0;
            problem_.equalities.push_back(std::move(eq));
        }
    }
}

void MomentAssembler::set_objective_maximize(const SparsePoly& f) {
    problem_.mode = SolveMode::maximize;
    problem_.objective.clear();
    problem_.objective_constant = 0.0;
    for (const auto& [m, c] : f.terms()) {
        if (m.empty()) {
            problem_.objective_constant += c;
            continue;
        }
        int id = find_var(m);
        if (id < 0)
            throw BasisCoverageError("objective monomial not covered by the moment basis: " +
                                     to_string(m, *universe_));
        problem_.objective.push_back({id, c});
    }
}

void MomentAssembler::set_feasibility() {
    problem_.mode = SolveMode::feasibility;
    problem_.objective.clear();
}

namespace {

// Decoupled objective: spread each orbit's total coefficient as c/d! over the
// d! assignments of its indices to the variable groups.
SparsePoly decoupled_objective(const SymTensor& t,
                               const std::shared_ptr<const Universe>& u) {
    const int d = t.order();
    double dfact = 1.0;
    for (int i = 2; i <= d; ++i) dfact *= i;
    SparsePoly f(u);
    std::vector<int> perm(d);
    for (const auto& [tuple, c] : t.entries()) {
        std::iota(perm.begin(), perm.end(), 0);
        do {
            Monomial m;
            m.reserve(d);
            for (int pos = 0; pos < d; ++pos)
                m.push_back(u->var(static_cast<std::size_t>(pos), tuple[perm[pos]] - 1));
            f.add_term(std::move(m), c / dfact);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return f;
}

SparsePoly coupled_objective(const SymTensor& t, const std::shared_ptr<const Universe>& u) {
    SparsePoly f(u);
    for (const auto& [tuple, c] : t.entries()) {
        Monomial m;
        m.reserve(tuple.size());
        for (int idx : tuple) m.push_back(u->var(std::size_t{0}, idx - 1));
        f.add_term(std::move(m), c);
    }
    return f;
}

}  // namespace

SosRelaxation assemble_sos_sdp(const SymTensor& t, int degree, Domain domain, bool decoupled,
                               const std::vector<Axiom>& axioms, const BasisFilter& filter,
                               std::size_t basis_cap) {
    if (degree % 2 != 0) throw DimensionError("relaxation degree must be even");
    const int n = t.dimension();
    const int d = t.order();

    auto universe = decoupled ? make_decoupled_universe(n, d, domain)
                              : make_coupled_universe(n, domain);
    BasisFilter f = filter;
    if (!f && decoupled && d == 3 && degree >= 6) f = decoupled_cubic_filter();
    if (!f && decoupled && d > 3) f = decoupled_hd_filter();

    MonomialBasis basis = build_basis(universe, degree / 2, domain, f, basis_cap);

    MomentAssembler as(universe, domain);
    SosRelaxation rel;
    rel.main_block = as.add_moment_block(basis.monomials());
    as.add_normalization();

    for (const auto& ax : axioms) {
        if (ax.equality) {
            // pE[g m] = 0 for every basis monomial within the degree budget
            for (const auto& m : basis.monomials()) {
                if (2 * polymax::degree(m) > degree - ax.poly.degree()) continue;
                if (ax.localizing_filter && !ax.localizing_filter(m, *universe)) continue;
                SparsePoly gm = ax.poly;
                SparsePoly mm(universe);
                mm.add_term(m, 1.0);
                as.add_equality(gm * mm);
            }
            continue;
        }
        std::vector<Monomial> loc;
        for (const auto& m : basis.monomials()) {
            if (2 * polymax::degree(m) + ax.poly.degree() > degree) continue;
            if (ax.localizing_filter && !ax.localizing_filter(m, *universe)) continue;
            loc.push_back(m);
        }
        if (loc.empty()) throw DimensionError("axiom degree exceeds the relaxation degree");
        as.add_localizing_block(ax.poly, loc);
    }

    as.add_sphere_identities(degree - 2);

    SparsePoly obj = decoupled ? decoupled_objective(t, universe) : coupled_objective(t, universe);
    as.set_objective_maximize(obj);

    rel.problem = std::move(as.problem());
    rel.basis = std::move(basis);
    rel.main_entry_vars = as.moment_block_vars().front();
    rel.degree = degree;
    rel.domain = domain;
    rel.tensor_norm1 = t.norm1();
    return rel;
}

SosRelaxation assemble_bilinear_sdp(const Eigen::MatrixXd& m, Domain domain) {
    const int n = static_cast<int>(m.rows());
    auto universe = std::make_shared<Universe>();
    const VarKind kind = domain == Domain::hypercube ? VarKind::cube : VarKind::sphere_coord;
    universe->add_group("y", n, kind);
    universe->add_group("z", static_cast<int>(m.cols()), kind);
    MonomialBasis basis = build_basis(universe, 1, domain);

    MomentAssembler as(universe, domain);
    SosRelaxation rel;
    rel.main_block = as.add_moment_block(basis.monomials());
    as.add_normalization();
    as.add_sphere_identities(0);

    SparsePoly obj(universe);
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (m(i, j) == 0.0) continue;
            obj.add_term({universe->var(std::size_t{0}, i), universe->var(std::size_t{1}, j)},
                         m(i, j));
        }
    }
    as.set_objective_maximize(obj);

    rel.problem = std::move(as.problem());
    rel.basis = std::move(basis);
    rel.main_entry_vars = as.moment_block_vars().front();
    rel.degree = 2;
    rel.domain = domain;
    rel.tensor_norm1 = m.cwiseAbs().sum();
    return rel;
}

SosRelaxation assemble_quadratic_sdp(const Eigen::MatrixXd& m, Domain domain,
                                     const std::vector<Axiom>& axioms, SolveMode mode) {
    const int n = static_cast<int>(m.rows());
    auto universe = make_coupled_universe(n, domain);
    MonomialBasis basis = build_basis(universe, 1, domain);

    MomentAssembler as(universe, domain);
    SosRelaxation rel;
    rel.main_block = as.add_moment_block(basis.monomials());
    as.add_normalization();
    as.add_sphere_identities(0);

    for (const auto& ax : axioms) {
        if (ax.equality) as.add_equality(ax.poly);
        else as.add_inequality(ax.poly);
    }

    if (mode == SolveMode::maximize) {
        SparsePoly obj(universe);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (m(i, j) == 0.0) continue;
                obj.add_term({universe->var(std::size_t{0}, i), universe->var(std::size_t{0}, j)},
                             m(i, j));
            }
        }
        as.set_objective_maximize(obj);
    } else {
        as.set_feasibility();
    }

    rel.problem = std::move(as.problem());
    rel.basis = std::move(basis);
    rel.main_entry_vars = as.moment_block_vars().front();
    rel.degree = 2;
    rel.domain = domain;
    rel.tensor_norm1 = m.cwiseAbs().sum();
    return rel;
}

Eigen::MatrixXd floor_and_retie(Eigen::MatrixXd m, const std::vector<int>& entry_vars,
                                int rounds) {
    const int dim = static_cast<int>(m.rows());
    // positions per variable id
    std::unordered_map<int, std::vector<std::pair<int, int>>> groups;
    int idx = 0;
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j, ++idx) groups[entry_vars[idx]].push_back({i, j});
    }
    auto retie = [&]() {
        for (const auto& [var, pos] : groups) {
            (void)var;
            double avg = 0.0;
            for (auto [i, j] : pos) avg += m(i, j);
            avg /= static_cast<double>(pos.size());
            for (auto [i, j] : pos) {
                m(i, j) = avg;
                m(j, i) = avg;
            }
        }
    };
    for (int r = 0; r < rounds; ++r) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
        if (es.eigenvalues().minCoeff() >= 0.0 && r > 0) break;
        m = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() *
            es.eigenvectors().transpose();
        retie();
    }
    return m;
}

PseudoDistribution extract_pseudodistribution(const SosRelaxation& rel, const SolveResult& res,
                                              const Tolerances& tol) {
    if (!res.usable())
        throw ExtractionError("cannot extract from a solve with status " +
                              to_string(res.status));
    Eigen::MatrixXd m = res.block_matrices.at(rel.main_block);

    double obj_before = rel.problem.objective_constant;
    for (const auto& t : rel.problem.objective) obj_before += t.coeff * res.variables[t.var];

    m = floor_and_retie(std::move(m), rel.main_entry_vars, 4);
    const double unit = m(0, 0);
    if (!(unit > 0.0)) throw ExtractionError("extraction lost normalization");
    m /= unit;

    // objective after repair, reconstructed through the entry/var map
    std::unordered_map<int, double> var_value;
    int idx = 0;
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = i; j < m.cols(); ++j, ++idx) {
            var_value.emplace(rel.main_entry_vars[idx], m(i, j));
        }
    }
    double obj_after = rel.problem.objective_constant;
    bool obj_complete = true;
    for (const auto& t : rel.problem.objective) {
        auto it = var_value.find(t.var);
        if (it == var_value.end()) {
            obj_complete = false;
            break;
        }
        obj_after += t.coeff * it->second;
    }
    if (obj_complete && rel.tensor_norm1 > 0.0 &&
        std::abs(obj_after - obj_before) > tol.extraction_obj_rel * rel.tensor_norm1) {
        throw ExtractionError("extraction repair moved the objective beyond tolerance");
    }

    return PseudoDistribution(rel.basis, std::move(m), rel.degree, rel.domain);
}

void write_sdp(std::ostream& os, const SDPProblem& p) {
    os << p.num_vars << ' ' << p.blocks.size() << ' ' << p.equalities.size() << ' '
       << p.inequalities.size() << ' '
       << (p.mode == SolveMode::maximize ? "maximize" : "feasibility") << '\n';
    for (const auto& b : p.blocks) {
        os << "block " << b.dim << '\n';
        int idx = 0;
        for (int i = 0; i < b.dim; ++i) {
            for (int j = i; j < b.dim; ++j, ++idx) {
                const auto& e = b.entries[idx];
                if (e.terms.empty() && e.constant == 0.0) continue;
                os << i << ' ' << j << ':';
                for (const auto& t : e.terms) os << ' ' << t.coeff << "*v" << t.var;
                if (e.constant != 0.0) os << " + " << e.constant;
                os << '\n';
            }
        }
    }
    auto dump_rows = [&os](const std::vector<LinearConstraint>& rows, const char* tag) {
        for (const auto& r : rows) {
            os << tag << ' ';
            for (const auto& t : r.terms) os << t.coeff << "*v" << t.var << ' ';
            os << (tag[0] == 'e' ? "= " : ">= ") << r.rhs << '\n';
        }
    };
    dump_rows(p.equalities, "eq");
    dump_rows(p.inequalities, "ineq");
    os << "objective";
    for (const auto& t : p.objective) os << ' ' << t.coeff << "*v" << t.var;
    os << '\n';
}

}  // namespace polymax
