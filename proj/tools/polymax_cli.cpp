// Command-line surface: instance generation, solve/round/certify pipelines,
// 3SAT solving, and benchmark CSV emission.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "polymax/assemble.hpp"
#include "polymax/baselines.hpp"
#include "polymax/compressed.hpp"
#include "polymax/report.hpp"
#include "polymax/roundings.hpp"
#include "polymax/threesat.hpp"

using namespace polymax;

namespace {

struct RunConfig {
    std::string input;
    std::string output;
    int n = 4;
    int k = 1;
    int d = 3;
    std::string domain = "cube";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int trials = 0;
    int instances = 10;
    int m_clauses = 0;
    int degree = 6;
    std::string type = "gaussian";
    std::string format = "text";
    std::string dump_moments;
    std::string dump_sdp;
    bool timings = false;
    bool simple = false;
    bool full_basis = false;
    double tol_primal = 1e-6;
    double tol_gap = 1e-6;
    int max_iter = 50000;
};

Domain parse_domain(const std::string& s) {
    if (s == "cube") return Domain::hypercube;
    if (s == "sphere") return Domain::sphere;
    throw CLI::ValidationError("--domain must be cube or sphere");
}

std::ostream& open_out(const RunConfig& cfg, std::ofstream& file) {
    if (cfg.output.empty()) return std::cout;
    file.open(cfg.output);
    if (!file) throw IoError("cannot open output: " + cfg.output);
    return file;
}

SymTensor load_input_tensor(const RunConfig& cfg) {
    if (cfg.input.empty()) throw IoError("--in is required");
    return load_tensor(cfg.input);
}

SymTensor gen_tensor(const RunConfig& cfg, Rng& rng) {
    if (cfg.type == "planted") {
        Eigen::VectorXd s(cfg.n);
        for (int i = 0; i < cfg.n; ++i) s[i] = static_cast<double>(rng.sign());
        SymTensor t(3, cfg.n);
        for (int i = 1; i <= cfg.n; ++i)
            for (int j = i + 1; j <= cfg.n; ++j)
                for (int kk = j + 1; kk <= cfg.n; ++kk)
                    t.add({i, j, kk}, s[i - 1] * s[j - 1] * s[kk - 1]);
        return t;
    }
    // gaussian
    SymTensor t(cfg.d, cfg.n);
    std::vector<int> tuple(cfg.d);
    for (int i = 0; i < cfg.d; ++i) tuple[i] = i + 1;
    while (true) {
        t.add(tuple, rng.gaussian());
        int pos = cfg.d - 1;
        while (pos >= 0 && tuple[pos] == cfg.n - (cfg.d - 1 - pos)) --pos;
        if (pos < 0) break;
        ++tuple[pos];
        for (int i = pos + 1; i < cfg.d; ++i) tuple[i] = tuple[i - 1] + 1;
    }
    return t;
}

int cmd_gen(const RunConfig& cfg) {
    Rng rng(cfg.seed);
    std::ofstream file;
    std::ostream& os = open_out(cfg, file);
    if (cfg.type == "cnf") {
        int m = cfg.m_clauses > 0 ? cfg.m_clauses : 4 * cfg.n;
        PlantedInstance inst = planted_3sat(cfg.n, m, rng);
        os << "c planted satisfiable instance\n";
        os << "p cnf " << inst.formula.n << ' ' << inst.formula.clauses.size() << '\n';
        for (const auto& c : inst.formula.clauses) {
            for (int i = 0; i < 3; ++i) os << c.signs[i] * c.vars[i] << ' ';
            os << "0\n";
        }
        return 0;
    }
    write_tensor(os, gen_tensor(cfg, rng));
    return 0;
}

SolveParams solve_params(const RunConfig& cfg) {
    SolveParams sp;
    sp.max_iter = cfg.max_iter;
    sp.eps_primal = cfg.tol_primal;
    sp.eps_gap = cfg.tol_gap;
    return sp;
}

int cmd_solve(const RunConfig& cfg) {
    SymTensor t = load_input_tensor(cfg);
    Domain dom = parse_domain(cfg.domain);
    BasisFilter filter;
    if (cfg.full_basis) filter = [](const Monomial&, const Universe&) { return true; };
    SosRelaxation rel = assemble_sos_sdp(t, cfg.degree, dom, true, {}, filter);
    if (!cfg.dump_sdp.empty()) {
        std::ofstream f(cfg.dump_sdp);
        write_sdp(f, rel.problem);
    }
    SolveResult res = solve(rel.problem, solve_params(cfg));
    std::ofstream file;
    std::ostream& os = open_out(cfg, file);
    os << "status: " << to_string(res.status) << '\n';
    os << "SOS: " << res.objective << '\n';
    os << "iterations: " << res.iterations << '\n';
    os << "primal-residual: " << res.primal_residual << '\n';
    os << "psd-residual: " << res.psd_residual << '\n';
    if (!cfg.dump_moments.empty()) {
        PseudoDistribution mu = extract_pseudodistribution(rel, res);
        std::ofstream f(cfg.dump_moments);
        write_moments(f, mu);
    }
    return res.usable() ? 0 : 1;
}

int cmd_round(const RunConfig& cfg) {
    SymTensor t = load_input_tensor(cfg);
    Domain dom = parse_domain(cfg.domain);
    const int degree = t.order() == 3 ? 6 * cfg.k : 2 * t.order();
    BasisFilter filter;
    if (cfg.full_basis) filter = [](const Monomial&, const Universe&) { return true; };
    SosRelaxation rel = assemble_sos_sdp(t, degree, dom, true, {}, filter);
    SolveResult res = solve(rel.problem, solve_params(cfg));
    PseudoDistribution mu = extract_pseudodistribution(rel, res);
    Rng rng(cfg.seed);
    RoundingOutcome out;
    if (t.order() == 3) {
        out = dom == Domain::hypercube
                  ? round_cubic_deg6k(t, mu, cfg.k, cfg.trials, rng)
                  : round_cubic_sphere(t, mu, cfg.k, cfg.trials, rng);
    } else {
        out = round_high_degree(t, mu, cfg.trials, rng);
    }
    std::ofstream file;
    std::ostream& os = open_out(cfg, file);
    os << "SOS: " << out.sos << '\n';
    os << "rounded: " << out.value << '\n';
    os << "ratio: " << (out.sos > 0 ? out.value / out.sos : 0.0) << '\n';
    os << "trials: " << out.trials << '\n';
    os << "pz-hits: " << out.paley_zygmund_hits << '\n';
    os << "branch: " << out.branch << '\n';
    if (!out.ok) {
        os << "failure: " << out.failure << '\n';
        return 1;
    }
    return 0;
}

int cmd_certify(const RunConfig& cfg) {
    SymTensor t = load_input_tensor(cfg);
    Rng rng(cfg.seed);
    Certificate cert;
    if (cfg.simple) {
        cert = simple_sqrtn_certificate(t, rng);
    } else {
        CertifyParams params;
        params.solve = solve_params(cfg);
        params.solve.max_iter = std::min(cfg.max_iter, 4000);
        cert = certify_binary_search(t, cfg.k, parse_domain(cfg.domain), params, rng);
    }
    std::ofstream file;
    std::ostream& os = open_out(cfg, file);
    cert.write(os);
    return 0;
}

int cmd_3sat(const RunConfig& cfg) {
    CnfFormula f;
    if (cfg.input.empty() || cfg.input == "-") {
        f = parse_dimacs(std::cin);
    } else {
        std::ifstream in(cfg.input);
        if (!in) throw IoError("cannot open input: " + cfg.input);
        f = parse_dimacs(in);
    }
    ThreeSatResult res = solve_3sat(f, cfg.seed);
    std::ofstream file;
    std::ostream& os = open_out(cfg, file);
    for (int i = 0; i < res.assignment.size(); ++i) {
        if (i) os << ' ';
        os << (res.assignment[i] > 0 ? 1 : -1);
    }
    os << '\n';
    os << "fraction: " << res.fraction.str() << '\n';
    os << "branch: " << res.branch << '\n';
    os << "diagnostics: " << res.diagnostics << '\n';
    return 0;
}

int cmd_bench(const RunConfig& cfg) {
    Domain dom = parse_domain(cfg.domain);
    std::ofstream file;
    std::ostream& os = open_out(cfg, file);
    write_csv_header(os);
    for (int inst = 0; inst < cfg.instances; ++inst) {
        Rng rng = Rng(cfg.seed).child("bench").child(static_cast<std::uint64_t>(inst));
        RunConfig gen_cfg = cfg;
        SymTensor t = gen_tensor(gen_cfg, rng);
        auto start = std::chrono::steady_clock::now();

        SosRelaxation rel = assemble_sos_sdp(t, 6 * cfg.k, dom, true);
        SolveResult res = solve(rel.problem, solve_params(cfg));
        PseudoDistribution mu = extract_pseudodistribution(rel, res);
        RoundingOutcome out = dom == Domain::hypercube
                                  ? round_cubic_deg6k(t, mu, cfg.k, cfg.trials, rng.child("r"))
                                  : round_cubic_sphere(t, mu, cfg.k, cfg.trials, rng.child("r"));
        double opt = 0.0;
        if (dom == Domain::hypercube && cfg.n <= 12) {
            opt = brute_force_cubic_hypercube(t).value;
        } else if (dom == Domain::sphere) {
            opt = als_sphere_lower_bound(t, 8, rng.child("als")).value;
        }
        auto stop = std::chrono::steady_clock::now();

        RunRecord rec;
        rec.instance_id = "inst" + std::to_string(inst);
        rec.n = cfg.n;
        rec.k = cfg.k;
        rec.domain = cfg.domain;
        rec.sos = res.objective;
        rec.opt_or_bound = opt;
        rec.rounded = out.value;
        rec.ratio = out.sos > 0 ? out.value / out.sos : 0.0;
        rec.seconds = cfg.timings
                          ? std::chrono::duration<double>(stop - start).count()
                          : 0.0;
        rec.seed = cfg.seed;
        write_csv_row(os, rec);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sum-of-squares maximization of multilinear polynomials over the "
                 "hypercube and the unit sphere"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub, bool needs_seed) {
        sub->add_option("--in", cfg.input, "input file");
        sub->add_option("--out", cfg.output, "output file (default stdout)");
        sub->add_option("--n", cfg.n, "dimension");
        sub->add_option("--k", cfg.k, "level parameter k");
        sub->add_option("--d", cfg.d, "tensor order");
        sub->add_option("--domain", cfg.domain, "cube | sphere");
        auto* seed = sub->add_option("--seed", cfg.seed, "RNG seed");
        if (needs_seed) seed->required();
        sub->add_option("--trials", cfg.trials, "rounding trials (0 = default 64n)");
        sub->add_option("--tol-primal", cfg.tol_primal, "solver primal tolerance");
        sub->add_option("--tol-gap", cfg.tol_gap, "solver gap tolerance");
        sub->add_option("--max-iter", cfg.max_iter, "solver iteration budget");
        sub->add_option("--format", cfg.format, "text | csv | report");
    };

    auto* gen = app.add_subcommand("gen", "generate tensors or planted 3SAT instances");
    add_common(gen, true);
    gen->add_option("--type", cfg.type, "gaussian | planted | cnf");
    gen->add_option("--m", cfg.m_clauses, "clause count for cnf");

    auto* sol = app.add_subcommand("solve", "solve the canonical relaxation, print SOS");
    add_common(sol, false);
    sol->add_option("--degree", cfg.degree, "relaxation degree (even)");
    sol->add_option("--dump-moments", cfg.dump_moments, "write the moment matrix here");
    sol->add_option("--dump-sdp", cfg.dump_sdp, "write the assembled SDP here");
    sol->add_flag("--full-basis", cfg.full_basis, "disable the pattern restriction");

    auto* rnd = app.add_subcommand("round", "solve + rounding pipeline");
    add_common(rnd, true);
    rnd->add_flag("--full-basis", cfg.full_basis, "disable the pattern restriction");

    auto* cert = app.add_subcommand("certify", "compressed-SDP certificate via binary search");
    add_common(cert, true);
    cert->add_flag("--simple", cfg.simple, "pairwise-independent sqrt(n) certificate");

    auto* sat = app.add_subcommand("3sat", "satisfiable Max-3SAT pipeline");
    add_common(sat, true);

    auto* bench = app.add_subcommand("bench", "sweep instances, emit CSV");
    add_common(bench, true);
    bench->add_option("--instances", cfg.instances, "instance count");
    bench->add_flag("--timings", cfg.timings, "fill the seconds column (non-reproducible)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(cfg);
        if (sol->parsed()) return cmd_solve(cfg);
        if (rnd->parsed()) return cmd_round(cfg);
        if (cert->parsed()) return cmd_certify(cfg);
        if (sat->parsed()) return cmd_3sat(cfg);
        if (bench->parsed()) return cmd_bench(cfg);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
