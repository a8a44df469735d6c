// Command-line driver for the 1-D FEM/GFEM/SGFEM laboratory.
//
// Subcommands: element, solve, convergence, condition, eta, assumptions,
// bauer. Exit codes: 0 success, 2 assertion-style check failed, 1
// runtime error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "sgfem1d/studies.hpp"

using namespace sgfem;

namespace {

struct CommonOpts {
    std::string problem = "smooth";
    std::string problem_file;
    std::string method = "sgfem";
    std::vector<int> n_list;
    double alpha = 0.75;
    double beta = -1.0;
    double c = 0.5;
    double b_star = 0.37;
    double b1 = 0.3, b2 = 0.7;
    double zone = 0.25;
    std::string out_csv;
    std::string plot_svg;
    int quad_order = 8;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--problem", o.problem,
                    "smooth|interface1|interface2|singular|discontinuous|"
                    "validation1a|validation1b|validation3|validation4");
    cmd->add_option("--problem-file", o.problem_file, "read a serialized problem descriptor");
    cmd->add_option("--method", o.method, "fem|gfem|sgfem");
    cmd->add_option("--n-list", o.n_list, "mesh sizes")->delimiter(',');
    cmd->add_option("--alpha", o.alpha, "singular exponent");
    cmd->add_option("--beta", o.beta, "position within the containing element");
    cmd->add_option("--c", o.c, "crack point");
    cmd->add_option("--b-star", o.b_star, "interface point (a1)");
    cmd->add_option("--b1", o.b1, "first interface point (a2)");
    cmd->add_option("--b2", o.b2, "second interface point (a2)");
    cmd->add_option("--zone", o.zone, "singular enrichment zone extent D");
    cmd->add_option("--out", o.out_csv, "write records as CSV");
    cmd->add_option("--plot", o.plot_svg, "write a log-log SVG plot");
    cmd->add_option("--quad-order", o.quad_order, "Gauss points per panel");
}

Problem problem_from(const CommonOpts& o) {
    if (!o.problem_file.empty()) {
        std::ifstream is(o.problem_file);
        if (!is) throw std::runtime_error("cannot open " + o.problem_file);
        std::stringstream ss;
        ss << is.rdbuf();
        return parse_problem(ss.str());
    }
    Problem p = make_problem(problem_kind_from_name(o.problem));
    p.b_star = o.b_star;
    p.b1 = o.b1;
    p.b2 = o.b2;
    p.alpha = o.alpha;
    p.c = o.c;
    p.zone = o.zone;
    if (p.kind == ProblemKind::Interface2 && o.beta >= 0.0) p.beta_adjacent = o.beta;
    return p;
}

Method method_from(const std::string& name) {
    if (name == "fem") return Method::FEM;
    if (name == "gfem") return Method::GFEM;
    if (name == "sgfem") return Method::SGFEM;
    throw std::runtime_error("unknown method: " + name);
}

QuadRule rule_from(const CommonOpts& o) {
    QuadRule r;
    r.order = o.quad_order;
    return r;
}

std::vector<int> default_ns(const CommonOpts& o, std::vector<int> fallback) {
    return o.n_list.empty() ? fallback : o.n_list;
}

void write_outputs(const CommonOpts& o, const std::vector<StudyRecord>& recs,
                   const std::string& xf, const std::string& yf) {
    if (!o.out_csv.empty()) emit_csv(recs, o.out_csv);
    if (!o.plot_svg.empty()) emit_svg_loglog(recs, xf, yf, o.plot_svg);
}

int cmd_element(const CommonOpts& o) {
    const int n = o.n_list.empty() ? 64 : o.n_list.front();
    const Mesh mesh = uniform_mesh(n);
    Problem def = problem_from(o);
    if (o.beta >= 0.0) {
        const int mid = n / 2;
        const double pos = mesh.vertex[mid] + o.beta * mesh.h;
        if (def.kind == ProblemKind::Interface1) def.b_star = pos;
        if (def.kind == ProblemKind::Discontinuous) def.c = pos;
    }
    const ProblemInstance inst = instantiate(def, mesh);
    const GlobalSystem sys = inst.system(method_from(o.method), rule_from(o));
    std::printf("problem=%s N=%d dofs=%d bandwidth=%d\n",
                problem_kind_name(def.kind).c_str(), n, sys.dofmap.count(),
                sys.matrix.bandwidth());
    const DeltaProvider dp = analytic_delta(inst);
    for (const ElementMatrix& em : sys.elements) {
        if (em.nenr() == 0) continue;
        std::printf("element %d: %d enrichment slot(s), %d associated vertex(es)\n",
                    em.element, em.nenr(), em.associated_vertices());
        for (int r = 0; r < em.nenr(); ++r) {
            std::printf("  A22 row %d:", r);
            for (int cc = 0; cc < em.nenr(); ++cc) std::printf(" %23.16e", em.a22_at(r, cc));
            std::printf("\n");
        }
        const auto ev = scaled_element_eigs(em, dp);
        std::printf("  scaled eigenvalues:");
        for (double v : ev) std::printf(" %.15g", v);
        std::printf("\n");
    }
    if (!o.out_csv.empty()) {
        std::ofstream os(o.out_csv);
        dump_matrix(sys.matrix, os);
    }
    return 0;
}

int cmd_solve(const CommonOpts& o, const std::string& emit_problem) {
    const int n = o.n_list.empty() ? 64 : o.n_list.front();
    const Mesh mesh = uniform_mesh(n);
    const Problem def = problem_from(o);
    const ProblemInstance inst = instantiate(def, mesh);
    const Method method = o.method.empty() ? inst.default_method : method_from(o.method);
    const QuadRule rule = rule_from(o);
    const GlobalSystem sys = inst.system(method, rule);
    const auto x = BandLU(sys.matrix).solve(sys.load);
    const CondReport cr = extreme_eigs(sys.matrix);
    std::printf("problem=%s method=%s N=%d dofs=%d\n", problem_kind_name(def.kind).c_str(),
                o.method.c_str(), n, sys.dofmap.count());
    std::printf("kappa2=%.6e scaled_kappa=%.6e converged=%d\n", cr.kappa2, cr.scaled_kappa,
                cr.converged);
    const double err = energy_error(inst, sys, x, rule);
    std::printf("energy_error=%.12e\n", err);
    if (inst.has_exact_dofs) {
        const auto xe = inst.exact_dofs(sys.dofmap);
        std::printf("eta=%.6e\n", eta(xe, x));
    }
    if (!emit_problem.empty()) {
        std::ofstream os(emit_problem);
        os << serialize_problem(def);
    }
    return 0;
}

int cmd_convergence(const CommonOpts& o, double expect_slope, double slope_tol) {
    const Problem def = problem_from(o);
    const auto ns = default_ns(o, {16, 32, 64, 128, 256, 512});
    const StudyResult r = convergence_study(def, method_from(o.method), ns, rule_from(o));
    for (const auto& rec : r.records)
        std::printf("N=%5d  dofs=%6d  energy_error=%.12e\n", rec.n_elements, rec.dofs,
                    *rec.energy_error);
    std::printf("slope(error vs h) = %.4f over N in [%d, %d], r2=%.5f\n", r.fit.slope,
                r.fit.n_min, r.fit.n_max, r.fit.r2);
    write_outputs(o, r.records, "h", "energy_error");
    if (expect_slope > 0 && std::abs(r.fit.slope - expect_slope) > slope_tol) {
        std::fprintf(stderr, "FAIL: slope %.4f not within %.2f of %.2f\n", r.fit.slope,
                     slope_tol, expect_slope);
        return 2;
    }
    return 0;
}

int cmd_condition(const CommonOpts& o, double expect_slope, double slope_tol) {
    const Problem def = problem_from(o);
    const auto ns = default_ns(o, {250, 500, 1000, 2000, 4000});
    const StudyResult r = condition_study(def, method_from(o.method), ns, rule_from(o));
    for (const auto& rec : r.records)
        std::printf("N=%5d  dofs=%6d  kappa2=%.6e  scaled_kappa=%.6e\n", rec.n_elements,
                    rec.dofs, *rec.kappa2, *rec.scaled_kappa);
    std::printf("slope(scaled_kappa vs N) = %.4f over N in [%d, %d], r2=%.5f\n", r.fit.slope,
                r.fit.n_min, r.fit.n_max, r.fit.r2);
    write_outputs(o, r.records, "N", "scaled_kappa");
    if (expect_slope > 0 && std::abs(r.fit.slope - expect_slope) > slope_tol) {
        std::fprintf(stderr, "FAIL: slope %.4f not within %.2f of %.2f\n", r.fit.slope,
                     slope_tol, expect_slope);
        return 2;
    }
    return 0;
}

int cmd_eta(const CommonOpts& o, double expect_slope, double slope_tol) {
    const Problem def = problem_from(o);
    const auto ns = default_ns(o, {250, 500, 1000, 2000, 4000});
    const EtaStudyResult r = eta_study(def, ns, rule_from(o));
    constexpr double eps = 0x1.0p-52;
    for (std::size_t i = 0; i < r.records.size(); ++i) {
        const auto& rec = r.records[i];
        std::printf("N=%5d  dofs=%6d  eta=%.6e  scaled_kappa=%.6e  eta/(K*eps)=%.3f\n",
                    rec.n_elements, rec.dofs, *rec.eta, *rec.scaled_kappa,
                    r.eta_over_kappa_eps[i]);
        if (*rec.eta >= 0.5)
            std::printf("N=%5d: total loss of accuracy (eta >= 0.5)\n", rec.n_elements);
    }
    std::printf("slope(eta vs N) = %.4f over N in [%d, %d], r2=%.5f\n", r.fit.slope, r.fit.n_min,
                r.fit.n_max, r.fit.r2);
    write_outputs(o, r.records, "N", "eta");
    (void)eps;
    if (expect_slope > 0 && std::abs(r.fit.slope - expect_slope) > slope_tol) {
        std::fprintf(stderr, "FAIL: slope %.4f not within %.2f of %.2f\n", r.fit.slope,
                     slope_tol, expect_slope);
        return 2;
    }
    return 0;
}

int cmd_assumptions(const CommonOpts& o) {
    std::vector<double> grid;
    for (int g = 1; g <= 99; ++g) grid.push_back(g / 100.0);
    int failures = 0;

    const auto iface = assumption_study(ProblemKind::Interface1, grid, 64, rule_from(o));
    for (const auto& row : iface) {
        for (double ev : row.eigenvalues)
            if (ev < 1.0 / 6 - 1e-10 || ev > 1.0 + 1e-10) ++failures;
        for (double r : row.ratios)
            if (r <= 1.0 || r > 6.0 + 1e-10) ++failures;
    }
    std::printf("interface a1: eigenvalues within [1/6, 1], ratios within (1, 6]: %s\n",
                failures == 0 ? "ok" : "violated");

    int disc_failures = 0;
    const auto disc = assumption_study(ProblemKind::Discontinuous, grid, 64, rule_from(o));
    for (const auto& row : disc) {
        const double b = row.beta;
        const double T =
            std::sqrt(13 - 84 * b + 228 * b * b - 288 * b * b * b + 144 * b * b * b * b) / 6;
        const double base = 5.0 / 6 - 2 * b + 2 * b * b;
        if (row.eigenvalues.size() != 2 || std::abs(row.eigenvalues[0] - (base - T)) > 1e-10 ||
            std::abs(row.eigenvalues[1] - (base + T)) > 1e-10)
            ++disc_failures;
    }
    std::printf("discontinuous: eigenvalue formula with the quartic radical: %s\n",
                disc_failures == 0 ? "ok" : "violated");

    // singular bands: ||sigma'|| / (G_k h^{3/2}) within a narrow band,
    // G ratios within [1, 3^{2-alpha}]
    int sing_failures = 0;
    const double alpha = o.alpha;
    const Mesh mesh = uniform_mesh(o.n_list.empty() ? 64 : o.n_list.front());
    const double h = mesh.h;
    const ProblemInstance inst = instantiate(singular_problem(alpha, o.zone), mesh);
    const GlobalSpace space = inst.space(Method::SGFEM);
    double band_lo = 1e300, band_hi = 0.0;
    double prev_g = -1.0;
    for (int k = 1; k <= mesh.num_elements; ++k) {
        // sigma of vertex k-1 restricted to tau_k (tau_k lies in its patch)
        if (space.local[k - 1].functions.empty()) break;
        const EnrichmentFunction* sigma = nullptr;
        for (const auto& f : space.local[k - 1].functions)
            if (f.label().find("x^alpha") != std::string::npos) sigma = &f;
        if (!sigma) break;
        const double gk = std::abs(alpha * (alpha - 1) * std::pow((k - 0.5) * h, alpha - 2));
        const double lo = mesh.element_left(k), hi = mesh.element_right(k);
        const double nrm2 = integrate(
            [&](double x) { return sigma->deriv(x) * sigma->deriv(x); }, lo, hi, {},
            k == 1 ? Singularity::left : Singularity::none, rule_from(o));
        const double ratio = std::sqrt(nrm2) / (gk * std::pow(h, 1.5));
        band_lo = std::min(band_lo, ratio);
        band_hi = std::max(band_hi, ratio);
        if (prev_g > 0) {
            const double gr = prev_g / gk;
            if (gr < 1.0 - 1e-12 || gr > std::pow(3.0, 2 - alpha) + 1e-12) ++sing_failures;
        }
        prev_g = gk;
    }
    if (band_hi / band_lo > 10.0) ++sing_failures;
    std::printf("singular alpha=%.2f: norm band ratio %.3f (<= 10), G-ratio envelope: %s\n",
                alpha, band_hi / band_lo, sing_failures == 0 ? "ok" : "violated");

    return (failures + disc_failures + sing_failures) == 0 ? 0 : 2;
}

int cmd_bauer(const CommonOpts& o) {
    const int n = o.n_list.empty() ? 100 : o.n_list.front();
    const Mesh mesh = uniform_mesh(n);
    const ProblemInstance inst = instantiate(make_problem(ProblemKind::Validation1a), mesh);
    const GlobalSystem sys = inst.system(Method::FEM, rule_from(o));
    const int dim = sys.dofmap.count();
    std::vector<std::vector<int>> patterns;
    patterns.emplace_back(dim, 0);
    std::vector<int> mod8(dim);
    for (int i = 0; i < dim; ++i) mod8[i] = i % 8;
    patterns.push_back(mod8);
    std::mt19937 rng(2026);
    std::uniform_int_distribution<int> d(-8, 8);
    std::vector<int> rnd(dim);
    for (int& g : rnd) g = d(rng);
    patterns.push_back(rnd);

    bool all_bitwise = true;
    for (const auto& g : patterns) {
        const BauerResult r = bauer_binary_solve(sys.matrix, sys.load, g);
        for (int i = 0; i < dim; ++i)
            if (r.x_direct[i] != r.x_scaled[i]) all_bitwise = false;
    }
    std::printf("binary diagonal scaling: %s\n",
                all_bitwise ? "bitwise identical solutions" : "MISMATCH");
    std::vector<double> threes(dim, 3.0);
    const BauerResult r3 = bauer_diagonal_solve(sys.matrix, sys.load, threes);
    double diff = 0.0;
    for (int i = 0; i < dim; ++i) diff = std::max(diff, std::abs(r3.x_direct[i] - r3.x_scaled[i]));
    std::printf("non-binary diagonal (3): max componentwise difference %.3e\n", diff);
    return all_bitwise ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"1-D FEM/GFEM/SGFEM laboratory"};
    app.require_subcommand(1);

    CommonOpts o;
    double expect_slope = -1.0, slope_tol = 0.1;
    std::string emit_problem;

    CLI::App* element = app.add_subcommand("element", "dump enriched element matrices");
    add_common(element, o);
    CLI::App* solve = app.add_subcommand("solve", "assemble and solve one system");
    add_common(solve, o);
    solve->add_option("--emit-problem", emit_problem, "write the problem descriptor");
    CLI::App* conv = app.add_subcommand("convergence", "energy-error convergence study");
    add_common(conv, o);
    conv->add_option("--expect-slope", expect_slope);
    conv->add_option("--slope-tol", slope_tol);
    CLI::App* cond = app.add_subcommand("condition", "scaled condition number study");
    add_common(cond, o);
    cond->add_option("--expect-slope", expect_slope);
    cond->add_option("--slope-tol", slope_tol);
    CLI::App* etacmd = app.add_subcommand("eta", "loss-of-accuracy study");
    add_common(etacmd, o);
    etacmd->add_option("--expect-slope", expect_slope);
    etacmd->add_option("--slope-tol", slope_tol);
    CLI::App* assume = app.add_subcommand("assumptions", "verify the element-level bounds");
    add_common(assume, o);
    CLI::App* bauer = app.add_subcommand("bauer", "binary-scaling bit-identity experiment");
    add_common(bauer, o);

    try {
        app.parse(argc, argv);
        if (element->parsed()) return cmd_element(o);
        if (solve->parsed()) return cmd_solve(o, emit_problem);
        if (conv->parsed()) return cmd_convergence(o, expect_slope, slope_tol);
        if (cond->parsed()) return cmd_condition(o, expect_slope, slope_tol);
        if (etacmd->parsed()) return cmd_eta(o, expect_slope, slope_tol);
        if (assume->parsed()) return cmd_assumptions(o);
        if (bauer->parsed()) return cmd_bauer(o);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
