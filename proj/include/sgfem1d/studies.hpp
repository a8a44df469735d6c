#ifndef SGFEM1D_STUDIES_HPP
#define SGFEM1D_STUDIES_HPP

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sgfem1d/problems.hpp"

namespace sgfem {

struct StudyRecord {
    int n_elements = 0;      // N
    double h = 0.0;
    int dofs = 0;
    std::optional<double> energy_error;
    std::optional<double> kappa2;
    std::optional<double> scaled_kappa;
    std::optional<double> eta;
    double wall_time = 0.0;  // seconds
};

/// Least-squares line through (log10 x, log10 y).
struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int n_min = 0, n_max = 0;
};

namespace detail {

inline FitResult fit_line_log10(const std::vector<double>& xs, const std::vector<double>& ys) {
    FitResult fr;
    const std::size_t n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log10(xs[i]), ly = std::log10(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    const double den = n * sxx - sx * sx;
    fr.slope = (n * sxy - sx * sy) / den;
    fr.intercept = (sy - fr.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ymean = sy / n;
    for (std::size_t i = 0; i < n; ++i) {
        const double ly = std::log10(ys[i]);
        const double fit = fr.intercept + fr.slope * std::log10(xs[i]);
        ss_res += (ly - fit) * (ly - fit);
        ss_tot += (ly - ymean) * (ly - ymean);
    }
    fr.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fr;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

}  // namespace detail

/// Fit over the asymptotic (upper) half of the N range: points with
/// N >= sqrt(N_min N_max), at least the last three.
inline FitResult fit_upper_half(const std::vector<StudyRecord>& recs,
                                const std::function<double(const StudyRecord&)>& x_of,
                                const std::function<double(const StudyRecord&)>& y_of) {
    if (recs.size() < 3) throw std::invalid_argument("fit: need at least 3 records");
    const double cut = std::sqrt(static_cast<double>(recs.front().n_elements) *
                                 static_cast<double>(recs.back().n_elements));
    std::vector<double> xs, ys;
    std::vector<int> ns;
    for (const auto& r : recs)
        if (r.n_elements >= cut) {
            xs.push_back(x_of(r));
            ys.push_back(y_of(r));
            ns.push_back(r.n_elements);
        }
    while (xs.size() < 3 && xs.size() < recs.size()) {
        const auto& r = recs[recs.size() - 1 - xs.size()];
        xs.insert(xs.begin(), x_of(r));
        ys.insert(ys.begin(), y_of(r));
        ns.insert(ns.begin(), r.n_elements);
    }
    FitResult fr = detail::fit_line_log10(xs, ys);
    fr.n_min = ns.front();
    fr.n_max = ns.back();
    return fr;
}

struct StudyResult {
    std::vector<StudyRecord> records;
    FitResult fit;
};

/// Energy-error convergence; fit is log10(error) against log10(h), so
/// the slope is the positive convergence order.
inline StudyResult convergence_study(const Problem& def, Method method,
                                     const std::vector<int>& ns,
                                     const QuadRule& rule = QuadRule{}) {
    if (ns.size() < 3) throw std::invalid_argument("convergence_study: need >= 3 mesh sizes");
    StudyResult out;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (i > 0 && ns[i] <= ns[i - 1])
            throw std::invalid_argument("convergence_study: N list must ascend");
        detail::Timer timer;
        const Mesh mesh = uniform_mesh(ns[i]);
        const ProblemInstance inst = instantiate(def, mesh);
        const GlobalSystem sys = inst.system(method, rule);
        const BandLU lu(sys.matrix);
        const std::vector<double> coeffs = lu.solve(sys.load);
        StudyRecord rec;
        rec.n_elements = ns[i];
        rec.h = mesh.h;
        rec.dofs = sys.dofmap.count();
        rec.energy_error = energy_error(inst, sys, coeffs, rule);
        rec.wall_time = timer.seconds();
        out.records.push_back(rec);
    }
    out.fit = fit_upper_half(
        out.records, [](const StudyRecord& r) { return r.h; },
        [](const StudyRecord& r) { return *r.energy_error; });
    return out;
}

/// Scaled-condition-number growth; fit is log10(scaled_kappa) against
/// log10(N).
inline StudyResult condition_study(const Problem& def, Method method,
                                   const std::vector<int>& ns,
                                   const QuadRule& rule = QuadRule{},
                                   double eig_tol = 1e-8, int eig_max_iter = 20000) {
    if (ns.size() < 3) throw std::invalid_argument("condition_study: need >= 3 mesh sizes");
    StudyResult out;
    for (int n : ns) {
        detail::Timer timer;
        const Mesh mesh = uniform_mesh(n);
        const ProblemInstance inst = instantiate(def, mesh);
        const GlobalSystem sys = inst.system(method, rule);
        const CondReport cr = extreme_eigs(sys.matrix, eig_tol, eig_max_iter);
        StudyRecord rec;
        rec.n_elements = n;
        rec.h = mesh.h;
        rec.dofs = sys.dofmap.count();
        rec.kappa2 = cr.kappa2;
        rec.scaled_kappa = cr.scaled_kappa;
        rec.wall_time = timer.seconds();
        out.records.push_back(rec);
    }
    out.fit = fit_upper_half(
        out.records, [](const StudyRecord& r) { return static_cast<double>(r.n_elements); },
        [](const StudyRecord& r) { return *r.scaled_kappa; });
    return out;
}

struct EtaStudyResult {
    std::vector<StudyRecord> records;
    FitResult fit;                      // log10(eta) vs log10(N)
    std::vector<double> eta_over_kappa_eps;
};

/// Round-off study on a validation problem with a known exact dof
/// vector: assemble, solve by no-pivot elimination, record
/// eta = ||x - x_hat|| / ||x||. Total loss of accuracy (eta >= 0.5) is
/// recorded, not fatal.
inline EtaStudyResult eta_study(const Problem& def, const std::vector<int>& ns,
                                const QuadRule& rule = QuadRule{},
                                double eig_tol = 1e-8, int eig_max_iter = 20000) {
    constexpr double eps = 0x1.0p-52;
    EtaStudyResult out;
    for (int n : ns) {
        detail::Timer timer;
        const Mesh mesh = uniform_mesh(n);
        const ProblemInstance inst = instantiate(def, mesh);
        const GlobalSystem sys = inst.system(inst.default_method, rule);
        const std::vector<double> x_exact = inst.exact_dofs(sys.dofmap);
        const BandLU lu(sys.matrix);
        const std::vector<double> x_hat = lu.solve(sys.load);
        const CondReport cr = extreme_eigs(sys.matrix, eig_tol, eig_max_iter);
        StudyRecord rec;
        rec.n_elements = n;
        rec.h = mesh.h;
        rec.dofs = sys.dofmap.count();
        rec.eta = eta(x_exact, x_hat);
        rec.kappa2 = cr.kappa2;
        rec.scaled_kappa = cr.scaled_kappa;
        rec.wall_time = timer.seconds();
        out.eta_over_kappa_eps.push_back(*rec.eta / (cr.scaled_kappa * eps));
        out.records.push_back(rec);
    }
    out.fit = fit_upper_half(
        out.records, [](const StudyRecord& r) { return static_cast<double>(r.n_elements); },
        [](const StudyRecord& r) { return *r.eta; });
    return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void emit_csv(const std::vector<StudyRecord>& recs, std::ostream& os) {
    os << "N,h,dofs,energy_error,kappa2,scaled_kappa,eta,wall_time\n";
    auto cell = [](const std::optional<double>& v) {
        return v ? format_full(*v) : std::string();
    };
    for (const auto& r : recs) {
        os << r.n_elements << ',' << format_full(r.h) << ',' << r.dofs << ','
           << cell(r.energy_error) << ',' << cell(r.kappa2) << ',' << cell(r.scaled_kappa)
           << ',' << cell(r.eta) << ',' << format_full(r.wall_time) << '\n';
    }
}

inline void emit_csv(const std::vector<StudyRecord>& recs, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("emit_csv: cannot open " + path);
    emit_csv(recs, os);
    if (!os.good()) throw std::runtime_error("emit_csv: write failed for " + path);
}

inline std::vector<StudyRecord> parse_csv(std::istream& is) {
    std::vector<StudyRecord> recs;
    std::string line;
    if (!std::getline(is, line)) return recs;
    if (line != "N,h,dofs,energy_error,kappa2,scaled_kappa,eta,wall_time")
        throw std::runtime_error("parse_csv: unexpected header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                cells.push_back(cur);
                cur.clear();
            } else
                cur.push_back(ch);
        }
        cells.push_back(cur);
        if (cells.size() != 8) throw std::runtime_error("parse_csv: bad row");
        StudyRecord r;
        r.n_elements = std::stoi(cells[0]);
        r.h = std::stod(cells[1]);
        r.dofs = std::stoi(cells[2]);
        auto opt = [](const std::string& s) -> std::optional<double> {
            if (s.empty()) return std::nullopt;
            return std::stod(s);
        };
        r.energy_error = opt(cells[3]);
        r.kappa2 = opt(cells[4]);
        r.scaled_kappa = opt(cells[5]);
        r.eta = opt(cells[6]);
        r.wall_time = std::stod(cells[7]);
        recs.push_back(r);
    }
    return recs;
}

inline std::vector<StudyRecord> parse_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("parse_csv: cannot open " + path);
    return parse_csv(is);
}

// ---------------------------------------------------------------------------
// SVG log-log scatter with fitted line
// ---------------------------------------------------------------------------

inline void emit_svg_loglog(const std::vector<StudyRecord>& recs,
                            const std::string& x_field, const std::string& y_field,
                            const std::string& path) {
    auto field = [](const StudyRecord& r, const std::string& name) -> std::optional<double> {
        if (name == "N") return static_cast<double>(r.n_elements);
        if (name == "h") return r.h;
        if (name == "dofs") return static_cast<double>(r.dofs);
        if (name == "energy_error") return r.energy_error;
        if (name == "kappa2") return r.kappa2;
        if (name == "scaled_kappa") return r.scaled_kappa;
        if (name == "eta") return r.eta;
        throw std::invalid_argument("emit_svg_loglog: unknown field " + name);
    };
    std::vector<double> xs, ys;
    for (const auto& r : recs) {
        const auto x = field(r, x_field), y = field(r, y_field);
        if (x && y && *x > 0 && *y > 0) {
            xs.push_back(*x);
            ys.push_back(*y);
        }
    }
    if (xs.empty()) throw std::invalid_argument("emit_svg_loglog: no plottable records");
    const FitResult fit = detail::fit_line_log10(xs, ys);

    const double W = 640, H = 480, L = 70, R = 20, T = 24, B = 50;
    double xmin = std::log10(xs[0]), xmax = xmin, ymin = std::log10(ys[0]), ymax = ymin;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xmin = std::min(xmin, std::log10(xs[i]));
        xmax = std::max(xmax, std::log10(xs[i]));
        ymin = std::min(ymin, std::log10(ys[i]));
        ymax = std::max(ymax, std::log10(ys[i]));
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const double padx = 0.05 * (xmax - xmin), pady = 0.08 * (ymax - ymin);
    xmin -= padx; xmax += padx; ymin -= pady; ymax += pady;
    auto px = [&](double lx) { return L + (lx - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double ly) { return H - B - (ly - ymin) / (ymax - ymin) * (H - T - B); };

    std::ofstream os(path);
    if (!os) throw std::runtime_error("emit_svg_loglog: cannot open " + path);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\""
       << H - B << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    for (int d = static_cast<int>(std::ceil(xmin)); d <= static_cast<int>(std::floor(xmax)); ++d) {
        os << "<line x1=\"" << px(d) << "\" y1=\"" << H - B << "\" x2=\"" << px(d) << "\" y2=\""
           << H - B + 5 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << px(d) << "\" y=\"" << H - B + 20
           << "\" font-size=\"12\" text-anchor=\"middle\">1e" << d << "</text>\n";
    }
    for (int d = static_cast<int>(std::ceil(ymin)); d <= static_cast<int>(std::floor(ymax)); ++d) {
        os << "<line x1=\"" << L - 5 << "\" y1=\"" << py(d) << "\" x2=\"" << L << "\" y2=\""
           << py(d) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << L - 8 << "\" y=\"" << py(d) + 4
           << "\" font-size=\"12\" text-anchor=\"end\">1e" << d << "</text>\n";
    }
    os << "<line x1=\"" << px(xmin + padx) << "\" y1=\""
       << py(fit.intercept + fit.slope * (xmin + padx)) << "\" x2=\"" << px(xmax - padx)
       << "\" y2=\"" << py(fit.intercept + fit.slope * (xmax - padx))
       << "\" stroke=\"#c22\" stroke-width=\"1.5\"/>\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
        os << "<circle cx=\"" << px(std::log10(xs[i])) << "\" cy=\"" << py(std::log10(ys[i]))
           << "\" r=\"3.5\" fill=\"#246\"/>\n";
    os << "<text x=\"" << L + 10 << "\" y=\"" << T + 14 << "\" font-size=\"13\">" << y_field
       << " vs " << x_field << ", slope " << format_full(fit.slope).substr(0, 6) << "</text>\n";
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
       << "\" font-size=\"13\" text-anchor=\"middle\">" << x_field << "</text>\n";
    os << "</svg>\n";
    if (!os.good()) throw std::runtime_error("emit_svg_loglog: write failed for " + path);
}

// ---------------------------------------------------------------------------
// Assumption verification sweeps
// ---------------------------------------------------------------------------

struct AssumptionRow {
    double beta = 0.0;
    std::vector<double> eigenvalues;   // of the scaled enriched element(s)
    std::vector<double> ratios;        // Assumption-3 ratios with analytic deltas
};

/// Sweep the interface (a1) or crack position across one element and
/// report scaled element eigenvalues and Assumption-3 ratios.
inline std::vector<AssumptionRow> assumption_study(ProblemKind kind,
                                                   const std::vector<double>& beta_grid,
                                                   int n = 64,
                                                   const QuadRule& rule = QuadRule{}) {
    std::vector<AssumptionRow> rows;
    const Mesh mesh = uniform_mesh(n);
    for (double beta : beta_grid) {
        Problem def;
        const int mid = n / 2;
        if (kind == ProblemKind::Interface1) {
            def = manufactured_interface1(mesh.vertex[mid] + beta * mesh.h);
        } else if (kind == ProblemKind::Discontinuous) {
            def = manufactured_discontinuous(mesh.vertex[mid] + beta * mesh.h);
        } else {
            throw std::invalid_argument("assumption_study: kind must be Interface1 or Discontinuous");
        }
        const ProblemInstance inst = instantiate(def, mesh);
        const GlobalSystem sys = inst.system(Method::SGFEM, rule);
        AssumptionRow row;
        row.beta = beta;
        const DeltaProvider dp = analytic_delta(inst);
        for (const ElementMatrix& em : sys.elements) {
            if (em.nenr() == 0) continue;
            for (double ev : scaled_element_eigs(em, dp)) row.eigenvalues.push_back(ev);
        }
        for (const auto& r : delta_and_assumption3(sys.space, sys.elements, dp))
            row.ratios.push_back(r.ratio);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace sgfem

#endif
