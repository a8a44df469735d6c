#ifndef SGFEM1D_PROBLEMS_HPP
#define SGFEM1D_PROBLEMS_HPP

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sgfem1d/assembly.hpp"

namespace sgfem {

enum class ProblemKind {
    Smooth,
    Interface1,
    Interface2,
    Singular,
    Discontinuous,
    Validation1a,
    Validation1b,
    Validation3,
    Validation4,
};

/// Mesh-independent problem descriptor. Interface2 in adjacent mode
/// (beta_adjacent >= 0) derives its discontinuity points from the mesh:
/// b1 = x_{m-1} + h/2 and b2 = x_m + beta*h around the middle element.
struct Problem {
    ProblemKind kind = ProblemKind::Smooth;
    double b_star = 0.37;
    double b1 = 0.3, b2 = 0.7;
    double alpha = 0.75;
    double c = 0.5;
    double zone = 0.25;            // D, extent of the singular enrichment zone
    double beta_adjacent = -1.0;   // < 0: plain two-point interface
    std::optional<double> custom_jump;
};

inline Problem make_problem(ProblemKind kind) {
    Problem p;
    p.kind = kind;
    return p;
}

inline Problem manufactured_smooth() { return make_problem(ProblemKind::Smooth); }

inline Problem manufactured_interface1(double b_star) {
    Problem p = make_problem(ProblemKind::Interface1);
    p.b_star = b_star;
    return p;
}

inline Problem manufactured_interface2(double b1, double b2) {
    Problem p = make_problem(ProblemKind::Interface2);
    p.b1 = b1;
    p.b2 = b2;
    return p;
}

inline Problem manufactured_interface2_adjacent(double beta) {
    Problem p = make_problem(ProblemKind::Interface2);
    p.beta_adjacent = beta;
    return p;
}

inline Problem singular_problem(double alpha, double zone = 0.25) {
    Problem p = make_problem(ProblemKind::Singular);
    p.alpha = alpha;
    p.zone = zone;
    return p;
}

inline Problem manufactured_discontinuous(double c) {
    Problem p = make_problem(ProblemKind::Discontinuous);
    p.c = c;
    return p;
}

/// One problem realized on a concrete mesh: coefficient, exact solution,
/// load, constrained vertex set, enrichment recipe, dof ordering.
struct ProblemInstance {
    Problem def;
    Mesh mesh;
    CoefficientFn a = CoefficientFn::constant(1.0);
    Method default_method = Method::SGFEM;
    VertexOrder order = VertexOrder::forward;

    std::function<FnSample(double, Side)> exact;  // u and u'
    std::vector<double> exact_breakpoints;
    bool exact_singular_left = false;
    std::optional<double> crack;                  // broken-norm split point

    LoadSpec load;
    std::vector<int> t1;
    Catalog catalog;

    bool has_exact_dofs = false;
    std::function<double(const DofInfo&)> exact_dof_value;

    std::vector<double> exact_dofs(const DofMap& dm) const {
        if (!has_exact_dofs)
            throw std::logic_error("exact_dofs: problem has no closed-form dof vector");
        std::vector<double> x(dm.count());
        for (int d = 0; d < dm.count(); ++d) x[d] = exact_dof_value(dm.dofs[d]);
        return x;
    }

    GlobalSpace space(Method m) const { return build_space(mesh, m, t1, catalog); }
    GlobalSystem system(Method m, const QuadRule& rule = QuadRule{}) const {
        return assemble(space(m), a, load, rule, order);
    }
};

namespace detail {

/// Interface or crack points are kept strictly inside elements: the
/// fractional position beta within the containing element is clamped to
/// [eps0, 1 - eps0] with eps0 = 1e-14.
inline double nudge_into_element(double point, const Mesh& m) {
    const double eps0 = 1e-14;
    int k = static_cast<int>(point / m.h);
    if (k >= m.num_elements) k = m.num_elements - 1;
    double beta = (point - m.vertex[k]) / m.h;
    if (beta < eps0) beta = eps0;
    if (beta > 1.0 - eps0) beta = 1.0 - eps0;
    return m.vertex[k] + beta * m.h;
}

inline std::vector<int> range_t1(int from, int to) {
    std::vector<int> v;
    for (int i = from; i <= to; ++i) v.push_back(i);
    return v;
}

/// u0(x) = x^2 (1-x)^2 and derivatives: the smooth carrier used by the
/// manufactured solutions.
inline double w_val(double x) { return x * x * (1 - x) * (1 - x); }
inline double w_d1(double x) { return 2 * x * (1 - x) * (1 - 2 * x); }
inline double w_d2(double x) { return 2 - 12 * x + 12 * x * x; }

}  // namespace detail

inline ProblemInstance instantiate(const Problem& def, const Mesh& mesh) {
    ProblemInstance inst;
    inst.def = def;
    inst.mesh = mesh;
    const int n = mesh.num_elements;
    const double h = mesh.h;

    switch (def.kind) {
        case ProblemKind::Smooth: {
            inst.t1 = detail::range_t1(1, n);
            inst.exact = [](double x, Side) -> FnSample {
                return {detail::w_val(x), detail::w_d1(x)};
            };
            inst.load.f = [](double x) { return -detail::w_d2(x); };
            inst.catalog = [](const Mesh&, const Patch& p) { return polynomial_space(p, 2); };
            break;
        }
        case ProblemKind::Interface1:
        case ProblemKind::Interface2: {
            std::vector<double> pts;
            if (def.kind == ProblemKind::Interface1) {
                pts = {detail::nudge_into_element(def.b_star, mesh)};
                inst.a = CoefficientFn::piecewise(pts, {0.5, 1.0});
            } else {
                double p1 = def.b1, p2 = def.b2;
                if (def.beta_adjacent >= 0.0) {
                    const int m = n / 2;
                    p1 = mesh.vertex[m - 1] + 0.5 * h;
                    p2 = mesh.vertex[m] + def.beta_adjacent * h;
                }
                pts = {detail::nudge_into_element(p1, mesh), detail::nudge_into_element(p2, mesh)};
                inst.a = CoefficientFn::piecewise(pts, {1.0, 0.5, 1.0});
            }
            inst.t1 = detail::range_t1(1, n);
            // u(x) = int_0^x g/a with g = t(1-t); flux a u' = g is smooth.
            const CoefficientFn a = inst.a;
            std::vector<double> seg{0.0};
            for (double p : pts) seg.push_back(p);
            std::vector<double> acc(seg.size(), 0.0);
            auto anti = [](double t) { return t * t / 2 - t * t * t / 3; };
            for (std::size_t i = 1; i < seg.size(); ++i)
                acc[i] = acc[i - 1] +
                         (anti(seg[i]) - anti(seg[i - 1])) / a.value_between(seg[i - 1], seg[i]);
            inst.exact = [seg, acc, a, anti](double x, Side) -> FnSample {
                std::size_t i = seg.size() - 1;
                while (i > 0 && x < seg[i]) --i;
                const double ai = a(0.5 * (seg[i] + x) >= seg[i] ? 0.5 * (seg[i] + x) : x);
                const double g = x * (1 - x);
                return {acc[i] + (anti(x) - anti(seg[i])) / ai, g / ai};
            };
            inst.exact_breakpoints = pts;
            inst.load.f = [](double x) { return 2 * x - 1; };
            inst.catalog = [a](const Mesh&, const Patch& p) { return interface_space(p, a); };
            break;
        }
        case ProblemKind::Singular: {
            const double al = def.alpha;
            const double zone = def.zone;
            if (!(al > 0.5 && al < 1.5) || al == 1.0)
                throw std::invalid_argument("singular problem: bad alpha");
            inst.t1 = detail::range_t1(1, n);
            inst.exact = [al](double x, Side) -> FnSample {
                const double xa = x > 0 ? std::pow(x, al) : 0.0;
                const double xd = x > 0 ? al * std::pow(x, al - 1) : 0.0;
                return {xa + detail::w_val(x), xd + detail::w_d1(x)};
            };
            inst.exact_singular_left = true;
            inst.load.f = [al](double x) {
                return -al * (al - 1) * std::pow(x, al - 2) - detail::w_d2(x);
            };
            inst.load.f_singular_left = true;
            inst.load.natural_right = al;  // a u'(1) = alpha
            inst.catalog = [al, zone](const Mesh& m, const Patch& p) {
                const bool enriched = p.left < zone;  // omega_i meets (0, D)
                return enriched ? singular_space(p, al) : polynomial_space(p, 1);
            };
            break;
        }
        case ProblemKind::Discontinuous: {
            const double c = detail::nudge_into_element(def.c, mesh);
            const double jump = def.custom_jump.value_or(1.0);
            inst.t1 = detail::range_t1(1, n - 1);
            inst.crack = c;
            // u = s + utilde, s = jump*(H_c - 1)/2. utilde = w*q + p with
            // p = x^2(3-2x) lifting utilde(1) to jump so u(1) = 0, and q
            // linear in (x - c) tuned so utilde'(c) = 0.
            auto p_val = [jump](double x) { return jump * x * x * (3 - 2 * x); };
            auto p_d1 = [jump](double x) { return jump * 6 * x * (1 - x); };
            auto p_d2 = [jump](double x) { return jump * (6 - 12 * x); };
            const double gamma =
                -(p_d1(c) + detail::w_d1(c)) / detail::w_val(c);
            auto q_val = [c, gamma](double x) { return 1.0 + gamma * (x - c); };
            auto ut_val = [=](double x) { return detail::w_val(x) * q_val(x) + p_val(x); };
            auto ut_d1 = [=](double x) {
                return detail::w_d1(x) * q_val(x) + detail::w_val(x) * gamma + p_d1(x);
            };
            auto ut_d2 = [=](double x) {
                return detail::w_d2(x) * q_val(x) + 2 * detail::w_d1(x) * gamma + p_d2(x);
            };
            inst.exact = [=](double x, Side side) -> FnSample {
                const bool left_of_c = x < c || (x == c && side == Side::left);
                const double s = left_of_c ? 0.0 : -jump;
                return {ut_val(x) + s, ut_d1(x)};
            };
            inst.exact_breakpoints = {c};
            inst.load.f = [=](double x) { return -ut_d2(x); };
            inst.catalog = [c](const Mesh& m, const Patch& p) {
                if (p.center == 0 || p.center == m.num_elements)
                    return polynomial_space(p, 1);
                return heaviside_space(p, c);
            };
            break;
        }
        case ProblemKind::Validation1a:
        case ProblemKind::Validation1b: {
            inst.default_method = Method::FEM;
            inst.order = def.kind == ProblemKind::Validation1b ? VertexOrder::reversed
                                                               : VertexOrder::forward;
            inst.t1 = detail::range_t1(1, n - 1);
            inst.exact = [](double x, Side) -> FnSample { return {x, 1.0}; };
            inst.load.dirichlet_lift = {{n, 1.0}};
            inst.has_exact_dofs = true;
            inst.exact_dof_value = [h](const DofInfo& d) { return d.vertex * h; };
            break;
        }
        case ProblemKind::Validation3:
        case ProblemKind::Validation4: {
            const bool sg = def.kind == ProblemKind::Validation4;
            inst.default_method = sg ? Method::SGFEM : Method::GFEM;
            inst.t1 = detail::range_t1(1, n);
            inst.exact = [](double x, Side) -> FnSample { return {x * x, 2 * x}; };
            inst.load.f = [](double) { return -2.0; };
            inst.load.natural_right = 2.0;  // u'(1) = 2
            inst.catalog = [](const Mesh&, const Patch& p) {
                LocalSpace s;
                s.patch = p;
                s.functions.emplace_back(
                    [](double x, Side) -> FnSample { return {x * x, 2 * x}; },
                    std::vector<double>{}, "x^2", false);
                return s;
            };
            inst.has_exact_dofs = true;
            inst.exact_dof_value = [h, sg](const DofInfo& d) {
                if (!d.is_hat) return 1.0;
                return sg ? (d.vertex * h) * (d.vertex * h) : 0.0;
            };
            break;
        }
    }
    return inst;
}

/// Energy norm ||u - u_h||_E by quadrature of a (u' - u_h')^2 with all
/// breakpoints (mesh vertices bound the element loop; coefficient,
/// solution and enrichment breakpoints split panels). The Discontinuous
/// kind excludes the crack point by splitting there, which realizes the
/// broken norm.
inline double energy_error(const ProblemInstance& inst, const GlobalSystem& sys,
                           std::span<const double> coeffs, const QuadRule& rule = QuadRule{}) {
    if (static_cast<int>(coeffs.size()) != sys.dofmap.count())
        throw std::invalid_argument("energy_error: coefficient size mismatch");
    const Mesh& m = inst.mesh;
    double total = 0.0;
    for (int k = 1; k <= m.num_elements; ++k) {
        const double lo = m.element_left(k), hi = m.element_right(k);
        std::vector<double> breaks;
        auto add_bp = [&](double b) {
            if (b > lo && b < hi) breaks.push_back(b);
        };
        for (double b : inst.a.breakpoints()) add_bp(b);
        for (double b : inst.exact_breakpoints) add_bp(b);
        if (inst.crack) add_bp(*inst.crack);
        bool sing = inst.exact_singular_left && lo == 0.0;
        for (int v : {k - 1, k}) {
            for (const auto& f : sys.space.local[v].functions) {
                for (double b : f.breakpoints()) add_bp(b);
                if (f.singular_point() && *f.singular_point() == lo) sing = true;
            }
        }
        std::sort(breaks.begin(), breaks.end());
        breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
        auto f = [&](double x) {
            const double du = inst.exact(x, Side::right).derivative -
                              eval_solution(sys.space, sys.dofmap, coeffs,
                                            inst.load.dirichlet_lift, x)
                                  .derivative;
            return inst.a(x) * du * du;
        };
        total += integrate(f, lo, hi, breaks, sing ? Singularity::left : Singularity::none, rule);
    }
    return std::sqrt(total);
}

/// ||u||_E, the energy error of the zero coefficient vector.
inline double exact_energy(const ProblemInstance& inst, const GlobalSystem& sys,
                           const QuadRule& rule = QuadRule{}) {
    std::vector<double> zero(sys.dofmap.count(), 0.0);
    // Dirichlet lifts are part of u_h; suppress them for ||u||_E.
    ProblemInstance plain = inst;
    plain.load.dirichlet_lift.clear();
    return energy_error(plain, sys, zero, rule);
}

/// The per-element scalings used in the applications: interface elements
/// get the closed-form deltas, crack elements h^{1/2}/2, singular
/// elements (G_k h^{3/2})^{-1}, and everything else the unit-diagonal
/// default.
inline DeltaProvider analytic_delta(const ProblemInstance& inst) {
    const Mesh mesh = inst.mesh;
    const Problem def = inst.def;
    const CoefficientFn a = inst.a;
    return [mesh, def, a](const ElementMatrix& em, int slot) -> double {
        const double h = mesh.h;
        const double lo = mesh.element_left(em.element), hi = mesh.element_right(em.element);
        switch (def.kind) {
            case ProblemKind::Smooth:
            case ProblemKind::Validation4:
                return std::pow(h, -1.5);
            case ProblemKind::Interface1:
            case ProblemKind::Interface2: {
                // which discontinuity sits inside this element?
                for (double b : a.breakpoints()) {
                    if (b > lo && b < hi) {
                        const double beta = (b - lo) / h;
                        if (a.value_between(lo, b) == 1.0 && def.kind == ProblemKind::Interface2 &&
                            std::abs(beta - 0.5) < 1e-12)
                            return 1.0 / std::sqrt(h);  // the half-way b1 element
                        const auto [v, j] = em.enr_slots[slot];
                        const bool left_vertex = mesh.vertex[v] == lo;
                        if (left_vertex)
                            return 1.0 / (std::sqrt(h) * std::sqrt(beta) * (1.0 - beta));
                        return 1.0 / (std::sqrt(h) * beta * std::sqrt(1.0 - beta));
                    }
                }
                return 1.0 / std::sqrt(em.a22_at(slot, slot));
            }
            case ProblemKind::Discontinuous:
                return std::sqrt(h) / 2.0;
            case ProblemKind::Singular: {
                const int k = em.element;
                const double gk = std::abs(def.alpha * (def.alpha - 1.0) *
                                           std::pow((k - 0.5) * h, def.alpha - 2.0));
                return 1.0 / (gk * std::pow(h, 1.5));
            }
            default:
                return 1.0 / std::sqrt(em.a22_at(slot, slot));
        }
    };
}

// ---------------------------------------------------------------------------
// Flat key=value problem serialization (CLI round-tripping)
// ---------------------------------------------------------------------------

inline std::string problem_kind_name(ProblemKind k) {
    switch (k) {
        case ProblemKind::Smooth: return "smooth";
        case ProblemKind::Interface1: return "interface1";
        case ProblemKind::Interface2: return "interface2";
        case ProblemKind::Singular: return "singular";
        case ProblemKind::Discontinuous: return "discontinuous";
        case ProblemKind::Validation1a: return "validation1a";
        case ProblemKind::Validation1b: return "validation1b";
        case ProblemKind::Validation3: return "validation3";
        case ProblemKind::Validation4: return "validation4";
    }
    return "?";
}

inline ProblemKind problem_kind_from_name(const std::string& s) {
    static const std::map<std::string, ProblemKind> names{
        {"smooth", ProblemKind::Smooth},
        {"interface1", ProblemKind::Interface1},
        {"interface2", ProblemKind::Interface2},
        {"singular", ProblemKind::Singular},
        {"discontinuous", ProblemKind::Discontinuous},
        {"validation1a", ProblemKind::Validation1a},
        {"validation1b", ProblemKind::Validation1b},
        {"validation3", ProblemKind::Validation3},
        {"validation4", ProblemKind::Validation4},
    };
    auto it = names.find(s);
    if (it == names.end()) throw std::invalid_argument("unknown problem kind: " + s);
    return it->second;
}

inline std::string serialize_problem(const Problem& p) {
    std::ostringstream os;
    os.precision(17);
    os << "kind=" << problem_kind_name(p.kind) << '\n';
    os << "b_star=" << p.b_star << '\n';
    os << "b1=" << p.b1 << '\n';
    os << "b2=" << p.b2 << '\n';
    os << "alpha=" << p.alpha << '\n';
    os << "c=" << p.c << '\n';
    os << "zone=" << p.zone << '\n';
    os << "beta_adjacent=" << p.beta_adjacent << '\n';
    return os.str();
}

inline Problem parse_problem(const std::string& text) {
    Problem p;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "kind")
            p.kind = problem_kind_from_name(val);
        else if (key == "b_star")
            p.b_star = std::stod(val);
        else if (key == "b1")
            p.b1 = std::stod(val);
        else if (key == "b2")
            p.b2 = std::stod(val);
        else if (key == "alpha")
            p.alpha = std::stod(val);
        else if (key == "c")
            p.c = std::stod(val);
        else if (key == "zone")
            p.zone = std::stod(val);
        else if (key == "beta_adjacent")
            p.beta_adjacent = std::stod(val);
        else
            throw std::invalid_argument("parse_problem: unknown key " + key);
    }
    return p;
}

}  // namespace sgfem

#endif
