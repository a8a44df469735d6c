#ifndef SGFEM1D_ENRICHMENT_HPP
#define SGFEM1D_ENRICHMENT_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgfem1d/coefficient.hpp"
#include "sgfem1d/mesh.hpp"

namespace sgfem {

struct FnSample {
    double value = 0.0;
    double derivative = 0.0;
};

/// One-sided evaluation: `right` is the default everywhere (matching the
/// hat kink convention); `left` matters only for value-discontinuous
/// functions such as the Heaviside enrichment.
enum class Side { right, left };

/// A local enrichment on a patch. `breakpoints` lists the points where
/// the value or derivative is non-smooth, so integration can split
/// there. `pw_linear` marks functions that are linear between
/// consecutive breakpoints (polynomial degree <= 1, interface integrals
/// of 1/a, Heaviside); that enables the analytic zero test after
/// modification. `singular_point` marks an algebraic derivative
/// singularity (x^alpha at 0) for graded quadrature.
class EnrichmentFunction {
public:
    EnrichmentFunction() = default;
    EnrichmentFunction(std::function<FnSample(double, Side)> eval,
                       std::vector<double> breakpoints, std::string label,
                       bool pw_linear = false,
                       std::optional<double> singular_point = std::nullopt)
        : eval_(std::move(eval)),
          breakpoints_(std::move(breakpoints)),
          label_(std::move(label)),
          pw_linear_(pw_linear),
          singular_point_(singular_point) {}

    FnSample eval(double x, Side side = Side::right) const { return eval_(x, side); }
    double value(double x, Side side = Side::right) const { return eval_(x, side).value; }
    double deriv(double x, Side side = Side::right) const { return eval_(x, side).derivative; }

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::string& label() const { return label_; }
    bool pw_linear() const { return pw_linear_; }
    const std::optional<double>& singular_point() const { return singular_point_; }

private:
    std::function<FnSample(double, Side)> eval_;
    std::vector<double> breakpoints_;
    std::string label_;
    bool pw_linear_ = false;
    std::optional<double> singular_point_;
};

/// Local space V_i minus the implicit constant (phi_0 = 1 is absorbed
/// into the hat part and never materialized).
struct LocalSpace {
    Patch patch;
    std::vector<EnrichmentFunction> functions;
};

struct ModifiedLocalSpace {
    Patch patch;
    std::vector<EnrichmentFunction> functions;
    int dropped = 0;
};

/// Piecewise-linear interpolant of f at the patch vertices, evaluated as
/// a hat-function combination so that it reproduces the nodal values of
/// f exactly (bitwise) at the vertices.
inline EnrichmentFunction patch_interpolant(const EnrichmentFunction& f, const Patch& p) {
    std::vector<double> vals(p.vertex_coords.size());
    for (std::size_t i = 0; i < p.vertex_coords.size(); ++i)
        vals[i] = f.value(p.vertex_coords[i]);
    std::vector<double> pts = p.vertex_coords;
    auto eval = [pts, vals](double x, Side) -> FnSample {
        if (x <= pts.front()) {
            const double s = (vals[1] - vals[0]) / (pts[1] - pts[0]);
            return {vals.front() + s * (x - pts.front()), s};
        }
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            if (x <= pts[i + 1]) {
                if (x == pts[i]) return {vals[i], (vals[i + 1] - vals[i]) / (pts[i + 1] - pts[i])};
                if (x == pts[i + 1]) {
                    const double s = (vals[i + 1] - vals[i]) / (pts[i + 1] - pts[i]);
                    return {vals[i + 1], s};
                }
                const double s = (vals[i + 1] - vals[i]) / (pts[i + 1] - pts[i]);
                return {vals[i] + s * (x - pts[i]), s};
            }
        }
        const std::size_t m = pts.size() - 1;
        const double s = (vals[m] - vals[m - 1]) / (pts[m] - pts[m - 1]);
        return {vals[m] + s * (x - pts[m]), s};
    };
    std::vector<double> bps(pts.begin() + 1, pts.end() - 1);  // interior kinks
    return EnrichmentFunction(eval, bps, "I[" + f.label() + "]", true);
}

namespace detail {

inline std::vector<double> merge_sorted(const std::vector<double>& a,
                                        const std::vector<double>& b) {
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace detail

/// True when f is identically zero on [a, b] (an element of its patch).
/// Analytic for functions linear between breakpoints that vanish at both
/// ends; otherwise a 32-point sup test against 1e-14 * scale.
inline bool identically_zero_on(const EnrichmentFunction& f, double a, double b,
                                double scale) {
    if (f.pw_linear()) {
        bool interior_break = false;
        for (double p : f.breakpoints())
            if (p > a && p < b) interior_break = true;
        if (!interior_break)
            return f.value(a) == 0.0 && f.value(b, Side::left) == 0.0;
    }
    const int samples = 32;
    double sup = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = (i + 0.5) / samples;
        sup = std::max(sup, std::abs(f.value(a + t * (b - a))));
    }
    return sup <= 1e-14 * scale;
}

/// phibar_j = phi_j - I_omega(phi_j). Functions whose modified form
/// vanishes identically on the whole patch are removed and counted.
inline ModifiedLocalSpace modify(const LocalSpace& space) {
    ModifiedLocalSpace out;
    out.patch = space.patch;
    const Patch& p = space.patch;
    for (const EnrichmentFunction& f : space.functions) {
        EnrichmentFunction interp = patch_interpolant(f, p);
        auto eval = [f, interp](double x, Side side) -> FnSample {
            const FnSample a = f.eval(x, side);
            const FnSample b = interp.eval(x, side);
            return {a.value - b.value, a.derivative - b.derivative};
        };
        std::vector<double> interior(p.vertex_coords.begin() + 1, p.vertex_coords.end() - 1);
        EnrichmentFunction mod(eval, detail::merge_sorted(f.breakpoints(), interior),
                               f.label() + "-I", f.pw_linear(), f.singular_point());

        double scale = 0.0;
        for (std::size_t k = 0; k + 1 < p.vertex_coords.size(); ++k) {
            const double a = p.vertex_coords[k], b = p.vertex_coords[k + 1];
            for (int i = 0; i < 32; ++i)
                scale = std::max(scale, std::abs(f.value(a + (i + 0.5) / 32 * (b - a))));
        }
        bool zero = true;
        for (std::size_t k = 0; k + 1 < p.vertex_coords.size() && zero; ++k)
            zero = identically_zero_on(mod, p.vertex_coords[k], p.vertex_coords[k + 1], scale);
        if (zero)
            ++out.dropped;
        else
            out.functions.push_back(std::move(mod));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

/// (x - x_i)^j for j = 1..degree.
inline LocalSpace polynomial_space(const Patch& p, int degree) {
    if (degree < 0) throw std::invalid_argument("polynomial_space: negative degree");
    LocalSpace s;
    s.patch = p;
    const double xi = p.vertex_coords[p.center - p.vertices.front()];
    for (int j = 1; j <= degree; ++j) {
        auto eval = [xi, j](double x, Side) -> FnSample {
            const double d = x - xi;
            return {std::pow(d, j), j * std::pow(d, j - 1)};
        };
        s.functions.emplace_back(eval, std::vector<double>{},
                                 "(x-x_i)^" + std::to_string(j), j <= 1);
    }
    return s;
}

/// Running integral of 1/a from the left patch endpoint; piecewise
/// linear with kinks at the discontinuities of a, derivative 1/a.
inline LocalSpace interface_space(const Patch& p, const CoefficientFn& a) {
    if (!a.piecewise_constant())
        throw std::invalid_argument("interface_space: coefficient must be piecewise constant");
    // segment table over the patch: [left, breaks..., right]
    std::vector<double> seg{p.left};
    for (double bp : a.breakpoints())
        if (bp > p.left && bp < p.right) seg.push_back(bp);
    std::vector<double> acc(seg.size(), 0.0);   // integral value at segment starts
    std::vector<double> aseg(seg.size(), 1.0);  // coefficient value per segment
    for (std::size_t i = 0; i < seg.size(); ++i)
        aseg[i] = a.value_between(seg[i], i + 1 < seg.size() ? seg[i + 1] : p.right);
    for (std::size_t i = 1; i < seg.size(); ++i)
        acc[i] = acc[i - 1] + (seg[i] - seg[i - 1]) / aseg[i - 1];
    auto eval = [seg, acc, aseg](double x, Side) -> FnSample {
        std::size_t i = seg.size() - 1;
        while (i > 0 && x < seg[i]) --i;
        return {acc[i] + (x - seg[i]) / aseg[i], 1.0 / aseg[i]};
    };
    std::vector<double> bps(seg.begin() + 1, seg.end());
    LocalSpace s;
    s.patch = p;
    s.functions.emplace_back(eval, bps, "int(1/a)", true);
    return s;
}

/// (x - x_i) and x^alpha restricted to the patch; 1/2 < alpha < 3/2,
/// alpha != 1. x^alpha carries breakpoint and singular point 0 when the
/// patch closure touches the origin.
inline LocalSpace singular_space(const Patch& p, double alpha) {
    if (!(alpha > 0.5 && alpha < 1.5) || alpha == 1.0)
        throw std::invalid_argument("singular_space: alpha must be in (1/2,3/2), != 1");
    LocalSpace s = polynomial_space(p, 1);
    const bool touches_origin = p.left <= 0.0;
    auto eval = [alpha](double x, Side) -> FnSample {
        if (x <= 0.0) return {0.0, 0.0};
        return {std::pow(x, alpha), alpha * std::pow(x, alpha - 1.0)};
    };
    std::vector<double> bps;
    std::optional<double> sing;
    if (touches_origin) {
        bps.push_back(0.0);
        sing = 0.0;
    }
    s.functions.emplace_back(eval, bps, "x^alpha", false, sing);
    return s;
}

/// (x - x_i) and the Heaviside H_c (= 1 left of c, -1 from c on). The
/// left-sided value at c is 1.
inline LocalSpace heaviside_space(const Patch& p, double c) {
    for (double v : p.vertex_coords)
        if (c == v)
            throw std::invalid_argument("heaviside_space: c coincides with a mesh vertex");
    LocalSpace s = polynomial_space(p, 1);
    auto eval = [c](double x, Side side) -> FnSample {
        if (x < c) return {1.0, 0.0};
        if (x == c && side == Side::left) return {1.0, 0.0};
        return {-1.0, 0.0};
    };
    s.functions.emplace_back(eval, std::vector<double>{c}, "H_c", true);
    return s;
}

}  // namespace sgfem

#endif
