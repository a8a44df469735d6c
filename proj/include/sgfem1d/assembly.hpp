#ifndef SGFEM1D_ASSEMBLY_HPP
#define SGFEM1D_ASSEMBLY_HPP

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sgfem1d/coefficient.hpp"
#include "sgfem1d/enrichment.hpp"
#include "sgfem1d/linalg.hpp"
#include "sgfem1d/mesh.hpp"
#include "sgfem1d/quadrature.hpp"

namespace sgfem {

enum class Method { FEM, GFEM, SGFEM };

/// Dof enumeration order over vertices. `reversed` renumbers the mesh
/// vertices back to front, which permutes the elimination order without
/// changing the matrix spectrum.
enum class VertexOrder { forward, reversed };

using Catalog = std::function<LocalSpace(const Mesh&, const Patch&)>;

/// Trial space S = S1 + S2bar: hat dofs on t1, per-vertex local spaces
/// (modified in SGFEM mode, raw in GFEM, ignored in FEM). t2 collects
/// the vertices whose local space survived.
struct GlobalSpace {
    Mesh mesh;
    Method method = Method::FEM;
    std::vector<char> in_t1;
    std::vector<ModifiedLocalSpace> local;
    std::vector<int> t2;

    int zeta1() const {
        int c = 0;
        for (char f : in_t1) c += f != 0;
        return c;
    }
    int zeta2() const { return static_cast<int>(t2.size()); }
};

inline GlobalSpace build_space(const Mesh& mesh, Method method, std::span<const int> t1,
                               const Catalog& catalog = {}) {
    GlobalSpace s;
    s.mesh = mesh;
    s.method = method;
    s.in_t1.assign(mesh.num_vertices(), 0);
    for (int v : t1) {
        if (v < 0 || v >= mesh.num_vertices())
            throw std::out_of_range("build_space: t1 vertex out of range");
        s.in_t1[v] = 1;
    }
    s.local.resize(mesh.num_vertices());
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        Patch p = patch(mesh, i);
        if (method == Method::FEM || !catalog) {
            s.local[i].patch = p;
            continue;
        }
        LocalSpace raw = catalog(mesh, p);
        if (method == Method::SGFEM) {
            s.local[i] = modify(raw);
        } else {
            s.local[i].patch = raw.patch;
            s.local[i].functions = raw.functions;
        }
        if (!s.local[i].functions.empty()) s.t2.push_back(i);
    }
    return s;
}

struct DofInfo {
    int vertex = 0;
    bool is_hat = true;
    int local_index = 0;  // enrichment slot within the vertex
};

/// Interleaved enumeration: per vertex its hat dof (when in t1) followed
/// by its enrichment dofs; vertices in forward or reversed order.
struct DofMap {
    std::vector<int> hat_dof;               // -1 when absent
    std::vector<std::vector<int>> enr_dof;
    std::vector<DofInfo> dofs;
    int bandwidth = 0;

    int count() const { return static_cast<int>(dofs.size()); }
};

inline DofMap build_dofmap(const GlobalSpace& s, VertexOrder order = VertexOrder::forward) {
    DofMap dm;
    const int nv = s.mesh.num_vertices();
    dm.hat_dof.assign(nv, -1);
    dm.enr_dof.resize(nv);
    auto visit = [&](int i) {
        if (s.in_t1[i]) {
            dm.hat_dof[i] = dm.count();
            dm.dofs.push_back({i, true, 0});
        }
        for (int j = 0; j < static_cast<int>(s.local[i].functions.size()); ++j) {
            dm.enr_dof[i].push_back(dm.count());
            dm.dofs.push_back({i, false, j});
        }
    };
    if (order == VertexOrder::forward)
        for (int i = 0; i < nv; ++i) visit(i);
    else
        for (int i = nv - 1; i >= 0; --i) visit(i);

    for (int k = 1; k <= s.mesh.num_elements; ++k) {
        int lo = dm.count(), hi = -1;
        for (int v : {k - 1, k}) {
            if (dm.hat_dof[v] >= 0) {
                lo = std::min(lo, dm.hat_dof[v]);
                hi = std::max(hi, dm.hat_dof[v]);
            }
            for (int d : dm.enr_dof[v]) {
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
        }
        if (hi >= lo) dm.bandwidth = std::max(dm.bandwidth, hi - lo);
    }
    return dm;
}

namespace detail {

/// A shape function restricted to one element: either a hat or a
/// hat-times-enrichment product.
struct ElemShape {
    bool is_hat = true;
    int vertex = 0;
    int fn = -1;
    const EnrichmentFunction* enr = nullptr;
};

inline FnSample shape_eval(const Mesh& m, const ElemShape& s, double x, Side side) {
    const HatValue h = hat_eval(m, s.vertex, x);
    if (s.is_hat) return {h.value, h.derivative};
    const FnSample f = s.enr->eval(x, side);
    return {h.value * f.value, h.derivative * f.value + h.value * f.derivative};
}

inline void collect_breaks(const ElemShape& s, double lo, double hi, std::vector<double>& out) {
    if (s.is_hat) return;
    for (double b : s.enr->breakpoints())
        if (b > lo && b < hi) out.push_back(b);
}

inline bool singular_at_left(const ElemShape& s, double lo) {
    return !s.is_hat && s.enr->singular_point() && *s.enr->singular_point() == lo;
}

/// Stiffness interaction of two element shapes over element k.
///
/// Hat-hat and hat-enrichment rows with a piecewise-constant coefficient
/// are integrated exactly: the hat derivative is constant on the element,
/// so per coefficient piece the integral telescopes to boundary values of
/// the other shape. This keeps analytically zero couplings exactly zero,
/// which the round-off experiments depend on. Everything else goes
/// through composite Gauss with the union of breakpoints.
inline double stiffness_entry(const Mesh& m, int k, const CoefficientFn& a,
                              const ElemShape& s1, const ElemShape& s2,
                              const QuadRule& rule) {
    const double lo = m.element_left(k), hi = m.element_right(k);
    std::vector<double> abreaks;
    if (a.piecewise_constant())
        for (double b : a.breakpoints())
            if (b > lo && b < hi) abreaks.push_back(b);

    if (s1.is_hat && s2.is_hat && a.piecewise_constant()) {
        const double c1 = hat_eval(m, s1.vertex, 0.5 * (lo + hi)).derivative;
        const double c2 = hat_eval(m, s2.vertex, 0.5 * (lo + hi)).derivative;
        double sum = 0.0;
        double prev = lo;
        for (double b : abreaks) {
            sum += a.value_between(prev, b) * (b - prev);
            prev = b;
        }
        sum += a.value_between(prev, hi) * (hi - prev);
        return c1 * c2 * sum;
    }

    if ((s1.is_hat != s2.is_hat) && a.piecewise_constant()) {
        const ElemShape& hat = s1.is_hat ? s1 : s2;
        const ElemShape& other = s1.is_hat ? s2 : s1;
        const double c = hat_eval(m, hat.vertex, 0.5 * (lo + hi)).derivative;
        std::vector<double> pieces{lo};
        std::vector<double> merged = abreaks;
        collect_breaks(other, lo, hi, merged);
        std::sort(merged.begin(), merged.end());
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
        for (double b : merged) pieces.push_back(b);
        pieces.push_back(hi);
        double sum = 0.0;
        for (std::size_t p = 0; p + 1 < pieces.size(); ++p) {
            const double pa = pieces[p], pb = pieces[p + 1];
            const double ap = a.value_between(pa, pb);
            const double g1 = shape_eval(m, other, pb, Side::left).value;
            const double g0 = shape_eval(m, other, pa, Side::right).value;
            sum += ap * (g1 - g0);
        }
        return c * sum;
    }

    std::vector<double> breaks = abreaks;
    collect_breaks(s1, lo, hi, breaks);
    collect_breaks(s2, lo, hi, breaks);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    const Singularity sing =
        (singular_at_left(s1, lo) || singular_at_left(s2, lo)) ? Singularity::left
                                                               : Singularity::none;
    auto f = [&](double x) {
        return a(x) * shape_eval(m, s1, x, Side::right).derivative *
               shape_eval(m, s2, x, Side::right).derivative;
    };
    return integrate(f, lo, hi, breaks, sing, rule);
}

}  // namespace detail

/// Element stiffness blocks. Enrichment rows/columns exist only for
/// (vertex, function) slots whose function is not identically zero on
/// this element.
struct ElementMatrix {
    int element = 0;
    std::vector<int> hat_vertices;                  // carrying a hat dof
    std::vector<std::pair<int, int>> enr_slots;     // (vertex, local index)
    std::vector<double> a11, a12, a22;              // row-major blocks

    int nhat() const { return static_cast<int>(hat_vertices.size()); }
    int nenr() const { return static_cast<int>(enr_slots.size()); }
    int associated_vertices() const {
        int c = 0;
        int last = -1;
        for (auto& [v, j] : enr_slots)
            if (v != last) {
                ++c;
                last = v;
            }
        return c;
    }
    double a11_at(int r, int c) const { return a11[static_cast<std::size_t>(r) * nhat() + c]; }
    double a12_at(int r, int c) const { return a12[static_cast<std::size_t>(r) * nenr() + c]; }
    double a22_at(int r, int c) const { return a22[static_cast<std::size_t>(r) * nenr() + c]; }
};

inline ElementMatrix element_stiffness(int k, const GlobalSpace& s, const CoefficientFn& a,
                                       const QuadRule& rule = QuadRule{}) {
    if (k < 1 || k > s.mesh.num_elements)
        throw std::out_of_range("element_stiffness: bad element index");
    const double lo = s.mesh.element_left(k), hi = s.mesh.element_right(k);
    ElementMatrix em;
    em.element = k;
    std::vector<detail::ElemShape> hats, enrs;
    for (int v : {k - 1, k}) {
        if (s.in_t1[v]) {
            em.hat_vertices.push_back(v);
            hats.push_back({true, v, -1, nullptr});
        }
        const auto& fns = s.local[v].functions;
        for (int j = 0; j < static_cast<int>(fns.size()); ++j) {
            double scale = 0.0;
            const Patch& p = s.local[v].patch;
            for (std::size_t e = 0; e + 1 < p.vertex_coords.size(); ++e)
                for (int q = 0; q < 32; ++q)
                    scale = std::max(scale, std::abs(fns[j].value(
                                                p.vertex_coords[e] +
                                                (q + 0.5) / 32 *
                                                    (p.vertex_coords[e + 1] - p.vertex_coords[e]))));
            if (identically_zero_on(fns[j], lo, hi, scale)) continue;
            em.enr_slots.emplace_back(v, j);
            enrs.push_back({false, v, j, &fns[j]});
        }
    }
    em.a11.assign(static_cast<std::size_t>(em.nhat()) * em.nhat(), 0.0);
    em.a12.assign(static_cast<std::size_t>(em.nhat()) * em.nenr(), 0.0);
    em.a22.assign(static_cast<std::size_t>(em.nenr()) * em.nenr(), 0.0);
    for (int r = 0; r < em.nhat(); ++r)
        for (int c = r; c < em.nhat(); ++c) {
            const double v = detail::stiffness_entry(s.mesh, k, a, hats[r], hats[c], rule);
            em.a11[static_cast<std::size_t>(r) * em.nhat() + c] = v;
            em.a11[static_cast<std::size_t>(c) * em.nhat() + r] = v;
        }
    for (int r = 0; r < em.nhat(); ++r)
        for (int c = 0; c < em.nenr(); ++c)
            em.a12[static_cast<std::size_t>(r) * em.nenr() + c] =
                detail::stiffness_entry(s.mesh, k, a, hats[r], enrs[c], rule);
    for (int r = 0; r < em.nenr(); ++r)
        for (int c = r; c < em.nenr(); ++c) {
            const double v = detail::stiffness_entry(s.mesh, k, a, enrs[r], enrs[c], rule);
            em.a22[static_cast<std::size_t>(r) * em.nenr() + c] = v;
            em.a22[static_cast<std::size_t>(c) * em.nenr() + r] = v;
        }
    return em;
}

/// Load data: body force f (with its own breakpoints and optional
/// integrable singularity at x = 0), an optional natural boundary datum
/// q contributing q*v(1), and Dirichlet lifts applied by subtracting
/// value * B(N_vertex, shape) from the right-hand side.
struct LoadSpec {
    std::function<double(double)> f;
    std::vector<double> f_breakpoints;
    bool f_singular_left = false;
    double natural_right = 0.0;
    std::vector<std::pair<int, double>> dirichlet_lift;
};

struct GlobalSystem {
    GlobalSpace space;
    DofMap dofmap;
    BandedSymMatrix matrix;
    std::vector<double> load;
    std::vector<ElementMatrix> elements;
};

inline GlobalSystem assemble(const GlobalSpace& s, const CoefficientFn& a,
                             const LoadSpec& load, const QuadRule& rule = QuadRule{},
                             VertexOrder order = VertexOrder::forward) {
    GlobalSystem sys{s, build_dofmap(s, order), BandedSymMatrix(), {}, {}};
    const int n = sys.dofmap.count();
    if (n == 0) throw std::invalid_argument("assemble: empty dof set");
    sys.matrix = BandedSymMatrix(n, sys.dofmap.bandwidth);
    sys.load.assign(n, 0.0);
    const Mesh& m = s.mesh;

    for (int k = 1; k <= m.num_elements; ++k) {
        ElementMatrix em = element_stiffness(k, s, a, rule);
        const double lo = m.element_left(k), hi = m.element_right(k);
        std::vector<int> dofs;
        std::vector<detail::ElemShape> shapes;
        for (int v : em.hat_vertices) {
            dofs.push_back(sys.dofmap.hat_dof[v]);
            shapes.push_back({true, v, -1, nullptr});
        }
        for (auto& [v, j] : em.enr_slots) {
            dofs.push_back(sys.dofmap.enr_dof[v][j]);
            shapes.push_back({false, v, j, &s.local[v].functions[j]});
        }
        // scatter (upper triangle of the element matrix, mirrored into band)
        const int nh = em.nhat(), ne = em.nenr();
        for (int r = 0; r < nh + ne; ++r)
            for (int c = r; c < nh + ne; ++c) {
                double v;
                if (r < nh && c < nh)
                    v = em.a11_at(r, c);
                else if (r < nh)
                    v = em.a12_at(r, c - nh);
                else
                    v = em.a22_at(r - nh, c - nh);
                if (dofs[r] >= dofs[c])
                    sys.matrix.add(dofs[r], dofs[c], v);
                else
                    sys.matrix.add(dofs[c], dofs[r], v);
            }
        // load vector
        for (std::size_t i = 0; i < shapes.size(); ++i) {
            const detail::ElemShape& sh = shapes[i];
            if (load.f) {
                std::vector<double> breaks;
                for (double b : load.f_breakpoints)
                    if (b > lo && b < hi) breaks.push_back(b);
                detail::collect_breaks(sh, lo, hi, breaks);
                std::sort(breaks.begin(), breaks.end());
                breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
                const Singularity sing = ((load.f_singular_left && lo == 0.0) ||
                                          detail::singular_at_left(sh, lo))
                                             ? Singularity::left
                                             : Singularity::none;
                auto f = [&](double x) {
                    return load.f(x) * detail::shape_eval(m, sh, x, Side::right).value;
                };
                sys.load[dofs[i]] += integrate(f, lo, hi, breaks, sing, rule);
            }
            for (auto& [lift_vertex, lift_value] : load.dirichlet_lift) {
                if (lift_vertex != k - 1 && lift_vertex != k) continue;
                const detail::ElemShape lift_hat{true, lift_vertex, -1, nullptr};
                sys.load[dofs[i]] -=
                    lift_value * detail::stiffness_entry(m, k, a, lift_hat, sh, rule);
            }
        }
        sys.elements.push_back(std::move(em));
    }

    if (load.natural_right != 0.0) {
        const int nv = m.num_vertices() - 1;
        if (sys.dofmap.hat_dof[nv] >= 0)
            sys.load[sys.dofmap.hat_dof[nv]] += load.natural_right;
        for (int j = 0; j < static_cast<int>(s.local[nv].functions.size()); ++j) {
            const int d = sys.dofmap.enr_dof[nv][j];
            sys.load[d] += load.natural_right * s.local[nv].functions[j].value(1.0, Side::left);
        }
    }
    return sys;
}

/// Evaluate the discrete solution (plus Dirichlet lifts) at x.
inline FnSample eval_solution(const GlobalSpace& s, const DofMap& dm,
                              std::span<const double> coeffs,
                              std::span<const std::pair<int, double>> lifts, double x,
                              Side side = Side::right) {
    const Mesh& m = s.mesh;
    int k = static_cast<int>(x / m.h) + 1;
    if (k < 1) k = 1;
    if (k > m.num_elements) k = m.num_elements;
    if (x < m.element_left(k) && k > 1) --k;
    FnSample out{0.0, 0.0};
    for (int v : {k - 1, k}) {
        const HatValue hv = hat_eval(m, v, x);
        if (dm.hat_dof[v] >= 0) {
            out.value += coeffs[dm.hat_dof[v]] * hv.value;
            out.derivative += coeffs[dm.hat_dof[v]] * hv.derivative;
        }
        for (int j = 0; j < static_cast<int>(s.local[v].functions.size()); ++j) {
            const FnSample f = s.local[v].functions[j].eval(x, side);
            const int d = dm.enr_dof[v][j];
            out.value += coeffs[d] * hv.value * f.value;
            out.derivative += coeffs[d] * (hv.derivative * f.value + hv.value * f.derivative);
        }
        for (auto& [lv, lval] : lifts)
            if (lv == v) {
                out.value += lval * hv.value;
                out.derivative += lval * hv.derivative;
            }
    }
    return out;
}

/// Per-vertex Assumption-3 data: Delta_i (sum of delta^{-2} over the
/// enriched elements at the vertex) against the assembled A22 diagonal.
struct VertexScalingReport {
    int vertex = 0;
    int local_index = 0;
    double delta_sum = 0.0;   // Delta_i
    double a22_diag = 0.0;    // (A22)_{j_i j_i}
    double ratio = 0.0;       // (A22)^{-1} Delta_i
};

using DeltaProvider = std::function<double(const ElementMatrix&, int slot)>;

inline DeltaProvider default_delta() {
    return [](const ElementMatrix& em, int slot) {
        return 1.0 / std::sqrt(em.a22_at(slot, slot));
    };
}

inline std::vector<VertexScalingReport> delta_and_assumption3(
    const GlobalSpace& s, const std::vector<ElementMatrix>& elements,
    const DeltaProvider& delta = {}) {
    const DeltaProvider& dp = delta ? delta : default_delta();
    std::vector<VertexScalingReport> out;
    auto find = [&](int v, int j) -> VertexScalingReport& {
        for (auto& r : out)
            if (r.vertex == v && r.local_index == j) return r;
        out.push_back({v, j, 0.0, 0.0, 0.0});
        return out.back();
    };
    for (const ElementMatrix& em : elements) {
        for (int slot = 0; slot < em.nenr(); ++slot) {
            auto [v, j] = em.enr_slots[slot];
            VertexScalingReport& r = find(v, j);
            const double d = dp(em, slot);
            r.delta_sum += 1.0 / (d * d);
            r.a22_diag += em.a22_at(slot, slot);
        }
    }
    for (auto& r : out) r.ratio = r.delta_sum / r.a22_diag;
    return out;
}

/// Eigenvalues of D^(k) A22^(k) D^(k) for one element.
inline std::vector<double> scaled_element_eigs(const ElementMatrix& em,
                                               const DeltaProvider& delta = {}) {
    const DeltaProvider& dp = delta ? delta : default_delta();
    const int n = em.nenr();
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = dp(em, i);
    std::vector<double> m(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m[static_cast<std::size_t>(i) * n + j] = d[i] * em.a22_at(i, j) * d[j];
    return symmetric_eigenvalues(std::move(m), n);
}

}  // namespace sgfem

#endif
