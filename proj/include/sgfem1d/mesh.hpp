#ifndef SGFEM1D_MESH_HPP
#define SGFEM1D_MESH_HPP

#include <stdexcept>
#include <vector>

namespace sgfem {

/// Uniform vertex grid on (0,1). Element k (1-based) spans
/// [vertex[k-1], vertex[k]]; coordinates are stored as i*h, never
/// accumulated, so runs are bit-reproducible across mesh sizes.
struct Mesh {
    int num_elements = 0;          // N
    double h = 0.0;                // 1/N
    std::vector<double> vertex;    // x_i = i*h, i = 0..N

    int num_vertices() const { return num_elements + 1; }
    double element_left(int k) const { return vertex[k - 1]; }
    double element_right(int k) const { return vertex[k]; }
};

inline Mesh uniform_mesh(int n_elements) {
    if (n_elements < 2)
        throw std::invalid_argument("uniform_mesh: need at least 2 elements");
    Mesh m;
    m.num_elements = n_elements;
    m.h = 1.0 / n_elements;
    m.vertex.resize(n_elements + 1);
    for (int i = 0; i <= n_elements; ++i)
        m.vertex[i] = i * m.h;
    m.vertex[n_elements] = 1.0;
    return m;
}

/// Open interval omega_i supporting hat i. Interior patches have 3
/// vertices and 2 elements; the boundary patches omega_0, omega_N have 2
/// vertices and a single element.
struct Patch {
    int center = 0;
    double left = 0.0, right = 0.0;
    std::vector<int> vertices;            // clipped {i-1, i, i+1}
    std::vector<double> vertex_coords;
    std::vector<int> elements;            // 1-based element ids inside closure
};

inline Patch patch(const Mesh& m, int i) {
    if (i < 0 || i > m.num_elements)
        throw std::out_of_range("patch: vertex index out of range");
    Patch p;
    p.center = i;
    const int lo = i > 0 ? i - 1 : 0;
    const int hi = i < m.num_elements ? i + 1 : m.num_elements;
    p.left = m.vertex[lo];
    p.right = m.vertex[hi];
    for (int v = lo; v <= hi; ++v) {
        p.vertices.push_back(v);
        p.vertex_coords.push_back(m.vertex[v]);
    }
    for (int k = lo + 1; k <= hi; ++k)
        p.elements.push_back(k);
    return p;
}

struct HatValue {
    double value = 0.0;
    double derivative = 0.0;
};

/// Piecewise-linear hat N_i. At kinks the one-sided derivative from the
/// right is returned (from the left at x = 1); quadrature nodes are
/// interior so this only affects point diagnostics. The falling branch
/// is evaluated as 1 - r with the same ratio r = (x - x_i)/h the next
/// hat's rising branch uses, which keeps the pointwise partition-of-unity
/// sum exactly 1 on any mesh.
inline HatValue hat_eval(const Mesh& m, int i, double x) {
    if (i < 0 || i > m.num_elements)
        throw std::out_of_range("hat_eval: vertex index out of range");
    const double h = m.h;
    const int n = m.num_elements;
    if (x >= 1.0) {
        if (i == n) return {1.0, 1.0 / h};
        if (i == n - 1) return {0.0, -1.0 / h};
        return {0.0, 0.0};
    }
    const double xi = m.vertex[i];
    if (x == xi) return {1.0, i < n ? -1.0 / h : 1.0 / h};
    if (x > xi && i < n) {
        const double xr = m.vertex[i + 1];
        if (x < xr) return {1.0 - (x - xi) / h, -1.0 / h};
        return {0.0, 0.0};
    }
    if (x < xi && i > 0) {
        const double xl = m.vertex[i - 1];
        if (x >= xl) return {(x - xl) / h, 1.0 / h};
    }
    return {0.0, 0.0};
}

}  // namespace sgfem

#endif
