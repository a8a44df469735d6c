#ifndef SGFEM1D_LINALG_HPP
#define SGFEM1D_LINALG_HPP

#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgfem {

struct SingularMatrixError : std::runtime_error {
    int pivot_index;
    explicit SingularMatrixError(int k)
        : std::runtime_error("band_lu_nopivot: vanishing pivot at index " + std::to_string(k)),
          pivot_index(k) {}
};

struct DegenerateMatrixError : std::runtime_error {
    int dof;
    explicit DegenerateMatrixError(int d)
        : std::runtime_error("scaled_matrix: nonpositive diagonal at dof " + std::to_string(d)),
          dof(d) {}
};

/// Symmetric banded matrix, lower band stored: band_[d][j] = A(j+d, j)
/// for diagonal offset d = 0..w.
class BandedSymMatrix {
public:
    BandedSymMatrix() = default;
    BandedSymMatrix(int n, int w) : n_(n), w_(w), band_(static_cast<std::size_t>(w + 1) * n, 0.0) {
        if (n < 1 || w < 0) throw std::invalid_argument("BandedSymMatrix: bad shape");
    }

    int size() const { return n_; }
    int bandwidth() const { return w_; }

    double operator()(int i, int j) const {
        if (i < j) std::swap(i, j);
        if (i - j > w_) return 0.0;
        return band_[static_cast<std::size_t>(i - j) * n_ + j];
    }
    void add(int i, int j, double v) {
        if (i < j) std::swap(i, j);
        if (i - j > w_) throw std::out_of_range("BandedSymMatrix::add outside band");
        band_[static_cast<std::size_t>(i - j) * n_ + j] += v;
    }
    void set(int i, int j, double v) {
        if (i < j) std::swap(i, j);
        if (i - j > w_) throw std::out_of_range("BandedSymMatrix::set outside band");
        band_[static_cast<std::size_t>(i - j) * n_ + j] = v;
    }
    double diag(int i) const { return band_[static_cast<std::size_t>(i)]; }

    /// y = A x, row by row in ascending index order.
    std::vector<double> matvec(std::span<const double> x) const {
        std::vector<double> y(n_, 0.0);
        for (int i = 0; i < n_; ++i) {
            double s = 0.0;
            const int lo = i - w_ > 0 ? i - w_ : 0;
            const int hi = i + w_ < n_ - 1 ? i + w_ : n_ - 1;
            for (int j = lo; j <= hi; ++j) s += (*this)(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

private:
    int n_ = 0, w_ = 0;
    std::vector<double> band_;
};

/// H = DAD with D_ii = A_ii^{-1/2}; unit diagonal, same bandwidth.
inline BandedSymMatrix scaled_matrix(const BandedSymMatrix& a) {
    const int n = a.size(), w = a.bandwidth();
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) {
        if (!(a.diag(i) > 0.0)) throw DegenerateMatrixError(i);
        d[i] = 1.0 / std::sqrt(a.diag(i));
    }
    BandedSymMatrix h(n, w);
    for (int j = 0; j < n; ++j)
        for (int i = j; i <= j + w && i < n; ++i)
            h.set(i, j, a(i, j) * d[i] * d[j]);
    return h;
}

/// In-band LU factors from elimination without pivoting, deterministic
/// left-to-right order. Storage m_[w + i - j][j] holds entry (i, j) of
/// the working array; L has unit diagonal.
class BandLU {
public:
    BandLU(const BandedSymMatrix& a) : n_(a.size()), w_(a.bandwidth()) {
        m_.assign(static_cast<std::size_t>(2 * w_ + 1) * n_, 0.0);
        for (int j = 0; j < n_; ++j) {
            const int lo = j - w_ > 0 ? j - w_ : 0;
            const int hi = j + w_ < n_ - 1 ? j + w_ : n_ - 1;
            for (int i = lo; i <= hi; ++i) at(i, j) = a(i, j);
        }
        for (int k = 0; k < n_; ++k) {
            const double piv = at(k, k);
            if (std::abs(piv) < 1e-300) throw SingularMatrixError(k);
            const int iend = k + w_ < n_ - 1 ? k + w_ : n_ - 1;
            for (int i = k + 1; i <= iend; ++i) {
                const double l = at(i, k) / piv;
                at(i, k) = l;
                for (int j = k + 1; j <= iend; ++j) at(i, j) -= l * at(k, j);
            }
        }
    }

    int size() const { return n_; }

    /// Forward/back substitution with ascending-index summation.
    std::vector<double> solve(std::span<const double> b) const {
        if (static_cast<int>(b.size()) != n_)
            throw std::invalid_argument("BandLU::solve: dimension mismatch");
        std::vector<double> x(b.begin(), b.end());
        for (int i = 0; i < n_; ++i) {
            double s = x[i];
            const int lo = i - w_ > 0 ? i - w_ : 0;
            for (int j = lo; j < i; ++j) s -= at(i, j) * x[j];
            x[i] = s;
        }
        for (int i = n_ - 1; i >= 0; --i) {
            double s = x[i];
            const int hi = i + w_ < n_ - 1 ? i + w_ : n_ - 1;
            for (int j = i + 1; j <= hi; ++j) s -= at(i, j) * x[j];
            x[i] = s / at(i, i);
        }
        return x;
    }

    double entry(int i, int j) const {
        if (i - j > w_ || j - i > w_) return i == j ? 1.0 : 0.0;
        return m_[static_cast<std::size_t>(w_ + i - j) * n_ + j];
    }

private:
    double& at(int i, int j) { return m_[static_cast<std::size_t>(w_ + i - j) * n_ + j]; }
    double at(int i, int j) const { return m_[static_cast<std::size_t>(w_ + i - j) * n_ + j]; }
    int n_, w_;
    std::vector<double> m_;
};

inline BandLU band_lu_nopivot(const BandedSymMatrix& a) { return BandLU(a); }

inline std::vector<double> solve(const BandLU& lu, std::span<const double> b) {
    return lu.solve(b);
}

namespace detail {

/// Deterministic start vector (splitmix64 bits mapped into [-1,1]).
inline std::vector<double> seeded_vector(int n, std::uint64_t seed) {
    std::vector<double> v(n);
    std::uint64_t s = seed;
    for (int i = 0; i < n; ++i) {
        s += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        z = z ^ (z >> 31);
        v[i] = 2.0 * (static_cast<double>(z >> 11) * 0x1.0p-53) - 1.0;
    }
    return v;
}

inline double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace detail

/// One extreme eigenpair with the Rayleigh quotient taken against the
/// original matrix.
struct EigenPair {
    double lambda = 0.0;
    std::vector<double> vector;
    int iterations = 0;
    bool converged = false;
};

namespace detail {

/// Inverse iteration on `shifted` with Rayleigh quotients against `a`;
/// stops when successive quotients agree to tol relatively.
inline EigenPair rq_inverse_iteration(const BandedSymMatrix& a, const BandedSymMatrix& shifted,
                                      double tol, int max_iter, std::uint64_t seed) {
    const BandLU lu(shifted);
    std::vector<double> v = seeded_vector(a.size(), seed);
    double nv = norm2(v);
    for (double& x : v) x /= nv;
    EigenPair r;
    double lam_old = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        std::vector<double> y = lu.solve(v);
        const double ny = norm2(y);
        if (!(ny > 0.0) || !std::isfinite(ny)) break;
        for (int i = 0; i < a.size(); ++i) v[i] = y[i] / ny;
        const double lam = dot(v, a.matvec(v));
        r.iterations = it;
        r.lambda = lam;
        if (it > 1 && std::abs(lam - lam_old) <= tol * std::abs(lam)) {
            r.converged = true;
            break;
        }
        lam_old = lam;
    }
    r.vector = std::move(v);
    return r;
}

}  // namespace detail

/// Smallest eigenpair of an SPD banded matrix by inverse iteration
/// (shift 0) through the no-pivot band factorization.
inline EigenPair smallest_eigenpair(const BandedSymMatrix& a, double tol = 1e-8,
                                    int max_iter = 10000) {
    return detail::rq_inverse_iteration(a, a, tol, max_iter, 0xFACEFEEDull);
}

/// Largest eigenpair by inverse iteration on sigma*I - A with sigma just
/// above the Gershgorin bound. Unlike plain power iteration this keeps a
/// small eigenpair residual even when the upper spectrum is clustered.
inline EigenPair largest_eigenpair(const BandedSymMatrix& a, double tol = 1e-8,
                                   int max_iter = 10000) {
    const int n = a.size(), w = a.bandwidth();
    double bound = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = std::max(0, i - w); j <= std::min(n - 1, i + w); ++j)
            row += std::abs(a(i, j));
        bound = std::max(bound, row);
    }
    const double sigma = bound + 1e-12 * std::max(bound, 1.0);
    BandedSymMatrix shifted(n, w);
    for (int j = 0; j < n; ++j) {
        shifted.set(j, j, sigma - a.diag(j));
        for (int i = j + 1; i <= j + w && i < n; ++i) shifted.set(i, j, -a(i, j));
    }
    return detail::rq_inverse_iteration(a, shifted, tol, max_iter, 0x5EEDF00Dull);
}

/// Extreme eigenvalues and condition numbers of an SPD banded matrix.
/// kappa2 is lambda_max/lambda_min of A itself; scaled_kappa is the same
/// ratio for H = DAD (the scaled condition number).
struct CondReport {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double kappa2 = 0.0;
    double scaled_kappa = 0.0;
    int iterations = 0;
    bool converged = false;
};

inline CondReport extreme_eigs(const BandedSymMatrix& a, double tol = 1e-8,
                               int max_iter = 10000) {
    CondReport rep;
    const EigenPair pmax = largest_eigenpair(a, tol, max_iter);
    const EigenPair pmin = smallest_eigenpair(a, tol, max_iter);
    rep.lambda_max = pmax.lambda;
    rep.lambda_min = pmin.lambda;
    rep.kappa2 = pmax.lambda / pmin.lambda;
    rep.iterations = pmax.iterations + pmin.iterations;
    rep.converged = pmax.converged && pmin.converged;

    const BandedSymMatrix h = scaled_matrix(a);
    const EigenPair hmax = largest_eigenpair(h, tol, max_iter);
    const EigenPair hmin = smallest_eigenpair(h, tol, max_iter);
    rep.scaled_kappa = hmax.lambda / hmin.lambda;
    rep.iterations += hmax.iterations + hmin.iterations;
    rep.converged = rep.converged && hmax.converged && hmin.converged;
    return rep;
}

/// Relative Euclidean error of a computed solution.
inline double eta(std::span<const double> x_exact, std::span<const double> x_computed) {
    if (x_exact.size() != x_computed.size())
        throw std::invalid_argument("eta: dimension mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x_exact.size(); ++i) {
        const double d = x_exact[i] - x_computed[i];
        num += d * d;
        den += x_exact[i] * x_exact[i];
    }
    if (den == 0.0) throw std::invalid_argument("eta: zero exact vector");
    return std::sqrt(num) / std::sqrt(den);
}

struct BauerResult {
    std::vector<double> x_direct;
    std::vector<double> x_scaled;
};

/// Solve A x = b directly and through the binary diagonal scaling
/// D A D z = D b with D_ii = 2^{g_i}, both by the same no-pivot
/// elimination. Power-of-two scaling is exact, so x_scaled = D z must
/// match x_direct bitwise.
inline BauerResult bauer_binary_solve(const BandedSymMatrix& a, std::span<const double> b,
                                      std::span<const int> g) {
    const int n = a.size();
    if (static_cast<int>(b.size()) != n || static_cast<int>(g.size()) != n)
        throw std::invalid_argument("bauer_binary_solve: dimension mismatch");
    BauerResult r;
    r.x_direct = BandLU(a).solve(b);

    BandedSymMatrix h(n, a.bandwidth());
    for (int j = 0; j < n; ++j)
        for (int i = j; i <= j + a.bandwidth() && i < n; ++i)
            h.set(i, j, std::ldexp(a(i, j), g[i] + g[j]));
    std::vector<double> db(n);
    for (int i = 0; i < n; ++i) db[i] = std::ldexp(b[i], g[i]);
    std::vector<double> z = BandLU(h).solve(db);
    r.x_scaled.resize(n);
    for (int i = 0; i < n; ++i) {
        r.x_scaled[i] = std::ldexp(z[i], g[i]);
        if (!std::isfinite(r.x_scaled[i]) || !std::isfinite(r.x_direct[i]))
            throw std::overflow_error("bauer_binary_solve: overflow/underflow detected");
    }
    return r;
}

/// Same experiment with a general (non-binary) diagonal; the two
/// solutions then agree only to rounding, not bitwise.
inline BauerResult bauer_diagonal_solve(const BandedSymMatrix& a, std::span<const double> b,
                                        std::span<const double> d) {
    const int n = a.size();
    BauerResult r;
    r.x_direct = BandLU(a).solve(b);
    BandedSymMatrix h(n, a.bandwidth());
    for (int j = 0; j < n; ++j)
        for (int i = j; i <= j + a.bandwidth() && i < n; ++i)
            h.set(i, j, a(i, j) * d[i] * d[j]);
    std::vector<double> db(n);
    for (int i = 0; i < n; ++i) db[i] = b[i] * d[i];
    std::vector<double> z = BandLU(h).solve(db);
    r.x_scaled.resize(n);
    for (int i = 0; i < n; ++i) r.x_scaled[i] = z[i] * d[i];
    return r;
}

/// All eigenvalues of a small dense symmetric matrix (cyclic Jacobi).
/// Used for element-matrix checks and Lanczos Ritz values.
inline std::vector<double> symmetric_eigenvalues(std::vector<double> m, int n) {
    auto idx = [n](int i, int j) { return static_cast<std::size_t>(i) * n + j; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += m[idx(i, j)] * m[idx(i, j)];
        if (off < 1e-300) break;
        double diag = 0.0;
        for (int i = 0; i < n; ++i) diag += m[idx(i, i)] * m[idx(i, i)];
        if (off <= 1e-32 * (diag + off)) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = m[idx(p, q)];
                if (apq == 0.0) continue;
                const double app = m[idx(p, p)], aqq = m[idx(q, q)];
                const double theta = 0.5 * (aqq - app) / apq;
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = m[idx(k, p)], akq = m[idx(k, q)];
                    m[idx(k, p)] = c * akp - s * akq;
                    m[idx(k, q)] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = m[idx(p, k)], aqk = m[idx(q, k)];
                    m[idx(p, k)] = c * apk - s * aqk;
                    m[idx(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = m[idx(i, i)];
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Extreme Ritz values after `steps` Lanczos steps with full
/// reorthogonalization; a cheap spectrum probe for matrices that may be
/// singular (where inverse iteration is unavailable).
inline std::pair<double, double> lanczos_extremes(const BandedSymMatrix& a, int steps = 64) {
    const int n = a.size();
    steps = std::min(steps, n);
    std::vector<std::vector<double>> basis;
    std::vector<double> alpha, beta;
    std::vector<double> v = detail::seeded_vector(n, 0xABCD1234ull);
    double nv = detail::norm2(v);
    for (double& x : v) x /= nv;
    basis.push_back(v);
    for (int j = 0; j < steps; ++j) {
        std::vector<double> w = a.matvec(basis[j]);
        const double aj = detail::dot(w, basis[j]);
        alpha.push_back(aj);
        for (std::size_t r = 0; r < basis.size(); ++r) {
            const double c = detail::dot(w, basis[r]);
            for (int i = 0; i < n; ++i) w[i] -= c * basis[r][i];
        }
        const double bj = detail::norm2(w);
        if (bj < 1e-14 || j + 1 == steps) break;
        beta.push_back(bj);
        for (int i = 0; i < n; ++i) w[i] /= bj;
        basis.push_back(std::move(w));
    }
    const int m = static_cast<int>(alpha.size());
    std::vector<double> t(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) {
        t[static_cast<std::size_t>(i) * m + i] = alpha[i];
        if (i + 1 < m) {
            t[static_cast<std::size_t>(i) * m + i + 1] = beta[i];
            t[static_cast<std::size_t>(i + 1) * m + i] = beta[i];
        }
    }
    const auto ritz = symmetric_eigenvalues(std::move(t), m);
    return {ritz.front(), ritz.back()};
}

/// Plain-text dump: header "n bandwidth", then lower-band "i j value"
/// triplets with full precision.
inline void dump_matrix(const BandedSymMatrix& a, std::ostream& os) {
    os << a.size() << ' ' << a.bandwidth() << '\n';
    char buf[64];
    for (int j = 0; j < a.size(); ++j) {
        for (int i = j; i <= j + a.bandwidth() && i < a.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", a(i, j));
            os << i << ' ' << j << ' ' << buf << '\n';
        }
    }
}

}  // namespace sgfem

#endif
