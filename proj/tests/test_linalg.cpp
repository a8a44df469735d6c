#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sgfem1d/linalg.hpp"

using namespace sgfem;

namespace {

BandedSymMatrix fem_tridiag(int n, double h) {
    BandedSymMatrix a(n, 1);
    for (int i = 0; i < n; ++i) {
        a.set(i, i, 2.0 / h);
        if (i + 1 < n) a.set(i + 1, i, -1.0 / h);
    }
    return a;
}

}  // namespace

TEST(BandLU, TwoByTwo) {
    BandedSymMatrix a(2, 1);
    a.set(0, 0, 2.0);
    a.set(1, 0, -1.0);
    a.set(1, 1, 2.0);
    const BandLU lu(a);
    EXPECT_DOUBLE_EQ(lu.entry(0, 0), 2.0);
    EXPECT_DOUBLE_EQ(lu.entry(0, 1), -1.0);
    EXPECT_DOUBLE_EQ(lu.entry(1, 0), -0.5);
    EXPECT_DOUBLE_EQ(lu.entry(1, 1), 1.5);
}

TEST(BandLU, IdentityIsFixedPoint) {
    BandedSymMatrix a(5, 0);
    for (int i = 0; i < 5; ++i) a.set(i, i, 1.0);
    const BandLU lu(a);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) EXPECT_EQ(lu.entry(i, j), i == j ? 1.0 : 0.0);
    const double b[] = {1, 2, 3, 4, 5};
    const auto x = lu.solve(b);
    for (int i = 0; i < 5; ++i) EXPECT_EQ(x[i], b[i]);
}

TEST(BandLU, FemSolveResidual) {
    const int n_el = 100;
    const double h = 1.0 / n_el;
    const BandedSymMatrix a = fem_tridiag(n_el - 1, h);
    std::vector<double> x_true(n_el - 1);
    for (int i = 0; i < n_el - 1; ++i) x_true[i] = (i + 1) * h;
    const std::vector<double> b = a.matvec(x_true);
    const auto x = BandLU(a).solve(b);
    double rmax = 0.0, bmax = 0.0;
    const auto ax = a.matvec(x);
    for (std::size_t i = 0; i < b.size(); ++i) {
        rmax = std::max(rmax, std::abs(ax[i] - b[i]));
        bmax = std::max(bmax, std::abs(b[i]));
    }
    EXPECT_LE(rmax / bmax, 1e-12);
}

TEST(BandLU, SingularPivotReported) {
    BandedSymMatrix a(2, 1);
    a.set(0, 0, 0.0);
    a.set(1, 0, 1.0);
    a.set(1, 1, 1.0);
    try {
        BandLU lu(a);
        FAIL() << "expected SingularMatrixError";
    } catch (const SingularMatrixError& e) {
        EXPECT_EQ(e.pivot_index, 0);
    }
}

TEST(BandLU, SolveConsistencyAndZeroRhs) {
    const BandedSymMatrix a = fem_tridiag(50, 0.02);
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> x(50);
    for (double& v : x) v = dist(rng);
    const auto b = a.matvec(x);
    const auto got = BandLU(a).solve(b);
    for (int i = 0; i < 50; ++i) EXPECT_NEAR(got[i], x[i], 1e-9 * std::abs(x[i]) + 1e-12);
    const std::vector<double> zero(50, 0.0);
    const auto xz = BandLU(a).solve(zero);
    for (double v : xz) EXPECT_EQ(v, 0.0);
}

TEST(BandLU, FactorMultiplyResidual) {
    const BandedSymMatrix a = fem_tridiag(40, 0.025);
    const BandLU lu(a);
    double amax = 0.0;
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 40; ++j) amax = std::max(amax, std::abs(a(i, j)));
    for (int i = 0; i < 40; ++i) {
        for (int j = 0; j < 40; ++j) {
            double lu_ij = 0.0;
            for (int k = 0; k <= std::min(i, j); ++k) {
                const double l = i == k ? 1.0 : lu.entry(i, k);
                lu_ij += l * lu.entry(k, j);
            }
            EXPECT_NEAR(lu_ij, a(i, j), 64 * 0x1.0p-52 * amax);
        }
    }
}

TEST(ScaledMatrix, DiagonalBecomesIdentity) {
    BandedSymMatrix a(2, 0);
    a.set(0, 0, 4.0);
    a.set(1, 1, 9.0);
    const BandedSymMatrix h = scaled_matrix(a);
    EXPECT_EQ(h(0, 0), 1.0);
    EXPECT_EQ(h(1, 1), 1.0);
    EXPECT_EQ(h(0, 1), 0.0);
}

TEST(ScaledMatrix, FemTridiagonal) {
    const BandedSymMatrix a = fem_tridiag(4, 0.2);
    const BandedSymMatrix h = scaled_matrix(a);
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(h(i, i), 1.0, 2 * 0x1.0p-52);
        if (i + 1 < 4) EXPECT_NEAR(h(i + 1, i), -0.5, 1e-15);
    }
}

TEST(ScaledMatrix, NonpositiveDiagonalNamesDof) {
    BandedSymMatrix a(3, 0);
    a.set(0, 0, 1.0);
    a.set(1, 1, -2.0);
    a.set(2, 2, 1.0);
    try {
        scaled_matrix(a);
        FAIL() << "expected DegenerateMatrixError";
    } catch (const DegenerateMatrixError& e) {
        EXPECT_EQ(e.dof, 1);
    }
}

TEST(ExtremeEigs, DiagonalCase) {
    BandedSymMatrix a(2, 0);
    a.set(0, 0, 1.0);
    a.set(1, 1, 4.0);
    const CondReport r = extreme_eigs(a);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.lambda_min, 1.0, 1e-8);
    EXPECT_NEAR(r.lambda_max, 4.0, 1e-8);
    EXPECT_NEAR(r.kappa2, 4.0, 1e-7);
    EXPECT_NEAR(r.scaled_kappa, 1.0, 1e-7);
}

TEST(ExtremeEigs, RankOnePerturbationOfIdentity) {
    BandedSymMatrix a(2, 1);
    a.set(0, 0, 1.0);
    a.set(1, 1, 1.0);
    a.set(1, 0, 0.5);
    const CondReport r = extreme_eigs(a);
    EXPECT_NEAR(r.lambda_min, 0.5, 1e-7);
    EXPECT_NEAR(r.lambda_max, 1.5, 1e-7);
}

TEST(ExtremeEigs, FemScaledConditionConstant) {
    const int n_el = 1000;
    const BandedSymMatrix a = fem_tridiag(n_el - 1, 1.0 / n_el);
    const CondReport r = extreme_eigs(a);
    EXPECT_TRUE(r.converged);
    const double ratio = r.scaled_kappa / (0.4 * n_el * n_el);
    EXPECT_GT(ratio, 0.95);
    EXPECT_LT(ratio, 1.05);
}

TEST(ExtremeEigs, EigenpairResiduals) {
    const BandedSymMatrix a = fem_tridiag(60, 1.0 / 60);
    const BandedSymMatrix h = scaled_matrix(a);
    const double tol = 1e-8;
    for (const EigenPair& p : {largest_eigenpair(h, tol), smallest_eigenpair(h, tol)}) {
        ASSERT_TRUE(p.converged);
        const auto hv = h.matvec(p.vector);
        double res = 0.0;
        for (int i = 0; i < 60; ++i) {
            const double d = hv[i] - p.lambda * p.vector[i];
            res += d * d;
        }
        EXPECT_LE(std::sqrt(res), 10 * tol * largest_eigenpair(h, tol).lambda);
    }
}

TEST(Bauer, IdentityScalingIsBitwise) {
    const BandedSymMatrix a = fem_tridiag(30, 1.0 / 30);
    std::vector<double> b(30);
    for (int i = 0; i < 30; ++i) b[i] = std::sin(i + 1.0);
    std::vector<int> g(30, 0);
    const BauerResult r = bauer_binary_solve(a, b, g);
    for (int i = 0; i < 30; ++i) EXPECT_EQ(r.x_direct[i], r.x_scaled[i]);
}

TEST(Bauer, BinaryScalingIsBitwise) {
    const int n_el = 100;
    const BandedSymMatrix a = fem_tridiag(n_el - 1, 1.0 / n_el);
    std::vector<double> b(n_el - 1, 0.0);
    b[n_el - 2] = n_el;  // Dirichlet lift column
    std::vector<int> g(n_el - 1);
    for (int i = 0; i < n_el - 1; ++i) g[i] = i % 8;
    const BauerResult r = bauer_binary_solve(a, b, g);
    for (int i = 0; i < n_el - 1; ++i) EXPECT_EQ(r.x_direct[i], r.x_scaled[i]);
}

TEST(Bauer, NonBinaryScalingIsCloseButNotExact) {
    const int n_el = 100;
    const BandedSymMatrix a = fem_tridiag(n_el - 1, 1.0 / n_el);
    std::vector<double> b(n_el - 1, 0.0);
    b[n_el - 2] = n_el;
    std::vector<double> d(n_el - 1, 3.0);
    const BauerResult r = bauer_diagonal_solve(a, b, d);
    double diff = 0.0, norm = 0.0;
    for (int i = 0; i < n_el - 1; ++i) {
        diff = std::max(diff, std::abs(r.x_direct[i] - r.x_scaled[i]));
        norm = std::max(norm, std::abs(r.x_direct[i]));
    }
    EXPECT_GT(diff, 0.0);
    EXPECT_LE(diff / norm, 1e-10);
}

TEST(Eta, Basics) {
    const std::vector<double> x{1.0, 0.0};
    EXPECT_EQ(eta(x, x), 0.0);
    const std::vector<double> y{1.0, 1e-8};
    EXPECT_NEAR(eta(x, y), 1e-8, 1e-22);
    const std::vector<double> zero{0.0, 0.0};
    EXPECT_THROW(eta(zero, x), std::invalid_argument);
    const std::vector<double> shorter{1.0};
    EXPECT_THROW(eta(x, shorter), std::invalid_argument);
}

TEST(SmallEigs, JacobiOnKnownMatrices) {
    // [[2/15, 1/30], [1/30, 2/15]] -> {1/10, 1/6}
    const auto ev = symmetric_eigenvalues({2.0 / 15, 1.0 / 30, 1.0 / 30, 2.0 / 15}, 2);
    EXPECT_NEAR(ev[0], 0.1, 1e-16);
    EXPECT_NEAR(ev[1], 1.0 / 6, 1e-16);
}

TEST(Lanczos, DetectsNearNullspace) {
    // singular: unconstrained FEM matrix (constant nullspace)
    const int n = 40;
    BandedSymMatrix a(n, 1);
    const double h = 1.0 / (n - 1);
    for (int i = 0; i < n; ++i) {
        double d = 2.0 / h;
        if (i == 0 || i == n - 1) d = 1.0 / h;
        a.set(i, i, d);
        if (i + 1 < n) a.set(i + 1, i, -1.0 / h);
    }
    const auto [lmin, lmax] = lanczos_extremes(a, 40);
    EXPECT_GE(lmin, -1e-12 * lmax);
    EXPECT_LE(std::abs(lmin), 1e-8 / h);
    EXPECT_NEAR(lmax, 4.0 / h, 0.01 / h);
}

TEST(DumpMatrix, Format) {
    BandedSymMatrix a(2, 1);
    a.set(0, 0, 1.0);
    a.set(1, 0, -0.25);
    a.set(1, 1, 2.0);
    std::ostringstream os;
    dump_matrix(a, os);
    EXPECT_EQ(os.str(), "2 1\n0 0 1\n1 0 -0.25\n1 1 2\n");
}
