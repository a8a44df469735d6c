#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sgfem1d/enrichment.hpp"
#include "sgfem1d/quadrature.hpp"

using namespace sgfem;

namespace {

Mesh mesh10() { return uniform_mesh(10); }

// central finite-difference check of an enrichment derivative at x
void expect_fd_consistent(const EnrichmentFunction& f, double x, double h) {
    const double step = 1e-6 * h;
    const double fd = (f.value(x + step) - f.value(x - step)) / (2 * step);
    const double d = f.deriv(x);
    EXPECT_NEAR(d, fd, 1e-6 * std::max(1.0, std::abs(d)));
}

}  // namespace

TEST(PatchInterpolant, QuadraticOnInteriorPatch) {
    const Mesh m = mesh10();
    const Patch p = patch(m, 3);
    const LocalSpace s = polynomial_space(p, 2);
    const EnrichmentFunction interp = patch_interpolant(s.functions[1], p);
    // on [x_i, x_{i+1}] the interpolant of (x-x_i)^2 is h*(x-x_i)
    const double h = m.h, xi = m.vertex[3];
    for (double t : {0.1, 0.5, 0.9}) {
        const double x = xi + t * h;
        EXPECT_NEAR(interp.value(x), h * (x - xi), 1e-15);
    }
}

TEST(PatchInterpolant, ReproducesLinears) {
    const Mesh m = mesh10();
    const Patch p = patch(m, 5);
    const LocalSpace s = polynomial_space(p, 1);
    const EnrichmentFunction interp = patch_interpolant(s.functions[0], p);
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> dist(p.left, p.right);
    for (int t = 0; t < 50; ++t) {
        const double x = dist(rng);
        EXPECT_NEAR(interp.value(x), s.functions[0].value(x), 1e-14);
    }
}

TEST(PatchInterpolant, PowerFunctionAtElementMidpoint) {
    // f = x^alpha on the boundary patch omega_1... value at midpoint of
    // tau_1 is the mean of the endpoint values
    const Mesh m = mesh10();
    const Patch p = patch(m, 1);
    const LocalSpace s = singular_space(p, 0.6);
    const EnrichmentFunction interp = patch_interpolant(s.functions[1], p);
    const double mid = 0.5 * (m.vertex[0] + m.vertex[1]);
    EXPECT_NEAR(interp.value(mid),
                0.5 * (std::pow(m.vertex[0], 0.6) + std::pow(m.vertex[1], 0.6)), 1e-16);
}

TEST(Modify, DropsLinearKeepsQuadratic) {
    const Mesh m = mesh10();
    const Patch p = patch(m, 4);
    const ModifiedLocalSpace mod = modify(polynomial_space(p, 2));
    EXPECT_EQ(mod.dropped, 1);
    ASSERT_EQ(mod.functions.size(), 1u);
    // phibar_2 at the midpoint of tau_{i+1} is -h^2/4
    const double h = m.h;
    const double mid = m.vertex[4] + 0.5 * h;
    EXPECT_NEAR(mod.functions[0].value(mid), -h * h / 4, 1e-17);
}

TEST(Modify, VanishesAtPatchVertices) {
    const Mesh m = mesh10();
    for (int i : {0, 1, 5, 9, 10}) {
        const Patch p = patch(m, i);
        const ModifiedLocalSpace mod = modify(singular_space(p, 0.75));
        for (const auto& f : mod.functions) {
            double scale = 0.0;
            for (double v : p.vertex_coords) scale = std::max(scale, std::abs(f.value(v)));
            for (double v : p.vertex_coords)
                EXPECT_LE(std::abs(f.value(v)), 1e-14 * std::max(scale, 1.0));
        }
    }
}

TEST(Modify, InterfaceWithConstantCoefficientVanishes) {
    const Mesh m = mesh10();
    const Patch p = patch(m, 6);
    const CoefficientFn a = CoefficientFn::constant(2.0);
    const ModifiedLocalSpace mod = modify(interface_space(p, a));
    EXPECT_TRUE(mod.functions.empty());
    EXPECT_EQ(mod.dropped, 1);
}

TEST(PolynomialSpace, BasicShapes) {
    const Mesh m = mesh10();
    const Patch p = patch(m, 3);
    const LocalSpace s = polynomial_space(p, 2);
    ASSERT_EQ(s.functions.size(), 2u);
    const double h = m.h;
    EXPECT_EQ(s.functions[1].value(m.vertex[3]), 0.0);
    EXPECT_NEAR(s.functions[1].value(m.vertex[4]), h * h, 1e-18);
    EXPECT_NEAR(s.functions[1].deriv(m.vertex[4]), 2 * h, 1e-17);
    EXPECT_TRUE(polynomial_space(p, 0).functions.empty());
    EXPECT_THROW(polynomial_space(p, -1), std::invalid_argument);
}

TEST(InterfaceSpace, ConstantCoefficientGivesShiftedLinear) {
    const Mesh m = mesh10();
    const Patch p = patch(m, 4);
    const LocalSpace s = interface_space(p, CoefficientFn::constant(1.0));
    ASSERT_EQ(s.functions.size(), 1u);
    for (double x : {0.33, 0.4, 0.45})
        EXPECT_NEAR(s.functions[0].value(x), x - p.left, 1e-16);
}

TEST(InterfaceSpace, DerivativeJumpAcrossInterface) {
    // a1: 1/2 then 1; the running integral of 1/a has slope 2 then 1
    const Mesh m = mesh10();
    const int mid = 5;
    const double bstar = m.vertex[mid] + 0.5 * m.h;
    const CoefficientFn a = CoefficientFn::interface_a1(bstar);
    const Patch p = patch(m, mid);
    const LocalSpace s = interface_space(p, a);
    const EnrichmentFunction& f = s.functions[0];
    EXPECT_NEAR(f.deriv(bstar - 1e-3), 2.0, 1e-12);
    EXPECT_NEAR(f.deriv(bstar + 1e-3), 1.0, 1e-12);
    // continuity at the interface
    EXPECT_NEAR(f.value(bstar - 1e-12), f.value(bstar + 1e-12), 1e-11);
}

TEST(InterfaceSpace, ClosedFormMatchesCompositeGauss) {
    const Mesh m = mesh10();
    const int mid = 5;
    const double bstar = m.vertex[mid] + 0.5 * m.h;
    const CoefficientFn a = CoefficientFn::interface_a1(bstar);
    const Patch p = patch(m, mid);
    const LocalSpace s = interface_space(p, a);
    QuadRule dense;
    dense.order = 64;
    const double breaks[] = {bstar};
    const double by_quad =
        integrate([&](double t) { return 1.0 / a(t); }, p.left, bstar, breaks,
                  Singularity::none, dense);
    EXPECT_NEAR(s.functions[0].value(bstar), by_quad, 1e-14 * std::abs(by_quad));
}

TEST(SingularSpace, ValuesAndGuards) {
    const Mesh m = mesh10();
    const Patch p0 = patch(m, 0);
    const LocalSpace s = singular_space(p0, 0.6);
    ASSERT_EQ(s.functions.size(), 2u);
    const double h = m.h;
    EXPECT_NEAR(s.functions[1].value(h), std::pow(h, 0.6), 1e-16);
    EXPECT_NEAR(s.functions[1].deriv(h / 2), 0.6 * std::pow(h / 2, -0.4), 1e-12);
    EXPECT_THROW(singular_space(p0, 1.0), std::invalid_argument);
    EXPECT_THROW(singular_space(p0, 0.3), std::invalid_argument);
    EXPECT_THROW(singular_space(p0, 1.7), std::invalid_argument);
}

TEST(HeavisideSpace, SignConventionAndKill) {
    const Mesh m = mesh10();
    const int mid = 5;
    const double h = m.h;
    const double c = m.vertex[mid] + 0.37 * h;  // inside tau_{mid+1}
    const Patch p = patch(m, mid);
    const LocalSpace s = heaviside_space(p, c);
    const EnrichmentFunction& H = s.functions[1];
    EXPECT_EQ(H.value(c - h / 4), 1.0);
    EXPECT_EQ(H.value(c + h / 4), -1.0);
    EXPECT_EQ(H.value(c), -1.0);
    EXPECT_EQ(H.value(c, Side::left), 1.0);

    const ModifiedLocalSpace mod = modify(s);
    ASSERT_EQ(mod.functions.size(), 1u);  // (x - x_i) dropped
    const EnrichmentFunction& Hbar = mod.functions[0];
    for (double v : p.vertex_coords) EXPECT_EQ(Hbar.value(v), 0.0);
    // identically zero on tau_mid (c lives in tau_{mid+1})
    EXPECT_TRUE(identically_zero_on(Hbar, m.vertex[mid - 1], m.vertex[mid], 1.0));
    EXPECT_FALSE(identically_zero_on(Hbar, m.vertex[mid], m.vertex[mid + 1], 1.0));

    EXPECT_THROW(heaviside_space(p, m.vertex[mid]), std::invalid_argument);
}

TEST(Enrichment, SharedRestrictionOnCommonElement) {
    // phibar of the two patches sharing an enriched element agree there
    const Mesh m = mesh10();
    const int mid = 5;
    const double bstar = m.vertex[mid] + 0.3 * m.h;
    const CoefficientFn a = CoefficientFn::interface_a1(bstar);
    const ModifiedLocalSpace left = modify(interface_space(patch(m, mid), a));
    const ModifiedLocalSpace right = modify(interface_space(patch(m, mid + 1), a));
    ASSERT_EQ(left.functions.size(), 1u);
    ASSERT_EQ(right.functions.size(), 1u);
    double scale = 0.0;
    for (int q = 0; q < 32; ++q) {
        const double x = m.vertex[mid] + (q + 0.5) / 32 * m.h;
        scale = std::max(scale, std::abs(left.functions[0].value(x)));
    }
    for (int q = 0; q < 32; ++q) {
        const double x = m.vertex[mid] + (q + 0.5) / 32 * m.h;
        EXPECT_NEAR(left.functions[0].value(x), right.functions[0].value(x), 1e-13 * scale);
    }
}

TEST(Enrichment, DerivativeConsistentWithFiniteDifferences) {
    const Mesh m = mesh10();
    const Patch p = patch(m, 4);
    const double h = m.h;
    for (const auto& s :
         {polynomial_space(p, 2), singular_space(p, 0.75),
          interface_space(p, CoefficientFn::interface_a1(m.vertex[4] + 0.31 * h))}) {
        for (const auto& f : s.functions) {
            // smooth points well inside elements, away from breakpoints
            for (double t : {0.121, 0.611}) {
                const double x = m.vertex[4] + t * h;
                bool near_break = false;
                for (double b : f.breakpoints())
                    if (std::abs(b - x) < 1e-3 * h) near_break = true;
                if (!near_break) expect_fd_consistent(f, x, h);
            }
        }
    }
}
