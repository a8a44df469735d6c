#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sgfem1d/mesh.hpp"

using namespace sgfem;

TEST(Mesh, UniformGrid) {
    const Mesh m = uniform_mesh(4);
    ASSERT_EQ(m.num_elements, 4);
    EXPECT_EQ(m.h, 0.25);
    const double expected[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int i = 0; i <= 4; ++i) EXPECT_EQ(m.vertex[i], expected[i]);
}

TEST(Mesh, RejectsTooFewElements) {
    EXPECT_THROW(uniform_mesh(1), std::invalid_argument);
    EXPECT_THROW(uniform_mesh(0), std::invalid_argument);
}

TEST(Mesh, TenElements) {
    const Mesh m = uniform_mesh(10);
    EXPECT_DOUBLE_EQ(m.h, 0.1);
    EXPECT_EQ(m.num_elements, 10);
    EXPECT_EQ(m.num_vertices(), 11);  // 11 patches
    EXPECT_EQ(m.vertex.back(), 1.0);
    // strictly increasing, spacing exactly i*h
    for (int i = 0; i < 10; ++i) {
        EXPECT_LT(m.vertex[i], m.vertex[i + 1]);
        EXPECT_EQ(m.vertex[i], i * m.h);
    }
}

TEST(Patch, Interior) {
    const Mesh m = uniform_mesh(4);
    const Patch p = patch(m, 2);
    EXPECT_EQ(p.left, 0.25);
    EXPECT_EQ(p.right, 0.75);
    ASSERT_EQ(p.elements.size(), 2u);
    EXPECT_EQ(p.elements[0], 2);
    EXPECT_EQ(p.elements[1], 3);
    EXPECT_EQ(p.vertices.size(), 3u);
}

TEST(Patch, Boundary) {
    const Mesh m = uniform_mesh(4);
    const Patch p0 = patch(m, 0);
    EXPECT_EQ(p0.left, 0.0);
    EXPECT_EQ(p0.right, 0.25);
    ASSERT_EQ(p0.elements.size(), 1u);
    EXPECT_EQ(p0.elements[0], 1);
    EXPECT_EQ(p0.vertices.size(), 2u);
    const Patch pn = patch(m, 4);
    EXPECT_EQ(pn.vertices.size(), 2u);
    EXPECT_EQ(pn.elements[0], 4);
}

TEST(Patch, OutOfRange) {
    const Mesh m = uniform_mesh(4);
    EXPECT_THROW(patch(m, 5), std::out_of_range);
    EXPECT_THROW(patch(m, -1), std::out_of_range);
}

TEST(Hat, NodalValuesAndKinkConvention) {
    const Mesh m = uniform_mesh(4);
    const HatValue at_node = hat_eval(m, 2, 0.5);
    EXPECT_EQ(at_node.value, 1.0);
    EXPECT_EQ(at_node.derivative, -4.0);  // right-sided at the kink
    const HatValue mid = hat_eval(m, 2, 0.375);
    EXPECT_DOUBLE_EQ(mid.value, 0.5);
    EXPECT_EQ(mid.derivative, 4.0);
    // Kronecker property
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; j <= 4; ++j)
            EXPECT_EQ(hat_eval(m, i, m.vertex[j]).value, i == j ? 1.0 : 0.0);
    // left-sided convention at x = 1
    EXPECT_EQ(hat_eval(m, 4, 1.0).derivative, 4.0);
    EXPECT_EQ(hat_eval(m, 3, 1.0).derivative, -4.0);
}

TEST(Hat, PartitionOfUnity) {
    const Mesh m = uniform_mesh(4);
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const double x = dist(rng);
        double sum = 0.0, dsum = 0.0;
        for (int i = 0; i <= 4; ++i) {
            const HatValue hv = hat_eval(m, i, x);
            sum += hv.value;
            dsum += hv.derivative;
        }
        EXPECT_EQ(sum, 1.0) << "x=" << x;
        EXPECT_EQ(dsum, 0.0) << "x=" << x;
    }
}

TEST(Hat, PartitionOfUnityNonDyadic) {
    const Mesh m = uniform_mesh(7);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const double x = dist(rng);
        double sum = 0.0;
        for (int i = 0; i <= 7; ++i) sum += hat_eval(m, i, x).value;
        EXPECT_NEAR(sum, 1.0, 0x1.0p-52);
    }
}

TEST(Hat, DerivativeMatchesFiniteDifferences) {
    const Mesh m = uniform_mesh(8);
    const double delta = 1e-6;
    // away from kinks
    for (int i = 0; i <= 8; ++i) {
        for (double x : {0.0701, 0.3022, 0.5555, 0.9312}) {
            const double fd =
                (hat_eval(m, i, x + delta).value - hat_eval(m, i, x - delta).value) / (2 * delta);
            EXPECT_NEAR(hat_eval(m, i, x).derivative, fd, 1e-7);
        }
    }
}
