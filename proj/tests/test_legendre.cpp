#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace lno;

TEST(Legendre, PolynomialValues) {
    for (double x : {-0.9, 0.0, 0.3}) EXPECT_EQ(legendre_eval(0, x), 1.0);
    for (std::size_t m = 0; m < 12; ++m) EXPECT_NEAR(legendre_eval(m, 1.0), 1.0, 1e-14);
    EXPECT_NEAR(legendre_eval(2, 0.5), -0.125, 1e-15);
    // L3 = (5x^3 - 3x)/2
    EXPECT_NEAR(legendre_eval(3, 0.7), (5 * 0.343 - 2.1) / 2, 1e-14);
}

TEST(LglRule, TwoNodes) {
    const auto r = lgl_rule(2);
    EXPECT_EQ(r.nodes, (std::vector<double>{-1.0, 1.0}));
    EXPECT_NEAR(r.weights[0], 1.0, 1e-15);
    EXPECT_NEAR(r.weights[1], 1.0, 1e-15);
}

TEST(LglRule, ExactnessAndOrdering) {
    for (std::size_t n : {3u, 5u, 8u, 12u, 18u, 24u}) {
        const auto r = lgl_rule(n);
        EXPECT_EQ(r.nodes.front(), -1.0);
        EXPECT_EQ(r.nodes.back(), 1.0);
        for (std::size_t k = 1; k < n; ++k) EXPECT_LT(r.nodes[k - 1], r.nodes[k]);
        double wsum = 0.0;
        for (double w : r.weights) wsum += w;
        EXPECT_NEAR(wsum, 2.0, 1e-12);
        for (std::size_t p = 0; p <= 2 * n - 3; ++p) {
            double q = 0.0;
            for (std::size_t k = 0; k < n; ++k) q += r.weights[k] * std::pow(r.nodes[k], double(p));
            const double exact = p % 2 ? 0.0 : 2.0 / double(p + 1);
            EXPECT_NEAR(q, exact, 1e-10) << "n=" << n << " p=" << p;
        }
    }
    const auto r12 = lgl_rule(12);
    double q = 0.0;
    for (std::size_t k = 0; k < 12; ++k) q += r12.weights[k] * std::pow(r12.nodes[k], 20.0);
    EXPECT_NEAR(q, 2.0 / 21.0, 1e-10);
}

TEST(Kernels1d, RowInvariants) {
    for (std::size_t n : {4u, 12u, 18u}) {
        const auto k = make_kernels_1d(n, std::min<std::size_t>(n, 8));
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(k.psi_at(0, i), 1.0, 1e-14);
        for (std::size_t m = 0; m < k.modes; ++m) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                s += k.phi_at(m, i);
                const double mirror = k.phi_at(m, n - 1 - i);
                EXPECT_NEAR(k.phi_at(m, i), m % 2 ? -mirror : mirror, 1e-12);
            }
            EXPECT_NEAR(s, m == 0 ? 1.0 : 0.0, 1e-12);
        }
    }
}

// Spot entries typed in from the published tables, 1-based mode index.
struct Entry {
    std::size_t n;
    bool phi;
    std::size_t mode, i;
    double value;
};

TEST(Kernels1d, PublishedSpotValues) {
    const Entry entries[] = {
        {12, true, 1, 0, 0.0400},   {12, true, 8, 11, 0.0873},  {12, true, 5, 2, -0.3988},
        {12, true, 7, 8, 0.3350},   {12, false, 2, 0, -1.0000}, {12, false, 4, 3, 0.4470},
        {12, false, 7, 1, -0.4109}, {18, true, 1, 0, 0.0307},   {18, true, 8, 17, 0.1062},
        {18, false, 8, 17, 1.0000}, {24, true, 1, 0, 0.0210},   {24, true, 6, 23, 0.1502},
        {24, false, 2, 12, 0.0435}, {24, false, 3, 11, -0.4972}, {24, false, 8, 12, -0.0935},
    };
    for (const Entry& e : entries) {
        const auto k = make_kernels_1d(e.n, 8);
        const double got = e.phi ? k.phi_at(e.mode - 1, e.i) : k.psi_at(e.mode - 1, e.i);
        EXPECT_NEAR(got, e.value, 5e-5) << "N=" << e.n << (e.phi ? " phi" : " psi") << " m=" << e.mode
                                        << " i=" << e.i;
        const auto view = reference_tables::lookup(e.n);
        const double tab = e.phi ? view.phi[e.i][e.mode - 1] : view.psi[e.i][e.mode - 1];
        EXPECT_DOUBLE_EQ(tab, e.value);
    }
    for (std::size_t n : {12u, 18u, 24u}) {
        const double dev = reference_table_deviation(make_kernels_1d(n, 8));
        EXPECT_GE(dev, 0.0);
        EXPECT_LE(dev, 5e-5) << "N=" << n;
    }
    EXPECT_LT(reference_table_deviation(make_kernels_1d(16, 8)), 0.0);
}

TEST(Kernels1d, SmallCase) {
    const auto k = make_kernels_1d(2, 2);
    EXPECT_NEAR(k.psi_at(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(k.psi_at(0, 1), 1.0, 1e-15);
    EXPECT_NEAR(k.psi_at(1, 0), -1.0, 1e-15);
    EXPECT_NEAR(k.phi_at(0, 0) + k.phi_at(0, 1), 1.0, 1e-15);
}

TEST(Kernels2d, OuterProducts) {
    const std::size_t n = 6, m = 3;
    const auto k1 = make_kernels_1d(n, m);
    const auto k2 = make_kernels_2d(n, m);
    for (std::size_t i = 0; i < n * n; ++i) EXPECT_NEAR(k2.psi_at(0, i), 1.0, 1e-14);
    for (std::size_t p = 0; p < m; ++p)
        for (std::size_t q = 0; q < m; ++q)
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b)
                    EXPECT_NEAR(k2.phi_at(p * m + q, a * n + b), k1.phi_at(p, a) * k1.phi_at(q, b), 1e-12);
}

TEST(Kernels2d, BilinearHasOneCoefficient) {
    const std::size_t n = 8, m = 4;
    const auto k = make_kernels_2d(n, m);
    const auto x = window_points(n);
    for (std::size_t p = 0; p < m; ++p)
        for (std::size_t q = 0; q < m; ++q) {
            double c = 0.0;
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) c += k.phi_at(p * m + q, a * n + b) * x[a] * x[b];
            if (p == 1 && q == 1)
                EXPECT_GT(std::abs(c), 1e-3);
            else
                EXPECT_NEAR(c, 0.0, 1e-10) << p << "," << q;
        }
}

namespace {
SpectralLayer layer(std::size_t rank, std::size_t n, std::size_t m, std::size_t k, std::size_t channels) {
    return SpectralLayer(std::make_shared<const SpectralKernels>(make_kernels(rank, n, m)), channels, k);
}
} // namespace

TEST(SpectralLayer, IdentityMixKeepsConstantAndAffine) {
    auto l = layer(1, 12, 6, 2, 2);
    l.set_identity_mix();
    GridField c(2, {48}, 0.1);
    c.fill(1.7);
    const GridField out = spectral_forward(l, c);
    EXPECT_EQ(out.dims()[0], 48u - 12u);
    for (double v : out.values()) EXPECT_NEAR(v, 1.7, 1e-10);

    GridField aff(2, {48}, 0.1);
    for (std::size_t i = 0; i < 48; ++i) {
        aff.at(0, i) = 0.3 + 0.05 * double(i);
        aff.at(1, i) = -1.0 - 0.2 * double(i);
    }
    const GridField o2 = spectral_forward(l, aff);
    for (std::size_t i = 0; i < o2.dims()[0]; ++i) {
        EXPECT_NEAR(o2.at(0, i), aff.at(0, i + 6), 1e-8);
        EXPECT_NEAR(o2.at(1, i), aff.at(1, i + 6), 1e-8);
    }

    auto l2 = layer(2, 8, 3, 2, 1);
    l2.set_identity_mix();
    GridField a2(1, {24, 24}, 0.1);
    for (std::size_t i = 0; i < 24; ++i)
        for (std::size_t j = 0; j < 24; ++j) a2.at(0, i, j) = 2.0 + 0.1 * double(i) - 0.3 * double(j);
    const GridField o3 = spectral_forward(l2, a2);
    ASSERT_EQ(o3.dims(), (std::vector<std::size_t>{16, 16}));
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 16; ++j) EXPECT_NEAR(o3.at(0, i, j), a2.at(0, i + 4, j + 4), 1e-8);
}

TEST(SpectralLayer, ZeroMixGivesZero) {
    auto l = layer(2, 4, 2, 2, 3);
    const GridField out = spectral_forward(l, testutil::random_field(3, {12, 12}, 1));
    for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(SpectralLayer, ChannelsMixIndependently) {
    auto l = layer(1, 4, 2, 2, 2);
    testutil::randomize(l.mix, 2);
    GridField x = testutil::random_field(2, {16}, 3);
    const GridField a = spectral_forward(l, x);
    for (std::size_t i = 0; i < 16; ++i) x.at(1, i) = 0.0;
    const GridField b = spectral_forward(l, x);
    for (std::size_t i = 0; i < a.dims()[0]; ++i) {
        EXPECT_EQ(a.at(0, i), b.at(0, i));
        EXPECT_EQ(b.at(1, i), 0.0);
    }
}

TEST(SpectralLayer, RejectsBadRepetitions) {
    auto k = std::make_shared<const SpectralKernels>(make_kernels_1d(12, 4));
    EXPECT_THROW(SpectralLayer(k, 1, 5), ShapeError);
    EXPECT_THROW(SpectralLayer(k, 1, 0), ShapeError);
}
