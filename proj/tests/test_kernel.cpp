#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "kreg/kernel.hpp"
#include "kreg/rng.hpp"

using namespace kreg;

namespace {
std::vector<double> v1(double x) { return {x}; }
}  // namespace

TEST_CASE("gaussian kernel evaluation") {
    GaussianKernel half(5.0, KernelForm::Half);
    std::vector<double> p{3.0, 4.0}, q{3.0, 4.0};
    CHECK(half(p, q) == 1.0);

    GaussianKernel unit(1.0, KernelForm::Half);
    CHECK(unit(v1(0.0), v1(1.0)) == Catch::Approx(std::exp(-0.5)).epsilon(1e-15));

    // Hand-evaluated: exp(-||(0,0)-(1,1)||^2 / 2^2) = exp(-2/4)
    GaussianKernel plain2(2.0, KernelForm::Plain);
    std::vector<double> a{0.0, 0.0}, b{1.0, 1.0};
    CHECK(plain2(a, b) == Catch::Approx(std::exp(-0.5)).epsilon(1e-15));
}

TEST_CASE("gaussian kernel contracts") {
    CHECK_THROWS_AS(GaussianKernel(0.0), std::invalid_argument);
    CHECK_THROWS_AS(GaussianKernel(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(GaussianKernel(std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
    GaussianKernel k(1.0);
    std::vector<double> p{0.0, 0.0}, q{1.0};
    CHECK_THROWS_AS(k(p, q), std::invalid_argument);
}

TEST_CASE("kernel symmetry and monotonicity") {
    Rng rng(41);
    for (KernelForm form : {KernelForm::Plain, KernelForm::Half}) {
        GaussianKernel k(1.7, form);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> p{rng.uniform(-10, 10), rng.uniform(-10, 10)};
            std::vector<double> q{rng.uniform(-10, 10), rng.uniform(-10, 10)};
            CHECK(k(p, q) == k(q, p));  // exact
            double kv = k(p, q);
            CHECK(kv > 0.0);
            CHECK(kv <= 1.0);
        }
        // non-increasing in distance along a ray
        double prev = 2.0;
        for (double x = 0.0; x <= 20.0; x += 0.05) {
            double kv = k.profile(x);
            CHECK(kv <= prev);
            prev = kv;
        }
    }
}

TEST_CASE("lipschitz property holds on a fine grid for both forms") {
    for (KernelForm form : {KernelForm::Plain, KernelForm::Half}) {
        for (double sigma : {0.5, 1.0, 3.0}) {
            GaussianKernel k(sigma, form);
            const double bound = k.lipschitz_bound();
            const double h = 1e-3 * sigma;
            for (double x = -6 * sigma; x < 6 * sigma; x += h) {
                double slope = std::abs(k.profile(x + h) - k.profile(x)) / h;
                REQUIRE(slope <= bound * (1 + 1e-12));
            }
        }
    }
}

TEST_CASE("lipschitz bound") {
    CHECK(GaussianKernel(1.0).lipschitz_bound() == 1.0);
    CHECK(GaussianKernel(4.0).lipschitz_bound() == 0.25);

    // Finite-difference scan (independent of the bound's derivation): the
    // steepest observed slope of the Half form at sigma=1 is exp(-1/2).
    GaussianKernel k(1.0, KernelForm::Half);
    double max_slope = 0.0;
    const double h = 1e-4;
    for (double x = -5.0; x < 5.0; x += h)
        max_slope = std::max(max_slope,
                             std::abs(k.profile(x + h) - k.profile(x)) / h);
    CHECK(max_slope <= k.lipschitz_bound());
    CHECK(max_slope == Catch::Approx(std::exp(-0.5)).epsilon(1e-3));
}
