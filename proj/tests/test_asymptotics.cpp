#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "lhsd/asymptotics.hpp"
#include "lhsd/copula.hpp"
#include "lhsd/lhsd.hpp"
#include "lhsd/rng.hpp"

using namespace lhsd;

namespace {
const auto neg_prod = [](std::span<const double> u) { return -(1 - u[0]) * (1 - u[1]); };
}

TEST_CASE("brownian sheet covariance") {
    copula_model ind(copula_family::independence, 0.0, 2);
    CHECK(brownian_sheet_cov(ind, std::array{1.0, 1.0}, std::array{1.0, 1.0}) == 0.0);
    CHECK(brownian_sheet_cov(ind, std::array{0.0, 0.3}, std::array{0.6, 0.7}) == 0.0);
    CHECK(brownian_sheet_cov(ind, std::array{0.5, 0.5}, std::array{0.5, 0.5}) ==
          Catch::Approx(0.1875).margin(1e-15));
}

TEST_CASE("gc_cov basics") {
    // d=1: the field is identically zero
    copula_model one(copula_family::independence, 0.0, 1);
    rng_engine rng = make_engine(2);
    for (int i = 0; i < 200; ++i) {
        std::array u{uniform01(rng)}, v{uniform01(rng)};
        CHECK(std::fabs(gc_cov(one, u, v)) < 1e-12);
    }

    copula_model ind(copula_family::independence, 0.0, 2);
    CHECK(gc_cov(ind, std::array{0.5, 0.5}, std::array{0.5, 0.5}) ==
          Catch::Approx(0.0625).margin(1e-15));

    // symmetry and positive semidefiniteness on the diagonal
    copula_model fgm(copula_family::fgm, 0.5, 2);
    for (int i = 0; i < 1000; ++i) {
        std::array u{uniform01(rng), uniform01(rng)};
        std::array v{uniform01(rng), uniform01(rng)};
        CHECK(gc_cov(fgm, u, v) == Catch::Approx(gc_cov(fgm, v, u)).margin(1e-13));
        CHECK(gc_cov(fgm, u, u) >= -1e-12);
    }
}

TEST_CASE("gc_cov matches a simulation of the discretized field") {
    // Independence, d=2, u = v = (0.5, 0.5). White-noise cells of the sheet
    // construction aggregate exactly into the four quadrant sums, each an
    // independent N(0, 1/4) variable Z_q; then
    //   B(u) = Z_00 - C(u) S,  B1(0.5) = Z_00 + Z_01 - 0.5 S,  etc., S = sum Z_q,
    //   G = B(u) - 0.5 B1(0.5) - 0.5 B2(0.5).
    copula_model ind(copula_family::independence, 0.0, 2);
    const double expect = gc_cov(ind, std::array{0.5, 0.5}, std::array{0.5, 0.5});
    rng_engine rng = make_engine(404);
    std::normal_distribution<double> nd(0.0, 0.5);
    const int paths = 1000000;
    double sum = 0.0, sumsq = 0.0;
    for (int p = 0; p < paths; ++p) {
        double z00 = nd(rng), z01 = nd(rng), z10 = nd(rng), z11 = nd(rng);
        double s = z00 + z01 + z10 + z11;
        double b = z00 - 0.25 * s;
        double b1 = z00 + z01 - 0.5 * s;
        double b2 = z00 + z10 - 0.5 * s;
        double g = b - 0.5 * b1 - 0.5 * b2;
        sum += g;
        sumsq += g * g;
    }
    double var = sumsq / paths - (sum / paths) * (sum / paths);
    double se = expect * std::sqrt(2.0 / paths);  // SE of a normal sample variance
    CHECK(var == Catch::Approx(expect).margin(3 * se));
}

TEST_CASE("sigma2_mc") {
    copula_model one(copula_family::independence, 0.0, 1);
    auto id = [](std::span<const double> u) { return u[0]; };
    CHECK(sigma2_mc(one, id, 64) == Catch::Approx(1.0 / 12.0).margin(1e-6));

    copula_model ind(copula_family::independence, 0.0, 2);
    CHECK(sigma2_mc(ind, neg_prod, 64) == Catch::Approx(7.0 / 144.0).margin(1e-6));

    auto constant = [](std::span<const double>) { return 3.0; };
    CHECK(sigma2_mc(ind, constant, 16) == Catch::Approx(0.0).margin(1e-12));

    copula_model big(copula_family::fgm, 0.5, 4);
    CHECK_THROWS_AS(sigma2_mc(big, constant, 8), std::invalid_argument);
}

TEST_CASE("sigma2_lhsd and variance_gap") {
    copula_model one(copula_family::independence, 0.0, 1);
    integrand_bv f1(1, [](std::span<const double> u) { return u[0] * u[0]; });
    CHECK(sigma2_lhsd(one, f1, 16) == Catch::Approx(0.0).margin(1e-12));

    copula_model ind(copula_family::independence, 0.0, 2);
    integrand_bv f2(2, neg_prod);

    double s2mc = sigma2_mc(ind, neg_prod, 64);
    double s2l = sigma2_lhsd(ind, f2, 16);
    double gap = variance_gap(ind, f2, 16);

    CHECK(s2l <= s2mc);
    CHECK(gap <= 0.0);
    CHECK(s2l - s2mc == Catch::Approx(gap).margin(1e-4));

    integrand_bv zero(2, [](std::span<const double>) { return 0.0; });
    CHECK(variance_gap(ind, zero, 8) == 0.0);

    // same checks with dependence
    copula_model fgm(copula_family::fgm, 0.5, 2);
    double fmc = sigma2_mc(fgm, neg_prod, 64);
    double fl = sigma2_lhsd(fgm, f2, 16);
    double fgap = variance_gap(fgm, f2, 16);
    CHECK(fl <= fmc);
    CHECK(fgap <= 0.0);
    CHECK(fl - fmc == Catch::Approx(fgap).margin(1e-4));
}

TEST_CASE("rectangle measure of the truncated integrand") {
    // f(u,v) = -(1-u)(1-v) has mixed density -1 and vanishes on the u=1, v=1
    // faces, so f-hat = f and each cell of a g-grid has measure -1/g^2.
    integrand_bv f2(2, neg_prod);
    CHECK(f2.f_hat(std::array{1.0, 0.3}) == 0.0);
    CHECK(f2.f_hat(std::array{0.2, 0.3}) == Catch::Approx(neg_prod(std::array{0.2, 0.3})));
    double m = f2.rectangle_measure(std::array{0.25, 0.5}, std::array{0.375, 0.625});
    CHECK(m == Catch::Approx(-0.125 * 0.125).margin(1e-14));
}

TEST_CASE("empirical replication variance matches the asymptotic values") {
    copula_model fgm(copula_family::fgm, 0.5, 2);
    integrand_bv f2(2, neg_prod);
    const double s2l = sigma2_lhsd(fgm, f2, 16);
    const double s2mc = sigma2_mc(fgm, neg_prod, 64);

    const int m = 2000, n = 512;
    double sl = 0, sl2 = 0, sm = 0, sm2 = 0;
    for (int rep = 0; rep < m; ++rep) {
        rng_engine rng = make_engine(substream_seed(9090, rep));
        matrix raw = fgm.sample(n, rng);
        double el = lhsd_estimate(raw, neg_prod, eta_policy::half, rng);
        double em = mc_estimate(raw, neg_prod);
        sl += el;
        sl2 += el * el;
        sm += em;
        sm2 += em * em;
    }
    double var_l = (sl2 - sl * sl / m) / (m - 1);
    double var_m = (sm2 - sm * sm / m) / (m - 1);
    CHECK(n * var_l == Catch::Approx(s2l).epsilon(0.15));
    CHECK(n * var_m == Catch::Approx(s2mc).epsilon(0.10));
}

TEST_CASE("quadrature refinement guard") {
    // A discontinuous integrand whose midpoint quadrature cannot stabilize at
    // low resolution triggers the refinement guard.
    copula_model ind(copula_family::independence, 0.0, 1);
    auto step = [](std::span<const double> u) { return u[0] < 1.0 / 3.0 ? 1.0 : 0.0; };
    CHECK_THROWS_AS(sigma2_mc(ind, step, 2), numerical_guard_error);
}
