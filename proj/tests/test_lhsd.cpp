#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "lhsd/copula.hpp"
#include "lhsd/lhsd.hpp"
#include "lhsd/matrix.hpp"
#include "lhsd/rng.hpp"

using namespace lhsd;

TEST_CASE("rank statistics") {
    CHECK(rank_statistics(std::array{0.3, 0.1, 0.7}) == std::vector{2, 1, 3});
    CHECK(rank_statistics(std::array{0.5}) == std::vector{1});
    std::vector<double> asc(17);
    for (int i = 0; i < 17; ++i) asc[i] = 0.01 * i;
    auto r = rank_statistics(asc);
    for (int i = 0; i < 17; ++i) CHECK(r[i] == i + 1);
    // ties share the higher rank
    CHECK(rank_statistics(std::array{0.2, 0.2, 0.1}) == std::vector{3, 3, 1});
    CHECK_THROWS_AS(rank_statistics(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("lhsd transform") {
    rng_engine rng = make_engine(1);
    matrix raw(4, 1);
    raw(0, 0) = 0.9;
    raw(1, 0) = 0.1;
    raw(2, 0) = 0.5;
    raw(3, 0) = 0.3;
    matrix v = lhsd_transform(raw, eta_policy::half, rng);
    CHECK(v(0, 0) == 0.875);
    CHECK(v(1, 0) == 0.125);
    CHECK(v(2, 0) == 0.625);
    CHECK(v(3, 0) == 0.375);

    matrix one(1, 3);
    one(0, 0) = 0.2;
    one(0, 1) = 0.9;
    one(0, 2) = 0.4;
    matrix vo = lhsd_transform(one, eta_policy::half, rng);
    for (int j = 0; j < 3; ++j) CHECK(vo(0, j) == 0.5);

    // comonotone columns map to identical columns
    matrix co(5, 2);
    for (int i = 0; i < 5; ++i) {
        co(i, 0) = std::sin(i + 1.0);
        co(i, 1) = 2 * std::sin(i + 1.0) + 3;  // same ordering
    }
    matrix vc = lhsd_transform(co, eta_policy::half, rng);
    for (int i = 0; i < 5; ++i) CHECK(vc(i, 0) == vc(i, 1));
}

TEST_CASE("lhsd transform invariants") {
    rng_engine rng = make_engine(3);
    copula_model fgm(copula_family::fgm, 0.5, 2);
    matrix raw = fgm.sample(257, rng);
    matrix v = lhsd_transform(raw, eta_policy::half, rng);

    // stratification: floor(n v) sorted is 0..n-1 per column
    for (int j = 0; j < 2; ++j) {
        std::vector<int> s(257);
        for (int i = 0; i < 257; ++i) s[i] = int(257 * v(i, j));
        std::sort(s.begin(), s.end());
        for (int i = 0; i < 257; ++i) CHECK(s[i] == i);
    }

    // rank invariance under a strictly increasing map of a column
    matrix mapped = raw;
    for (std::size_t i = 0; i < mapped.rows(); ++i)
        mapped(i, 0) = std::exp(3 * mapped(i, 0));
    matrix v2 = lhsd_transform(mapped, eta_policy::half, rng);
    for (std::size_t i = 0; i < v.rows(); ++i)
        for (int j = 0; j < 2; ++j) CHECK(v(i, j) == v2(i, j));

    // iid_uniform eta stays inside the same stratum
    matrix v3 = lhsd_transform(raw, eta_policy::iid_uniform, rng);
    for (std::size_t i = 0; i < v.rows(); ++i)
        for (int j = 0; j < 2; ++j) CHECK(int(257 * v3(i, j)) == int(257 * v(i, j)));
}

TEST_CASE("estimators") {
    rng_engine rng = make_engine(8);
    copula_model ind(copula_family::independence, 0.0, 2);

    auto constant = [](std::span<const double>) { return 2.5; };
    matrix raw = ind.sample(100, rng);
    CHECK(mc_estimate(raw, constant) == 2.5);
    CHECK(lhsd_estimate(raw, constant, eta_policy::half, rng) == 2.5);

    // d=1 identity integrand is exact under Half
    copula_model one(copula_family::independence, 0.0, 1);
    matrix r1 = one.sample(64, rng);
    auto id = [](std::span<const double> u) { return u[0]; };
    CHECK(lhsd_estimate(r1, id, eta_policy::half, rng) == Catch::Approx(0.5).margin(1e-14));

    // d=2, independence, f = uv
    matrix r2 = ind.sample(4096, rng);
    auto prod = [](std::span<const double> u) { return u[0] * u[1]; };
    CHECK(lhsd_estimate(r2, prod, eta_policy::half, rng) == Catch::Approx(0.25).margin(0.01));

    // MC CLT band for the uniform mean
    copula_model uni(copula_family::independence, 0.0, 1);
    matrix ru = uni.sample(100000, rng);
    double band = 3.0 / std::sqrt(12.0) / std::sqrt(100000.0);
    CHECK(mc_estimate(ru, id) == Catch::Approx(0.5).margin(band));
}

TEST_CASE("lhs baseline") {
    rng_engine rng = make_engine(13);
    copula_model ind(copula_family::independence, 0.0, 2);
    matrix raw = ind.sample(10000, rng);
    matrix v = lhs_transform(raw, rng);
    // stratification
    for (int j = 0; j < 2; ++j) {
        std::vector<int> s(10000);
        for (int i = 0; i < 10000; ++i) s[i] = int(10000 * v(i, j));
        std::sort(s.begin(), s.end());
        for (int i = 0; i < 10000; ++i) CHECK(s[i] == i);
    }
    // columns decorrelated by the independent permutations
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < 10000; ++i) {
        sx += v(i, 0);
        sy += v(i, 1);
        sxy += v(i, 0) * v(i, 1);
        sxx += v(i, 0) * v(i, 0);
        syy += v(i, 1) * v(i, 1);
    }
    double n = 10000;
    double corr = (sxy / n - sx * sy / n / n) /
                  std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
    CHECK(std::fabs(corr) < 0.03);
}

TEST_CASE("empirical copulas") {
    rng_engine rng = make_engine(21);
    copula_model fgm(copula_family::fgm, 0.5, 2);
    matrix raw = fgm.sample(100, rng);

    auto [c1, ct1] = empirical_copulas(raw, std::array{1.0, 1.0});
    CHECK(c1 == 1.0);
    CHECK(ct1 == 1.0);

    auto [c0, ct0] = empirical_copulas(raw, std::array{0.0, 0.7});
    CHECK(c0 == 0.0);

    // coincide at grid points
    for (int i = 0; i <= 100; i += 7)
        for (int k = 0; k <= 100; k += 13) {
            auto [a, b] = empirical_copulas(raw, std::array{i / 100.0, k / 100.0});
            CHECK(a == b);
        }
}

TEST_CASE("closeness bound sup |C~_n - C_n| <= d/n") {
    rng_engine rng = make_engine(31);
    for (int d : {2, 3}) {
        copula_model m(copula_family::fgm, 0.5, d);
        for (int n : {10, 100}) {
            matrix raw = m.sample(n, rng);
            double sup = 0.0;
            std::vector<int> idx(d, 0);
            std::vector<double> u(d);
            const int g = d == 3 ? 25 : 50;
            for (;;) {
                for (int i = 0; i < d; ++i) u[i] = double(idx[i]) / g;
                auto [cn, ctn] = empirical_copulas(raw, u);
                sup = std::max(sup, std::fabs(ctn - cn));
                bool done = true;
                for (int k = 0; k < d; ++k) {
                    if (++idx[k] <= g) {
                        done = false;
                        break;
                    }
                    idx[k] = 0;
                }
                if (done) break;
            }
            CHECK(sup <= double(d) / n + 1e-12);
        }
    }
}

TEST_CASE("consistency: median error shrinks with n") {
    copula_model fgm(copula_family::fgm, 0.5, 2);
    auto prod = [](std::span<const double> u) { return u[0] * u[1]; };
    // E[uv] under FGM alpha: 1/4 + alpha/36
    const double truth = 0.25 + 0.5 / 36.0;
    auto median_err = [&](int n) {
        std::vector<double> errs;
        for (int s = 0; s < 50; ++s) {
            rng_engine rng = make_engine(substream_seed(777, s));
            matrix raw = fgm.sample(n, rng);
            errs.push_back(std::fabs(lhsd_estimate(raw, prod, eta_policy::half, rng) - truth));
        }
        std::nth_element(errs.begin(), errs.begin() + 25, errs.end());
        return errs[25];
    };
    CHECK(median_err(4096) < median_err(256));
}
