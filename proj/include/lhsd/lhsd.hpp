#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lhsd/matrix.hpp"
#include "lhsd/rng.hpp"

namespace lhsd {

enum class eta_policy { half, iid_uniform };

// r_i = #{k : x_k <= x_i}. Ties share the higher rank (the counting formula
// applied literally); distinct entries give a permutation of 1..n.
inline std::vector<int> rank_statistics(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) throw std::invalid_argument("rank_statistics: empty input");
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> r(n);
    for (std::size_t i = 0; i < n; ++i)
        r[i] = static_cast<int>(std::upper_bound(sorted.begin(), sorted.end(), x[i]) -
                                sorted.begin());
    return r;
}

// LHSD transform: per column, v = (rank - 1)/n + eta/n. Row pairing (and
// thus cross-dimensional rank dependence) is preserved.
inline matrix lhsd_transform(const matrix& raw, eta_policy policy, rng_engine& rng) {
    const std::size_t n = raw.rows(), d = raw.cols();
    matrix v(n, d);
    for (std::size_t j = 0; j < d; ++j) {
        auto col = raw.column(j);
        auto ranks = rank_statistics(col);
        for (std::size_t i = 0; i < n; ++i) {
            double eta = policy == eta_policy::half ? 0.5 : uniform01(rng);
            v(i, j) = (ranks[i] - 1 + eta) / static_cast<double>(n);
        }
    }
    return v;
}

// Independent-LHS baseline: d independent uniform random permutations,
// v = (pi - 1)/n + u/n. Destroys cross-dimensional dependence.
inline matrix lhs_transform(const matrix& raw, rng_engine& rng) {
    const std::size_t n = raw.rows(), d = raw.cols();
    matrix v(n, d);
    std::vector<std::size_t> perm(n);
    for (std::size_t j = 0; j < d; ++j) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = n; i > 1; --i)
            std::swap(perm[i - 1], perm[static_cast<std::size_t>(uniform01(rng) * i)]);
        for (std::size_t i = 0; i < n; ++i)
            v(i, j) = (static_cast<double>(perm[i]) + raw(i, j)) / static_cast<double>(n);
    }
    return v;
}

using integrand = std::function<double(std::span<const double>)>;

inline double mc_estimate(const matrix& raw, const integrand& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < raw.rows(); ++i) s += f(raw.row(i));
    return s / static_cast<double>(raw.rows());
}

inline double lhsd_estimate(const matrix& raw, const integrand& f, eta_policy policy,
                            rng_engine& rng) {
    return mc_estimate(lhsd_transform(raw, policy, rng), f);
}

// Empirical copula functions at u: the rank-based C_n and the
// quantile-based empirical copula C~_n. With column ranks r^j_i,
//   C_n counts r^j_i <= floor(n u^j),  C~_n counts r^j_i <= ceil(n u^j);
// they coincide at grid points (i_1/n, ..., i_d/n).
inline std::pair<double, double> empirical_copulas(const matrix& raw,
                                                   std::span<const double> u) {
    const std::size_t n = raw.rows(), d = raw.cols();
    if (u.size() != d) throw std::invalid_argument("empirical_copulas: dimension mismatch");
    std::vector<std::vector<int>> ranks(d);
    for (std::size_t j = 0; j < d; ++j) ranks[j] = rank_statistics(raw.column(j));
    std::vector<int> flo(d), cei(d);
    for (std::size_t j = 0; j < d; ++j) {
        double nu = static_cast<double>(n) * u[j];
        flo[j] = static_cast<int>(std::floor(nu + 1e-9));
        cei[j] = static_cast<int>(std::ceil(nu - 1e-9));
    }
    std::size_t cn = 0, ctn = 0;
    for (std::size_t i = 0; i < n; ++i) {
        bool in_f = true, in_c = true;
        for (std::size_t j = 0; j < d && (in_f || in_c); ++j) {
            int r = ranks[j][i];
            if (r > flo[j]) in_f = false;
            if (r > cei[j]) in_c = false;
        }
        cn += in_f;
        ctn += in_c;
    }
    return {static_cast<double>(cn) / n, static_cast<double>(ctn) / n};
}

}  // namespace lhsd
