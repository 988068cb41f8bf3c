#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lhsd/copula.hpp"
#include "lhsd/errors.hpp"

namespace lhsd {

// Covariance of the pinned Brownian sheet B_C:
//   E[B_C(u) B_C(v)] = C(u ^ v) - C(u) C(v)   (componentwise minimum).
inline double brownian_sheet_cov(const copula_model& model, std::span<const double> u,
                                 std::span<const double> v) {
    const int d = model.dim();
    std::vector<double> m(d);
    for (int i = 0; i < d; ++i) m[i] = std::min(u[i], v[i]);
    return model.cdf(m) - model.cdf(u) * model.cdf(v);
}

namespace detail {

// E[B_C(u) B_C(1,..,1,v_j,1,..,1)] = C(u with u^j ^ v_j at slot j) - C(u) v_j.
inline double sheet_marginal_cov(const copula_model& model, std::span<const double> u,
                                 double cu, double vj, int j, std::vector<double>& buf) {
    buf.assign(u.begin(), u.end());
    buf[j] = std::min(u[j], vj);
    return model.cdf(buf) - cu * vj;
}

}  // namespace detail

// Covariance E[G_C(u) G_C(v)] of the limit field
//   G_C(u) = B_C(u) - sum_j dC/du^j(u) B_C(1,..,u^j,..,1),
// expanded bilinearly with the marginal-sheet simplifications.
inline double gc_cov(const copula_model& model, std::span<const double> u,
                     std::span<const double> v) {
    const int d = model.dim();
    std::vector<double> buf(d);
    const double cu = model.cdf(u), cv = model.cdf(v);
    std::vector<double> du(d), dv(d);
    for (int j = 0; j < d; ++j) {
        du[j] = model.partial_derivative(u, j);
        dv[j] = model.partial_derivative(v, j);
    }
    double result = brownian_sheet_cov(model, u, v);
    for (int j = 0; j < d; ++j)
        result -= dv[j] * detail::sheet_marginal_cov(model, u, cu, v[j], j, buf);
    for (int i = 0; i < d; ++i)
        result -= du[i] * detail::sheet_marginal_cov(model, v, cv, u[i], i, buf);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            result += du[i] * dv[j] * (model.pair_margin_cdf(i, j, u[i], v[j]) - u[i] * v[j]);
    return result;
}

// An integrand of bounded variation together with the Lebesgue-Stieltjes
// measure of its truncation f-hat (f zeroed where any coordinate is 1).
// The measure of a rectangle is the alternating corner sum of f-hat, so
// cells touching a coordinate-1 face pick up the truncation automatically.
class integrand_bv {
public:
    integrand_bv(int dim, std::function<double(std::span<const double>)> f)
        : dim_(dim), f_(std::move(f)) {
        if (dim < 1) throw std::invalid_argument("integrand_bv: dim must be >= 1");
    }

    int dim() const { return dim_; }
    double f(std::span<const double> u) const { return f_(u); }

    double f_hat(std::span<const double> u) const {
        for (double x : u)
            if (x == 1.0) return 0.0;
        return f_(u);
    }

    // Vitali measure of the rectangle [lo, hi] under f-hat.
    double rectangle_measure(std::span<const double> lo, std::span<const double> hi) const {
        const int d = dim_;
        std::vector<double> corner(d);
        double total = 0.0;
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
            int nlo = 0;
            for (int i = 0; i < d; ++i) {
                if (mask & (1u << i)) {
                    corner[i] = lo[i];
                    ++nlo;
                } else {
                    corner[i] = hi[i];
                }
            }
            total += (nlo % 2 ? -1.0 : 1.0) * f_hat(corner);
        }
        return total;
    }

private:
    int dim_;
    std::function<double(std::span<const double>)> f_;
};

namespace detail {

inline bool advance_cell(std::vector<int>& idx, int g) {
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (++idx[k] < g) return true;
        idx[k] = 0;
    }
    return false;
}

template <class F>
double midpoint_variance(const copula_model& model, const F& f, int g) {
    const int d = model.dim();
    std::vector<int> idx(d, 0);
    std::vector<double> u(d);
    const double cellw = 1.0 / g;
    double mean = 0.0, second = 0.0, mass = 0.0;
    for (;;) {
        for (int i = 0; i < d; ++i) u[i] = (idx[i] + 0.5) * cellw;
        double w = model.density(u) * std::pow(cellw, d);
        double fv = f(u);
        mean += w * fv;
        second += w * fv * fv;
        mass += w;
        if (!detail::advance_cell(idx, g)) break;
    }
    // normalize away the quadrature error in the density mass
    mean /= mass;
    second /= mass;
    return second - mean * mean;
}

struct cell_grid {
    std::vector<double> mid;     // g^d x d midpoints, flattened
    std::vector<double> weight;  // g^d rectangle measures of f-hat
    int count = 0;
};

inline cell_grid build_cells(const integrand_bv& fbv, int g) {
    const int d = fbv.dim();
    cell_grid cells;
    std::vector<int> idx(d, 0);
    std::vector<double> lo(d), hi(d), mid(d);
    for (;;) {
        for (int i = 0; i < d; ++i) {
            lo[i] = static_cast<double>(idx[i]) / g;
            hi[i] = static_cast<double>(idx[i] + 1) / g;
            mid[i] = (idx[i] + 0.5) / g;
        }
        cells.mid.insert(cells.mid.end(), mid.begin(), mid.end());
        cells.weight.push_back(fbv.rectangle_measure(lo, hi));
        ++cells.count;
        if (!advance_cell(idx, g)) break;
    }
    return cells;
}

// Double Lebesgue-Stieltjes integral of kernel(u, v) against df-hat x df-hat.
template <class Kernel>
double double_ls_integral(const integrand_bv& fbv, int g, const Kernel& kernel) {
    const int d = fbv.dim();
    cell_grid cells = build_cells(fbv, g);
    double total = 0.0;
    for (int a = 0; a < cells.count; ++a) {
        std::span<const double> ua(cells.mid.data() + a * d, d);
        double row = 0.0;
        for (int b = 0; b < cells.count; ++b) {
            std::span<const double> ub(cells.mid.data() + b * d, d);
            row += cells.weight[b] * kernel(ua, ub);
        }
        total += cells.weight[a] * row;
    }
    return total;
}

// Two midpoint resolutions g and 2g; flags insufficient resolution and
// returns the Richardson-extrapolated value.
template <class Eval>
double refine(const Eval& eval, int g, const char* what) {
    double coarse = eval(g);
    double fine = eval(2 * g);
    if (std::fabs(fine - coarse) > 1e-3)
        throw numerical_guard_error(std::string(what) +
                                    ": successive quadrature refinements differ by more "
                                    "than 1e-3; raise the resolution");
    return fine + (fine - coarse) / 3.0;
}

}  // namespace detail

// sigma^2_MC = int f^2 dC - (int f dC)^2 by tensor midpoint quadrature
// against the copula density. Guarded to d <= 3.
inline double sigma2_mc(const copula_model& model,
                        const std::function<double(std::span<const double>)>& f,
                        int quadrature_resolution) {
    if (model.dim() > 3)
        throw std::invalid_argument("sigma2_mc: quadrature limited to d <= 3");
    if (quadrature_resolution < 2)
        throw std::invalid_argument("sigma2_mc: resolution must be >= 2");
    return detail::refine(
        [&](int g) { return detail::midpoint_variance(model, f, g); },
        quadrature_resolution, "sigma2_mc");
}

// sigma^2_LHSD = int int E[G_C(u) G_C(v)] df-hat(u) df-hat(v). The double
// integral is 2d-dimensional; guarded to d <= 2.
inline double sigma2_lhsd(const copula_model& model, const integrand_bv& fbv,
                          int quadrature_resolution) {
    if (model.dim() != fbv.dim())
        throw std::invalid_argument("sigma2_lhsd: dimension mismatch");
    if (model.dim() > 2)
        throw std::invalid_argument("sigma2_lhsd: double quadrature limited to d <= 2");
    if (quadrature_resolution < 2)
        throw std::invalid_argument("sigma2_lhsd: resolution must be >= 2");
    auto kernel = [&](std::span<const double> u, std::span<const double> v) {
        return gc_cov(model, u, v);
    };
    return detail::refine(
        [&](int g) { return detail::double_ls_integral(fbv, g, kernel); },
        quadrature_resolution, "sigma2_lhsd");
}

// The correction terms of the sigma^2_LHSD - sigma^2_MC decomposition,
// integrated against df-hat x df-hat. Non-positive under the certified
// conditions; an independent quadrature route to sigma2_lhsd - sigma2_mc.
inline double variance_gap(const copula_model& model, const integrand_bv& fbv,
                           int quadrature_resolution) {
    if (model.dim() != fbv.dim())
        throw std::invalid_argument("variance_gap: dimension mismatch");
    if (model.dim() > 2)
        throw std::invalid_argument("variance_gap: double quadrature limited to d <= 2");
    const int d = model.dim();
    auto kernel = [&, d](std::span<const double> u, std::span<const double> v) {
        std::vector<double> buf(d);
        const double cv = model.cdf(v);
        double first = 0.0;
        for (int j = 0; j < d; ++j) {
            buf.assign(v.begin(), v.end());
            buf[j] = std::min(v[j], u[j]);
            first += model.partial_derivative(u, j) * (cv * u[j] - model.cdf(buf));
        }
        double second = 0.0;
        for (int j = 0; j < d; ++j) {
            const double djv = model.partial_derivative(v, j);
            for (int i = 0; i < d; ++i)
                second += djv * model.partial_derivative(u, i) *
                          (model.pair_margin_cdf(i, j, u[i], v[j]) - u[i] * v[j]);
        }
        return 2.0 * first + second;
    };
    return detail::refine(
        [&](int g) { return detail::double_ls_integral(fbv, g, kernel); },
        quadrature_resolution, "variance_gap");
}

}  // namespace lhsd
