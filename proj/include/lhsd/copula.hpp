#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lhsd/errors.hpp"
#include "lhsd/matrix.hpp"
#include "lhsd/rng.hpp"

namespace lhsd {

enum class copula_family { independence, fgm, amh };

// Result of certifying the variance-reduction conditions on a finite grid.
// Condition "13" bounds each partial derivative by C(u)/u^j; condition "14"
// bounds a sum of pair margins by (d-2)u^j plus a cdf ratio. Slack is
// defined so that negative values are violations.
struct condition_report {
    bool condition13_holds = true;
    bool condition14_holds = true;
    int grid_resolution = 0;
    double worst_violation = 0.0;       // most negative slack found, 0 if none
    std::vector<double> witness;        // point of worst slack (u for 13; u^j then ubar for 14)
    int witness_condition = 0;          // 13 or 14, 0 if no violation recorded
    int witness_dim = -1;               // the j index at the worst slack
};

// Parametric d-dimensional copula: independence, one-parameter FGM
//   C(u) = (prod u_i)(1 + alpha prod(1-u_i)),
// or one-parameter AMH
//   C(u) = (prod u_i) / (1 - alpha prod(1-u_i)).
// Immutable after construction; all member functions are pure.
class copula_model {
public:
    copula_model(copula_family family, double alpha, int dim)
        : family_(family), alpha_(family == copula_family::independence ? 0.0 : alpha), dim_(dim) {
        if (dim < 1) throw std::invalid_argument("copula_model: dim must be >= 1");
        if (family != copula_family::independence) {
            if (!(alpha >= -1.0 && alpha <= 1.0))
                throw std::invalid_argument("copula_model: alpha must be in [-1,1]");
            if (dim < 2)
                throw std::invalid_argument(
                    "copula_model: FGM/AMH closed forms require dim >= 2");
        }
        if (family == copula_family::amh) {
            stirling_ = stirling2_table(dim_);
            init_amh_density_bound();
        }
    }

    copula_family family() const { return family_; }
    double alpha() const { return alpha_; }
    int dim() const { return dim_; }

    double cdf(std::span<const double> u) const {
        check_point(u);
        double p = 1.0;
        for (double x : u) p *= x;
        if (family_ == copula_family::independence || alpha_ == 0.0) return p;
        double q = 1.0;
        for (double x : u) q *= 1.0 - x;
        if (family_ == copula_family::fgm) return p * (1.0 + alpha_ * q);
        return p / (1.0 - alpha_ * q);
    }

    // Analytic partial derivative dC/du^j.
    double partial_derivative(std::span<const double> u, int j) const {
        check_point(u);
        if (j < 0 || j >= dim_) throw std::invalid_argument("partial_derivative: j out of range");
        double pj = 1.0, qj = 1.0;  // products over i != j
        for (int i = 0; i < dim_; ++i) {
            if (i == j) continue;
            pj *= u[i];
            qj *= 1.0 - u[i];
        }
        if (family_ == copula_family::independence || alpha_ == 0.0) return pj;
        if (family_ == copula_family::fgm)
            return pj * (1.0 + alpha_ * qj * (1.0 - 2.0 * u[j]));
        double q = qj * (1.0 - u[j]);
        double den = 1.0 - alpha_ * q;
        return pj / den - alpha_ * pj * u[j] * qj / (den * den);
    }

    // Copula density, the mixed partial of cdf. FGM: 1 + alpha prod(1-2u_i).
    // AMH: exact finite subset-sum expansion of d^d [P / (1 - alpha Q)];
    // derivatives of 1/(1-t) composed with the product t = alpha Q enter
    // through Stirling numbers of the second kind.
    double density(std::span<const double> u) const {
        check_point(u);
        if (family_ == copula_family::independence || alpha_ == 0.0) return 1.0;
        if (family_ == copula_family::fgm) {
            double m = 1.0;
            for (double x : u) m *= 1.0 - 2.0 * x;
            return 1.0 + alpha_ * m;
        }
        return amh_density(u);
    }

    // i.i.d. draws from the copula; n x dim matrix of uniforms.
    // Rejection sampling from the uniform envelope: FGM density is bounded
    // by 1+|alpha|, the AMH bound is estimated at construction.
    matrix sample(std::size_t n, rng_engine& rng) const {
        if (n < 1) throw std::invalid_argument("copula_model::sample: n must be >= 1");
        matrix out(n, static_cast<std::size_t>(dim_));
        std::vector<double> u(dim_);
        const double bound = family_ == copula_family::fgm ? 1.0 + std::fabs(alpha_)
                                                           : amh_density_bound_;
        for (std::size_t row = 0; row < n; ++row) {
            if (family_ == copula_family::independence || alpha_ == 0.0) {
                for (int j = 0; j < dim_; ++j) out(row, j) = uniform01(rng);
                continue;
            }
            for (;;) {
                for (int j = 0; j < dim_; ++j) u[j] = uniform01(rng);
                if (uniform01(rng) * bound <= density(u)) break;
            }
            for (int j = 0; j < dim_; ++j) out(row, j) = u[j];
        }
        return out;
    }

    // Grid certification of the variance-reduction conditions. Interior grid
    // {1/(g+1), ..., g/(g+1)} per dimension; condition 14 additionally scans
    // the scalar u^j over the same grid against every grid point ubar.
    condition_report check_conditions(int grid_resolution,
                                      double eval_budget = 5e7) const {
        if (grid_resolution < 2)
            throw std::invalid_argument("check_conditions: grid_resolution must be >= 2");
        const int g = grid_resolution;
        const double n13 = std::pow(double(g), dim_) * dim_;
        const double n14 = std::pow(double(g), dim_ + 1) * dim_;
        if (n13 > eval_budget || n14 > eval_budget)
            throw numerical_guard_error(
                "check_conditions: grid of " + std::to_string(n13 + n14) +
                " evaluations exceeds budget");

        condition_report rep;
        rep.grid_resolution = g;
        std::vector<double> u(dim_);
        std::vector<int> idx(dim_, 0);
        auto grid_value = [g](int k) { return double(k + 1) / double(g + 1); };

        // condition 13: C(u)/u^j >= dC/du^j at interior points
        double worst13 = 0.0;
        std::vector<double> wit13;
        int wit13_dim = -1;
        for (;;) {
            for (int i = 0; i < dim_; ++i) u[i] = grid_value(idx[i]);
            const double c = cdf(u);
            for (int j = 0; j < dim_; ++j) {
                double slack = c / u[j] - partial_derivative(u, j);
                if (slack < worst13) {
                    worst13 = slack;
                    wit13 = u;
                    wit13_dim = j;
                }
            }
            if (!advance(idx, g)) break;
        }

        // condition 14, over pairs (u^j scalar, ubar grid point)
        double worst14 = 0.0;
        std::vector<double> wit14;
        int wit14_dim = -1;
        std::fill(idx.begin(), idx.end(), 0);
        std::vector<double> ubar(dim_), umin(dim_);
        for (;;) {
            for (int i = 0; i < dim_; ++i) ubar[i] = grid_value(idx[i]);
            const double cbar = cdf(ubar);
            for (int j = 0; j < dim_; ++j) {
                for (int ku = 0; ku < g; ++ku) {
                    const double uj = grid_value(ku);
                    umin = ubar;
                    umin[j] = std::min(ubar[j], uj);
                    double lhs = 0.0;
                    for (int i = 0; i < dim_; ++i) {
                        if (i == j) continue;
                        lhs += pair_margin_cdf(j, i, uj, ubar[i]) / ubar[i];
                    }
                    double slack = (dim_ - 2) * uj + cdf(umin) / cbar - lhs;
                    if (slack < worst14) {
                        worst14 = slack;
                        wit14.assign(1, uj);
                        wit14.insert(wit14.end(), ubar.begin(), ubar.end());
                        wit14_dim = j;
                    }
                }
            }
            if (!advance(idx, g)) break;
        }
        rep.condition13_holds = worst13 >= -slack_tol;
        rep.condition14_holds = worst14 >= -slack_tol;
        if (worst13 <= worst14 && worst13 < 0.0) {
            rep.worst_violation = worst13;
            rep.witness = wit13;
            rep.witness_condition = 13;
            rep.witness_dim = wit13_dim;
        } else if (worst14 < 0.0) {
            rep.worst_violation = worst14;
            rep.witness = wit14;
            rep.witness_condition = 14;
            rep.witness_dim = wit14_dim;
        }
        return rep;
    }

    // Bivariate margin C_{i,j}(a, b): the cdf with a at slot i, b at slot j
    // and 1 elsewhere; min(a, b) when i == j. For d >= 3 the alpha term of
    // both one-parameter families carries a factor (1 - u^k) for every
    // coordinate set to 1, so the pair margins collapse to independence.
    double pair_margin_cdf(int i, int j, double a, double b) const {
        if (i == j) return std::min(a, b);
        if (dim_ >= 3 || family_ == copula_family::independence || alpha_ == 0.0)
            return a * b;
        if (family_ == copula_family::fgm)
            return a * b * (1.0 + alpha_ * (1.0 - a) * (1.0 - b));
        return a * b / (1.0 - alpha_ * (1.0 - a) * (1.0 - b));
    }

private:
    static constexpr double slack_tol = 1e-12;

    void check_point(std::span<const double> u) const {
        if (static_cast<int>(u.size()) != dim_)
            throw std::invalid_argument("copula_model: dimension mismatch");
        for (double x : u)
            if (!(x >= 0.0 && x <= 1.0))
                throw std::invalid_argument("copula_model: point outside [0,1]^d");
    }

    static bool advance(std::vector<int>& idx, int g) {
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (++idx[k] < g) return true;
            idx[k] = 0;
        }
        return false;
    }

    // Stirling numbers of the second kind S(r,k), r,k <= d, flattened.
    static std::vector<double> stirling2_table(int d) {
        std::vector<double> s((d + 1) * (d + 1), 0.0);
        s[0] = 1.0;
        for (int r = 1; r <= d; ++r)
            for (int k = 1; k <= r; ++k)
                s[r * (d + 1) + k] = k * s[(r - 1) * (d + 1) + k] + s[(r - 1) * (d + 1) + k - 1];
        return s;
    }

    double amh_density(std::span<const double> u) const {
        const int d = dim_;
        double q = 1.0;
        for (double x : u) q *= 1.0 - x;
        const double t = alpha_ * q;
        const double om = 1.0 - t;
        if (om <= 0.0)
            throw numerical_guard_error("amh_density: singular at this point");
        // factorial and 1/(1-t)^(k+1) tables
        std::vector<double> fact(d + 1, 1.0), invpow(d + 2);
        for (int k = 1; k <= d; ++k) fact[k] = fact[k - 1] * k;
        invpow[0] = 1.0 / om;
        for (int k = 1; k <= d + 1; ++k) invpow[k] = invpow[k - 1] / om;

        double total = 0.0;
        const unsigned nsub = 1u << d;
        for (unsigned mask = 0; mask < nsub; ++mask) {
            int r = 0;
            double pu = 1.0, br = 1.0, bo = 1.0;
            for (int i = 0; i < d; ++i) {
                if (mask & (1u << i)) {
                    ++r;
                    pu *= u[i];
                    br *= 1.0 - u[i];
                } else {
                    bo *= 1.0 - u[i];
                }
            }
            if (r == 0) {
                total += invpow[0];
                continue;
            }
            double sum = 0.0;
            double brk = 1.0;            // br^(k-1)
            double bok = bo;             // bo^k
            double ak = alpha_;          // alpha^k
            for (int k = 1; k <= r; ++k) {
                sum += stirling_[r * (d + 1) + k] * fact[k] * ak * brk * bok * invpow[k];
                brk *= br;
                bok *= bo;
                ak *= alpha_;
            }
            total += pu * ((r % 2) ? -sum : sum);
        }
        return total;
    }

    void init_amh_density_bound() {
        // grid maximum times a 1.5 safety factor; also the nonnegativity check
        int g = std::max(3, static_cast<int>(std::pow(40000.0, 1.0 / dim_)));
        std::vector<int> idx(dim_, 0);
        std::vector<double> u(dim_);
        double maxd = 0.0;
        for (;;) {
            for (int i = 0; i < dim_; ++i) u[i] = double(idx[i] + 1) / double(g + 1);
            double c = amh_density(u);
            if (c < -1e-9)
                throw std::invalid_argument(
                    "copula_model: AMH density negative at a grid point "
                    "(alpha/dim combination is not a valid copula)");
            maxd = std::max(maxd, c);
            if (!advance(idx, g)) break;
        }
        amh_density_bound_ = 1.5 * maxd;
    }

    copula_family family_;
    double alpha_;
    int dim_;
    double amh_density_bound_ = 0.0;
    std::vector<double> stirling_;
};

}  // namespace lhsd
