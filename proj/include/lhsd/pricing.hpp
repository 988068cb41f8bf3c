#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "lhsd/rng.hpp"
#include "lhsd/vg.hpp"

namespace lhsd {

enum class option_kind { asian_basket_call, lookback_basket_call };

struct option_spec {
    option_kind kind;
    double strike;
    double rate;
    double maturity;
    std::vector<double> monitoring;  // must match the basket's grid
};

// Undiscounted payoff from one path's m x d price matrix. Asian averages the
// basket mean over monitoring dates; lookback takes its maximum.
inline double payoff(const option_spec& spec, const price_tensor& pt, std::size_t path) {
    const std::size_t m = pt.m, d = pt.d;
    double acc = spec.kind == option_kind::asian_basket_call ? 0.0
                                                             : -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
        double basket = 0.0;
        for (std::size_t j = 0; j < d; ++j) basket += pt.at(path, k, j);
        basket /= static_cast<double>(d);
        if (spec.kind == option_kind::asian_basket_call)
            acc += basket;
        else
            acc = std::max(acc, basket);
    }
    if (spec.kind == option_kind::asian_basket_call) acc /= static_cast<double>(m);
    return std::max(acc - spec.strike, 0.0);
}

// Convenience overload for a single m x d matrix of prices.
inline double payoff(const option_spec& spec, const matrix& path_prices) {
    price_tensor pt;
    pt.n = 1;
    pt.m = path_prices.rows();
    pt.d = path_prices.cols();
    pt.s.assign(path_prices.data().begin(), path_prices.data().end());
    return payoff(spec, pt, 0);
}

// e^{-rT} x mean payoff over n simulated paths.
inline double price_option(const basket_model& basket, const option_spec& spec,
                           sim_method method, std::size_t n, rng_engine& rng,
                           quantile_cache& cache, eta_policy eta = eta_policy::half,
                           drift_convention convention = drift_convention::risk_neutral) {
    if (spec.monitoring.size() != basket.steps())
        throw std::invalid_argument("price_option: monitoring grid mismatch");
    increment_tensor inc = simulate_increments(basket, n, method, rng, cache, eta);
    price_tensor pt = asset_paths(basket, inc, spec.rate, convention);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += payoff(spec, pt, i);
    return std::exp(-spec.rate * spec.maturity) * sum / static_cast<double>(n);
}

struct estimator_report {
    sim_method method;
    double price_mean = 0.0;
    double price_std = 0.0;  // sample std over replications
    std::size_t n = 0;
    std::size_t m_reps = 0;
};

struct experiment_result {
    estimator_report mc;
    estimator_report lhsd;
    double std_ratio = 0.0;  // MC / LHSD
    double var_ratio = 0.0;  // std_ratio^2
};

namespace detail {

inline estimator_report summarize(sim_method method, const std::vector<double>& prices,
                                  std::size_t n) {
    estimator_report rep;
    rep.method = method;
    rep.n = n;
    rep.m_reps = prices.size();
    double mean = 0.0;
    for (double p : prices) mean += p;
    mean /= static_cast<double>(prices.size());
    double ss = 0.0;
    for (double p : prices) ss += (p - mean) * (p - mean);
    rep.price_mean = mean;
    rep.price_std = prices.size() > 1 ? std::sqrt(ss / static_cast<double>(prices.size() - 1)) : 0.0;
    return rep;
}

}  // namespace detail

// m_reps independent estimators per method, one derived substream per
// (method, replication). Aggregation order is fixed by replication index, so
// results are identical for any thread count.
inline experiment_result run_experiment(const basket_model& basket, const option_spec& spec,
                                        std::size_t n, std::size_t m_reps,
                                        std::uint64_t master_seed,
                                        eta_policy eta = eta_policy::half,
                                        drift_convention convention = drift_convention::risk_neutral,
                                        unsigned threads = 1) {
    if (n < 1 || m_reps < 1)
        throw std::invalid_argument("run_experiment: n and m_reps must be >= 1");
    std::vector<double> mc_prices(m_reps), lhsd_prices(m_reps);

    // warm the quantile cache before any parallel section
    quantile_cache cache;
    for (std::size_t k = 0; k < basket.steps(); ++k) {
        const double dt = basket.times[k] - (k == 0 ? 0.0 : basket.times[k - 1]);
        for (const auto& a : basket.assets) {
            cache.get(a.gp.mu_plus * a.gp.mu_plus / a.gp.nu_plus * dt,
                      a.gp.nu_plus / a.gp.mu_plus, n);
            cache.get(a.gp.mu_minus * a.gp.mu_minus / a.gp.nu_minus * dt,
                      a.gp.nu_minus / a.gp.mu_minus, n);
        }
    }

    auto run_range = [&](std::size_t begin, std::size_t stride) {
        quantile_cache local_cache = cache;  // read-only copy per worker
        for (std::size_t rep = begin; rep < m_reps; rep += stride) {
            rng_engine rng_mc = make_engine(substream_seed(master_seed, 2 * rep));
            rng_engine rng_lh = make_engine(substream_seed(master_seed, 2 * rep + 1));
            mc_prices[rep] =
                price_option(basket, spec, sim_method::mc, n, rng_mc, local_cache, eta, convention);
            lhsd_prices[rep] = price_option(basket, spec, sim_method::lhsd, n, rng_lh, local_cache,
                                            eta, convention);
        }
    };

    if (threads <= 1) {
        run_range(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(run_range, t, threads);
        for (auto& th : pool) th.join();
    }

    experiment_result res;
    res.mc = detail::summarize(sim_method::mc, mc_prices, n);
    res.lhsd = detail::summarize(sim_method::lhsd, lhsd_prices, n);
    res.std_ratio = res.lhsd.price_std > 0.0 ? res.mc.price_std / res.lhsd.price_std : 0.0;
    res.var_ratio = res.std_ratio * res.std_ratio;
    return res;
}

}  // namespace lhsd
