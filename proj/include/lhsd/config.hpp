#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lhsd/copula.hpp"
#include "lhsd/pricing.hpp"
#include "lhsd/vg.hpp"

namespace lhsd {

class config_error : public std::runtime_error {
public:
    config_error(std::string what, std::vector<std::string> violations)
        : std::runtime_error(std::move(what)), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

struct copula_config {
    copula_family family = copula_family::independence;
    double alpha = 0.0;
};

// Parsed and validated experiment description. The on-disk format is flat
// `section.key = value` lines with '#' comments; per-asset fields accept a
// scalar (broadcast) or a comma list of length asset.count.
struct experiment_config {
    int asset_count = 0;
    std::vector<double> theta, sigma, c, s0;
    copula_config copula_plus, copula_minus;
    option_kind kind = option_kind::asian_basket_call;
    std::vector<double> strikes;
    double rate = 0.0;
    double maturity = 0.0;
    int monitoring_count = 0;
    double monitoring_spacing = 0.0;
    std::size_t n = 0;
    std::size_t m_reps = 0;
    eta_policy eta = eta_policy::half;
    std::uint64_t master_seed = 0;
    drift_convention convention = drift_convention::risk_neutral;
    std::string output_path = "report.csv";
    std::string output_format = "csv";

    std::vector<double> monitoring_grid() const {
        std::vector<double> t(monitoring_count);
        for (int k = 0; k < monitoring_count; ++k) t[k] = monitoring_spacing * (k + 1);
        return t;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<double> parse_list(const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(trim(item)));
    return out;
}

}  // namespace detail

inline experiment_config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path, {"file: " + path});

    std::map<std::string, std::string> kv;
    std::string line;
    std::vector<std::string> errs;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            errs.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        kv[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
    }

    auto get = [&](const std::string& key, bool required = true) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end()) {
            if (required) errs.push_back(key + ": missing");
            return "";
        }
        return it->second;
    };
    auto get_double = [&](const std::string& key, double fallback = 0.0,
                          bool required = true) -> double {
        std::string v = get(key, required);
        if (v.empty()) return fallback;
        try {
            return std::stod(v);
        } catch (const std::exception&) {
            errs.push_back(key + ": not a number: " + v);
            return fallback;
        }
    };
    auto get_int = [&](const std::string& key, long long fallback = 0,
                       bool required = true) -> long long {
        std::string v = get(key, required);
        if (v.empty()) return fallback;
        try {
            return std::stoll(v);
        } catch (const std::exception&) {
            errs.push_back(key + ": not an integer: " + v);
            return fallback;
        }
    };

    experiment_config cfg;
    cfg.asset_count = static_cast<int>(get_int("asset.count"));
    if (cfg.asset_count < 1) errs.push_back("asset.count: must be >= 1");

    auto per_asset = [&](const std::string& key) -> std::vector<double> {
        std::string v = get(key);
        if (v.empty()) return {};
        std::vector<double> vals;
        try {
            vals = detail::parse_list(v);
        } catch (const std::exception&) {
            errs.push_back(key + ": not a number list: " + v);
            return {};
        }
        if (vals.size() == 1 && cfg.asset_count > 1)
            vals.assign(static_cast<std::size_t>(cfg.asset_count), vals[0]);
        if (static_cast<int>(vals.size()) != cfg.asset_count)
            errs.push_back(key + ": expected 1 or asset.count values");
        return vals;
    };
    cfg.theta = per_asset("asset.theta");
    cfg.sigma = per_asset("asset.sigma");
    cfg.c = per_asset("asset.c");
    cfg.s0 = per_asset("asset.s0");
    for (double v : cfg.sigma)
        if (v <= 0.0) errs.push_back("asset.sigma: must be positive");
    for (double v : cfg.c)
        if (v <= 0.0) errs.push_back("asset.c: gamma subordinator volatility must be positive");
    for (double v : cfg.s0)
        if (v <= 0.0) errs.push_back("asset.s0: must be positive");

    auto parse_copula = [&](const std::string& section, copula_config& out) {
        std::string fam = get(section + ".family");
        if (fam == "independence")
            out.family = copula_family::independence;
        else if (fam == "fgm")
            out.family = copula_family::fgm;
        else if (fam == "amh")
            out.family = copula_family::amh;
        else if (!fam.empty())
            errs.push_back(section + ".family: unknown family '" + fam + "'");
        out.alpha = get_double(section + ".alpha", 0.0,
                               out.family != copula_family::independence);
        if (out.family != copula_family::independence &&
            !(out.alpha >= -1.0 && out.alpha <= 1.0))
            errs.push_back(section + ".alpha: must be in [-1,1]");
    };
    parse_copula("copula_plus", cfg.copula_plus);
    parse_copula("copula_minus", cfg.copula_minus);

    std::string kind = get("option.kind");
    if (kind == "asian")
        cfg.kind = option_kind::asian_basket_call;
    else if (kind == "lookback")
        cfg.kind = option_kind::lookback_basket_call;
    else if (!kind.empty())
        errs.push_back("option.kind: must be 'asian' or 'lookback'");

    {
        std::string v = get("option.strikes");
        if (!v.empty()) {
            try {
                cfg.strikes = detail::parse_list(v);
            } catch (const std::exception&) {
                errs.push_back("option.strikes: not a number list");
            }
        }
        for (double k : cfg.strikes)
            if (k <= 0.0) errs.push_back("option.strikes: strikes must be positive");
    }
    cfg.rate = get_double("option.rate");
    cfg.maturity = get_double("option.maturity");
    if (cfg.maturity <= 0.0) errs.push_back("option.maturity: must be positive");
    cfg.monitoring_count = static_cast<int>(get_int("option.monitoring_count"));
    cfg.monitoring_spacing = get_double("option.monitoring_spacing");
    if (cfg.monitoring_count < 1) errs.push_back("option.monitoring_count: must be >= 1");
    if (cfg.monitoring_spacing <= 0.0) errs.push_back("option.monitoring_spacing: must be positive");
    if (cfg.monitoring_count >= 1 && cfg.monitoring_spacing > 0.0 &&
        std::fabs(cfg.monitoring_count * cfg.monitoring_spacing - cfg.maturity) > 1e-9)
        errs.push_back("option.monitoring_count * option.monitoring_spacing must equal option.maturity");

    long long nn = get_int("simulation.n");
    long long mm = get_int("simulation.m_reps");
    if (nn < 1) errs.push_back("simulation.n: must be >= 1");
    if (mm < 1) errs.push_back("simulation.m_reps: must be >= 1");
    cfg.n = nn > 0 ? static_cast<std::size_t>(nn) : 0;
    cfg.m_reps = mm > 0 ? static_cast<std::size_t>(mm) : 0;

    {
        std::string v = get("simulation.eta_policy", false);
        if (v == "" || v == "half")
            cfg.eta = eta_policy::half;
        else if (v == "iid_uniform")
            cfg.eta = eta_policy::iid_uniform;
        else
            errs.push_back("simulation.eta_policy: must be 'half' or 'iid_uniform'");
    }
    cfg.master_seed = static_cast<std::uint64_t>(get_int("simulation.master_seed"));
    {
        std::string v = get("simulation.drift_convention", false);
        if (v == "" || v == "risk_neutral")
            cfg.convention = drift_convention::risk_neutral;
        else if (v == "literal")
            cfg.convention = drift_convention::literal;
        else
            errs.push_back("simulation.drift_convention: must be 'risk_neutral' or 'literal'");
    }
    {
        std::string v = get("output.path", false);
        if (!v.empty()) cfg.output_path = v;
        v = get("output.format", false);
        if (!v.empty()) cfg.output_format = v;
        if (cfg.output_format != "csv") errs.push_back("output.format: only 'csv' is supported");
    }

    // model-level preconditions (martingale drift, copula validity)
    if (errs.empty()) {
        for (int j = 0; j < cfg.asset_count; ++j) {
            try {
                vg_asset a(cfg.theta[j], cfg.sigma[j], cfg.c[j], cfg.s0[j]);
                (void)a;
            } catch (const std::exception& e) {
                errs.push_back("asset[" + std::to_string(j) + "]: " + e.what());
            }
        }
        for (const auto* cc : {&cfg.copula_plus, &cfg.copula_minus}) {
            try {
                copula_model m(cc->family, cc->alpha, cfg.asset_count);
                (void)m;
            } catch (const std::exception& e) {
                errs.push_back(std::string(cc == &cfg.copula_plus ? "copula_plus" : "copula_minus") +
                               ": " + e.what());
            }
        }
    }

    if (!errs.empty()) {
        std::string msg = "config " + path + " invalid:";
        for (const auto& e : errs) msg += "\n  - " + e;
        throw config_error(msg, errs);
    }
    return cfg;
}

inline basket_model make_basket(const experiment_config& cfg) {
    std::vector<vg_asset> assets;
    for (int j = 0; j < cfg.asset_count; ++j)
        assets.emplace_back(cfg.theta[j], cfg.sigma[j], cfg.c[j], cfg.s0[j]);
    copula_model cplus(cfg.copula_plus.family, cfg.copula_plus.alpha, cfg.asset_count);
    copula_model cminus(cfg.copula_minus.family, cfg.copula_minus.alpha, cfg.asset_count);
    return basket_model(std::move(assets), std::move(cplus), std::move(cminus),
                        cfg.monitoring_grid());
}

inline option_spec make_option(const experiment_config& cfg, double strike) {
    return option_spec{cfg.kind, strike, cfg.rate, cfg.maturity, cfg.monitoring_grid()};
}

}  // namespace lhsd
