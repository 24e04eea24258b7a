#pragma once

#include "json.hpp"
#include <cstddef>
#include <vector>

namespace renoise {

double std_normal_cdf(double z);

// Exact sup_z |F_M(z) - Phi(z)| over the jumps of the empirical distribution.
double ks_distance(std::vector<double> samples);

// Asymptotic 99% Kolmogorov band for M samples.
double ks_band(std::size_t m);

struct KStats {
    double k2 = 0.0, k3 = 0.0, k4 = 0.0;
    double se2 = 0.0, se3 = 0.0, se4 = 0.0; // leading-order standard errors
    std::size_t n = 0;
    double skewness() const;
    double excess_kurtosis() const;
};

// Unbiased k-statistics; accumulation in long double over centered values.
KStats k_statistics(const std::vector<double>& samples);

struct GofReport {
    double ks = 0.0;
    double band = 0.0;
    std::size_t n_samples = 0;
    KStats cumulants;
    double be_rhs = 0.0;
};

GofReport gof_report(const std::vector<double>& samples, double be_rhs = 0.0);

struct RateFit {
    double ks_slope = 0.0;
    double rhs_slope = 0.0;
    bool ok = false; // ks_slope <= rhs_slope + 0.15
};

// Slopes of log2 ks and log2 rhs against log2 n.
RateFit be_rate_fit(const std::vector<double>& n, const std::vector<double>& ks, const std::vector<double>& n_rhs,
                    const std::vector<double>& rhs);

nlohmann::json to_json(const GofReport& g);

} // namespace renoise
