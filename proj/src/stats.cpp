#include "renoise/stats.hpp"
#include "renoise/error.hpp"
#include "renoise/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace renoise {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double ks_distance(std::vector<double> samples)
{
    if (samples.empty()) throw Error(ErrorKind::Config, "ks_distance needs samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double F = std_normal_cdf(samples[i]);
        d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    return d;
}

double ks_band(std::size_t m) { return 1.63 / std::sqrt(static_cast<double>(m)); }

double KStats::skewness() const { return k2 > 0.0 ? k3 / std::pow(k2, 1.5) : 0.0; }
double KStats::excess_kurtosis() const { return k2 > 0.0 ? k4 / (k2 * k2) : 0.0; }

KStats k_statistics(const std::vector<double>& samples)
{
    const std::size_t n = samples.size();
    if (n < 4) throw Error(ErrorKind::Config, "k-statistics need at least 4 samples");
    long double mean = 0.0L;
    for (double v : samples) mean += v;
    mean /= n;
    long double s2 = 0.0L, s3 = 0.0L, s4 = 0.0L;
    for (double v : samples) {
        long double d = v - mean, d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    const long double N = n, m2 = s2 / N, m3 = s3 / N, m4 = s4 / N;
    KStats k;
    k.n = n;
    k.k2 = static_cast<double>(N / (N - 1) * m2);
    k.k3 = static_cast<double>(N * N / ((N - 1) * (N - 2)) * m3);
    k.k4 = static_cast<double>(N * N * ((N + 1) * m4 - 3 * (N - 1) * m2 * m2) / ((N - 1) * (N - 2) * (N - 3)));
    k.se2 = std::sqrt(std::max(0.0, 2.0 * k.k2 * k.k2 / (n - 1) + k.k4 / n));
    k.se3 = std::sqrt(6.0 * k.k2 * k.k2 * k.k2 / n);
    k.se4 = std::sqrt(24.0 * k.k2 * k.k2 * k.k2 * k.k2 / n);
    return k;
}

GofReport gof_report(const std::vector<double>& samples, double be_rhs)
{
    GofReport g;
    g.ks = ks_distance(samples);
    g.n_samples = samples.size();
    g.band = ks_band(samples.size());
    if (samples.size() >= 4) g.cumulants = k_statistics(samples);
    g.be_rhs = be_rhs;
    return g;
}

RateFit be_rate_fit(const std::vector<double>& n, const std::vector<double>& ks, const std::vector<double>& n_rhs,
                    const std::vector<double>& rhs)
{
    if (n.size() < 4 || n_rhs.size() < 4) throw Error(ErrorKind::Config, "rate fit needs at least 4 points");
    auto logs = [](const std::vector<double>& v) {
        std::vector<double> out;
        for (double x : v) out.push_back(std::log2(x));
        return out;
    };
    RateFit r;
    r.ks_slope = fit_slope(logs(n), logs(ks));
    r.rhs_slope = fit_slope(logs(n_rhs), logs(rhs));
    r.ok = r.ks_slope <= r.rhs_slope + 0.15;
    return r;
}

nlohmann::json to_json(const GofReport& g)
{
    return {{"ks", g.ks},
            {"band", g.band},
            {"n_samples", g.n_samples},
            {"k2", g.cumulants.k2},
            {"k3", g.cumulants.k3},
            {"k4", g.cumulants.k4},
            {"se_k2", g.cumulants.se2},
            {"se_k3", g.cumulants.se3},
            {"se_k4", g.cumulants.se4},
            {"skewness", g.cumulants.skewness()},
            {"excess_kurtosis", g.cumulants.excess_kurtosis()},
            {"be_rhs", g.be_rhs}};
}

} // namespace renoise
