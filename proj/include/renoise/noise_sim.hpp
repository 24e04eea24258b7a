#pragma once

#include "renoise/maps.hpp"
#include "renoise/rng.hpp"
#include "renoise/stats.hpp"

#include "json.hpp"
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace renoise {

enum class NoiseFamily { UniformPm1, Gaussian, Rademacher, TruncatedGaussian };

struct NoiseModel {
    NoiseFamily family = NoiseFamily::UniformPm1;
    double trunc = 3.0;             // bound b for the truncated gaussian
    double p = 4.0;                 // declared moment order
    std::vector<double> step_scale; // per-step multiplier, empty means 1

    double moment(int s) const;     // E|xi|^s for s in 1..8
    double norm_p(double p) const;  // (E|xi|^p)^{1/p}
    bool compact() const;
    double bound() const;           // sup |xi| for compact families
    double scale(long long j) const;
};

const char* noise_name(NoiseFamily f);
NoiseFamily parse_noise(const std::string& s);

// Noise draws for one sample: the stream is keyed by (seed, sample index), so every time
// horizon sees the same increments.
class NoiseStream {
public:
    NoiseStream(const NoiseModel& m, std::uint64_t seed, std::uint64_t stream) : model_(m), rng_(seed, stream) {}
    double next();

private:
    const NoiseModel& model_;
    StreamRng rng_;
    std::normal_distribution<double> nd_;
};

enum class ExecPolicy { Serial, Parallel };

struct SimOptions {
    double pad = 0.1;        // interval guard for maps on [-1, 1]
    ExecPolicy policy = ExecPolicy::Parallel;
    bool keep_noise_max = true;
};

struct EnsembleResult {
    std::string map;
    std::string noise;
    double x0 = 0.0;
    long long n = 0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::size_t M = 0;
    std::vector<double> orbit;    // f^j(x0), j = 0..n
    std::vector<double> weights;  // (f^{n-j})'(f^j x0), index j = 1..n (index 0 unused)
    double var_L = 0.0;           // sum_j weights_j^2 E[xi_j^2]
    double lambda_hat = 0.0;
    double d2_norm = 0.0;
    double a_k = 0.0;
    // Per sample.
    std::vector<double> endpoint; // x_n
    std::vector<double> dev;      // (x_n - f^n(x0)) / sigma
    std::vector<double> lin;      // L_n
    std::vector<double> max_xi;
    std::vector<std::uint8_t> guard;  // 1 when sigma max|xi| > pad (excluded)
    std::vector<std::uint8_t> in_B;   // max|xi| <= a_k
    std::vector<std::uint8_t> in_Bbar; // |f''| sigma lambda_hat^2 max|xi| <= 1/4
    double guard_fraction = 0.0;
    double B_fraction = 0.0;
    double Bbar_fraction = 0.0;
    std::size_t shadow_checked = 0;
    std::size_t shadow_violations = 0;
    double shadow_worst_ratio = 0.0; // max |x_n - f^n - sigma L_n| / bound over checked samples
};

EnsembleResult simulate(const MapSpec& f, double x0, long long n, double sigma, const NoiseModel& noise, std::size_t M,
                        std::uint64_t seed, const SimOptions& opt = {});

enum class Variant { W, WTilde, WHat };

// w over non-guarded samples; w~ and w^ use the B_k and Bbar_k indicators with the truncated
// sample variance as normalization.
std::vector<double> normalized_processes(const EnsembleResult& E, Variant v);

struct VarianceComparison {
    double var_effective = 0.0;   // sample variance of (x_n - f^n)/sigma over unguarded samples
    double sigma2_varL = 0.0;     // var L_n
    double ratio = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;
    double set_fraction = 0.0;    // share of samples in Bbar_k
    bool drift = false;           // 1 outside the bootstrap interval and |ratio - 1| > 0.01
};

VarianceComparison variance_comparison(const EnsembleResult& E, int resamples = 200);

struct SpectralConstants {
    double rho1 = 0.0, rho2 = 0.0, rho3 = 0.0;
    double lambda = 0.0; // scaling ratio for the pd normalization
};

enum class ScheduleKind { PdClt, PdBe, CircleClt, CircleBe };

const char* schedule_kind_name(ScheduleKind k);
double sigma_exponent(ScheduleKind kind, const SpectralConstants& c, double margin = 0.05);
double sigma_schedule(ScheduleKind kind, long long n, const SpectralConstants& c, double margin = 0.05);

struct CumulantPoint {
    long long n = 0;
    double sigma = 0.0;
    double ks = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    KStats k;
    double guard_fraction = 0.0;
    double B_fraction = 0.0;
};

struct CumulantSeries {
    std::vector<CumulantPoint> points;
    double skew_slope = 0.0; // log2 |skew| against log2 n
    double kurt_slope = 0.0;
    double ks_slope = 0.0;
};

CumulantSeries cumulant_decay(const MapSpec& f, double x0, const NoiseModel& noise, const std::vector<long long>& ns,
                              const std::vector<double>& sigmas, std::size_t M, std::uint64_t seed,
                              const SimOptions& opt = {});

nlohmann::json summary_json(const EnsembleResult& E);

} // namespace renoise
