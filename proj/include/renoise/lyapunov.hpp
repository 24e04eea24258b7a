#pragma once

#include "renoise/maps.hpp"
#include "renoise/renorm_circle.hpp"

#include <string>
#include <vector>

namespace renoise {

enum class EvalMethod { Direct, Blocks };

// Lambda_p(x, n) = sum_{j=1}^{n} |(f^{n-j})'(f^j x)|^p with the convention Lambda_p(x, 0) = 0.
// Values are kept as logarithms; the signed sum carries an explicit sign.
struct LyapunovEval {
    double x = 0.0;
    long long n = 0;
    double p = 0.0;
    double log_value = 0.0;     // log Lambda_p
    double log_hat = 0.0;       // log of max_{0<=i<=n} sum_{j=0}^{i} |(f^{i-j})'(f^j x)|
    bool has_signed = false;
    double log_signed = 0.0;    // log |Lambda~_p|
    int signed_sign = 1;
    double log_deriv = 0.0;     // log |(f^n)'(x)|
    int deriv_sign = 1;
    double end = 0.0;           // f^n(x); circle lifts are reduced to [-1/2, 1/2)
    EvalMethod method = EvalMethod::Direct;

    double value() const;
    double hat() const;
    double signed_value() const;
};

LyapunovEval lambda_direct(const MapSpec& f, double x, long long n, double p);

// Lambda_p(x, n) for n = 0..n_max in one forward pass (log values, index n).
std::vector<double> lambda_series(const MapSpec& f, double x, long long n_max, double p);

// Relative residual of Lambda_p(x, n+m) = |(f^m)'(f^n x)|^p Lambda_p(x, n) + Lambda_p(f^n x, m),
// and the same for the signed sums when p is an integer.
struct ChainResidual {
    double unsigned_rel = 0.0;
    double signed_rel = 0.0;
};
ChainResidual chain_rule_identity_check(const MapSpec& f, double x, long long n, long long m, double p);

enum class Scheme { Binary, Zeckendorf };

// Binary: exponents m with n = sum 2^m. Zeckendorf: indices m >= 2 with n = sum Q_m,
// pairwise gaps >= 2. Both strictly decreasing.
std::vector<int> decompose(long long n, Scheme scheme);
long long block_length(int m, Scheme scheme);

struct BlockDecomposition {
    long long n = 0;
    Scheme scheme = Scheme::Binary;
    std::vector<int> exponents;
    std::vector<long long> lengths;
    std::vector<double> upsilon;      // upsilon_{-1} = x at index 0, upsilon_j at index j+1
    std::vector<double> log_weights;  // log |Psi_{j,n}(x)|
    std::vector<double> log_blocks;   // log Lambda_p(upsilon_{j-1}, length_j)
    std::vector<double> log_block_derivs; // log |(f^{length_j})'(upsilon_{j-1})|
    double log_total = 0.0;
    double log_direct = 0.0;
    double rel_error = 0.0;
};

BlockDecomposition lambda_blocks(const MapSpec& f, double x, long long n, double p, Scheme scheme,
                                 double tol = 1e-9);

enum class Schedule { AllN, PowersOf2, Fibonacci };

struct RatioPoint {
    long long n = 0;
    double lambda2 = 0.0, lambda3 = 0.0, lambda4 = 0.0, lambda_hat = 0.0;
    double ratio_p = 0.0;          // Lambda_p / Lambda_2^{p/2}
    double ratio3 = 0.0, ratio4 = 0.0;
    double weak_noise_factor = 0.0; // Lambda_hat^3 / sqrt(Lambda_2)
};

struct RatioCurve {
    double p = 3.0;
    Schedule schedule = Schedule::PowersOf2;
    std::vector<RatioPoint> points;
    double decreasing_fraction = 0.0;
    double step_factor = 0.0;     // fitted geometric factor per schedule step
    double log2n_slope = 0.0;     // fitted slope of log2 ratio against log2 n
};

RatioCurve lyapunov_ratio_curve(const MapSpec& f, double x, double p, long long n_max, Schedule schedule);

// Least-squares slope of y against t.
double fit_slope(const std::vector<double>& t, const std::vector<double>& y);

struct SandwichReport {
    int cases = 0;
    int rel1_violations = 0;
    int rel2_violations = 0;
    double worst_rel1 = 0.0;  // most negative margin, as a ratio distance
    double worst_rel2 = 0.0;
    double lower_const = 0.0; // c G^{2k-1}, or c lambda^{6k} for the circle
    double upper_const = 0.0;
};

// Period doubling: returns (upsilon_j) against Gamma_m = lambda^m and derivative sandwich with
// G = g(lambda) - eps, c = |h(lambda)| - eps, d = |h(0)| + eps, h(x) = g'(x) / x^{2k-1}.
SandwichReport growth_checks_pd(const EvenSeriesMap& g, double lambda, int cases, unsigned long long seed,
                                double eps = 0.05, long long n_max = 2000);

// Circle: same structure with Fibonacci blocks and the circle growth constants,
// using f_{n_ref} in place of the limiting map. Blocks with index below m_min are skipped.
SandwichReport growth_checks_circle(const FibRenorm& R, int n_ref, int cases, unsigned long long seed,
                                    double eps = 0.05, int m_min = 4, long long n_max = 2000);

const char* scheme_name(Scheme s);
const char* schedule_name(Schedule s);

} // namespace renoise
