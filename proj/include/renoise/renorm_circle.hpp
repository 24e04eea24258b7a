#pragma once

#include "renoise/funcspace.hpp"
#include "renoise/maps.hpp"

#include "json.hpp"
#include <vector>

namespace renoise {

// Fibonacci numbers with Q_0 = 0, Q_1 = Q_2 = 1; element n holds Q_n.
std::vector<long long> fibonacci(int n_max);

inline const double kGolden = 0.6180339887498949; // (sqrt 5 - 1) / 2

struct RotationEstimate {
    double value = 0.0;
    double error = 0.0;
    long long iters = 0;
};

// Iterate the lift from x0 with the integer part carried separately.
// Returns F^n(x0) as integer part plus fraction.
struct LiftPoint {
    long long whole = 0;
    double frac = 0.0;
    double value() const { return static_cast<double>(whole) + frac; }
};

LiftPoint iterate_lift(const MapSpec& F, double x0, long long n);
// F^{Q_n}(x) - Q_{n-1}, evaluated with exact integer bookkeeping.
double fib_iterate(const MapSpec& F, double x, int n);

RotationEstimate rotation_number(const MapSpec& F, long long iters, double x0 = 0.0);
// Rotation number bracketed by the Fibonacci convergents Q_{n-1}/Q_n, n <= depth,
// after checking the alternating order condition; error is the final bracket width.
RotationEstimate rotation_number_convergents(const MapSpec& F, int depth);

enum class CircleFamily { Rigid, Critical };

MapSpec circle_member(CircleFamily fam, double omega);

struct TunedMap {
    double omega = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int depth = 0;
    std::vector<double> roots; // Omega_n with F^{Q_n}(0) = Q_{n-1}
};

TunedMap tune_to_golden(CircleFamily fam, int depth = 32, double width = 1e-12);

struct FibRenorm {
    double omega = 0.0;
    int n_max = 0;
    double B = 1.6;
    std::vector<long long> Q;
    std::vector<double> lambdas; // lambdas[n] = f_(n)(0), n >= 1
    std::vector<double> alphas;  // alphas[n] = lambda_n / lambda_{n-1}, n >= 2
    std::vector<AnalyticFn> maps; // maps[n] = f_n on [-B, B], n >= 2
};

FibRenorm fib_renormalize(const CircleLift& F, int n_max, double B = 1.6, int N = 64);

struct CircleIdentities {
    int n = 0;
    double eta1 = 0.0;       // f_n(1) - a^2
    double eta_l2 = 0.0;     // f_n(a^2) - a^3
    double deta1 = 0.0;      // f_n'(1) a^4 - 1
    double deta_l2 = 0.0;    // f_n'(a^2) a^2 - 1
};

CircleIdentities circle_fixed_identities(const FibRenorm& R, int n);

nlohmann::json to_json(const FibRenorm& R, const std::vector<CircleIdentities>& ids);

} // namespace renoise
