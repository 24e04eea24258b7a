#pragma once

#include "renoise/funcspace.hpp"
#include "renoise/maps.hpp"

#include "json.hpp"
#include <vector>

namespace renoise {

/// Unimodal map of order 2k written as f(x) = h(x^{2k}), h on t in [0, 1].
struct UnimodalMap {
    int k = 1;
    AnalyticFn h;
    double pad = 0.0;

    UnimodalMap() = default;
    UnimodalMap(int k_, AnalyticFn h_, double pad_ = 0.0) : k(k_), h(std::move(h_)), pad(pad_) {}

    double lambda() const { return h.eval_unchecked(1.0); }
    double f(double x) const { return h.eval_unchecked(std::pow(x * x, k)); }
    double df(double x) const;
    EvenSeriesMap as_map() const { return EvenSeriesMap(k, h); }

    // h(0) = 1, lambda in (-1, 0), f' < 0 on a grid of (0, 1]; returns a message or "".
    std::string check_invariants() const;

    static UnimodalMap quadratic(double mu);
};

UnimodalMap renormalize(const UnimodalMap& f, int N = 40);
// Pointwise (Tf)(x) without refitting.
double renormalized_value(const UnimodalMap& f, double x);
// sup over [-1, 1] of |Tf - f| on a dense grid.
double fixed_point_residual(const UnimodalMap& f, int samples = 1024);
double sup_distance(const UnimodalMap& a, const UnimodalMap& b, int samples = 1024);

struct NewtonOptions {
    double fd_step = 1e-7;
    int max_halvings = 8;
    int max_iter = 60;
};

UnimodalMap solve_fixed_point(int k, int N, const UnimodalMap& seed, double tol, const NewtonOptions& opt = {});
UnimodalMap default_seed(int k);

struct RenormTrajectory {
    std::vector<UnimodalMap> maps;
    std::vector<double> gammas_product; // index n-1 holds Gamma_n
    std::vector<double> gammas_direct;
    std::vector<double> lambdas;        // lambda of T^j f
    double max_discrepancy = 0.0;
    double lambda_limit = 0.0;
    double rate = 0.0;
};

RenormTrajectory gamma_sequence(const UnimodalMap& f, int n_max, int N = 40, bool cross_check = true);

struct FeigenbaumConstants {
    double lambda = 0.0;
    double gprime_at_1 = 0.0;
    double b_f = 0.0;
    double identity_residual = 0.0; // |g'(1) lambda^{2k-1} - 1|
    double fixed_point_residual = 0.0;
};

FeigenbaumConstants feigenbaum_constants(const UnimodalMap& g);

struct SuperstableData {
    std::vector<double> mu;     // mu_n with period 2^n, n = 1..n_max
    std::vector<double> d;      // f^{2^{n-1}}(0) at mu_n
    double mu_inf = 0.0;
    double alpha = 0.0;         // scaling constant, lambda = -1/alpha
};

// Superstable parameters of 1 - mu x^2 by Newton on f^{2^n}(0) = 0, extrapolated with Aitken.
SuperstableData superstable_accumulation(int n_max = 13);

nlohmann::json to_json(const UnimodalMap& g, double residual);

} // namespace renoise
