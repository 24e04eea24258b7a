#pragma once

#include "renoise/funcspace.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <variant>

namespace renoise {

// x -> a x + c. Covers the rigid rotation (a = 1) and the doubling example (a = 2, c = 0).
struct AffineMap {
    double a = 1.0;
    double c = 0.0;
    double f(double x) const { return a * x + c; }
    double df(double) const { return a; }
    double d2f(double) const { return 0.0; }
    double dev(double, double u, double) const { return a * u; }
    double d2_sup() const { return 0.0; }
};

// x -> 1 - mu x^2 on [-1, 1].
struct QuadraticMap {
    double mu = 1.401155189092051;
    double f(double x) const { return 1.0 - mu * x * x; }
    double df(double x) const { return -2.0 * mu * x; }
    double d2f(double) const { return -2.0 * mu; }
    double dev(double xbar, double u, double sigma) const { return -mu * (2.0 * xbar * u + sigma * u * u); }
    double d2_sup() const { return 2.0 * mu; }
};

// Lift x -> x + Omega - sin(2 pi x) / (2 pi), cubic critical point at 0.
struct CircleLift {
    double omega = 0.0;
    double f(double x) const { return x + omega - std::sin(2.0 * std::numbers::pi * x) / (2.0 * std::numbers::pi); }
    double df(double x) const { return 1.0 - std::cos(2.0 * std::numbers::pi * x); }
    double d2f(double x) const { return 2.0 * std::numbers::pi * std::sin(2.0 * std::numbers::pi * x); }
    double dev(double xbar, double u, double sigma) const
    {
        if (sigma == 0.0) return df(xbar) * u;
        const double pi = std::numbers::pi;
        return u - std::cos(2.0 * pi * xbar + pi * sigma * u) * std::sin(pi * sigma * u) / (pi * sigma);
    }
    double d2_sup() const { return 2.0 * std::numbers::pi; }
};

// Even map f(x) = h(x^{2k}) with h a Chebyshev series on [0, 1].
struct EvenSeriesMap {
    int k = 1;
    AnalyticFn h, dh, d2h;

    EvenSeriesMap() = default;
    EvenSeriesMap(int k_, const AnalyticFn& h_);

    double f(double x) const { return h.eval_unchecked(std::pow(x * x, k)); }
    double df(double x) const
    {
        double t = std::pow(x * x, k);
        return dh.eval_unchecked(t) * 2.0 * k * std::pow(x, 2 * k - 1);
    }
    double d2f(double x) const;
    double dev(double xbar, double u, double sigma) const;
    double d2_sup() const;
};

using MapSpec = std::variant<AffineMap, QuadraticMap, CircleLift, EvenSeriesMap>;

std::string map_name(const MapSpec& m);

} // namespace renoise
