#include "renoise/maps.hpp"

#include <algorithm>

namespace renoise {

EvenSeriesMap::EvenSeriesMap(int k_, const AnalyticFn& h_)
    : k(k_), h(h_), dh(differentiate(h_)), d2h(differentiate(dh))
{
}

double EvenSeriesMap::d2f(double x) const
{
    double t = std::pow(x * x, k);
    double xm1 = 2 * k - 1 >= 1 ? std::pow(x, 2 * k - 1) : 1.0;
    double xm2 = 2 * k - 2 >= 1 ? std::pow(x, 2 * k - 2) : 1.0;
    double s = 2.0 * k;
    return d2h.eval_unchecked(t) * s * s * xm1 * xm1 + dh.eval_unchecked(t) * s * (s - 1.0) * xm2;
}

double EvenSeriesMap::dev(double xbar, double u, double sigma) const
{
    double du = sigma * u;
    if (std::abs(du) < 1e-6) {
        return df(xbar) * u + 0.5 * d2f(xbar) * du * u;
    }
    return (f(xbar + du) - f(xbar)) / sigma;
}

double EvenSeriesMap::d2_sup() const
{
    double m = 0.0;
    for (int j = 0; j <= 512; ++j) m = std::max(m, std::abs(d2f(-1.0 + 2.0 * j / 512.0)));
    return m;
}

std::string map_name(const MapSpec& m)
{
    switch (m.index()) {
    case 0: return "affine";
    case 1: return "quadratic";
    case 2: return "circle";
    default: return "even_series";
    }
}

} // namespace renoise
