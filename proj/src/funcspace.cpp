#include "renoise/funcspace.hpp"
#include "renoise/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace renoise {

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_)
{
    if (!(std::isfinite(lo) && std::isfinite(hi)) || !(lo < hi)) {
        std::ostringstream os;
        os << "invalid interval [" << lo << ", " << hi << "]";
        throw Error(ErrorKind::Config, os.str());
    }
}

std::vector<double> cheb_nodes(const Interval& dom, int N)
{
    std::vector<double> x(N + 1);
    for (int j = 0; j <= N; ++j)
        x[j] = dom.from_ref(std::cos(std::numbers::pi * (j + 0.5) / (N + 1)));
    return x;
}

void cheb_basis(double t, int N, double* out)
{
    out[0] = 1.0;
    if (N >= 1) out[1] = t;
    for (int k = 2; k <= N; ++k)
        out[k] = 2.0 * t * out[k - 1] - out[k - 2];
}

AnalyticFn::AnalyticFn(Interval dom, std::vector<double> coeffs) : dom_(dom), c_(std::move(coeffs))
{
    if (c_.empty()) c_.push_back(0.0);
}

double AnalyticFn::eval_unchecked(double x) const
{
    double t = dom_.to_ref(x);
    double b1 = 0.0, b2 = 0.0;
    for (int k = degree(); k >= 1; --k) {
        double b0 = 2.0 * t * b1 - b2 + c_[k];
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + c_[0];
}

double AnalyticFn::operator()(double x) const
{
    if (!dom_.contains(x, kDomainSlack)) {
        std::ostringstream os;
        os.precision(17);
        os << "x=" << x << " outside [" << dom_.lo << ", " << dom_.hi << "]";
        throw Error(ErrorKind::DomainEscape, os.str());
    }
    if (x < dom_.lo) x = dom_.lo;
    if (x > dom_.hi) x = dom_.hi;
    return eval_unchecked(x);
}

bool AnalyticFn::degraded_decay(double tol) const
{
    return tail_magnitude() > tol;
}

double AnalyticFn::tail_magnitude() const
{
    int n = static_cast<int>(c_.size());
    int start = n - std::max(1, n / 10);
    double m = 0.0;
    for (int k = start; k < n; ++k) m = std::max(m, std::abs(c_[k]));
    return m;
}

AnalyticFn fit_values(const std::vector<double>& values, const Interval& dom)
{
    int N = static_cast<int>(values.size()) - 1;
    for (int j = 0; j <= N; ++j) {
        if (!std::isfinite(values[j])) {
            std::ostringstream os;
            os << "node " << j << " value " << values[j];
            throw Error(ErrorKind::NonFiniteSample, os.str());
        }
    }
    std::vector<double> c(N + 1, 0.0);
    for (int k = 0; k <= N; ++k) {
        double s = 0.0;
        for (int j = 0; j <= N; ++j)
            s += values[j] * std::cos(std::numbers::pi * k * (j + 0.5) / (N + 1));
        c[k] = s * (k == 0 ? 1.0 : 2.0) / (N + 1);
    }
    return AnalyticFn(dom, std::move(c));
}

AnalyticFn fit(const std::function<double(double)>& sampler, const Interval& dom, int N)
{
    if (N < 1) throw Error(ErrorKind::Config, "fit degree must be >= 1");
    auto x = cheb_nodes(dom, N);
    std::vector<double> v(N + 1);
    for (int j = 0; j <= N; ++j) v[j] = sampler(x[j]);
    return fit_values(v, dom);
}

double eval(const AnalyticFn& f, double x) { return f(x); }

AnalyticFn differentiate(const AnalyticFn& f)
{
    const auto& c = f.coeffs();
    int N = f.degree();
    if (N == 0) return AnalyticFn(f.domain(), {0.0});
    std::vector<double> d(N + 2, 0.0);
    for (int k = N - 1; k >= 0; --k)
        d[k] = d[k + 2] + 2.0 * (k + 1) * c[k + 1];
    d[0] *= 0.5;
    d.resize(N);
    double scale = 1.0 / f.domain().half();
    for (auto& v : d) v *= scale;
    return AnalyticFn(f.domain(), std::move(d));
}

AnalyticFn compose(const AnalyticFn& outer, const AnalyticFn& inner, const Interval& out_domain, int N)
{
    auto x = cheb_nodes(out_domain, N);
    std::vector<double> v(N + 1);
    for (int j = 0; j <= N; ++j) {
        double y = inner(x[j]);
        if (!outer.domain().contains(y, kRangeMargin)) {
            std::ostringstream os;
            os.precision(17);
            os << "node x=" << x[j] << " maps to " << y << " outside outer domain ["
               << outer.domain().lo << ", " << outer.domain().hi << "]";
            throw Error(ErrorKind::RangeEscape, os.str());
        }
        v[j] = outer.eval_unchecked(std::clamp(y, outer.domain().lo, outer.domain().hi));
    }
    return fit_values(v, out_domain);
}

double sup_norm(const AnalyticFn& f, int samples)
{
    if (samples < 64) samples = 64;
    double m = 0.0;
    AnalyticFn df = differentiate(f);
    // Chebyshev extreme points include the endpoints, where |T_k| attains its max.
    double x_prev = 0.0, d_prev = 0.0;
    for (int j = 0; j < samples; ++j) {
        double x = f.domain().from_ref(std::cos(std::numbers::pi * j / (samples - 1)));
        m = std::max(m, std::abs(f.eval_unchecked(x)));
        double d = df.eval_unchecked(x);
        if (j > 0 && (d > 0.0) != (d_prev > 0.0)) {
            // Interior extremum between two samples: bisect on the sign of f'.
            double a = x_prev, b = x, da = d_prev;
            for (int it = 0; it < 60; ++it) {
                double c = 0.5 * (a + b);
                double dc = df.eval_unchecked(c);
                if ((dc > 0.0) == (da > 0.0)) a = c, da = dc;
                else b = c;
            }
            m = std::max(m, std::abs(f.eval_unchecked(0.5 * (a + b))));
        }
        x_prev = x;
        d_prev = d;
    }
    const auto& c = f.coeffs();
    double tail = 0.0;
    for (int k = f.degree(); k >= 1 && std::abs(c[k]) < kTailTol; --k) tail += std::abs(c[k]);
    return m + tail;
}

} // namespace renoise
