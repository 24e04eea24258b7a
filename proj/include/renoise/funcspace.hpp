#pragma once

#include <functional>
#include <vector>

namespace renoise {

struct Interval {
    double lo = -1.0;
    double hi = 1.0;

    Interval() = default;
    Interval(double lo_, double hi_);

    double mid() const { return 0.5 * (lo + hi); }
    double half() const { return 0.5 * (hi - lo); }
    bool contains(double x, double margin = 0.0) const { return x >= lo - margin && x <= hi + margin; }
    double to_ref(double x) const { return (x - mid()) / half(); }
    double from_ref(double t) const { return mid() + half() * t; }
};

inline constexpr double kTailTol = 1e-10;
inline constexpr double kDomainSlack = 1e-12;
inline constexpr double kRangeMargin = 1e-10;

// Chebyshev points of the first kind, x_j = cos(pi (j + 1/2) / (N + 1)), mapped to dom.
std::vector<double> cheb_nodes(const Interval& dom, int N);

/// Truncated Chebyshev series sum_k c_k T_k(t), t the affine image of x in [-1, 1].
class AnalyticFn {
public:
    AnalyticFn() = default;
    AnalyticFn(Interval dom, std::vector<double> coeffs);

    const Interval& domain() const { return dom_; }
    const std::vector<double>& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }

    // Throws DomainEscape outside the domain by more than kDomainSlack.
    double operator()(double x) const;
    // Clenshaw without the domain check, for solver internals that may step slightly outside.
    double eval_unchecked(double x) const;

    // True when the last 10% of coefficients exceed kTailTol in magnitude.
    bool degraded_decay(double tol = kTailTol) const;
    double tail_magnitude() const;

private:
    Interval dom_;
    std::vector<double> c_;
};

AnalyticFn fit(const std::function<double(double)>& sampler, const Interval& dom, int N);
// Same as fit, from values already sampled at cheb_nodes(dom, N).
AnalyticFn fit_values(const std::vector<double>& values, const Interval& dom);

double eval(const AnalyticFn& f, double x);
AnalyticFn differentiate(const AnalyticFn& f);
AnalyticFn compose(const AnalyticFn& outer, const AnalyticFn& inner, const Interval& out_domain, int N);
double sup_norm(const AnalyticFn& f, int samples = 256);

// Chebyshev T_0..T_N at reference point t in [-1, 1].
void cheb_basis(double t, int N, double* out);

} // namespace renoise
