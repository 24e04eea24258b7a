#include "renoise/renorm_circle.hpp"
#include "renoise/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace renoise {

std::vector<long long> fibonacci(int n_max)
{
    std::vector<long long> q = {0, 1, 1};
    while (static_cast<int>(q.size()) <= n_max) q.push_back(q[q.size() - 1] + q[q.size() - 2]);
    q.resize(std::max(n_max + 1, 3));
    return q;
}

namespace {

template <class M>
LiftPoint iterate_impl(const M& F, double x0, long long n)
{
    LiftPoint p;
    double fl = std::floor(x0);
    p.whole = static_cast<long long>(fl);
    p.frac = x0 - fl;
    for (long long i = 0; i < n; ++i) {
        double y = F.f(p.frac);
        double w = std::floor(y);
        p.whole += static_cast<long long>(w);
        p.frac = y - w;
    }
    return p;
}

} // namespace

LiftPoint iterate_lift(const MapSpec& F, double x0, long long n)
{
    return std::visit([&](const auto& m) { return iterate_impl(m, x0, n); }, F);
}

double fib_iterate(const MapSpec& F, double x, int n)
{
    auto Q = fibonacci(n);
    LiftPoint p = iterate_lift(F, x, Q[n]);
    return static_cast<double>(p.whole - Q[n - 1]) + p.frac;
}

RotationEstimate rotation_number(const MapSpec& F, long long iters, double x0)
{
    if (iters < 1000) throw Error(ErrorKind::Config, "rotation_number needs at least 1000 iterations");
    auto Q = fibonacci(90);
    std::vector<double> est;
    LiftPoint p;
    double fl = std::floor(x0);
    p.whole = static_cast<long long>(fl);
    p.frac = x0 - fl;
    long long done = 0;
    for (size_t n = 2; n < Q.size() && Q[n] <= iters; ++n) {
        long long todo = Q[n] - done;
        std::visit(
            [&](const auto& m) {
                for (long long i = 0; i < todo; ++i) {
                    if (m.df(p.frac) < 0.0) {
                        std::ostringstream os;
                        os << "negative derivative at x=" << p.frac;
                        throw Error(ErrorKind::NonMonotone, os.str());
                    }
                    double y = m.f(p.frac);
                    double w = std::floor(y);
                    p.whole += static_cast<long long>(w);
                    p.frac = y - w;
                }
            },
            F);
        done = Q[n];
        est.push_back((static_cast<double>(p.whole) + (p.frac - x0)) / static_cast<double>(done));
    }
    RotationEstimate r;
    r.iters = done;
    size_t m = est.size();
    if (m >= 2) {
        r.value = 0.5 * (est[m - 1] + est[m - 2]);
        r.error = 0.5 * std::abs(est[m - 1] - est[m - 2]);
    } else {
        r.value = est.back();
        r.error = 1.0 / static_cast<double>(done);
    }
    return r;
}

RotationEstimate rotation_number_convergents(const MapSpec& F, int depth)
{
    auto Q = fibonacci(depth);
    for (int n = 2; n <= depth; ++n) {
        double v = fib_iterate(F, 0.0, n);
        double sgn = (n % 2 == 1) ? 1.0 : -1.0;
        if (!(sgn * v > 0.0)) {
            std::ostringstream os;
            os << "order condition fails at n=" << n << ": f_(n)(0)=" << v;
            throw Error(ErrorKind::BracketLost, os.str());
        }
    }
    double a = static_cast<double>(Q[depth - 1]) / static_cast<double>(Q[depth]);
    double b = static_cast<double>(Q[depth - 2]) / static_cast<double>(Q[depth - 1]);
    RotationEstimate r;
    r.value = 0.5 * (a + b);
    r.error = 0.5 * std::abs(a - b);
    r.iters = Q[depth];
    return r;
}

MapSpec circle_member(CircleFamily fam, double omega)
{
    if (fam == CircleFamily::Rigid) return AffineMap{1.0, omega};
    return CircleLift{omega};
}

TunedMap tune_to_golden(CircleFamily fam, int depth, double width)
{
    TunedMap t;
    double lo = 0.55, hi = 0.65;
    auto g = [&](double om, int n) { return fib_iterate(circle_member(fam, om), 0.0, n); };
    for (int n = 5; n <= depth; ++n) {
        double glo = g(lo, n), ghi = g(hi, n);
        if (!(glo < 0.0 && ghi > 0.0)) {
            std::ostringstream os;
            os << "no sign change at n=" << n << " on [" << lo << ", " << hi << "]";
            throw Error(ErrorKind::BracketLost, os.str());
        }
        double a = lo, b = hi;
        for (int it = 0; it < 200 && b - a > 1e-16 * std::max(1.0, std::abs(a)); ++it) {
            double m = 0.5 * (a + b);
            if (m <= a || m >= b) break;
            if (g(m, n) < 0.0) a = m;
            else b = m;
        }
        t.roots.push_back(0.5 * (a + b));
        t.depth = n;
        size_t r = t.roots.size();
        if (r >= 2) {
            double x = t.roots[r - 1], y = t.roots[r - 2];
            double d = std::abs(x - y);
            t.lo = std::min(x, y);
            t.hi = std::max(x, y);
            if (d <= width) break;
            lo = std::min(x, y) - 2.0 * d;
            hi = std::max(x, y) + 2.0 * d;
        }
    }
    size_t r = t.roots.size();
    t.omega = t.roots.back();
    if (r >= 3) {
        double a = t.roots[r - 3], b = t.roots[r - 2], c = t.roots[r - 1];
        double den = (c - b) - (b - a);
        if (den != 0.0) {
            double acc = c - (c - b) * (c - b) / den;
            if (acc >= t.lo && acc <= t.hi) t.omega = acc;
        }
    }
    if (t.hi - t.lo > width && t.depth >= depth) {
        std::ostringstream os;
        os << "bracket width " << t.hi - t.lo << " above " << width << " at depth " << depth;
        throw Error(ErrorKind::BracketLost, os.str());
    }
    return t;
}

FibRenorm fib_renormalize(const CircleLift& F, int n_max, double B, int N)
{
    FibRenorm R;
    R.omega = F.omega;
    R.n_max = n_max;
    R.B = B;
    R.Q = fibonacci(n_max + 1);
    R.lambdas.assign(n_max + 2, 0.0);
    R.alphas.assign(n_max + 2, 0.0);
    R.maps.resize(n_max + 1);
    MapSpec spec = F;
    for (int n = 1; n <= n_max + 1; ++n) R.lambdas[n] = fib_iterate(spec, 0.0, n);
    for (int n = 2; n <= n_max + 1; ++n) R.alphas[n] = R.lambdas[n] / R.lambdas[n - 1];
    for (int n = 2; n <= n_max; ++n) {
        double s = R.lambdas[n - 1];
        R.maps[n] = fit([&](double y) { return fib_iterate(spec, s * y, n) / s; }, Interval(-B, B), N);
    }
    return R;
}

CircleIdentities circle_fixed_identities(const FibRenorm& R, int n)
{
    CircleIdentities c;
    c.n = n;
    const AnalyticFn& f = R.maps.at(n);
    AnalyticFn df = differentiate(f);
    double a = R.alphas.at(n);
    c.eta1 = f(1.0) - a * a;
    c.eta_l2 = f(a * a) - a * a * a;
    c.deta1 = df(1.0) * std::pow(a, 4) - 1.0;
    c.deta_l2 = df(a * a) * a * a - 1.0;
    return c;
}

nlohmann::json to_json(const FibRenorm& R, const std::vector<CircleIdentities>& ids)
{
    nlohmann::json j;
    j["Omega"] = R.omega;
    j["lambdas"] = std::vector<double>(R.lambdas.begin() + 1, R.lambdas.end());
    j["alphas"] = std::vector<double>(R.alphas.begin() + 2, R.alphas.end());
    nlohmann::json res = nlohmann::json::array();
    for (const auto& c : ids)
        res.push_back({{"n", c.n}, {"eta_1", c.eta1}, {"eta_lambda2", c.eta_l2}, {"deta_1", c.deta1}, {"deta_lambda2", c.deta_l2}});
    j["identity_residuals"] = res;
    return j;
}

} // namespace renoise
