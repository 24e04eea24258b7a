#include "renoise/lyapunov.hpp"
#include "renoise/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace renoise {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b)
{
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

// p * log|d|, with |d|^0 = 1 even when d = 0.
double pow_log(double p, double ld) { return p == 0.0 ? 0.0 : p * ld; }

// (sign, log) of s e^a + 1.
void add_one(int s, double a, int& out_sign, double& out_log)
{
    if (a == kNegInf) {
        out_sign = 1;
        out_log = 0.0;
        return;
    }
    double v = a > 0.0 ? s + std::exp(-a) : s * std::exp(a) + 1.0;
    double base = a > 0.0 ? a : 0.0;
    out_sign = v < 0.0 ? -1 : 1;
    out_log = v == 0.0 ? kNegInf : base + std::log(std::abs(v));
}

bool is_integer(double p) { return std::abs(p - std::round(p)) < 1e-12; }

template <class M> bool bounded_domain() { return std::is_same_v<M, QuadraticMap> || std::is_same_v<M, EvenSeriesMap>; }

template <class M> double reduce(double x)
{
    if constexpr (std::is_same_v<M, CircleLift>) return x - std::floor(x + 0.5);
    return x;
}

template <class M> void check_domain(double x, long long i)
{
    if (!std::isfinite(x) || (bounded_domain<M>() && std::abs(x) > 1.0 + 1e-9)) {
        std::ostringstream os;
        os << "orbit point " << x << " at step " << i;
        throw Error(ErrorKind::DomainEscape, os.str());
    }
}

// One forward pass; 'each' receives (i, logL_i, logS_i) after step i for i = 1..n.
template <class M, class Each>
LyapunovEval run(const M& f, double x, long long n, double p, Each&& each)
{
    LyapunovEval e;
    e.x = x;
    e.n = n;
    e.p = p;
    e.has_signed = is_integer(p);
    long long q = std::llround(p);
    double logL = kNegInf, logS = 0.0, logHat = 0.0;
    double tlog = kNegInf;
    int tsign = 1;
    double logD = 0.0;
    int dsign = 1;
    double y = reduce<M>(x);
    check_domain<M>(y, 0);
    for (long long i = 0; i < n; ++i) {
        double d = f.df(y);
        double ld = d == 0.0 ? kNegInf : std::log(std::abs(d));
        int sd = d < 0.0 ? -1 : 1;
        logL = log_add(pow_log(p, ld) + logL, 0.0);
        logS = log_add(ld + logS, 0.0);
        logHat = std::max(logHat, logS);
        if (e.has_signed) {
            int s = tsign * ((sd < 0 && (q % 2 != 0)) ? -1 : 1);
            add_one(s, pow_log(p, ld) + tlog, tsign, tlog);
        }
        logD += ld;
        dsign *= sd;
        y = reduce<M>(f.f(y));
        check_domain<M>(y, i + 1);
        each(i + 1, logL, logS);
    }
    e.log_value = logL;
    e.log_hat = logHat;
    e.log_signed = tlog;
    e.signed_sign = tsign;
    e.log_deriv = logD;
    e.deriv_sign = dsign;
    e.end = y;
    return e;
}

} // namespace

double LyapunovEval::value() const { return std::exp(log_value); }
double LyapunovEval::hat() const { return std::exp(log_hat); }
double LyapunovEval::signed_value() const { return signed_sign * std::exp(log_signed); }

LyapunovEval lambda_direct(const MapSpec& f, double x, long long n, double p)
{
    if (n < 0) throw Error(ErrorKind::Config, "negative time");
    return std::visit([&](const auto& m) { return run(m, x, n, p, [](long long, double, double) {}); }, f);
}

std::vector<double> lambda_series(const MapSpec& f, double x, long long n_max, double p)
{
    std::vector<double> out(n_max + 1, kNegInf);
    std::visit([&](const auto& m) { run(m, x, n_max, p, [&](long long i, double l, double) { out[i] = l; }); }, f);
    return out;
}

ChainResidual chain_rule_identity_check(const MapSpec& f, double x, long long n, long long m, double p)
{
    ChainResidual r;
    LyapunovEval whole = lambda_direct(f, x, n + m, p);
    LyapunovEval head = lambda_direct(f, x, n, p);
    LyapunovEval tail = lambda_direct(f, head.end, m, p);
    double rhs = log_add(pow_log(p, tail.log_deriv) + head.log_value, tail.log_value);
    r.unsigned_rel = std::abs(std::expm1(rhs - whole.log_value));
    if (whole.has_signed) {
        long long q = std::llround(p);
        int ws = (tail.deriv_sign < 0 && q % 2 != 0) ? -1 : 1;
        double ref = std::max({whole.log_signed, pow_log(p, tail.log_deriv) + head.log_signed, tail.log_signed});
        auto scaled = [&](int s, double l) { return l == kNegInf ? 0.0 : s * std::exp(l - ref); };
        double lhs = scaled(whole.signed_sign, whole.log_signed);
        double rhs_s = scaled(ws * head.signed_sign, pow_log(p, tail.log_deriv) + head.log_signed)
                       + scaled(tail.signed_sign, tail.log_signed);
        r.signed_rel = std::abs(lhs - rhs_s);
    }
    return r;
}

long long block_length(int m, Scheme scheme)
{
    if (scheme == Scheme::Binary) return 1LL << m;
    long long a = 0, b = 1; // Q_0, Q_1
    for (int i = 0; i < m; ++i) {
        long long c = a + b;
        a = b;
        b = c;
    }
    return a;
}

std::vector<int> decompose(long long n, Scheme scheme)
{
    if (n < 1) throw Error(ErrorKind::Config, "decompose needs n >= 1");
    std::vector<int> out;
    if (scheme == Scheme::Binary) {
        for (int m = 62; m >= 0; --m)
            if (n & (1LL << m)) out.push_back(m);
        return out;
    }
    while (n > 0) {
        int m = 2;
        while (block_length(m + 1, scheme) <= n) ++m;
        out.push_back(m);
        n -= block_length(m, scheme);
    }
    return out;
}

BlockDecomposition lambda_blocks(const MapSpec& f, double x, long long n, double p, Scheme scheme, double tol)
{
    BlockDecomposition b;
    b.n = n;
    b.scheme = scheme;
    b.exponents = decompose(n, scheme);
    b.upsilon.push_back(x);
    double u = x;
    for (int m : b.exponents) {
        long long len = block_length(m, scheme);
        LyapunovEval e = lambda_direct(f, u, len, p);
        b.lengths.push_back(len);
        b.log_blocks.push_back(e.log_value);
        b.log_block_derivs.push_back(e.log_deriv);
        u = e.end;
        b.upsilon.push_back(u);
    }
    size_t r = b.exponents.size();
    b.log_weights.assign(r, 0.0);
    for (size_t j = r - 1; j-- > 0;) b.log_weights[j] = b.log_weights[j + 1] + b.log_block_derivs[j + 1];
    b.log_total = kNegInf;
    for (size_t j = 0; j < r; ++j) b.log_total = log_add(b.log_total, pow_log(p, b.log_weights[j]) + b.log_blocks[j]);
    b.log_direct = lambda_direct(f, x, n, p).log_value;
    b.rel_error = std::abs(std::expm1(b.log_total - b.log_direct));
    if (!(b.rel_error <= tol)) {
        std::ostringstream os;
        os.precision(17);
        os << "blocks " << std::exp(b.log_total) << " vs direct " << std::exp(b.log_direct) << " (n=" << n << ")";
        throw Error(ErrorKind::ReconstructionMismatch, os.str());
    }
    return b;
}

double fit_slope(const std::vector<double>& t, const std::vector<double>& y)
{
    size_t n = t.size();
    if (n < 2 || y.size() != n) return std::numeric_limits<double>::quiet_NaN();
    double mt = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) mt += t[i], my += y[i];
    mt /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxy += (t[i] - mt) * (y[i] - my);
        sxx += (t[i] - mt) * (t[i] - mt);
    }
    return sxy / sxx;
}

RatioCurve lyapunov_ratio_curve(const MapSpec& f, double x, double p, long long n_max, Schedule schedule)
{
    if (!(p > 2.0)) throw Error(ErrorKind::Config, "ratio curve needs p > 2");
    RatioCurve c;
    c.p = p;
    c.schedule = schedule;
    std::vector<double> ps{2.0, 3.0, 4.0, p};
    std::vector<std::vector<double>> logs(ps.size());
    std::vector<double> hat(n_max + 1, 0.0);
    for (size_t k = 0; k < ps.size(); ++k) {
        logs[k].assign(n_max + 1, kNegInf);
        double running = 0.0;
        std::visit([&](const auto& m) {
            run(m, x, n_max, ps[k], [&](long long i, double l, double s) {
                logs[k][i] = l;
                if (k == 0) {
                    running = std::max(running, s);
                    hat[i] = running;
                }
            });
        }, f);
    }
    std::vector<long long> ns;
    if (schedule == Schedule::AllN)
        for (long long n = 1; n <= n_max; ++n) ns.push_back(n);
    else if (schedule == Schedule::PowersOf2)
        for (long long n = 1; n <= n_max; n *= 2) ns.push_back(n);
    else
        for (int m = 2; block_length(m, Scheme::Zeckendorf) <= n_max; ++m) ns.push_back(block_length(m, Scheme::Zeckendorf));
    std::vector<double> idx, lr, l2n;
    for (long long n : ns) {
        RatioPoint pt;
        pt.n = n;
        pt.lambda2 = std::exp(logs[0][n]);
        pt.lambda3 = std::exp(logs[1][n]);
        pt.lambda4 = std::exp(logs[2][n]);
        pt.lambda_hat = std::exp(hat[n]);
        pt.ratio3 = std::exp(logs[1][n] - 1.5 * logs[0][n]);
        pt.ratio4 = std::exp(logs[2][n] - 2.0 * logs[0][n]);
        pt.ratio_p = std::exp(logs[3][n] - 0.5 * p * logs[0][n]);
        pt.weak_noise_factor = std::exp(3.0 * hat[n] - 0.5 * logs[0][n]);
        idx.push_back(static_cast<double>(c.points.size()));
        lr.push_back(std::log(pt.ratio_p));
        l2n.push_back(std::log2(static_cast<double>(n)));
        c.points.push_back(pt);
    }
    int dec = 0;
    for (size_t i = 1; i < c.points.size(); ++i) dec += c.points[i].ratio_p < c.points[i - 1].ratio_p;
    if (c.points.size() > 1) c.decreasing_fraction = static_cast<double>(dec) / (c.points.size() - 1);
    c.step_factor = std::exp(fit_slope(idx, lr));
    std::vector<double> lr2(lr.size());
    for (size_t i = 0; i < lr.size(); ++i) lr2[i] = lr[i] / std::log(2.0);
    c.log2n_slope = fit_slope(l2n, lr2);
    return c;
}

namespace {

void record(double margin, int& violations, double& worst)
{
    if (margin < -1e-12) ++violations;
    worst = std::min(worst, margin);
}

} // namespace

SandwichReport growth_checks_pd(const EvenSeriesMap& g, double lambda, int cases, unsigned long long seed, double eps,
                                long long n_max)
{
    SandwichReport rep;
    const int k = g.k;
    const double al = std::abs(lambda);
    auto h = [&](double x) { return 2.0 * k * g.dh.eval_unchecked(std::pow(x * x, k)); };
    const double G = g.f(lambda) - eps;
    const double c = std::abs(h(lambda)) - eps;
    const double d = std::abs(h(0.0)) + eps;
    rep.lower_const = c * std::pow(G, 2 * k - 1);
    rep.upper_const = d;
    MapSpec f = g;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long long> pick_n(1, n_max);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int cs = 0; cs < cases; ++cs) {
        long long n = pick_n(rng);
        auto ms = decompose(n, Scheme::Binary);
        double x = unit(rng) * std::pow(al, ms[0] + 1);
        double u = x;
        for (size_t j = 0; j < ms.size(); ++j) {
            LyapunovEval e = lambda_direct(f, u, 1LL << ms[j], 1.0);
            double gam = std::pow(al, ms[j]);
            double lu = std::log(std::abs(e.end));
            record(std::min(lu - std::log(G * gam), std::log(gam) - lu), rep.rel1_violations, rep.worst_rel1);
            if (j > 0) {
                double ratio = std::pow(al, (ms[j - 1] - ms[j]) * (2.0 * k - 1.0));
                double lo = std::log(rep.lower_const * ratio), hi = std::log(d * ratio);
                record(std::min(e.log_deriv - lo, hi - e.log_deriv), rep.rel2_violations, rep.worst_rel2);
            }
            u = e.end;
        }
        ++rep.cases;
    }
    return rep;
}

SandwichReport growth_checks_circle(const FibRenorm& R, int n_ref, int cases, unsigned long long seed, double eps,
                                    int m_min, long long n_max)
{
    SandwichReport rep;
    MapSpec F = CircleLift{R.omega};
    const AnalyticFn& eta = R.maps.at(n_ref);
    AnalyticFn deta = differentiate(eta);
    const double lam = R.alphas.at(n_ref);
    const double al = std::abs(lam);
    double s = 1e300, uu = -1e300;
    for (int j = 0; j <= 2000; ++j) {
        double x = -lam * lam + 2.0 * lam * lam * j / 2000.0;
        if (std::abs(x) < 1e-3) continue;
        double v = deta(x) / (x * x);
        s = std::min(s, v);
        uu = std::max(uu, v);
    }
    const double c = s - eps, d = uu + eps;
    const double eta_edge = std::abs(eta(-lam * lam));
    rep.lower_const = c * std::pow(al, 6.0);
    rep.upper_const = d;
    std::vector<double> lamb(40, 0.0);
    for (int m = 1; m < 40; ++m) lamb[m] = fib_iterate(F, 0.0, m);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long long> pick_n(1, n_max);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int cs = 0; cs < cases; ++cs) {
        long long n = pick_n(rng);
        auto ms = decompose(n, Scheme::Zeckendorf);
        if (ms[0] + 2 >= 40) continue;
        double x = unit(rng) * std::abs(lamb[ms[0] + 2]);
        double u = x;
        for (size_t j = 0; j < ms.size(); ++j) {
            LyapunovEval e = lambda_direct(F, u, block_length(ms[j], Scheme::Zeckendorf), 1.0);
            if (ms[j] >= m_min) {
                double ref = std::abs(lamb[ms[j] - 1]);
                double lu = std::log(std::abs(e.end));
                record(std::min(lu - std::log((al * al * al - eps) * ref), std::log((eta_edge + eps) * ref) - lu), rep.rel1_violations,
                       rep.worst_rel1);
                if (j > 0) {
                    double ratio = std::pow(lamb[ms[j - 1] - 1] / lamb[ms[j] - 1], 2.0);
                    double lo = std::log(rep.lower_const * ratio), hi = std::log(d * ratio);
                    record(std::min(e.log_deriv - lo, hi - e.log_deriv), rep.rel2_violations, rep.worst_rel2);
                }
            }
            u = e.end;
        }
        ++rep.cases;
    }
    return rep;
}

const char* scheme_name(Scheme s) { return s == Scheme::Binary ? "binary" : "zeckendorf"; }

const char* schedule_name(Schedule s)
{
    switch (s) {
    case Schedule::AllN: return "all_n";
    case Schedule::PowersOf2: return "powers_of_2";
    case Schedule::Fibonacci: return "fibonacci";
    }
    return "unknown";
}

} // namespace renoise
