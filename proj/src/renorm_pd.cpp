#include "renoise/renorm_pd.hpp"
#include "renoise/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace renoise {

namespace {

const Interval kUnit(0.0, 1.0);

double ipow2k(double y, int k) { return std::pow(y * y, k); }

// H(t) = h(h(lambda^{2k} t)^{2k}) / lambda, with lambda = h(1).
double renorm_h(const AnalyticFn& h, int k, double lambda, double t)
{
    double inner = h.eval_unchecked(ipow2k(lambda, k) * t);
    return h.eval_unchecked(ipow2k(inner, k)) / lambda;
}

} // namespace

double UnimodalMap::df(double x) const
{
    AnalyticFn dh = differentiate(h);
    return dh.eval_unchecked(std::pow(x * x, k)) * 2.0 * k * std::pow(x, 2 * k - 1);
}

UnimodalMap UnimodalMap::quadratic(double mu)
{
    return UnimodalMap(1, AnalyticFn(kUnit, {1.0 - 0.5 * mu, -0.5 * mu}), 0.1);
}

std::string UnimodalMap::check_invariants() const
{
    std::ostringstream os;
    if (std::abs(h.eval_unchecked(0.0) - 1.0) > 1e-10) os << "h(0)=" << h.eval_unchecked(0.0) << "; ";
    double lam = lambda();
    if (!(lam > -1.0 && lam < 0.0)) os << "lambda=" << lam << " not in (-1,0); ";
    AnalyticFn dh = differentiate(h);
    for (int j = 1; j <= 200; ++j) {
        double x = j / 200.0;
        double d = dh.eval_unchecked(std::pow(x * x, k)) * 2.0 * k * std::pow(x, 2 * k - 1);
        if (!(d < 0.0)) {
            os << "f'(" << x << ")=" << d << " not negative; ";
            break;
        }
    }
    return os.str();
}

UnimodalMap renormalize(const UnimodalMap& f, int N)
{
    double lam = f.lambda();
    double b = f.f(lam);
    double fb = f.f(b);
    if (!(0.0 < std::abs(lam) && std::abs(lam) < b)) {
        std::ostringstream os;
        os << "0<|lambda|<b fails: lambda=" << lam << " b=" << b;
        throw Error(ErrorKind::NotRenormalizable, os.str());
    }
    if (!(0.0 < fb && fb < std::abs(lam))) {
        std::ostringstream os;
        os << "0<f(b)<|lambda| fails: f(b)=" << fb << " lambda=" << lam;
        throw Error(ErrorKind::NotRenormalizable, os.str());
    }
    const AnalyticFn& h = f.h;
    int k = f.k;
    AnalyticFn H = fit([&](double t) { return renorm_h(h, k, lam, t); }, kUnit, N);
    return UnimodalMap(k, H, f.pad);
}

double renormalized_value(const UnimodalMap& f, double x)
{
    double lam = f.lambda();
    return f.f(f.f(lam * x)) / lam;
}

double fixed_point_residual(const UnimodalMap& f, int samples)
{
    double m = 0.0;
    for (int j = 0; j <= samples; ++j) {
        double x = -1.0 + 2.0 * j / samples;
        m = std::max(m, std::abs(renormalized_value(f, x) - f.f(x)));
    }
    return m;
}

double sup_distance(const UnimodalMap& a, const UnimodalMap& b, int samples)
{
    double m = 0.0;
    for (int j = 0; j <= samples; ++j) {
        double x = -1.0 + 2.0 * j / samples;
        m = std::max(m, std::abs(a.f(x) - b.f(x)));
    }
    return m;
}

UnimodalMap default_seed(int k)
{
    double slope = k == 1 ? 1.5 : 1.4;
    return UnimodalMap(k, AnalyticFn(kUnit, {1.0 - 0.5 * slope, -0.5 * slope}));
}

namespace {

// Residual rows: H - h at the N+1 nodes, then h(0) - 1.
Eigen::VectorXd newton_residual(const Eigen::VectorXd& c, int k, const std::vector<double>& nodes)
{
    AnalyticFn h(kUnit, std::vector<double>(c.data(), c.data() + c.size()));
    double lam = h.eval_unchecked(1.0);
    int n = static_cast<int>(nodes.size());
    Eigen::VectorXd r(n + 1);
    for (int j = 0; j < n; ++j) r[j] = renorm_h(h, k, lam, nodes[j]) - h.eval_unchecked(nodes[j]);
    r[n] = h.eval_unchecked(0.0) - 1.0;
    return r;
}

std::vector<double> resample(const AnalyticFn& h, int N)
{
    std::vector<double> c(N + 1, 0.0);
    for (int i = 0; i <= std::min(N, h.degree()); ++i) c[i] = h.coeffs()[i];
    return c;
}

UnimodalMap newton_at(int k, int N, const AnalyticFn& start, double tol, const NewtonOptions& opt)
{
    auto nodes = cheb_nodes(kUnit, N);
    std::vector<double> c0 = resample(start, N);
    Eigen::VectorXd c = Eigen::Map<Eigen::VectorXd>(c0.data(), N + 1);
    Eigen::VectorXd r = newton_residual(c, k, nodes);
    double rn = r.lpNorm<Eigen::Infinity>();
    int growth = 0;
    for (int it = 0; it < opt.max_iter && rn > 0.05 * tol; ++it) {
        Eigen::MatrixXd J(r.size(), N + 1);
        for (int i = 0; i <= N; ++i) {
            Eigen::VectorXd cp = c;
            cp[i] += opt.fd_step;
            J.col(i) = (newton_residual(cp, k, nodes) - r) / opt.fd_step;
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(J);
        if (qr.rank() < N + 1) throw Error(ErrorKind::SingularJacobian, "rank " + std::to_string(qr.rank()));
        Eigen::VectorXd step = qr.solve(r);
        double t = 1.0;
        bool accepted = false;
        for (int hv = 0; hv <= opt.max_halvings; ++hv, t *= 0.5) {
            Eigen::VectorXd trial = c - t * step;
            Eigen::VectorXd rt = newton_residual(trial, k, nodes);
            double tn = rt.lpNorm<Eigen::Infinity>();
            double lam_t = AnalyticFn(kUnit, std::vector<double>(trial.data(), trial.data() + trial.size())).eval_unchecked(1.0);
            if (std::isfinite(tn) && tn < rn && lam_t > -1.0 && lam_t < 0.0) {
                c = trial;
                r = rt;
                rn = tn;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (++growth >= 5) break;
        } else {
            growth = 0;
        }
        if (!accepted && rn < tol) break;
    }
    if (!std::isfinite(rn) || rn > 1e3) throw Error(ErrorKind::NewtonDiverged, "residual " + std::to_string(rn));
    return UnimodalMap(k, AnalyticFn(kUnit, std::vector<double>(c.data(), c.data() + c.size())));
}

} // namespace

UnimodalMap solve_fixed_point(int k, int N, const UnimodalMap& seed, double tol, const NewtonOptions& opt)
{
    if (k < 1) throw Error(ErrorKind::Config, "k must be >= 1");
    std::vector<int> ladder;
    for (int n : {20, 30, 40})
        if (n < N) ladder.push_back(n);
    ladder.push_back(N);
    AnalyticFn cur = seed.h;
    UnimodalMap g;
    for (int n : ladder) {
        g = newton_at(k, n, cur, tol, opt);
        cur = g.h;
    }
    double res = fixed_point_residual(g);
    if (!(res < tol)) {
        std::ostringstream os;
        os << "residual " << res << " above tolerance " << tol << " at N=" << N;
        throw Error(ErrorKind::NewtonDiverged, os.str());
    }
    return g;
}

RenormTrajectory gamma_sequence(const UnimodalMap& f, int n_max, int N, bool cross_check)
{
    if (n_max > 20) throw Error(ErrorKind::Config, "n_max must be <= 20");
    RenormTrajectory tr;
    tr.maps.push_back(f);
    for (int j = 1; j < n_max; ++j) tr.maps.push_back(renormalize(tr.maps.back(), N));
    double prod = 1.0;
    for (int j = 0; j < n_max; ++j) {
        double lam = tr.maps[j].lambda();
        tr.lambdas.push_back(lam);
        prod *= lam;
        tr.gammas_product.push_back(prod);
    }
    double x = 0.0;
    long long steps = 0;
    for (int n = 1; n <= n_max; ++n) {
        long long target = 1LL << n;
        for (; steps < target; ++steps) x = f.f(x);
        tr.gammas_direct.push_back(x);
        double rel = std::abs(x - tr.gammas_product[n - 1]) / std::abs(tr.gammas_product[n - 1]);
        tr.max_discrepancy = std::max(tr.max_discrepancy, rel);
    }
    if (cross_check && tr.max_discrepancy > 1e-6) {
        std::ostringstream os;
        os << "direct vs product Gamma_n relative discrepancy " << tr.max_discrepancy;
        throw Error(ErrorKind::CrossCheckFailed, os.str());
    }
    tr.lambda_limit = tr.lambdas.back();
    // Geometric rate of |lambda_{T^j f} - lambda_limit| from a log-linear fit over the middle of the run.
    std::vector<double> xs, ys;
    for (int j = 0; j + 1 < n_max; ++j) {
        double e = std::abs(tr.lambdas[j] - tr.lambda_limit);
        if (e > 1e-13) {
            xs.push_back(j);
            ys.push_back(std::log(e));
        }
    }
    if (xs.size() >= 2) {
        double mx = 0, my = 0;
        for (size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
        mx /= xs.size();
        my /= xs.size();
        double sxy = 0, sxx = 0;
        for (size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
        tr.rate = std::exp(sxy / sxx);
    }
    return tr;
}

FeigenbaumConstants feigenbaum_constants(const UnimodalMap& g)
{
    FeigenbaumConstants c;
    c.lambda = g.lambda();
    c.gprime_at_1 = g.df(1.0);
    c.b_f = g.f(c.lambda);
    c.identity_residual = std::abs(c.gprime_at_1 * std::pow(c.lambda, 2 * g.k - 1) - 1.0);
    c.fixed_point_residual = fixed_point_residual(g);
    return c;
}

SuperstableData superstable_accumulation(int n_max)
{
    using ld = long double;
    SuperstableData s;
    auto orbit = [](ld mu, long long n, ld* dval) {
        ld x = 0.0L, dx = 0.0L;
        for (long long i = 0; i < n; ++i) {
            ld nx = 1.0L - mu * x * x;
            dx = -x * x - 2.0L * mu * x * dx;
            x = nx;
        }
        if (dval) *dval = dx;
        return x;
    };
    std::vector<ld> mu = {1.0L, 1.3107026413368328L};
    for (int n = 3; n <= n_max; ++n) {
        ld m1 = mu[n - 2], m2 = mu[n - 3];
        ld m = m1 + (m1 - m2) / 4.669201609102991L;
        long long len = 1LL << n;
        for (int it = 0; it < 80; ++it) {
            ld d;
            ld v = orbit(m, len, &d);
            ld step = v / d;
            m -= step;
            if (std::abs(step) < 1e-19L) break;
        }
        mu.push_back(m);
    }
    std::vector<ld> d;
    for (size_t i = 0; i < mu.size(); ++i) d.push_back(orbit(mu[i], 1LL << i, nullptr));
    auto aitken = [](ld a, ld b, ld c) {
        ld den = (c - b) - (b - a);
        return den == 0.0L ? c : c - (c - b) * (c - b) / den;
    };
    size_t m = mu.size();
    s.mu_inf = static_cast<double>(aitken(mu[m - 3], mu[m - 2], mu[m - 1]));
    std::vector<ld> al;
    for (size_t i = 0; i + 1 < d.size(); ++i) al.push_back(-d[i] / d[i + 1]);
    size_t q = al.size();
    s.alpha = static_cast<double>(aitken(al[q - 3], al[q - 2], al[q - 1]));
    for (auto v : mu) s.mu.push_back(static_cast<double>(v));
    for (auto v : d) s.d.push_back(static_cast<double>(v));
    return s;
}

nlohmann::json to_json(const UnimodalMap& g, double residual)
{
    nlohmann::json j;
    j["k"] = g.k;
    j["N"] = g.h.degree();
    j["domain"] = {g.h.domain().lo, g.h.domain().hi};
    j["coeffs"] = g.h.coeffs();
    j["lambda"] = g.lambda();
    j["residual"] = residual;
    return j;
}

} // namespace renoise
