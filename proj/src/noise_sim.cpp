#include "renoise/noise_sim.hpp"
#include "renoise/error.hpp"
#include "renoise/lyapunov.hpp"
#include "renoise/parallel.hpp"
#include "renoise/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace renoise {

namespace {

double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double truncated_abs_moment(double s, double b)
{
    const int steps = 4000;
    double h = b / steps, acc = 0.0;
    for (int i = 0; i <= steps; ++i) {
        double z = i * h;
        double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * std::pow(z, s) * phi(z);
    }
    return 2.0 * acc * h / 3.0 / (2.0 * std_normal_cdf(b) - 1.0);
}

} // namespace

double NoiseModel::moment(int s) const
{
    if (s < 1 || s > 8) throw Error(ErrorKind::Config, "moment order out of range");
    return std::pow(norm_p(s), s);
}

double NoiseModel::norm_p(double q) const
{
    double m = 0.0;
    switch (family) {
    case NoiseFamily::UniformPm1: m = 1.0 / (q + 1.0); break;
    case NoiseFamily::Gaussian: m = std::pow(2.0, q / 2.0) * std::tgamma((q + 1.0) / 2.0) / std::sqrt(std::numbers::pi); break;
    case NoiseFamily::Rademacher: m = 1.0; break;
    case NoiseFamily::TruncatedGaussian: m = truncated_abs_moment(q, trunc); break;
    }
    return std::pow(m, 1.0 / q);
}

bool NoiseModel::compact() const { return family != NoiseFamily::Gaussian; }

double NoiseModel::bound() const
{
    switch (family) {
    case NoiseFamily::UniformPm1:
    case NoiseFamily::Rademacher: return 1.0;
    case NoiseFamily::TruncatedGaussian: return trunc;
    case NoiseFamily::Gaussian: break;
    }
    return std::numeric_limits<double>::infinity();
}

double NoiseModel::scale(long long j) const
{
    if (step_scale.empty()) return 1.0;
    return step_scale[std::min<std::size_t>(j - 1, step_scale.size() - 1)];
}

const char* noise_name(NoiseFamily f)
{
    switch (f) {
    case NoiseFamily::UniformPm1: return "uniform_pm1";
    case NoiseFamily::Gaussian: return "gaussian";
    case NoiseFamily::Rademacher: return "rademacher";
    case NoiseFamily::TruncatedGaussian: return "truncated_gaussian";
    }
    return "unknown";
}

NoiseFamily parse_noise(const std::string& s)
{
    for (auto f : {NoiseFamily::UniformPm1, NoiseFamily::Gaussian, NoiseFamily::Rademacher, NoiseFamily::TruncatedGaussian})
        if (s == noise_name(f)) return f;
    if (s == "uniform") return NoiseFamily::UniformPm1;
    throw Error(ErrorKind::Config, "unknown noise family '" + s + "'");
}

double NoiseStream::next()
{
    switch (model_.family) {
    case NoiseFamily::UniformPm1: return 2.0 * rng_.uniform() - 1.0;
    case NoiseFamily::Gaussian: return nd_(rng_);
    case NoiseFamily::Rademacher: return (rng_() >> 63) ? 1.0 : -1.0;
    case NoiseFamily::TruncatedGaussian:
        for (;;) {
            double z = nd_(rng_);
            if (std::abs(z) <= model_.trunc) return z;
        }
    }
    return 0.0;
}

namespace {

template <class M> bool interval_map() { return std::is_same_v<M, QuadraticMap> || std::is_same_v<M, EvenSeriesMap>; }

template <class M> double base_point(double x)
{
    if constexpr (std::is_same_v<M, CircleLift>) return x - std::floor(x);
    return x;
}

template <class M>
void run_samples(const M& f, EnsembleResult& E, const NoiseModel& noise, const SimOptions& opt,
                 const std::vector<double>& base, const std::vector<double>& dfs, std::vector<double>& shadow)
{
    const long long n = E.n;
    const double sigma = E.sigma;
    const bool guarded = interval_map<M>();
    const double eps = std::numeric_limits<double>::epsilon();
    auto body = [&](std::size_t i) {
        NoiseStream draw(noise, E.seed, i);
        double u = 0.0, L = 0.0, mx = 0.0;
        for (long long j = 0; j < n; ++j) {
            double xi = draw.next() * noise.scale(j + 1);
            mx = std::max(mx, std::abs(xi));
            u = f.dev(base[j], u, sigma) + xi;
            L = dfs[j] * L + xi;
        }
        bool g = guarded && sigma * mx > opt.pad;
        if (!g && !std::isfinite(u)) {
            std::ostringstream os;
            os << "sample " << i << " is not finite";
            throw Error(ErrorKind::NonFiniteSample, os.str());
        }
        E.dev[i] = u;
        E.lin[i] = L;
        E.endpoint[i] = E.orbit[n] + sigma * u;
        E.max_xi[i] = mx;
        E.guard[i] = g;
        E.in_B[i] = mx <= E.a_k;
        E.in_Bbar[i] = E.d2_norm * sigma * E.lambda_hat * E.lambda_hat * mx <= 0.25;
        if (E.in_Bbar[i] && !g) {
            double bound = sigma * sigma * E.d2_norm * std::pow(E.lambda_hat, 3) * mx * mx;
            double slack = 16.0 * eps * sigma * E.lambda_hat * (std::abs(L) + mx);
            double resid = sigma * std::abs(u - L);
            shadow[i] = resid <= slack ? 0.0 : resid / (bound + slack);
        } else {
            shadow[i] = -1.0;
        }
    };
    const long long count = static_cast<long long>(E.M);
    if (opt.policy == ExecPolicy::Parallel) {
        std::string failure;
#pragma omp parallel for num_threads(worker_count()) schedule(static)
        for (long long i = 0; i < count; ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (const std::exception& e) {
#pragma omp critical
                if (failure.empty()) failure = e.what();
            }
        }
        if (!failure.empty()) throw Error(ErrorKind::NonFiniteSample, failure);
    } else {
        for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
    }
}

} // namespace

EnsembleResult simulate(const MapSpec& f, double x0, long long n, double sigma, const NoiseModel& noise, std::size_t M,
                        std::uint64_t seed, const SimOptions& opt)
{
    if (n < 1) throw Error(ErrorKind::Config, "simulation needs n >= 1");
    if (M < 1) throw Error(ErrorKind::Config, "simulation needs M >= 1");
    if (!(sigma >= 0.0)) throw Error(ErrorKind::Config, "sigma must be non-negative");
    EnsembleResult E;
    E.map = map_name(f);
    E.noise = noise_name(noise.family);
    E.x0 = x0;
    E.n = n;
    E.sigma = sigma;
    E.seed = seed;
    E.M = M;
    std::vector<double> base(n + 1), dfs(n + 1);
    E.orbit.resize(n + 1);
    std::visit([&](const auto& m) {
        using MT = std::decay_t<decltype(m)>;
        double x = x0;
        for (long long j = 0; j <= n; ++j) {
            E.orbit[j] = x;
            base[j] = base_point<MT>(x);
            dfs[j] = m.df(base[j]);
            x = m.f(x);
        }
        E.d2_norm = m.d2_sup();
    }, f);
    E.weights.assign(n + 1, 0.0);
    E.weights[n] = 1.0;
    for (long long j = n - 1; j >= 1; --j) E.weights[j] = E.weights[j + 1] * dfs[j];
    double m2 = noise.moment(2);
    for (long long j = 1; j <= n; ++j) {
        double s = noise.scale(j);
        E.var_L += E.weights[j] * E.weights[j] * m2 * s * s;
    }
    if (!std::isfinite(E.var_L)) throw Error(ErrorKind::NonFiniteSample, "variance of the linearized noise overflowed");
    E.lambda_hat = lambda_direct(f, x0, n, 1.0).hat();
    E.a_k = E.d2_norm > 0.0 && sigma > 0.0
                ? 1.0 / (4.0 * E.d2_norm) / (E.lambda_hat * E.lambda_hat) / std::sqrt(sigma)
                : std::numeric_limits<double>::infinity();
    E.endpoint.resize(M);
    E.dev.resize(M);
    E.lin.resize(M);
    E.max_xi.resize(M);
    E.guard.resize(M);
    E.in_B.resize(M);
    E.in_Bbar.resize(M);
    std::vector<double> shadow(M);
    std::visit([&](const auto& m) { run_samples(m, E, noise, opt, base, dfs, shadow); }, f);
    std::size_t ng = 0, nb = 0, nbb = 0;
    for (std::size_t i = 0; i < M; ++i) {
        ng += E.guard[i];
        nb += E.in_B[i];
        nbb += E.in_Bbar[i];
        if (shadow[i] >= 0.0) {
            ++E.shadow_checked;
            E.shadow_violations += shadow[i] > 1.0;
            E.shadow_worst_ratio = std::max(E.shadow_worst_ratio, shadow[i]);
        }
    }
    E.guard_fraction = static_cast<double>(ng) / M;
    E.B_fraction = static_cast<double>(nb) / M;
    E.Bbar_fraction = static_cast<double>(nbb) / M;
    if (E.guard_fraction > 0.99) {
        std::ostringstream os;
        os << "guard excluded " << ng << " of " << M << " samples";
        throw Error(ErrorKind::AllSamplesGuarded, os.str());
    }
    return E;
}

std::vector<double> normalized_processes(const EnsembleResult& E, Variant v)
{
    std::vector<double> out;
    out.reserve(E.M);
    if (v == Variant::W) {
        if (!(E.var_L > 0.0)) throw Error(ErrorKind::DegenerateVariance, "var L_n = 0");
        double s = std::sqrt(E.var_L);
        for (std::size_t i = 0; i < E.M; ++i)
            if (!E.guard[i]) out.push_back(E.dev[i] / s);
        if (out.empty()) throw Error(ErrorKind::DegenerateVariance, "no unguarded samples");
        return out;
    }
    const auto& mask = v == Variant::WTilde ? E.in_B : E.in_Bbar;
    for (std::size_t i = 0; i < E.M; ++i)
        if (!E.guard[i]) out.push_back(mask[i] ? E.dev[i] : 0.0);
    if (out.size() < 2) throw Error(ErrorKind::DegenerateVariance, "no unguarded samples");
    long double mean = 0.0L, ss = 0.0L;
    for (double x : out) mean += x;
    mean /= out.size();
    for (double x : out) ss += (x - mean) * (x - mean);
    double var = static_cast<double>(ss / (out.size() - 1));
    if (!(var > 0.0)) throw Error(ErrorKind::DegenerateVariance, "truncated sample variance is zero");
    double s = std::sqrt(var);
    for (double& x : out) x /= s;
    return out;
}

VarianceComparison variance_comparison(const EnsembleResult& E, int resamples)
{
    VarianceComparison vc;
    std::vector<double> vals;
    for (std::size_t i = 0; i < E.M; ++i)
        if (!E.guard[i]) vals.push_back(E.dev[i]);
    vc.set_fraction = E.Bbar_fraction;
    vc.sigma2_varL = E.var_L;
    if (vals.size() < 2) throw Error(ErrorKind::DegenerateVariance, "no unguarded samples");
    auto variance = [&](auto&& get, std::size_t m) {
        long double mean = 0.0L, ss = 0.0L;
        for (std::size_t i = 0; i < m; ++i) mean += get(i);
        mean /= m;
        for (std::size_t i = 0; i < m; ++i) {
            long double d = get(i) - mean;
            ss += d * d;
        }
        return static_cast<double>(ss / (m - 1));
    };
    const std::size_t m = vals.size();
    vc.var_effective = variance([&](std::size_t i) { return vals[i]; }, m);
    vc.ratio = vc.var_effective / E.var_L;
    std::vector<double> boot(resamples);
#pragma omp parallel for num_threads(worker_count()) schedule(static)
    for (int r = 0; r < resamples; ++r) {
        StreamRng rng(E.seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(r));
        std::vector<std::size_t> idx(m);
        for (auto& k : idx) k = static_cast<std::size_t>(rng.uniform() * m);
        boot[r] = variance([&](std::size_t i) { return vals[idx[i]]; }, m) / E.var_L;
    }
    std::sort(boot.begin(), boot.end());
    vc.ci_lo = boot[static_cast<std::size_t>(0.025 * (resamples - 1))];
    vc.ci_hi = boot[static_cast<std::size_t>(0.975 * (resamples - 1))];
    vc.drift = (1.0 < vc.ci_lo || 1.0 > vc.ci_hi) && std::abs(vc.ratio - 1.0) > 0.01;
    return vc;
}

const char* schedule_kind_name(ScheduleKind k)
{
    switch (k) {
    case ScheduleKind::PdClt: return "pd_clt";
    case ScheduleKind::PdBe: return "pd_be";
    case ScheduleKind::CircleClt: return "circle_clt";
    case ScheduleKind::CircleBe: return "circle_be";
    }
    return "unknown";
}

double sigma_exponent(ScheduleKind kind, const SpectralConstants& c, double margin)
{
    bool be = kind == ScheduleKind::PdBe || kind == ScheduleKind::CircleBe;
    bool pd = kind == ScheduleKind::PdClt || kind == ScheduleKind::PdBe;
    auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!ok(c.rho1) || !ok(c.rho2) || (be && !ok(c.rho3))) throw Error(ErrorKind::MissingRho, "spectral radii for p = 1, 2, 3 required");
    if (pd && !(std::abs(c.lambda) > 0.0 && std::abs(c.lambda) < 1.0)) throw Error(ErrorKind::MissingRho, "scaling ratio required");
    double r1 = c.rho1, r2 = c.rho2, r3 = c.rho3;
    if (pd) {
        double al = std::abs(c.lambda);
        r1 *= al;
        r2 *= al * al;
        r3 *= al * al * al;
    }
    double logb = pd ? std::log(2.0) : std::log(std::numbers::phi);
    double e = std::log(r1 * r1 * r1 / std::sqrt(r2)) / logb;
    if (be) e += std::log(r2 * r2 * r2 / r3) / logb;
    return e + 1.0 + margin;
}

double sigma_schedule(ScheduleKind kind, long long n, const SpectralConstants& c, double margin)
{
    if (n < 1) throw Error(ErrorKind::Config, "schedule needs n >= 1");
    return std::pow(static_cast<double>(n), -sigma_exponent(kind, c, margin));
}

CumulantSeries cumulant_decay(const MapSpec& f, double x0, const NoiseModel& noise, const std::vector<long long>& ns,
                              const std::vector<double>& sigmas, std::size_t M, std::uint64_t seed, const SimOptions& opt)
{
    if (ns.size() != sigmas.size()) throw Error(ErrorKind::Config, "one sigma per time required");
    CumulantSeries cs;
    std::vector<double> ln, lsk, lku, lks;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        EnsembleResult E = simulate(f, x0, ns[i], sigmas[i], noise, M, seed, opt);
        auto w = normalized_processes(E, Variant::W);
        CumulantPoint pt;
        pt.n = ns[i];
        pt.sigma = sigmas[i];
        pt.k = k_statistics(w);
        pt.skewness = pt.k.skewness();
        pt.excess_kurtosis = pt.k.excess_kurtosis();
        pt.ks = ks_distance(std::move(w));
        pt.guard_fraction = E.guard_fraction;
        pt.B_fraction = E.B_fraction;
        ln.push_back(std::log2(static_cast<double>(pt.n)));
        lsk.push_back(std::log2(std::abs(pt.skewness)));
        lku.push_back(std::log2(std::abs(pt.excess_kurtosis)));
        lks.push_back(std::log2(pt.ks));
        cs.points.push_back(pt);
    }
    if (ns.size() >= 2) {
        cs.skew_slope = fit_slope(ln, lsk);
        cs.kurt_slope = fit_slope(ln, lku);
        cs.ks_slope = fit_slope(ln, lks);
    }
    return cs;
}

nlohmann::json summary_json(const EnsembleResult& E)
{
    nlohmann::json j;
    j["map"] = E.map;
    j["noise"] = E.noise;
    j["x0"] = E.x0;
    j["n"] = E.n;
    j["sigma"] = E.sigma;
    j["seed"] = E.seed;
    j["M"] = E.M;
    j["varL"] = E.var_L;
    j["lambda_hat"] = E.lambda_hat;
    j["a_k"] = std::isfinite(E.a_k) ? nlohmann::json(E.a_k) : nlohmann::json(nullptr);
    j["guard_fraction"] = E.guard_fraction;
    j["B_fraction"] = E.B_fraction;
    j["Bbar_fraction"] = E.Bbar_fraction;
    j["shadow_checked"] = E.shadow_checked;
    j["shadow_violations"] = E.shadow_violations;
    j["shadow_worst_ratio"] = E.shadow_worst_ratio;
    auto w = normalized_processes(E, Variant::W);
    GofReport g = gof_report(w);
    j["ks"] = g.ks;
    j["skew"] = g.cumulants.skewness();
    j["kurt"] = g.cumulants.excess_kurtosis();
    try {
        j["var_eff"] = variance_comparison(E, 50).var_effective;
    } catch (const Error&) {
        j["var_eff"] = nullptr;
    }
    return j;
}

} // namespace renoise
