#include "renoise/experiments.hpp"
#include "renoise/error.hpp"
#include "renoise/stats.hpp"
#include "renoise/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

namespace renoise {

namespace {

std::string g6(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Check mk(int criterion, std::string name, bool pass, std::string detail)
{
    return Check{criterion, std::move(name), pass, std::move(detail)};
}

int count_decreasing(const std::vector<double>& v)
{
    int d = 0;
    for (std::size_t i = 1; i < v.size(); ++i) d += v[i] < v[i - 1];
    return d;
}

SpectralConstants pd_constants(const PdContext& P) { return {P.rho[1], P.rho[2], P.rho[3], P.lambda}; }

SpectralConstants circle_constants(const CircleContext& C, int n = 12, int N = 64)
{
    CircleOpInputs in{&C.R.maps.at(n - 2), &C.R.maps.at(n - 1), C.R.alphas.at(n - 2), C.R.alphas.at(n - 1)};
    Interval dom = circle_operator_domain(in, false);
    SpectralConstants s;
    s.rho1 = spectral_radius(build_circle_operator(in, 1.0, false, dom, N)).rho;
    s.rho2 = spectral_radius(build_circle_operator(in, 2.0, false, dom, N)).rho;
    s.rho3 = spectral_radius(build_circle_operator(in, 3.0, false, dom, N)).rho;
    s.lambda = C.R.alphas.at(n);
    return s;
}

} // namespace

bool Outcome::all_pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

bool Outcome::criterion_pass(int c) const
{
    bool any = false, ok = true;
    for (const auto& ch : checks)
        if (ch.criterion == c) {
            any = true;
            ok = ok && ch.pass;
        }
    return any && ok;
}

nlohmann::json checks_json(const std::vector<Check>& checks)
{
    nlohmann::json a = nlohmann::json::array();
    for (const auto& c : checks)
        a.push_back({{"criterion", c.criterion}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    return a;
}

const PdContext& pd_context(int k)
{
    static std::map<int, PdContext> cache;
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    PdContext P;
    P.k = k;
    P.g = solve_fixed_point(k, 30, default_seed(k), 1e-12);
    P.lambda = P.g.lambda();
    for (int p = 0; p <= 4; ++p) P.rho[p] = spectral_radius(build_pd_operator(P.g, p, false, 48)).rho;
    return cache.emplace(k, std::move(P)).first->second;
}

const CircleContext& circle_context(int depth, int n_max)
{
    static std::map<std::pair<int, int>, CircleContext> cache;
    auto key = std::make_pair(depth, n_max);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    CircleContext C;
    C.tuned = tune_to_golden(CircleFamily::Critical, depth);
    C.R = fib_renormalize(CircleLift{C.tuned.omega}, n_max);
    return cache.emplace(key, std::move(C)).first->second;
}

MapSpec resolve_map(const std::string& name)
{
    if (name == "pd") return QuadraticMap{};
    if (name == "g1") return pd_context(1).g.as_map();
    if (name == "rotation") return AffineMap{1.0, kGolden};
    if (name == "doubling") return AffineMap{2.0, 0.0};
    if (name == "circle") return CircleLift{circle_context().tuned.omega};
    throw Error(ErrorKind::Config, "unknown map '" + name + "' (pd, g1, rotation, doubling, circle)");
}

Outcome run_fixed_point(const FixedPointConfig& c)
{
    Outcome out;
    UnimodalMap g = solve_fixed_point(c.k, c.N, default_seed(c.k), c.tol);
    double res = fixed_point_residual(g);
    FeigenbaumConstants fc = feigenbaum_constants(g);
    double lam = g.lambda();
    double ident = std::abs(fc.gprime_at_1 * std::pow(lam, 2 * c.k - 1) - 1.0);
    out.result = to_json(g, res);
    out.result["gprime_at_1"] = fc.gprime_at_1;
    out.result["identity_residual"] = ident;
    Table coeffs{"coefficients", {"j", "c_j"}, {}};
    for (std::size_t j = 0; j < g.h.coeffs().size(); ++j) coeffs.add_row({fmt((long long)j), fmt(g.h.coeffs()[j])});
    out.tables.push_back(coeffs);
    out.checks.push_back(mk(1, "fixed-point residual", res < 1e-10, "sup|Tg - g| = " + g6(res) + " (< 1e-10)"));
    out.checks.push_back(mk(1, "derivative identity", ident < 1e-8, "|g'(1) lambda^(2k-1) - 1| = " + g6(ident) + " (< 1e-8)"));
    if (c.k == 1) {
        SuperstableData ss = superstable_accumulation(c.oracle_n);
        double lam_oracle = -1.0 / ss.alpha;
        double diff = std::abs(lam - lam_oracle);
        out.result["oracle"] = {{"mu_inf", ss.mu_inf}, {"alpha", ss.alpha}, {"lambda", lam_oracle}, {"n_max", c.oracle_n}};
        Table st{"superstable", {"n", "mu_n", "d_n"}, {}};
        for (std::size_t i = 0; i < ss.mu.size(); ++i) st.add_row({fmt((long long)i + 1), fmt(ss.mu[i]), fmt(ss.d[i])});
        out.tables.push_back(st);
        out.checks.push_back(mk(1, "superstable oracle", diff < 1e-7,
                                "lambda " + fmt(lam) + " vs -1/alpha " + fmt(lam_oracle) + ", diff " + g6(diff) + " (< 1e-7)"));
    }
    return out;
}

Outcome run_spectrum(const SpectrumConfig& c)
{
    Outcome out;
    const PdContext& P = pd_context(c.k);
    const UnimodalMap& g = P.g;
    double lam = g.lambda(), al = std::abs(lam);
    double a = g.df(1.0) / lam; // lambda^{-1} f'(1)
    Table t{"spectrum", {"p", "rho", "rho_dense", "iterations", "min_eigenfunction", "scaled", "scaled_hi", "compa_lo", "compa_hi", "signed_rho"}, {}};
    double worst_scaled = 1e300, worst_compa = 1e300;
    nlohmann::json rows = nlohmann::json::array();
    for (double p : c.p) {
        SpectralResult s = spectral_radius(build_pd_operator(g, p, false, c.N));
        double scaled = std::pow(al, 2.0 * c.k * p) * s.rho;
        double hi = 1.0 + std::pow(al, (2.0 * c.k - 1.0) * p);
        double clo = std::pow(a, p), chi = std::pow(a, p) + std::pow(-lam, -p);
        worst_scaled = std::min({worst_scaled, scaled - 1.0, hi - scaled});
        worst_compa = std::min({worst_compa, (s.rho - clo) / clo, (chi - s.rho) / clo});
        double sgn = std::nan("");
        if (std::abs(p - std::round(p)) < 1e-12 && p >= 1) {
            try {
                sgn = spectral_radius(build_pd_operator(g, p, true, c.N)).rho;
            } catch (const Error&) {
                sgn = std::nan("");
            }
        }
        t.add_row({fmt(p), fmt(s.rho), fmt(s.rho_dense), fmt((long long)s.iters), fmt(s.min_node_value), fmt(scaled), fmt(hi),
                   fmt(clo), fmt(chi), fmt(sgn)});
        rows.push_back({{"p", p}, {"rho", s.rho}, {"rho_dense", s.rho_dense}, {"scaled", scaled}, {"scaled_hi", hi},
                        {"compa_lo", clo}, {"compa_hi", chi}, {"signed_rho", num(sgn)}, {"min_eigenfunction", s.min_node_value}});
    }
    out.tables.push_back(t);
    out.result["k"] = c.k;
    out.result["N"] = c.N;
    out.result["lambda"] = lam;
    out.result["spectrum"] = rows;
    out.result["margin_scaled"] = worst_scaled;
    out.result["margin_compa"] = worst_compa;
    out.checks.push_back(mk(2, "1 < lambda^(2p) rho_p < 1 + |lambda|^p", worst_scaled >= 1e-6,
                            "smallest margin " + g6(worst_scaled) + " (>= 1e-6)"));
    out.checks.push_back(mk(2, "(f'(1)/lambda)^p < rho_p < (f'(1)/lambda)^p + (-lambda)^-p", worst_compa >= 1e-6,
                            "smallest relative margin " + g6(worst_compa) + " (>= 1e-6)"));
    return out;
}

Outcome run_convexity(const ConvexityConfig& c)
{
    Outcome out;
    const PdContext& P = pd_context(c.k);
    ConvexityReport rep = convexity_report(P.g, c.p_grid, c.N);
    out.result = to_json(rep);
    GammaValues gv = pd_gamma(P.rho[1], P.rho[2], P.rho[3], P.lambda);
    out.result["gamma"] = gv.gamma;
    out.result["gamma_raw"] = gv.gamma_raw;
    out.result["be_term"] = gv.be_term;
    out.result["be_term_raw"] = gv.be_term_raw;
    out.result["k"] = c.k;
    out.result["N"] = c.N;
    Table t{"convexity", {"p", "rho", "rho_check", "scaled", "bound_lo", "bound_hi"}, {}};
    for (std::size_t i = 0; i < rep.p_grid.size(); ++i)
        t.add_row({fmt(rep.p_grid[i]), fmt(rep.rho[i]), fmt(rep.rho_check[i]), fmt(rep.scaled[i]), fmt(rep.bound_lo[i]),
                   fmt(rep.bound_hi[i])});
    out.tables.push_back(t);
    double dg = std::abs(gv.gamma - 3.8836);
    out.checks.push_back(mk(3, "gamma", dg <= 0.01,
                            "log2(rho1^3/sqrt(rho2)) with rho_p = |lambda|^p r_p: " + fmt(gv.gamma) + " (3.8836 +- 0.01); raw operator radii give " +
                                g6(gv.gamma_raw)));
    bool res_ok = rep.resolution_gap <= 1e-7;
    out.checks.push_back(mk(4, "strictly increasing", rep.monotone_ok, "margin " + g6(rep.monotone_margin)));
    out.checks.push_back(mk(4, "log-convex", rep.logconvex_ok, "midpoint margin " + g6(rep.logconvex_margin)));
    out.checks.push_back(mk(4, "log(rho)/p decreasing", rep.logrho_over_p_decreasing_ok, "margin " + g6(rep.logrho_over_p_margin)));
    out.checks.push_back(mk(4, "two-resolution agreement", res_ok,
                            "max |rho(N) - rho(N+16)|/rho = " + g6(rep.resolution_gap) + " (<= 1e-7)"));
    return out;
}

Outcome run_product_growth(const ProductGrowthConfig& c)
{
    Outcome out;
    const PdContext& P = pd_context(c.k);
    double lam = P.lambda, r2 = P.rho[2], r3 = P.rho[3];
    MapSpec g = P.g.as_map();
    RatioCurve curve = lyapunov_ratio_curve(g, 0.0, 3.0, 1LL << c.n_last, Schedule::PowersOf2);
    Table t{"product_growth", {"n", "Lambda2", "Lambda3", "normalized", "normalized_literal", "ratio3"}, {}};
    double lo = 1e300, hi = 0.0;
    std::vector<double> fn, fr;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& pt : curve.points) {
        int n = static_cast<int>(std::lround(std::log2(static_cast<double>(pt.n))));
        if (n < c.n_first) continue;
        double norm = pt.lambda2 / std::pow(lam * lam * r2, n);
        double literal = pt.lambda2 * std::pow(lam, 2.0 * n) / std::pow(r2, n);
        lo = std::min(lo, norm);
        hi = std::max(hi, norm);
        if (n >= c.fit_first) {
            fn.push_back(n);
            fr.push_back(std::log(pt.ratio3));
        }
        t.add_row({fmt((long long)n), fmt(pt.lambda2), fmt(pt.lambda3), fmt(norm), fmt(literal), fmt(pt.ratio3)});
        rows.push_back({{"n", n}, {"Lambda2", pt.lambda2}, {"normalized", norm}, {"normalized_literal", literal}, {"ratio3", pt.ratio3}});
    }
    out.tables.push_back(t);
    double factor = std::exp(fit_slope(fn, fr));
    double target = r3 / std::pow(r2, 1.5);
    // Operator products K_{T^j g} ... K_g 1 along the (constant) trajectory.
    std::vector<UnimodalMap> traj(c.n_last, P.g);
    ProductGrowth pg = product_growth(traj, 2.0, r2, c.N);
    out.result["series"] = rows;
    out.result["band"] = {{"c", lo}, {"C", hi}, {"ratio", hi / lo}};
    out.result["decay_factor"] = factor;
    out.result["decay_target"] = target;
    out.result["operator_product_at0"] = nums(pg.normalized_at0);
    out.result["operator_ratio_sup"] = nums(pg.ratio_sup);
    out.result["operator_ratio_inf"] = nums(pg.ratio_inf);
    out.checks.push_back(mk(5, "Lambda2(0,2^n) / (lambda^2 rho2)^n in a band", hi / lo < 10.0,
                            "c = " + g6(lo) + ", C = " + g6(hi) + ", C/c = " + g6(hi / lo) + " (< 10), n = " +
                                std::to_string(c.n_first) + ".." + std::to_string(c.n_last)));
    double rel = std::abs(factor / target - 1.0);
    out.checks.push_back(mk(5, "Lambda3/Lambda2^(3/2) per-doubling factor", rel <= 0.10,
                            "fitted " + g6(factor) + " vs rho3/rho2^(3/2) = " + g6(target) + ", relative gap " + g6(rel) + " (<= 0.10)"));
    return out;
}

Outcome run_lyapunov_curve(const LyapunovCurveConfig& c)
{
    Outcome out;
    MapSpec f = resolve_map(c.map);
    RatioCurve curve = lyapunov_ratio_curve(f, c.x, c.p, c.n_max, c.schedule);
    Table t{"lyapunov_curve", {"n", "Lambda2", "Lambda3", "Lambda4", "LambdaHat", "ratio3", "ratio4", "weak_noise_factor"}, {}};
    for (const auto& pt : curve.points)
        t.add_row({fmt(pt.n), fmt(pt.lambda2), fmt(pt.lambda3), fmt(pt.lambda4), fmt(pt.lambda_hat), fmt(pt.ratio3), fmt(pt.ratio4),
                   fmt(pt.weak_noise_factor)});
    out.tables.push_back(t);
    out.result["map"] = c.map;
    out.result["x"] = c.x;
    out.result["p"] = c.p;
    out.result["schedule"] = schedule_name(c.schedule);
    out.result["decreasing_fraction"] = curve.decreasing_fraction;
    out.result["step_factor"] = curve.step_factor;
    out.result["log2n_slope"] = curve.log2n_slope;

    // Block-decomposition oracle.
    const PdContext& P = pd_context(1);
    MapSpec g = P.g.as_map();
    std::mt19937_64 rng(c.seed);
    std::uniform_int_distribution<long long> pick_n(1, c.case_n_max);
    std::uniform_int_distribution<int> pick_p(1, 4);
    std::uniform_real_distribution<double> pick_x(-1.0, 1.0), pick_u(0.0, 1.0);
    double worst_bin = 0.0, worst_fib = 0.0;
    int fail_bin = 0, fail_fib = 0;
    Table bt{"block_oracle", {"scheme", "x", "n", "p", "direct", "blocks", "rel_error"}, {}};
    auto one = [&](const MapSpec& m, Scheme s, double x, long long n, double p, double& worst, int& fails) {
        try {
            BlockDecomposition b = lambda_blocks(m, x, n, p, s);
            worst = std::max(worst, b.rel_error);
            bt.add_row({scheme_name(s), fmt(x), fmt(n), fmt(p), fmt(std::exp(b.log_direct)), fmt(std::exp(b.log_total)), fmt(b.rel_error)});
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ReconstructionMismatch) throw;
            ++fails;
            worst = std::max(worst, 1.0);
        }
    };
    for (int i = 0; i < c.cases; ++i) {
        double x = pick_x(rng);
        long long n = pick_n(rng);
        one(g, Scheme::Binary, x, n, pick_p(rng), worst_bin, fail_bin);
    }
    MapSpec F = CircleLift{circle_context().tuned.omega};
    for (int i = 0; i < c.circle_cases; ++i) {
        double x = pick_u(rng);
        long long n = pick_n(rng);
        one(F, Scheme::Zeckendorf, x, n, pick_p(rng), worst_fib, fail_fib);
    }
    out.tables.push_back(bt);
    SandwichReport sp = growth_checks_pd(P.g.as_map(), P.lambda, 500, c.seed);
    SandwichReport sc = growth_checks_circle(circle_context().R, 12, 500, c.seed);
    auto sw = [](const SandwichReport& s) {
        return nlohmann::json{{"cases", s.cases}, {"position_violations", s.rel1_violations}, {"derivative_violations", s.rel2_violations},
                              {"worst_position_margin", s.worst_rel1}, {"worst_derivative_margin", s.worst_rel2},
                              {"lower_const", s.lower_const}, {"upper_const", s.upper_const}};
    };
    out.result["growth_pd"] = sw(sp);
    out.result["growth_circle"] = sw(sc);
    out.result["block_oracle"] = {{"binary_cases", c.cases}, {"binary_worst", worst_bin}, {"fibonacci_cases", c.circle_cases},
                                  {"fibonacci_worst", worst_fib}};
    out.checks.push_back(mk(6, "binary blocks equal direct (g1)", fail_bin == 0 && worst_bin <= 1e-9,
                            std::to_string(c.cases) + " cases, worst relative error " + g6(worst_bin) + " (<= 1e-9)"));
    out.checks.push_back(mk(6, "Fibonacci blocks equal direct (circle)", fail_fib == 0 && worst_fib <= 1e-9,
                            std::to_string(c.circle_cases) + " cases, worst relative error " + g6(worst_fib) + " (<= 1e-9)"));
    return out;
}

Outcome run_clt(const CltConfig& c)
{
    Outcome out;
    MapSpec f = resolve_map(c.map);
    NoiseModel noise;
    noise.family = c.noise;
    SpectralConstants sc{};
    bool scheduled = c.sigma < 0.0;
    if (scheduled) {
        if (c.map == "pd" || c.map == "g1") sc = pd_constants(pd_context(1));
        else if (c.map == "circle") sc = circle_constants(circle_context());
        else throw Error(ErrorKind::Config, "map '" + c.map + "' needs an explicit --sigma");
    }
    Table t{"clt", {"n", "sigma", "ks", "band", "skewness", "excess_kurtosis", "k2", "k3", "k4", "guard_fraction", "B_fraction",
                    "Bbar_fraction", "var_ratio", "shadow_checked", "shadow_violations"}, {}};
    std::vector<double> ln, ks, sk, ku;
    nlohmann::json rows = nlohmann::json::array();
    double bmin = 1.0, gmax = 0.0;
    for (long long n : c.ns) {
        double sigma = scheduled ? sigma_schedule(c.schedule, n, sc) : c.sigma;
        EnsembleResult E = simulate(f, c.x0, n, sigma, noise, c.M, c.seed);
        std::vector<double> w = normalized_processes(E, Variant::W);
        GofReport gr = gof_report(w);
        VarianceComparison vc = variance_comparison(E, 50);
        bmin = std::min(bmin, E.B_fraction);
        gmax = std::max(gmax, E.guard_fraction);
        ln.push_back(std::log2(static_cast<double>(n)));
        ks.push_back(gr.ks);
        sk.push_back(gr.cumulants.skewness());
        ku.push_back(gr.cumulants.excess_kurtosis());
        t.add_row({fmt(n), fmt(sigma), fmt(gr.ks), fmt(gr.band), fmt(sk.back()), fmt(ku.back()), fmt(gr.cumulants.k2), fmt(gr.cumulants.k3),
                   fmt(gr.cumulants.k4), fmt(E.guard_fraction), fmt(E.B_fraction), fmt(E.Bbar_fraction), fmt(vc.ratio),
                   fmt((long long)E.shadow_checked), fmt((long long)E.shadow_violations)});
        nlohmann::json row = to_json(gr);
        row["n"] = n;
        row["sigma"] = sigma;
        row["guard_fraction"] = E.guard_fraction;
        row["B_fraction"] = E.B_fraction;
        row["Bbar_fraction"] = E.Bbar_fraction;
        row["var_ratio"] = vc.ratio;
        row["var_ratio_ci"] = {vc.ci_lo, vc.ci_hi};
        row["shadow_violations"] = E.shadow_violations;
        row["shadow_checked"] = E.shadow_checked;
        rows.push_back(row);
        if (c.write_samples && n == c.ns.back()) {
            Table s{"samples", {"sample_id", "x_n", "L_n", "in_Bk", "in_guard"}, {}};
            for (std::size_t i = 0; i < E.M; ++i)
                s.add_row({fmt((long long)i), fmt(E.endpoint[i]), fmt(E.lin[i]), E.in_B[i] ? "1" : "0", E.guard[i] ? "1" : "0"});
            out.tables.push_back(std::move(s));
        }
    }
    out.tables.insert(out.tables.begin(), t);
    std::vector<double> lsk, lku, lks;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        lks.push_back(std::log2(ks[i]));
        lsk.push_back(std::log2(std::abs(sk[i])));
        lku.push_back(std::log2(std::abs(ku[i])));
    }
    double ks_slope = fit_slope(ln, lks), skew_slope = fit_slope(ln, lsk), kurt_slope = fit_slope(ln, lku);
    out.result["map"] = c.map;
    out.result["noise"] = noise_name(c.noise);
    out.result["M"] = c.M;
    out.result["seed"] = c.seed;
    out.result["sigma_exponent"] = scheduled ? num(sigma_exponent(c.schedule, sc)) : nlohmann::json(nullptr);
    out.result["series"] = rows;
    out.result["ks_slope"] = ks_slope;
    out.result["skew_slope"] = skew_slope;
    out.result["kurt_slope"] = kurt_slope;
    int dec = count_decreasing(ks);
    int steps = static_cast<int>(ks.size()) - 1;
    std::string series;
    for (double v : ks) series += (series.empty() ? "" : ", ") + g6(v);
    if (c.map == "pd") {
        const PdContext& P = pd_context(1);
        double ts = std::log2(P.rho[3] / std::pow(P.rho[2], 1.5));
        double tk = std::log2(P.rho[4] / (P.rho[2] * P.rho[2]));
        out.result["skew_target"] = ts;
        out.result["kurt_target"] = tk;
        out.checks.push_back(mk(7, "KS decreasing", dec == steps, "KS = [" + series + "], " + std::to_string(dec) + " of " +
                                                                       std::to_string(steps) + " steps decrease"));
        bool halves = ks.back() < ks.front() / 2.0;
        out.checks.push_back(mk(7, "KS halves", halves, "KS(last) " + g6(ks.back()) + " < KS(first)/2 = " + g6(ks.front() / 2.0)));
        out.checks.push_back(mk(7, "skewness decay slope", std::abs(skew_slope - ts) <= 0.25 * std::abs(ts),
                                "slope " + g6(skew_slope) + " vs log2(rho3/rho2^(3/2)) = " + g6(ts) + " +- 25%"));
        out.checks.push_back(mk(7, "kurtosis decay slope", std::abs(kurt_slope - tk) <= 0.25 * std::abs(tk),
                                "slope " + g6(kurt_slope) + " vs log2(rho4/rho2^2) = " + g6(tk) + " +- 25%"));
    } else if (c.map == "rotation") {
        out.checks.push_back(mk(10, "outliers empty", bmin == 1.0 && gmax == 0.0,
                                "min B_k fraction " + g6(bmin) + ", max guard fraction " + g6(gmax)));
        out.checks.push_back(mk(10, "KS slope -1/2", std::abs(ks_slope + 0.5) <= 0.1,
                                "slope of log2 KS on log2 n = " + g6(ks_slope) + " (-0.5 +- 0.1), KS = [" + series + "]"));
    } else if (c.map == "circle") {
        out.checks.push_back(mk(9, "circle KS trend", dec >= 2,
                                "KS = [" + series + "], " + std::to_string(dec) + " of " + std::to_string(steps) + " steps decrease (>= 2)"));
    }
    return out;
}

Outcome run_berry_esseen(const BerryEsseenConfig& c)
{
    Outcome out;
    MapSpec f = resolve_map(c.map);
    NoiseModel noise;
    noise.family = c.noise;
    bool pd = c.map == "pd";
    SpectralConstants sc{};
    if (pd) sc = pd_constants(pd_context(1));
    std::vector<double> nd, ks, rhs;
    Table t{"berry_esseen", {"n", "sigma", "ks", "be_rhs"}, {}};
    RatioCurve curve = lyapunov_ratio_curve(f, 0.0, 3.0, c.ns.back(), Schedule::AllN);
    for (long long n : c.ns) {
        double sigma = pd ? sigma_schedule(ScheduleKind::PdBe, n, sc) : 0.01;
        EnsembleResult E = simulate(f, 0.0, n, sigma, noise, c.M, c.seed);
        double k = ks_distance(normalized_processes(E, Variant::W));
        double r = curve.points.at(n - 1).ratio3;
        nd.push_back(static_cast<double>(n));
        ks.push_back(k);
        rhs.push_back(r);
        t.add_row({fmt(n), fmt(sigma), fmt(k), fmt(r)});
    }
    out.tables.push_back(t);
    RateFit fit = be_rate_fit(nd, ks, nd, rhs);
    out.result["map"] = c.map;
    out.result["ks_slope"] = fit.ks_slope;
    out.result["rhs_slope"] = fit.rhs_slope;
    if (pd) {
        const PdContext& P = pd_context(1);
        out.result["rhs_slope_spectral"] = std::log2(P.rho[3] / std::pow(P.rho[2], 1.5)) / 2.0;
        out.result["sigma_exponent"] = sigma_exponent(ScheduleKind::PdBe, sc);
    }
    out.result["verdict"] = fit.ok;
    out.checks.push_back(mk(0, "KS slope within rhs slope + 0.15", fit.ok,
                            "KS slope " + g6(fit.ks_slope) + ", Lambda3/Lambda2^(3/2) slope " + g6(fit.rhs_slope)));
    return out;
}

Outcome run_circle_tune(const CircleTuneConfig& c)
{
    Outcome out;
    const CircleContext& C = circle_context(c.depth, c.n_max);
    TunedMap alt = tune_to_golden(CircleFamily::Critical, c.compare_depth, 1e-10);
    FibRenorm R2 = fib_renormalize(CircleLift{alt.omega}, c.n_max);
    RotationEstimate rn = rotation_number(CircleLift{C.tuned.omega}, c.iters);
    double rot_err = std::abs(rn.value - kGolden);
    std::vector<CircleIdentities> ids;
    Table t{"circle_alphas", {"n", "lambda_n", "alpha_n", "alpha_n_alt_depth", "eta1", "eta_l2", "deta1", "deta_l2"}, {}};
    for (int n = 4; n <= c.n_max; ++n) {
        CircleIdentities id = circle_fixed_identities(C.R, n);
        ids.push_back(id);
        t.add_row({fmt((long long)n), fmt(C.R.lambdas[n]), fmt(C.R.alphas[n]), fmt(R2.alphas[n]), fmt(id.eta1), fmt(id.eta_l2),
                   fmt(id.deta1), fmt(id.deta_l2)});
    }
    out.tables.push_back(t);
    out.result = to_json(C.R, ids);
    out.result["bracket"] = {C.tuned.lo, C.tuned.hi};
    out.result["depth"] = C.tuned.depth;
    out.result["rotation_number"] = rn.value;
    out.result["rotation_error"] = rot_err;
    int m = c.identity_n;
    double cauchy = std::abs(C.R.alphas[m] - C.R.alphas[m - 1]);
    double depth_gap = std::abs(C.R.alphas[m] - R2.alphas[m]);
    CircleIdentities id = circle_fixed_identities(C.R, m);
    // Aitken estimate of the limiting scaling ratio, reported alongside.
    double a0 = C.R.alphas[c.n_max - 2], a1 = C.R.alphas[c.n_max - 1], a2 = C.R.alphas[c.n_max];
    double alpha_inf = a2 - (a2 - a1) * (a2 - a1) / ((a2 - a1) - (a1 - a0));
    out.result["alpha_limit_estimate"] = alpha_inf;
    out.checks.push_back(mk(9, "rotation number", rot_err < 1e-9,
                            "|rho(F) - beta| = " + g6(rot_err) + " (< 1e-9), Omega = " + fmt(C.tuned.omega)));
    out.checks.push_back(mk(9, "alpha_n Cauchy and depth agreement", cauchy < 1e-3 && depth_gap < 1e-3,
                            "|alpha_" + std::to_string(m) + " - alpha_" + std::to_string(m - 1) + "| = " + g6(cauchy) + ", depth " +
                                std::to_string(c.depth) + " vs " + std::to_string(c.compare_depth) + ": " + g6(depth_gap) + " (< 1e-3)"));
    double worst = std::max(std::abs(id.eta1), std::abs(id.deta1));
    out.checks.push_back(mk(9, "fixed-point identities at depth " + std::to_string(m), worst < 5e-3,
                            "eta(1) - lambda^2 = " + g6(id.eta1) + ", eta'(1) lambda^4 - 1 = " + g6(id.deta1) + " (< 5e-3)"));
    return out;
}

Outcome run_circle_spectrum(const CircleSpectrumConfig& c)
{
    Outcome out;
    const CircleContext& C = circle_context();
    ConvexityReport rep = convexity_report_circle(C.R, c.n, c.p_grid, c.hat, c.N);
    out.result = to_json(rep);
    out.result["n"] = c.n;
    out.result["operator"] = c.hat ? "Khat" : "K";
    Table t{"circle_spectrum", {"p", "rho", "rho_check", "scaled"}, {}};
    std::vector<double> p3, r3;
    double k1 = 1e300;
    for (std::size_t i = 0; i < rep.p_grid.size(); ++i) {
        t.add_row({fmt(rep.p_grid[i]), fmt(rep.rho[i]), fmt(rep.rho_check[i]), fmt(rep.scaled[i])});
        double p = rep.p_grid[i];
        if (p == 1.0 || p == 2.0 || p == 3.0) {
            p3.push_back(p);
            r3.push_back(rep.rho[i]);
            k1 = std::min(k1, rep.scaled[i] - 1.0);
        }
    }
    out.tables.push_back(t);
    if (p3.size() != 3) throw Error(ErrorKind::MissingRho, "circle spectrum grid must contain p = 1, 2, 3");
    HypothesisCirc h = hypothesis_circ(C.R, c.n, p3, r3);
    SpectralConstants sc{r3[0], r3[1], r3[2], C.R.alphas[c.n]};
    out.result["hypothesis"] = {{"s", h.s}, {"lambda", h.lambda}, {"p", h.p}, {"value", h.value}, {"holds", h.holds}, {"margin", h.margin}};
    out.result["sigma_exponent_clt"] = sigma_exponent(ScheduleKind::CircleClt, sc);
    out.result["sigma_exponent_be"] = sigma_exponent(ScheduleKind::CircleBe, sc);
    CircleGrowth cg = circle_product_growth(C.R, 2.0, r3[1], 5, C.R.n_max, 48);
    out.result["product_growth_normalized"] = nums(cg.normalized);
    out.checks.push_back(mk(9, "lambda^(2p) rho_p > 1", k1 > 0.0, "smallest margin " + g6(k1) + " over p = 1, 2, 3"));
    std::string vals;
    for (double v : h.value) vals += (vals.empty() ? "" : ", ") + g6(v);
    out.checks.push_back(mk(9, "condition on s lambda^6 evaluated", std::isfinite(h.margin),
                            std::string("holds = ") + (h.holds ? "true" : "false") + ", values [" + vals + "], margin " + g6(h.margin) +
                                ", s = " + g6(h.s)));
    return out;
}

Outcome run_circle_clt(const CircleCltConfig& c)
{
    CltConfig cc;
    cc.map = "circle";
    cc.ns.clear();
    auto Q = fibonacci(40);
    for (int m : c.fib_indices) cc.ns.push_back(Q.at(m));
    cc.noise = c.noise;
    cc.M = c.M;
    cc.schedule = ScheduleKind::CircleClt;
    cc.seed = c.seed;
    Outcome out = run_clt(cc);
    out.result["fib_indices"] = c.fib_indices;
    return out;
}

Outcome run_example2(const Example2Config& c)
{
    Outcome out;
    MapSpec f = AffineMap{2.0, 0.0};
    NoiseModel gauss, uni;
    gauss.family = NoiseFamily::Gaussian;
    double band = ks_band(c.M);
    Table t{"example2", {"noise", "n", "ks", "band"}, {}};
    double gauss_worst = 0.0, uni_last = 0.0, closed_err = 0.0;
    std::vector<double> w_last;
    for (long long n : c.ns) {
        EnsembleResult G = simulate(f, 0.0, n, c.sigma, gauss, c.M, c.seed);
        double kg = ks_distance(normalized_processes(G, Variant::W));
        gauss_worst = std::max(gauss_worst, kg);
        t.add_row({"gaussian", fmt(n), fmt(kg), fmt(band)});
        EnsembleResult U = simulate(f, 0.0, n, c.sigma, uni, c.M, c.seed);
        std::vector<double> wu = normalized_processes(U, Variant::W);
        double ku = ks_distance(wu);
        t.add_row({"uniform_pm1", fmt(n), fmt(ku), fmt(band)});
        // Closed form 3 / sqrt(1 - 4^-n) sum_j 2^-j xi_j on the same streams.
        double cn = 3.0 / std::sqrt(1.0 - std::pow(4.0, -static_cast<double>(n)));
        for (std::size_t i = 0; i < std::min<std::size_t>(c.M, 2000); ++i) {
            NoiseStream s(uni, c.seed, i);
            double acc = 0.0;
            for (long long j = 1; j <= n; ++j) acc += std::ldexp(s.next(), -static_cast<int>(j));
            closed_err = std::max(closed_err, std::abs(cn * acc - wu[i]));
        }
        if (n == c.ns.back()) {
            uni_last = ku;
            w_last = std::move(wu);
        }
    }
    out.tables.push_back(t);
    long long nl = c.ns.back();
    double cn = 3.0 / std::sqrt(1.0 - std::pow(4.0, -static_cast<double>(nl)));
    Table cf{"charfn", {"z", "empirical_re", "empirical_im", "product", "abs_error"}, {}};
    double cf_worst = 0.0;
    for (int i = 1; i <= 10; ++i) {
        double z = 0.5 * i;
        long double re = 0.0L, im = 0.0L;
        for (double w : w_last) {
            re += std::cos(z * w);
            im += std::sin(z * w);
        }
        std::complex<double> emp(static_cast<double>(re / w_last.size()), static_cast<double>(im / w_last.size()));
        double prod = 1.0;
        for (long long j = 1; j <= nl; ++j) {
            double a = cn * std::ldexp(z, -static_cast<int>(j));
            prod *= std::sin(a) / a;
        }
        double err = std::abs(emp - prod);
        cf_worst = std::max(cf_worst, err);
        cf.add_row({fmt(z), fmt(emp.real()), fmt(emp.imag()), fmt(prod), fmt(err)});
    }
    out.tables.push_back(cf);
    out.result["band"] = band;
    out.result["gaussian_worst_ks"] = gauss_worst;
    out.result["uniform_ks_last"] = uni_last;
    out.result["charfn_worst"] = cf_worst;
    out.result["closed_form_max_error"] = closed_err;
    out.result["M"] = c.M;
    out.checks.push_back(mk(8, "gaussian noise stays normal", gauss_worst < band,
                            "max KS " + g6(gauss_worst) + " < 1.63/sqrt(M) = " + g6(band)));
    out.checks.push_back(mk(8, "uniform noise breaks normality", uni_last > 3.0 * band,
                            "KS(n=" + std::to_string(nl) + ") = " + g6(uni_last) + " > 3 x band = " + g6(3.0 * band)));
    out.checks.push_back(mk(8, "characteristic function", cf_worst < 0.01,
                            "max |phi_emp - prod sin(c 2^-j z)/(c 2^-j z)| = " + g6(cf_worst) + " over 10 points (< 0.01)"));
    out.checks.push_back(mk(8, "closed form per sample", closed_err < 1e-12, "max |w - closed form| = " + g6(closed_err)));
    return out;
}

std::string render_report(const std::filesystem::path& dir)
{
    if (!std::filesystem::exists(dir / "manifest.json"))
        throw Error(ErrorKind::MissingManifest, "no manifest.json in " + dir.string());
    nlohmann::json man = read_json(dir / "manifest.json");
    nlohmann::json res = std::filesystem::exists(dir / "result.json") ? read_json(dir / "result.json") : nlohmann::json::object();
    std::ostringstream os;
    os << "# Run summary: " << man.value("command", std::string("?")) << "\n\n";
    os << "- version: " << man.value("version", std::string("?")) << "\n";
    os << "- seed: " << man.value("seed", 0ULL) << "\n";
    if (man.contains("config")) os << "- config: `" << man["config"].dump() << "`\n";
    os << "\n";
    if (res.contains("verdicts")) {
        os << "## Verdicts\n\n| verdict | result | margin |\n|---|---|---|\n";
        const auto& v = res["verdicts"];
        for (auto it = v.begin(); it != v.end(); ++it) {
            const std::string& key = it.key();
            if (key.size() < 3 || key.substr(key.size() - 3) != "_ok") continue;
            std::string base = key.substr(0, key.size() - 3);
            std::string margin = v.contains(base + "_margin") ? v[base + "_margin"].dump() : "";
            os << "| " << base << " | " << (it.value().get<bool>() ? "PASS" : "FAIL") << " | " << margin << " |\n";
        }
        os << "\n";
    }
    if (res.contains("checks") && !res["checks"].empty()) {
        os << "## Checks\n\n| criterion | check | result | detail |\n|---|---|---|---|\n";
        for (const auto& c : res["checks"])
            os << "| " << c["criterion"].get<int>() << " | " << c["name"].get<std::string>() << " | "
               << (c["pass"].get<bool>() ? "PASS" : "FAIL") << " | " << c["detail"].get<std::string>() << " |\n";
        os << "\n";
    }
    std::vector<std::string> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".csv") files.push_back(e.path().filename().string());
    std::sort(files.begin(), files.end());
    if (!files.empty()) {
        os << "## Data files\n\n";
        for (const auto& f : files) os << "- " << f << "\n";
    }
    return os.str();
}

} // namespace renoise
