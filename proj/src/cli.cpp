#include "renoise/cli.hpp"
#include "renoise/error.hpp"
#include "renoise/experiments.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

#ifndef RENOISE_VERSION
#define RENOISE_VERSION "dev"
#endif

namespace renoise {

std::vector<double> parse_grid(const std::string& s)
{
    std::vector<double> out;
    try {
        if (s.find(':') != std::string::npos) {
            std::vector<double> parts;
            std::stringstream ss(s);
            std::string item;
            while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
            if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) throw Error(ErrorKind::Config, "bad range '" + s + "'");
            long long count = std::llround(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
            for (long long i = 0; i <= count; ++i) out.push_back(parts[0] + i * parts[2]);
        } else {
            std::stringstream ss(s);
            std::string item;
            while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
        }
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::Config, "cannot parse grid '" + s + "'");
    }
    if (out.empty()) throw Error(ErrorKind::Config, "empty grid '" + s + "'");
    return out;
}

std::vector<long long> parse_int_list(const std::string& s)
{
    std::vector<long long> out;
    for (double v : parse_grid(s)) {
        if (v != std::floor(v) || v < 1) throw Error(ErrorKind::Config, "expected positive integers in '" + s + "'");
        out.push_back(static_cast<long long>(v));
    }
    return out;
}

namespace {

Schedule parse_schedule(const std::string& s)
{
    if (s == "all_n") return Schedule::AllN;
    if (s == "powers_of_2") return Schedule::PowersOf2;
    if (s == "fibonacci") return Schedule::Fibonacci;
    throw Error(ErrorKind::Config, "unknown schedule '" + s + "'");
}

ScheduleKind parse_kind(const std::string& s)
{
    for (auto k : {ScheduleKind::PdClt, ScheduleKind::PdBe, ScheduleKind::CircleClt, ScheduleKind::CircleBe})
        if (s == schedule_kind_name(k)) return k;
    throw Error(ErrorKind::Config, "unknown sigma schedule '" + s + "'");
}

nlohmann::json config_json(const CLI::App* sub)
{
    nlohmann::json cfg = nlohmann::json::object();
    for (const CLI::Option* o : sub->get_options()) {
        std::string name = o->get_single_name();
        if (name == "help" || name == "out" || name == "seed" || name == "check") continue;
        if (o->get_type_size() == 0) {
            cfg[name] = o->count() > 0;
            continue;
        }
        const auto& r = o->results();
        if (!r.empty()) {
            std::string joined;
            for (const auto& v : r) joined += (joined.empty() ? "" : ",") + v;
            cfg[name] = joined;
        } else {
            cfg[name] = o->get_default_str();
        }
    }
    return cfg;
}

struct Common {
    std::string out;
    std::uint64_t seed = 1;
    bool check = false;
};

void add_common(CLI::App* sub, Common& c, const std::string& name)
{
    c.out = "runs/" + name;
    sub->add_option("--out", c.out, "output directory")->capture_default_str();
    sub->add_option("--seed", c.seed, "master random seed")->capture_default_str();
    sub->add_flag("--check", c.check, "exit with status 4 when an acceptance check fails");
}

int finish(const std::string& command, const CLI::App* sub, const Common& c, Outcome out, double seconds)
{
    std::filesystem::path dir(c.out);
    std::filesystem::create_directories(dir);
    nlohmann::json result = out.result;
    result["checks"] = checks_json(out.checks);
    write_json(dir / "result.json", result);
    for (const auto& t : out.tables) write_csv(dir, t);
    nlohmann::json man = {{"command", command}, {"config", config_json(sub)}, {"seed", c.seed}, {"version", RENOISE_VERSION}};
    write_json(dir / "manifest.json", man);
    for (const auto& ch : out.checks)
        std::cout << (ch.pass ? "PASS" : "FAIL") << "  [" << ch.criterion << "] " << ch.name << ": " << ch.detail << "\n";
    std::cerr << command << ": wrote " << dir.string() << " in " << seconds << " s\n";
    if (c.check && !out.all_pass()) return kExitCheck;
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv)
{
    CLI::App app{"renoise: weak-noise renormalization lab for critical one-dimensional maps"};
    app.set_config("--config", "", "TOML configuration file; flags override its values");
    app.require_subcommand(1);

    std::function<Outcome()> job;
    std::string command;
    CLI::App* active = nullptr;
    Common common;

    auto sub = [&](const std::string& name, const std::string& help) {
        CLI::App* s = app.add_subcommand(name, help);
        return s;
    };

    FixedPointConfig fp;
    auto* s_fp = sub("fixed-point", "solve the period-doubling fixed point g_k");
    s_fp->add_option("--k", fp.k, "half the order of the critical point")->capture_default_str();
    s_fp->add_option("--N", fp.N, "Chebyshev degree")->capture_default_str();
    s_fp->add_option("--tol", fp.tol, "Newton tolerance")->capture_default_str();
    s_fp->add_option("--oracle-n", fp.oracle_n, "superstable periods 2^n used by the oracle")->capture_default_str();

    SpectrumConfig sp;
    std::string sp_p = "1,2,3,4";
    auto* s_sp = sub("spectrum", "spectral radii of the Lindeberg-Lyapunov operators at g_k");
    s_sp->add_option("--k", sp.k)->capture_default_str();
    s_sp->add_option("--N", sp.N)->capture_default_str();
    s_sp->add_option("--p", sp_p, "exponents, list or a:b:step")->capture_default_str();

    ConvexityConfig cv;
    std::string cv_grid = "0.5:4:0.5";
    auto* s_cv = sub("convexity", "convexity of p -> rho_p and the exponent gamma");
    s_cv->add_option("--k", cv.k)->capture_default_str();
    s_cv->add_option("--N", cv.N)->capture_default_str();
    s_cv->add_option("--p-grid", cv_grid)->capture_default_str();

    ProductGrowthConfig pg;
    auto* s_pg = sub("product-growth", "growth of Lambda_p(0, 2^n) against the spectral radii");
    s_pg->add_option("--k", pg.k)->capture_default_str();
    s_pg->add_option("--n-first", pg.n_first)->capture_default_str();
    s_pg->add_option("--n-last", pg.n_last)->capture_default_str();
    s_pg->add_option("--fit-first", pg.fit_first)->capture_default_str();
    s_pg->add_option("--N", pg.N)->capture_default_str();

    LyapunovCurveConfig lc;
    std::string lc_sched = "powers_of_2";
    auto* s_lc = sub("lyapunov-curve", "Lyapunov ratio curves and the block-decomposition oracle");
    s_lc->add_option("--map", lc.map, "pd, g1, rotation, doubling, circle")->capture_default_str();
    s_lc->add_option("--x", lc.x)->capture_default_str();
    s_lc->add_option("--p", lc.p)->capture_default_str();
    s_lc->add_option("--n-max", lc.n_max)->capture_default_str();
    s_lc->add_option("--schedule", lc_sched, "all_n, powers_of_2, fibonacci")->capture_default_str();
    s_lc->add_option("--cases", lc.cases)->capture_default_str();
    s_lc->add_option("--circle-cases", lc.circle_cases)->capture_default_str();

    CltConfig cl;
    std::string cl_noise = "uniform_pm1", cl_kind = "pd_clt", cl_ns;
    long long cl_n = 4096;
    auto* s_cl = sub("clt", "Monte Carlo central limit theorem for noisy orbits");
    s_cl->add_option("--map", cl.map)->capture_default_str();
    s_cl->add_option("--x0", cl.x0)->capture_default_str();
    s_cl->add_option("--n", cl_n, "largest time; the series is 64, 256, ... up to it")->capture_default_str();
    s_cl->add_option("--ns", cl_ns, "explicit list of times");
    s_cl->add_option("--noise", cl_noise, "uniform_pm1, gaussian, rademacher, truncated_gaussian")->capture_default_str();
    s_cl->add_option("--M", cl.M, "samples")->capture_default_str();
    s_cl->add_option("--schedule", cl_kind, "pd_clt, pd_be, circle_clt, circle_be")->capture_default_str();
    s_cl->add_option("--sigma", cl.sigma, "fixed noise level (overrides the schedule)");
    s_cl->add_flag("--samples", cl.write_samples, "write per-sample endpoints for the largest time");

    BerryEsseenConfig be;
    std::string be_ns = "16,64,256,1024,4096", be_noise = "uniform_pm1";
    auto* s_be = sub("berry-esseen", "KS decay rate against the Lambda_3 / Lambda_2^(3/2) bound");
    s_be->add_option("--map", be.map)->capture_default_str();
    s_be->add_option("--ns", be_ns)->capture_default_str();
    s_be->add_option("--noise", be_noise)->capture_default_str();
    s_be->add_option("--M", be.M)->capture_default_str();

    CircleTuneConfig ct;
    auto* s_ct = sub("circle-tune", "tune the critical circle map to golden rotation and renormalize");
    s_ct->add_option("--depth", ct.depth)->capture_default_str();
    s_ct->add_option("--compare-depth", ct.compare_depth)->capture_default_str();
    s_ct->add_option("--n-max", ct.n_max)->capture_default_str();
    s_ct->add_option("--identity-n", ct.identity_n)->capture_default_str();
    s_ct->add_option("--iters", ct.iters)->capture_default_str();

    CircleSpectrumConfig cs;
    std::string cs_grid = "1,2,3,4";
    auto* s_cs = sub("circle-spectrum", "block transfer operators of the Fibonacci renormalization");
    s_cs->add_option("--n", cs.n)->capture_default_str();
    s_cs->add_option("--N", cs.N)->capture_default_str();
    s_cs->add_option("--p-grid", cs_grid)->capture_default_str();
    s_cs->add_flag("--hat", cs.hat, "use the alternative block operator");

    CircleCltConfig cc;
    std::string cc_fib = "8,10,12,14", cc_noise = "uniform_pm1";
    auto* s_cc = sub("circle-clt", "Monte Carlo CLT at Fibonacci times for the tuned circle map");
    s_cc->add_option("--fib", cc_fib, "Fibonacci indices")->capture_default_str();
    s_cc->add_option("--noise", cc_noise)->capture_default_str();
    s_cc->add_option("--M", cc.M)->capture_default_str();

    Example2Config ex;
    std::string ex_ns = "1,2,5,10,20";
    auto* s_ex = sub("example2", "the doubling map 2x with gaussian and uniform noise");
    s_ex->add_option("--ns", ex_ns)->capture_default_str();
    s_ex->add_option("--M", ex.M)->capture_default_str();
    s_ex->add_option("--sigma", ex.sigma)->capture_default_str();

    std::string report_dir = "runs";
    auto* s_rp = sub("report", "summarize a finished run directory");
    s_rp->add_option("--out", report_dir, "run directory")->capture_default_str();

    for (auto* s : {s_fp, s_sp, s_cv, s_pg, s_lc, s_cl, s_be, s_ct, s_cs, s_cc, s_ex})
        s->callback([&, s] {
            active = s;
            command = s->get_name();
        });
    for (auto* s : {s_fp, s_sp, s_cv, s_pg, s_lc, s_cl, s_be, s_ct, s_cs, s_cc, s_ex}) add_common(s, common, s->get_name());

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (s_rp->parsed()) {
            std::string md = render_report(report_dir);
            write_text(std::filesystem::path(report_dir) / "summary.md", md);
            std::cout << md;
            return kExitOk;
        }
        if (!active) return kExitConfig;
        if (active == s_sp) sp.p = parse_grid(sp_p);
        if (active == s_cv) cv.p_grid = parse_grid(cv_grid);
        if (active == s_lc) {
            lc.schedule = parse_schedule(lc_sched);
            lc.seed = common.seed;
        }
        if (active == s_cl) {
            cl.noise = parse_noise(cl_noise);
            cl.schedule = parse_kind(cl_kind);
            cl.seed = common.seed;
            if (!cl_ns.empty()) {
                cl.ns = parse_int_list(cl_ns);
            } else {
                cl.ns.clear();
                for (long long n = 64; n <= cl_n; n *= 4) cl.ns.push_back(n);
                if (cl.ns.empty()) cl.ns.push_back(cl_n);
            }
        }
        if (active == s_be) {
            be.ns = parse_int_list(be_ns);
            be.noise = parse_noise(be_noise);
            be.seed = common.seed;
        }
        if (active == s_cc) {
            cc.fib_indices.clear();
            for (long long v : parse_int_list(cc_fib)) cc.fib_indices.push_back(static_cast<int>(v));
            cc.noise = parse_noise(cc_noise);
            cc.seed = common.seed;
        }
        if (active == s_ex) {
            ex.ns = parse_int_list(ex_ns);
            ex.seed = common.seed;
        }
        auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        if (active == s_fp) out = run_fixed_point(fp);
        else if (active == s_sp) out = run_spectrum(sp);
        else if (active == s_cv) out = run_convexity(cv);
        else if (active == s_pg) out = run_product_growth(pg);
        else if (active == s_lc) out = run_lyapunov_curve(lc);
        else if (active == s_cl) out = run_clt(cl);
        else if (active == s_be) out = run_berry_esseen(be);
        else if (active == s_ct) out = run_circle_tune(ct);
        else if (active == s_cs) out = run_circle_spectrum(cs);
        else if (active == s_cc) out = run_circle_clt(cc);
        else if (active == s_ex) out = run_example2(ex);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return finish(command, active, common, std::move(out), secs);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return (e.kind() == ErrorKind::Config || e.kind() == ErrorKind::MissingManifest) ? kExitConfig : kExitNumerical;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int run_cli(const std::vector<std::string>& args)
{
    std::vector<const char*> argv;
    argv.push_back("renoise");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

} // namespace renoise
