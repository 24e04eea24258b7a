#include "renoise/error.hpp"
#include "renoise/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

using namespace renoise;

namespace {

constexpr double kFixedPointSeconds = 10.0;
constexpr double kSpectrumSeconds = 60.0;
constexpr double kCltSeconds = 600.0;
constexpr double kCircleSeconds = 480.0;

struct Criterion {
    int id;
    std::string name;
    double budget; // seconds, <= 0 when untimed
    std::vector<std::function<Outcome()>> runs;
};

std::string fmt_seconds(double s)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f s", s);
    return buf;
}

} // namespace

int main()
{
    std::setvbuf(stdout, nullptr, _IOLBF, 0);

    CltConfig pd_clt;
    pd_clt.M = 1000000;

    CltConfig rotation;
    rotation.map = "rotation";
    rotation.noise = NoiseFamily::Rademacher;
    rotation.sigma = 0.01;
    rotation.ns = {16, 64, 256, 1024, 4096};
    rotation.M = 200000;

    std::vector<Criterion> criteria = {
        {1, "fixed point", kFixedPointSeconds, {[] { return run_fixed_point({}); }}},
        {2, "spectral bounds", kSpectrumSeconds, {[] { return run_spectrum({}); }}},
        {3, "gamma", 0.0, {[] { return run_convexity({}); }}},
        {4, "convexity", 0.0, {[] { return run_convexity({}); }}},
        {5, "scaling limit", 0.0, {[] { return run_product_growth({}); }}},
        {6, "block decomposition", 0.0, {[] { return run_lyapunov_curve({}); }}},
        {7, "clt monte carlo", kCltSeconds, {[&] { return run_clt(pd_clt); }}},
        {8, "example 2", 0.0, {[] { return run_example2({}); }}},
        {9, "circle pipeline", kCircleSeconds,
         {[] { return run_circle_tune({}); }, [] { return run_circle_spectrum({}); }, [] { return run_circle_clt({}); }}},
        {10, "rotation baseline", 0.0, {[&] { return run_clt(rotation); }}},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        std::vector<Check> checks;
        std::string error;
        auto t0 = std::chrono::steady_clock::now();
        for (const auto& run : c.runs) {
            try {
                Outcome o = run();
                for (auto& ch : o.checks)
                    if (ch.criterion == c.id) checks.push_back(ch);
            } catch (const Error& e) {
                error = e.what();
            }
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget > 0.0)
            checks.push_back({c.id, "runtime", secs < c.budget, fmt_seconds(secs) + " (< " + fmt_seconds(c.budget) + ")"});

        bool pass = error.empty() && !checks.empty();
        std::string failing;
        for (const auto& ch : checks)
            if (!ch.pass) {
                pass = false;
                failing += (failing.empty() ? "" : "; ") + ch.name;
            }
        if (!pass) ++failed;

        std::cout << (pass ? "PASS " : "FAIL ") << c.id << " " << c.name << ": ";
        if (!error.empty()) std::cout << "error " << error;
        else if (pass) std::cout << checks.size() << " checks ok, " << fmt_seconds(secs);
        else std::cout << "failed " << failing;
        std::cout << "\n";
        for (const auto& ch : checks) std::cout << "    " << (ch.pass ? "ok  " : "bad ") << ch.name << ": " << ch.detail << "\n";
    }
    std::cout << (10 - failed) << " of 10 criteria pass\n";
    return failed == 0 ? 0 : 1;
}
