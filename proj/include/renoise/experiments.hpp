#pragma once

#include "renoise/io.hpp"
#include "renoise/lyapunov.hpp"
#include "renoise/noise_sim.hpp"
#include "renoise/renorm_circle.hpp"
#include "renoise/renorm_pd.hpp"

#include "json.hpp"
#include <cstdint>
#include <string>
#include <vector>

namespace renoise {

struct Check {
    int criterion = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct Outcome {
    nlohmann::json result = nlohmann::json::object();
    std::vector<Table> tables;
    std::vector<Check> checks;
    double seconds = 0.0;

    bool all_pass() const;
    // Aggregate verdict of the checks tagged with one criterion; false when there are none.
    bool criterion_pass(int c) const;
};

nlohmann::json checks_json(const std::vector<Check>& checks);

// Fixed point g_k with its spectral radii, shared by several experiments.
struct PdContext {
    int k = 1;
    UnimodalMap g;
    double lambda = 0.0;
    double rho[5] = {0, 0, 0, 0, 0}; // unsigned radii at p = 0..4, N = 48
};
const PdContext& pd_context(int k = 1);

struct CircleContext {
    TunedMap tuned;
    FibRenorm R;
};
const CircleContext& circle_context(int depth = 32, int n_max = 14);

// Resolve a map by name: pd (1 - mu x^2 at the accumulation point), g1 (fixed point),
// rotation (x + golden mean), doubling (2x), circle (tuned critical lift).
MapSpec resolve_map(const std::string& name);

struct FixedPointConfig {
    int k = 1;
    int N = 30;
    double tol = 1e-12;
    int oracle_n = 13;
};
Outcome run_fixed_point(const FixedPointConfig& c);

struct SpectrumConfig {
    int k = 1;
    int N = 48;
    std::vector<double> p{1, 2, 3, 4};
};
Outcome run_spectrum(const SpectrumConfig& c);

struct ConvexityConfig {
    int k = 1;
    int N = 48;
    std::vector<double> p_grid{0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4};
};
Outcome run_convexity(const ConvexityConfig& c);

struct ProductGrowthConfig {
    int k = 1;
    int n_first = 5;
    int n_last = 13;
    int fit_first = 6;
    int N = 48;
};
Outcome run_product_growth(const ProductGrowthConfig& c);

struct LyapunovCurveConfig {
    std::string map = "g1";
    double x = 0.0;
    double p = 3.0;
    long long n_max = 1LL << 14;
    Schedule schedule = Schedule::PowersOf2;
    int cases = 200;
    int circle_cases = 50;
    long long case_n_max = 2000;
    std::uint64_t seed = 1;
};
Outcome run_lyapunov_curve(const LyapunovCurveConfig& c);

struct CltConfig {
    std::string map = "pd";
    double x0 = 0.0;
    std::vector<long long> ns{64, 256, 1024, 4096};
    NoiseFamily noise = NoiseFamily::UniformPm1;
    std::size_t M = 1000000;
    ScheduleKind schedule = ScheduleKind::PdClt;
    double sigma = -1.0; // fixed sigma when >= 0, otherwise the schedule
    std::uint64_t seed = 1;
    bool write_samples = false;
};
Outcome run_clt(const CltConfig& c);

struct BerryEsseenConfig {
    std::string map = "pd";
    std::vector<long long> ns{16, 64, 256, 1024, 4096};
    NoiseFamily noise = NoiseFamily::UniformPm1;
    std::size_t M = 200000;
    std::uint64_t seed = 1;
};
Outcome run_berry_esseen(const BerryEsseenConfig& c);

struct CircleTuneConfig {
    int depth = 32;
    int compare_depth = 26;
    int n_max = 14;
    int identity_n = 12;
    long long iters = 1000000;
};
Outcome run_circle_tune(const CircleTuneConfig& c);

struct CircleSpectrumConfig {
    int n = 12;
    int N = 64;
    std::vector<double> p_grid{1, 2, 3, 4};
    bool hat = false;
};
Outcome run_circle_spectrum(const CircleSpectrumConfig& c);

struct CircleCltConfig {
    std::vector<int> fib_indices{8, 10, 12, 14};
    NoiseFamily noise = NoiseFamily::UniformPm1;
    std::size_t M = 200000;
    std::uint64_t seed = 1;
};
Outcome run_circle_clt(const CircleCltConfig& c);

struct Example2Config {
    std::vector<long long> ns{1, 2, 5, 10, 20};
    std::size_t M = 100000;
    double sigma = 0.1;
    std::uint64_t seed = 1;
};
Outcome run_example2(const Example2Config& c);

// Markdown summary of a finished run directory (manifest.json + result.json).
std::string render_report(const std::filesystem::path& dir);

} // namespace renoise
