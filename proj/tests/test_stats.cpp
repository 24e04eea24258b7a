#include "doctest.h"

#include "renoise/stats.hpp"

#include <cmath>
#include <random>

using namespace renoise;

namespace {

double normal_quantile(double u)
{
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (std_normal_cdf(mid) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_SUITE("stats")
{
    TEST_CASE("normal distribution function")
    {
        CHECK(std_normal_cdf(0.0) == 0.5);
        CHECK(std::abs(std_normal_cdf(1.959963984540054) - 0.975) < 1e-15);
        CHECK(std::abs(std_normal_cdf(-8.0) - 6.22096057427178e-16) < 1e-28);
    }

    TEST_CASE("single atom")
    {
        CHECK(ks_distance({0.0}) == 0.5);
    }

    TEST_CASE("stratified quantiles")
    {
        const int N = 1000;
        std::vector<double> s;
        for (int i = 1; i <= N; ++i) s.push_back(normal_quantile((i - 0.5) / N));
        CHECK(ks_distance(s) <= 1.0 / (2 * N) + 1e-9);
    }

    TEST_CASE("normal sample sits inside the band")
    {
        const std::size_t M = 100000;
        std::mt19937_64 rng(2024);
        std::normal_distribution<double> nd;
        std::vector<double> s(M);
        for (double& v : s) v = nd(rng);
        CHECK(ks_distance(s) < ks_band(M));
        CHECK(ks_band(M) == doctest::Approx(1.63 / std::sqrt(1e5)));
    }

    TEST_CASE("k-statistics")
    {
        KStats c = k_statistics(std::vector<double>(50, 3.25));
        CHECK(c.k2 == 0.0);
        CHECK(c.k3 == 0.0);
        CHECK(c.k4 == 0.0);

        const std::size_t M = 100000;
        std::vector<double> r(M);
        for (std::size_t i = 0; i < M; ++i) r[i] = i % 2 ? 1.0 : -1.0;
        KStats k = k_statistics(r);
        CHECK(k.k2 == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(std::abs(k.k3) < 1e-12);
        CHECK(k.k4 == doctest::Approx(-2.0).epsilon(1e-3));
        CHECK(k.excess_kurtosis() == doctest::Approx(-2.0).epsilon(1e-3));
    }

    TEST_CASE("k-statistics are unbiased on a small sample")
    {
        KStats k = k_statistics({1.0, 2.0, 4.0, 8.0});
        CHECK(k.k2 == doctest::Approx(115.0 / 12.0).epsilon(1e-14));
        CHECK(k.k3 == doctest::Approx(33.75).epsilon(1e-14));
        CHECK(k.k4 == doctest::Approx(835.0 / 12.0).epsilon(1e-14));
        CHECK(k.n == 4);
    }

    TEST_CASE("rate fit")
    {
        std::vector<double> n{16, 64, 256, 1024};
        std::vector<double> rhs{0.2, 0.1, 0.05, 0.025};
        RateFit f = be_rate_fit(n, rhs, n, rhs);
        CHECK(f.ks_slope == doctest::Approx(f.rhs_slope));
        CHECK(f.rhs_slope == doctest::Approx(-0.5));
        CHECK(f.ok);
        RateFit slow = be_rate_fit(n, {0.2, 0.19, 0.18, 0.17}, n, rhs);
        CHECK_FALSE(slow.ok);
    }

    TEST_CASE("report serialization")
    {
        GofReport g = gof_report({-1.0, 0.0, 1.0, 2.0}, 0.3);
        auto j = to_json(g);
        CHECK(j.contains("ks"));
        CHECK(j["n_samples"] == 4);
    }
}
