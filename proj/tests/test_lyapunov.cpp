#include "doctest.h"

#include "renoise/error.hpp"
#include "renoise/experiments.hpp"
#include "renoise/lyapunov.hpp"

#include <cmath>

using namespace renoise;

namespace {

constexpr double kRho2 = 43.811644;
constexpr double kRho3 = 254.94071;

MapSpec g1_map() { return pd_context(1).g.as_map(); }

double geometric(double base, long long n, double p)
{
    return (std::pow(base, n * p) - 1.0) / (std::pow(base, p) - 1.0);
}

} // namespace

TEST_SUITE("lyapunov")
{
    TEST_CASE("translation has unit derivatives")
    {
        MapSpec f = AffineMap{1.0, 0.3};
        for (long long n : {1LL, 7LL, 100LL}) {
            for (double p : {1.0, 2.5, 4.0}) {
                LyapunovEval e = lambda_direct(f, 0.1, n, p);
                CHECK(e.value() == doctest::Approx(static_cast<double>(n)).epsilon(1e-13));
                CHECK(e.hat() == doctest::Approx(static_cast<double>(n + 1)).epsilon(1e-13));
            }
        }
    }

    TEST_CASE("doubling map sums are geometric")
    {
        MapSpec f = AffineMap{2.0, 0.0};
        for (long long n : {1LL, 5LL, 30LL})
            for (double p : {1.0, 2.0, 3.5})
                CHECK(lambda_direct(f, 0.0, n, p).value() == doctest::Approx(geometric(2.0, n, p)).epsilon(1e-13));
        CHECK(lambda_direct(f, 0.0, 0, 2.0).value() == 0.0);
    }

    TEST_CASE("series matches direct evaluation")
    {
        MapSpec f = g1_map();
        auto s = lambda_series(f, 0.2, 300, 2.0);
        for (long long n : {1LL, 17LL, 300LL}) CHECK(std::abs(s[n] - lambda_direct(f, 0.2, n, 2.0).log_value) < 1e-12);
    }

    TEST_CASE("chain rule identity")
    {
        CHECK(chain_rule_identity_check(g1_map(), 0.3, 40, 0, 2.0).unsigned_rel == 0.0);
        CHECK(chain_rule_identity_check(AffineMap{2.0, 0.0}, 0.0, 4, 1, 3.0).unsigned_rel < 1e-15);
        ChainResidual r = chain_rule_identity_check(g1_map(), 0.0, 64, 64, 3.0);
        CHECK(r.unsigned_rel < 1e-10);
        CHECK(r.signed_rel < 1e-10);
    }

    TEST_CASE("binary and Zeckendorf decompositions")
    {
        CHECK(decompose(5, Scheme::Binary) == std::vector<int>{2, 0});
        CHECK(decompose(12, Scheme::Zeckendorf) == std::vector<int>{6, 4, 2});
        CHECK(block_length(6, Scheme::Zeckendorf) == 8);
        for (long long n = 1; n <= 10000; ++n) {
            auto b = decompose(n, Scheme::Binary);
            CHECK(static_cast<int>(b.size()) - 1 <= b.front());
            auto z = decompose(n, Scheme::Zeckendorf);
            long long sum = 0;
            for (std::size_t i = 0; i < z.size(); ++i) {
                sum += block_length(z[i], Scheme::Zeckendorf);
                if (i > 0 && z[i - 1] - z[i] < 2) FAIL("Zeckendorf gap below 2 at n = " << n);
            }
            if (sum != n) FAIL("Zeckendorf sum mismatch at n = " << n);
            CHECK(static_cast<int>(z.size()) - 1 <= z.front());
        }
    }

    TEST_CASE("block reconstruction")
    {
        BlockDecomposition d2 = lambda_blocks(AffineMap{2.0, 0.0}, 0.0, 5, 2.0, Scheme::Binary);
        CHECK(std::exp(d2.log_total) == doctest::Approx(geometric(2.0, 5, 2.0)).epsilon(1e-13));

        BlockDecomposition g = lambda_blocks(g1_map(), 0.0, 100, 2.0, Scheme::Binary);
        CHECK(g.exponents == std::vector<int>{6, 5, 2});
        CHECK(g.rel_error < 1e-9);

        MapSpec circle = CircleLift{circle_context().tuned.omega};
        BlockDecomposition c = lambda_blocks(circle, 0.0, 12, 2.0, Scheme::Zeckendorf);
        CHECK(c.rel_error < 1e-9);
    }

    TEST_CASE("hat is non-decreasing and dominates")
    {
        MapSpec f = g1_map();
        double prev = -INFINITY;
        for (long long n = 1; n <= 200; n += 7) {
            LyapunovEval e = lambda_direct(f, 0.15, n, 1.0);
            CHECK(e.log_hat >= prev);
            CHECK(e.log_hat >= e.log_value - 1e-12);
            CHECK(0.5 * lambda_direct(f, 0.15, n, 2.0).log_value <= e.log_value + 1e-12);
            prev = e.log_hat;
        }
    }

    TEST_CASE("ratio curve for the translation")
    {
        RatioCurve c = lyapunov_ratio_curve(AffineMap{1.0, 0.2}, 0.0, 3.0, 1 << 12, Schedule::PowersOf2);
        for (const auto& pt : c.points) CHECK(pt.ratio_p == doctest::Approx(std::pow(pt.n, -0.5)).epsilon(1e-12));
        CHECK(std::abs(c.log2n_slope + 0.5) < 1e-9);
    }

    TEST_CASE("ratio curve for the doubling map does not decay")
    {
        RatioCurve c = lyapunov_ratio_curve(AffineMap{2.0, 0.0}, 0.0, 3.0, 40, Schedule::AllN);
        double target = std::pow(3.0, 1.5) / 7.0;
        CHECK(c.points.back().ratio_p == doctest::Approx(target).epsilon(1e-6));
    }

    TEST_CASE("ratio curve at g1 decays at the spectral rate")
    {
        RatioCurve c = lyapunov_ratio_curve(g1_map(), 0.0, 3.0, 1 << 13, Schedule::PowersOf2);
        double target = kRho3 / std::pow(kRho2, 1.5);
        CHECK(std::abs(c.step_factor / target - 1.0) < 0.10);
    }

    TEST_CASE("Lambda_2 at 0 grows like (lambda^2 rho_2)^n")
    {
        const double lam = pd_context(1).lambda;
        for (int n : {6, 8, 10, 12}) {
            LyapunovEval e = lambda_direct(g1_map(), 0.0, 1LL << n, 2.0);
            double normalized = std::exp(e.log_value - n * std::log(lam * lam * kRho2));
            CHECK(std::abs(normalized - 1.04128) < 1e-4);
        }
    }

    TEST_CASE("growth lemmas hold on random cases")
    {
        const PdContext& pd = pd_context(1);
        SandwichReport a = growth_checks_pd(pd.g.as_map(), pd.lambda, 100, 3);
        CHECK(a.rel1_violations == 0);
        CHECK(a.rel2_violations == 0);
        SandwichReport b = growth_checks_circle(circle_context().R, 12, 50, 3);
        CHECK(b.rel1_violations == 0);
        CHECK(b.rel2_violations == 0);
    }

    TEST_CASE("orbit leaving the interval is reported")
    {
        try {
            lambda_direct(QuadraticMap{}, 1.5, 10, 2.0);
            FAIL("expected DomainEscape");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DomainEscape);
        }
    }
}
