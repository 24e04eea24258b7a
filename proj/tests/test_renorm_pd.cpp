#include "doctest.h"

#include "renoise/error.hpp"
#include "renoise/renorm_pd.hpp"

#include <cmath>

using namespace renoise;

namespace {

constexpr double kLambda1 = -0.399535280523;
constexpr double kMuInf = 1.401155189092051;

const UnimodalMap& g1()
{
    static const UnimodalMap g = solve_fixed_point(1, 30, default_seed(1), 1e-12);
    return g;
}

} // namespace

TEST_SUITE("renorm_pd")
{
    TEST_CASE("fixed point for k = 1")
    {
        const UnimodalMap& g = g1();
        CHECK(g.check_invariants().empty());
        CHECK(fixed_point_residual(g) < 1e-10);
        CHECK(std::abs(g.lambda() - kLambda1) < 1e-11);
        CHECK(g.f(1.0) == g.lambda());
    }

    TEST_CASE("fixed point agrees with superstable accumulation")
    {
        SuperstableData s = superstable_accumulation(13);
        CHECK(std::abs(s.mu_inf - kMuInf) < 1e-9);
        CHECK(std::abs(g1().lambda() + 1.0 / s.alpha) < 1e-7);
        for (std::size_t i = 1; i < s.mu.size(); ++i) CHECK(s.mu[i] > s.mu[i - 1]);
    }

    TEST_CASE("Feigenbaum constants for k = 1")
    {
        FeigenbaumConstants c = feigenbaum_constants(g1());
        CHECK(std::abs(c.gprime_at_1 * c.lambda - 1.0) < 1e-8);
        CHECK(c.b_f > std::abs(c.lambda));
        CHECK(c.b_f < 1.0);
    }

    TEST_CASE("Feigenbaum identity for k = 2")
    {
        UnimodalMap g2 = solve_fixed_point(2, 30, default_seed(2), 1e-11);
        FeigenbaumConstants c = feigenbaum_constants(g2);
        CHECK(std::abs(c.gprime_at_1 * std::pow(c.lambda, 3) - 1.0) < 1e-6);
        CHECK(c.lambda < kLambda1);
    }

    TEST_CASE("renormalization normalizes at the critical point")
    {
        for (double mu : {1.38, 1.40, kMuInf, 1.41}) {
            UnimodalMap Tf = renormalize(UnimodalMap::quadratic(mu), 30);
            CHECK(std::abs(Tf.f(0.0) - 1.0) < 1e-13);
        }
        CHECK(std::abs(renormalize(g1(), 30).f(0.0) - 1.0) < 1e-13);
    }

    TEST_CASE("renormalized quadratic matches direct composition")
    {
        const double mu = 1.401155189;
        const double lam = 1.0 - mu;
        UnimodalMap Tf = renormalize(UnimodalMap::quadratic(mu), 30);
        auto q = [&](double x) { return 1.0 - mu * x * x; };
        for (int i = 0; i < 50; ++i) {
            double x = -1.0 + 2.0 * i / 49.0;
            double direct = q(q(lam * x)) / lam;
            CHECK(std::abs(Tf.f(x) - direct) < 1e-12);
        }
        CHECK(std::abs(Tf.lambda() - Tf.f(1.0)) < 1e-15);
    }

    TEST_CASE("fixed point is stable under re-application")
    {
        CHECK(sup_distance(renormalize(g1(), 30), g1()) < 1e-11);
    }

    TEST_CASE("Gamma_n equals lambda^n at the fixed point")
    {
        RenormTrajectory tr = gamma_sequence(g1(), 12, 30);
        const double lam = g1().lambda();
        CHECK(std::abs(tr.gammas_direct[0] - lam) < 1e-15);
        for (int n = 1; n <= 12; ++n) {
            // Rounding along the 2^n-step orbit grows like (|lambda| rho_1)^n.
            double tol = n <= 10 ? 1e-8 : 5e-7;
            CHECK(std::abs(tr.gammas_direct[n - 1] / std::pow(lam, n) - 1.0) < tol);
            CHECK(std::signbit(tr.gammas_direct[n - 1]) == (n % 2 == 1));
        }
    }

    TEST_CASE("quadratic map converges to g1 under renormalization")
    {
        RenormTrajectory tr = gamma_sequence(UnimodalMap::quadratic(kMuInf), 9, 30);
        CHECK(tr.rate > 0.0);
        CHECK(tr.rate < 1.0);
        double prev = INFINITY;
        for (int n = 1; n <= 8; ++n) {
            double d = sup_distance(tr.maps[n], g1());
            CHECK(d < prev);
            prev = d;
        }
        for (std::size_t n = 0; n < tr.gammas_direct.size(); ++n)
            CHECK(std::signbit(tr.gammas_direct[n]) == (n % 2 == 0));
    }

    TEST_CASE("non-renormalizable map is rejected")
    {
        try {
            renormalize(UnimodalMap::quadratic(1.2), 20);
            FAIL("expected NotRenormalizable");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NotRenormalizable);
        }
    }

    TEST_CASE("gamma sequence depth is bounded")
    {
        CHECK_THROWS_AS(gamma_sequence(g1(), 21), Error);
    }
}
