#include "doctest.h"

#include "renoise/error.hpp"
#include "renoise/renorm_circle.hpp"

#include <cmath>

using namespace renoise;

namespace {

constexpr double kOmegaStar = 0.6066610634701121;

struct Tuned {
    TunedMap tuned;
    CircleLift F;
    FibRenorm R;
};

const Tuned& tuned()
{
    static const Tuned t = [] {
        Tuned x;
        x.tuned = tune_to_golden(CircleFamily::Critical, 32);
        x.F = CircleLift{x.tuned.omega};
        x.R = fib_renormalize(x.F, 14);
        return x;
    }();
    return t;
}

// Independent tuning: bisection on the orbit-average rotation number.
double bisect_rotation(long long iters, int steps)
{
    double lo = 0.55, hi = 0.65;
    for (int i = 0; i < steps; ++i) {
        double mid = 0.5 * (lo + hi);
        double rho = rotation_number(CircleLift{mid}, iters).value;
        (rho < kGolden ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_SUITE("renorm_circle")
{
    TEST_CASE("Fibonacci convention")
    {
        auto Q = fibonacci(14);
        CHECK(Q[0] == 0);
        CHECK(Q[1] == 1);
        CHECK(Q[2] == 1);
        CHECK(Q[3] == 2);
        CHECK(Q[14] == 377);
    }

    TEST_CASE("rotation number of simple members")
    {
        for (double a : {0.1, 0.37, kGolden})
            CHECK(std::abs(rotation_number(circle_member(CircleFamily::Rigid, a), 1000000).value - a) < 1e-12);
        CHECK(std::abs(rotation_number(circle_member(CircleFamily::Critical, 0.0), 100000).value) < 1e-15);
    }

    TEST_CASE("rigid family tunes to the golden mean")
    {
        TunedMap t = tune_to_golden(CircleFamily::Rigid, 32, 1e-12);
        CHECK(std::abs(t.omega - kGolden) < 1e-11);
        CHECK(std::holds_alternative<AffineMap>(circle_member(CircleFamily::Rigid, t.omega)));
    }

    TEST_CASE("critical family tunes to golden rotation")
    {
        const Tuned& t = tuned();
        CHECK(t.tuned.hi - t.tuned.lo <= 1e-12);
        CHECK(std::abs(t.tuned.omega - kOmegaStar) < 1e-11);
        CHECK(std::abs(rotation_number(t.F, 1000000).value - kGolden) < 1e-9);
        RotationEstimate conv = rotation_number_convergents(t.F, 30);
        CHECK(std::abs(conv.value - rotation_number(t.F, 1000000).value) < 1e-8);
    }

    TEST_CASE("tuning agrees with direct rotation-number bisection")
    {
        CHECK(std::abs(bisect_rotation(100000, 22) - tuned().tuned.omega) < 1e-5);
    }

    TEST_CASE("renormalized heights alternate in sign")
    {
        const FibRenorm& R = tuned().R;
        for (int n = 2; n <= R.n_max; ++n) {
            CHECK(R.lambdas[n] * R.lambdas[n - 1] < 0.0);
            CHECK(std::pow(-1.0, n - 1) * R.lambdas[n] > 0.0);
        }
    }

    TEST_CASE("scaling ratios converge")
    {
        const FibRenorm& R = tuned().R;
        double prev = INFINITY;
        for (int n = 6; n < R.n_max; ++n) {
            double d = std::abs(R.alphas[n + 1] - R.alphas[n]);
            CHECK(d < prev);
            prev = d;
        }
        CHECK(std::abs(R.alphas[R.n_max] + 0.776) < 2e-3);

        FibRenorm shallow = fib_renormalize(CircleLift{tune_to_golden(CircleFamily::Critical, 26, 1e-10).omega}, 12);
        CHECK(std::abs(shallow.alphas[12] - R.alphas[12]) < 1e-3);
        CHECK(std::abs(shallow.alphas[10] - R.alphas[10]) < 1e-3);
    }

    TEST_CASE("Fibonacci recurrence of the iterates")
    {
        const CircleLift& F = tuned().F;
        MapSpec M = F;
        for (int n : {5, 8, 11}) {
            for (int i = 0; i < 20; ++i) {
                double x = -0.5 + i / 19.0;
                double lhs = fib_iterate(M, x, n);
                double rhs = fib_iterate(M, fib_iterate(M, x, n - 2), n - 1);
                CHECK(std::abs(lhs - rhs) < 1e-9);
            }
        }
    }

    TEST_CASE("fixed-point identities improve with depth")
    {
        const FibRenorm& R = tuned().R;
        CircleIdentities a = circle_fixed_identities(R, 10);
        CircleIdentities b = circle_fixed_identities(R, 12);
        CHECK(std::abs(b.eta1) < std::abs(a.eta1));
        CHECK(std::abs(b.deta1) < std::abs(a.deta1));
        CHECK(std::abs(b.eta1) < 1e-3);
        CHECK(std::abs(b.deta1) < 1e-2);
    }
}
