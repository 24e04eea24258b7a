#include "doctest.h"

#include "renoise/error.hpp"
#include "renoise/funcspace.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace renoise;

namespace {

AnalyticFn series(std::vector<double> c) { return AnalyticFn(Interval(-1.0, 1.0), std::move(c)); }


} // namespace

TEST_SUITE("funcspace")
{
    TEST_CASE("fit recovers Chebyshev polynomials")
    {
        Interval I(-1.0, 1.0);
        AnalyticFn a = fit([](double x) { return x; }, I, 3);
        for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(a.coeffs()[i] - (i == 1 ? 1.0 : 0.0)) < 1e-14);
        AnalyticFn b = fit([](double x) { return 2 * x * x - 1; }, I, 4);
        for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(b.coeffs()[i] - (i == 2 ? 1.0 : 0.0)) < 1e-14);
    }

    TEST_CASE("fit of a parabola evaluates by direct arithmetic")
    {
        AnalyticFn f = fit([](double x) { return 1 - 1.4011 * x * x; }, Interval(-1, 1), 8);
        CHECK(std::abs(f(0.5) - 0.649725) < 1e-13);
        CHECK(std::abs(sup_norm(f) - 1.0) < 1e-12);
    }

    TEST_CASE("non-finite sample is rejected")
    {
        auto bad = [](double x) { return x > 0.5 ? std::numeric_limits<double>::quiet_NaN() : x; };
        try {
            fit(bad, Interval(-1, 1), 6);
            FAIL("expected NonFiniteSample");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NonFiniteSample);
        }
    }

    TEST_CASE("evaluation of simple series")
    {
        CHECK(series({0, 0, 1})(0.0) == doctest::Approx(-1.0));
        CHECK(series({2})(0.37) == doctest::Approx(2.0));
        AnalyticFn s = fit([](double x) { return std::sin(x); }, Interval(-1, 1), 20);
        CHECK(std::abs(s(0.3) - 0.29552020666133955) < 1e-13);
    }

    TEST_CASE("evaluation outside the domain throws")
    {
        AnalyticFn f = series({1, 2, 3});
        CHECK_NOTHROW(f(1.0 + 0.5 * kDomainSlack));
        try {
            f(1.01);
            FAIL("expected DomainEscape");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DomainEscape);
        }
    }

    TEST_CASE("differentiate")
    {
        CHECK(differentiate(series({0, 0, 1}))(1.0) == doctest::Approx(4.0));
        AnalyticFn d0 = differentiate(series({3.5}));
        for (double c : d0.coeffs()) CHECK(c == 0.0);
        AnalyticFn cube = fit([](double x) { return x * x * x; }, Interval(-1, 1), 6);
        CHECK(std::abs(differentiate(cube)(0.5) - 0.75) < 1e-13);
    }

    TEST_CASE("differentiate agrees with central differences")
    {
        Interval I(-0.3, 1.7);
        AnalyticFn f = fit([](double x) { return std::exp(std::sin(2 * x)); }, I, 40);
        AnalyticFn df = differentiate(f);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(I.lo + 0.01, I.hi - 0.01);
        const double h = 1e-6;
        for (int i = 0; i < 100; ++i) {
            double x = u(rng);
            double fd = (f(x + h) - f(x - h)) / (2 * h);
            CHECK(std::abs(df(x) - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
        }
    }

    TEST_CASE("compose")
    {
        Interval I(-1, 1);
        AnalyticFn t2 = series({0, 0, 1});
        AnalyticFn t4 = compose(t2, t2, I, 4);
        for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(t4.coeffs()[i] - (i == 4 ? 1.0 : 0.0)) < 1e-13);

        AnalyticFn c = fit([](double x) { return std::cos(x); }, I, 24);
        CHECK(std::abs(compose(c, c, I, 24)(0.2) - std::cos(std::cos(0.2))) < 1e-12);
        CHECK(std::abs(std::cos(std::cos(0.2)) - 0.5569673) < 1e-7);
    }

    TEST_CASE("composition with the identity is a no-op")
    {
        Interval I(-1, 1);
        AnalyticFn id = series({0, 1});
        AnalyticFn f = fit([](double x) { return 0.3 + 0.5 * std::tanh(x); }, I, 30);
        AnalyticFn a = compose(f, id, I, 30);
        AnalyticFn b = compose(id, f, I, 30);
        for (std::size_t i = 0; i < f.coeffs().size(); ++i) {
            CHECK(std::abs(a.coeffs()[i] - f.coeffs()[i]) < 1e-12);
            CHECK(std::abs(b.coeffs()[i] - f.coeffs()[i]) < 1e-12);
        }
    }

    TEST_CASE("sup norm")
    {
        CHECK(sup_norm(series({2})) == doctest::Approx(2.0));
        CHECK(sup_norm(series({0, 0, 1})) == doctest::Approx(1.0));
    }

    TEST_CASE("refit round trip for polynomials")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-1, 1);
        Interval I(0.5, 2.5);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> c(13);
            for (double& v : c) v = u(rng);
            AnalyticFn p(I, c);
            AnalyticFn q = fit([&](double x) { return p(x); }, I, 12);
            for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(q.coeffs()[i] - c[i]) < 1e-12);
        }
    }

    TEST_CASE("coefficient tail is reported")
    {
        AnalyticFn smooth = fit([](double x) { return std::exp(x); }, Interval(-1, 1), 30);
        CHECK_FALSE(smooth.degraded_decay());
        AnalyticFn rough = fit([](double x) { return std::abs(x); }, Interval(-1, 1), 30);
        CHECK(rough.degraded_decay());
        CHECK(rough.tail_magnitude() > kTailTol);
    }

    TEST_CASE("nodes and basis")
    {
        auto x = cheb_nodes(Interval(0, 2), 4);
        REQUIRE(x.size() == 5);
        CHECK(x[0] == doctest::Approx(1 + std::cos(M_PI * 0.5 / 5)));
        double T[6];
        cheb_basis(0.3, 5, T);
        CHECK(T[3] == doctest::Approx(4 * 0.027 - 3 * 0.3));
    }
}
