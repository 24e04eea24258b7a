#include "doctest.h"

#include "renoise/error.hpp"
#include "renoise/experiments.hpp"
#include "renoise/transfer.hpp"

#include <cmath>
#include <random>

using namespace renoise;

namespace {

// Spectral radii of the unsigned operator at g1, N = 48.
constexpr double kRho[] = {2.0, 8.4904008, 43.811644, 254.94071, 1558.32};
constexpr double kRhoHalf[] = {4.0125288, 18.891711, 104.67336, 628.17876}; // p = 0.5, 1.5, 2.5, 3.5

const UnimodalMap& g1() { return pd_context(1).g; }

double eval_block(const TransferOp& op, const Eigen::VectorXd& c, int block, double z)
{
    std::vector<double> T(op.N + 1);
    cheb_basis(op.domain.to_ref(z), op.N, T.data());
    double s = 0.0;
    for (int j = 0; j <= op.N; ++j) s += c[block * (op.N + 1) + j] * T[j];
    return s;
}

CircleOpInputs circle_inputs(int n)
{
    const FibRenorm& R = circle_context().R;
    return {&R.maps.at(n - 2), &R.maps.at(n - 1), R.alphas.at(n - 2), R.alphas.at(n - 1)};
}

} // namespace

TEST_SUITE("transfer")
{
    TEST_CASE("p = 0 doubles constants")
    {
        TransferOp op = build_pd_operator(g1(), 0.0, false, 48);
        Eigen::VectorXd out = op.matrix * constant_one(op);
        CHECK(std::abs(out[0] - 2.0) < 1e-13);
        CHECK(out.tail(op.N).cwiseAbs().maxCoeff() < 1e-13);
        CHECK(std::abs(spectral_radius(op).rho - 2.0) < 1e-10);
    }

    TEST_CASE("constant input at z = 0")
    {
        const UnimodalMap& g = g1();
        const double lam = g.lambda();
        for (double p : {0.5, 1.0, 2.7}) {
            TransferOp op = build_pd_operator(g, p, false, 48);
            Eigen::VectorXd out = op.matrix * constant_one(op);
            double want = std::pow(-lam, -p) * (std::pow(-g.df(1.0), p) + 1.0);
            CHECK(std::abs(eval_block(op, out, 0, 0.0) - want) < 1e-10 * want);
        }
    }

    TEST_CASE("matrix action matches the pointwise formula")
    {
        const UnimodalMap& g = g1();
        const double lam = g.lambda();
        const double p = 1.7;
        TransferOp op = build_pd_operator(g, p, false, 48);
        Eigen::VectorXd h = Eigen::VectorXd::Zero(op.N + 1);
        h[3] = 1.0;
        Eigen::VectorXd out = op.matrix * h;
        auto T3 = [](double x) { return 4 * x * x * x - 3 * x; };
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-1, 1);
        for (int i = 0; i < 30; ++i) {
            double z = u(rng);
            double fz = g.f(lam * z);
            double direct = std::pow(-lam, -p) * (std::pow(-g.df(fz), p) * T3(lam * z) + T3(fz));
            CHECK(std::abs(eval_block(op, out, 0, z) - direct) < 1e-9);
        }
    }

    TEST_CASE("serial and parallel assembly agree")
    {
        TransferOp a = build_pd_operator(g1(), 2.5, false, 48, true);
        TransferOp b = build_pd_operator(g1(), 2.5, false, 48, false);
        CHECK((a.matrix - b.matrix).cwiseAbs().maxCoeff() < 1e-11);
    }

    TEST_CASE("spectral radii at g1")
    {
        for (int p = 0; p <= 4; ++p) {
            SpectralResult r = spectral_radius(build_pd_operator(g1(), p, false, 48));
            CHECK(std::abs(r.rho / kRho[p] - 1.0) < 1e-6);
            CHECK(std::abs(r.rho - r.rho_dense) < 1e-6 * r.rho);
            CHECK(r.min_node_value > 0.0);
        }
        for (int i = 0; i < 4; ++i) {
            double p = 0.5 + i;
            CHECK(std::abs(spectral_radius(build_pd_operator(g1(), p, false, 48)).rho / kRhoHalf[i] - 1.0) < 1e-6);
        }
    }

    TEST_CASE("radius bounds")
    {
        const double lam = g1().lambda();
        for (int p = 1; p <= 4; ++p) {
            double rho = kRho[p];
            double scaled = std::pow(lam, 2 * p) * rho;
            CHECK(scaled > 1.0);
            CHECK(scaled < 1.0 + std::pow(std::abs(lam), p));
            CHECK(rho > std::pow(g1().df(1.0) / lam, p));
        }
    }

    TEST_CASE("cone preservation")
    {
        TransferOp op = build_pd_operator(g1(), 2.0, false, 48);
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(0.05, 1.0);
        auto nodes = cheb_nodes(op.domain, op.N);
        for (int trial = 0; trial < 50; ++trial) {
            double a = u(rng), b = u(rng), c = 3.0 * u(rng);
            AnalyticFn h = fit([&](double z) { return a + b * std::exp(std::sin(c * z)); }, op.domain, op.N);
            Eigen::VectorXd hv = Eigen::Map<const Eigen::VectorXd>(h.coeffs().data(), op.N + 1);
            Eigen::VectorXd out = op.matrix * hv;
            double mn = INFINITY;
            for (double z : nodes) mn = std::min(mn, eval_block(op, out, 0, z));
            CHECK(mn > 0.0);
        }
    }

    TEST_CASE("signed operator needs integer p")
    {
        CHECK_THROWS_AS(build_pd_operator(g1(), 1.5, true, 48), Error);
        const double lam = g1().lambda();
        TransferOp s = build_pd_operator(g1(), 3.0, true, 48);
        Eigen::VectorXd out = s.matrix * constant_one(s);
        double want = std::pow(lam, -3.0) * (std::pow(g1().df(1.0), 3.0) + 1.0);
        CHECK(std::abs(eval_block(s, out, 0, 0.0) - want) < 1e-10 * std::abs(want));
    }

    TEST_CASE("convexity verdicts at g1")
    {
        ConvexityReport r = convexity_report(g1(), {0.5, 1, 1.5, 2, 2.5, 3, 4}, 48);
        CHECK(r.monotone_ok);
        CHECK(r.logconvex_ok);
        CHECK(r.logconvex_margin > 0.0);
        CHECK(r.logrho_over_p_decreasing_ok);
        CHECK(r.bounds_ok);
        CHECK(r.resolution_gap < 1e-7);
        CHECK_THROWS_AS(convexity_report(g1(), {1, 2, 3}, 48), Error);
    }

    TEST_CASE("gamma from the radii")
    {
        GammaValues gv = pd_gamma(kRho[1], kRho[2], kRho[3], g1().lambda());
        CHECK(std::abs(gv.gamma - 3.8836) < 0.01);
        CHECK(std::abs(gv.gamma_raw - 6.53088) < 1e-4);
    }

    TEST_CASE("product growth at the fixed point aligns")
    {
        std::vector<UnimodalMap> traj(10, g1());
        ProductGrowth pg = product_growth(traj, 2.0, kRho[2], 48);
        CHECK(std::abs(pg.ratio_sup.back() - 1.0) < 1e-4);
        CHECK(std::abs(pg.ratio_inf.back() - 1.0) < 1e-4);
    }

    TEST_CASE("product growth along the quadratic trajectory is bounded")
    {
        RenormTrajectory tr = gamma_sequence(UnimodalMap::quadratic(1.401155189092051), 12, 40);
        ProductGrowth pg = product_growth(tr.maps, 2.0, kRho[2], 48);
        double lo = INFINITY, hi = 0.0;
        for (int n = 5; n <= 12; ++n) {
            lo = std::min(lo, pg.normalized_at0[n]);
            hi = std::max(hi, pg.normalized_at0[n]);
        }
        CHECK(lo > 0.0);
        CHECK(hi / lo < 1.05);
    }

    TEST_CASE("circle operator at p = 0")
    {
        CircleOpInputs in = circle_inputs(12);
        Interval dom = circle_operator_domain(in, false);
        TransferOp op = build_circle_operator(in, 0.0, false, dom, 64);
        Eigen::VectorXd out = op.matrix * constant_one(op);
        for (double z : {dom.lo + 0.01, 0.0, dom.hi - 0.01}) {
            CHECK(std::abs(eval_block(op, out, 0, z) - 2.0) < 1e-12);
            CHECK(std::abs(eval_block(op, out, 1, z) - 1.0) < 1e-12);
        }
    }

    TEST_CASE("circle operator block structure and pointwise formula")
    {
        CircleOpInputs in = circle_inputs(12);
        Interval dom = circle_operator_domain(in, false);
        const double p = 2.0;
        TransferOp op = build_circle_operator(in, p, false, dom, 64);
        const int n1 = op.N + 1;
        AnalyticFn dfb = differentiate(*in.fb);
        auto T1 = [&](double z) { return dom.to_ref(z); };
        auto T2 = [&](double z) { double t = dom.to_ref(z); return 2 * t * t - 1; };

        Eigen::VectorXd h0 = Eigen::VectorXd::Zero(2 * n1);
        h0[1] = 1.0;
        Eigen::VectorXd out0 = op.matrix * h0;
        Eigen::VectorXd pair = Eigen::VectorXd::Zero(2 * n1);
        pair[1] = 1.0;
        pair[n1 + 2] = 1.0;
        Eigen::VectorXd out = op.matrix * pair;
        auto nodes = cheb_nodes(dom, 19);
        for (double z : nodes) {
            double s = in.alpha_b * in.alpha_a * z;
            double r = (*in.fa)(s) / in.alpha_a;
            CHECK(std::abs(eval_block(op, out0, 0, z) - T1(r)) < 1e-9);
            CHECK(std::abs(eval_block(op, out0, 1, z) - T1(z)) < 1e-12);
            double direct = T1(r) + std::pow(dfb(r), p) * T2(s);
            CHECK(std::abs(eval_block(op, out, 0, z) - direct) < 1e-9);
            CHECK(std::abs(eval_block(op, out, 1, z) - T1(z)) < 1e-12);
        }
    }

    TEST_CASE("circle radii satisfy the lower bound")
    {
        const FibRenorm& R = circle_context().R;
        ConvexityReport r = convexity_report_circle(R, 12, {1, 2, 3, 4}, false, 64);
        const double want[] = {2.19739462, 3.19756030, 4.91432352, 7.8344865};
        for (int i = 0; i < 4; ++i) CHECK(std::abs(r.rho[i] / want[i] - 1.0) < 1e-6);
        for (int i = 0; i < 3; ++i) CHECK(r.scaled[i] > 1.0);
        CHECK(r.monotone_ok);
        CHECK(r.logconvex_ok);
        CHECK(r.resolution_gap < 1e-3);
    }

    TEST_CASE("circle hypothesis is evaluated with margins")
    {
        const FibRenorm& R = circle_context().R;
        HypothesisCirc h = hypothesis_circ(R, 12, {1, 2, 3}, {2.19739462, 3.19756030, 4.91432352});
        CHECK(std::abs(h.s - 2.70987) < 1e-4);
        CHECK(h.value.size() == 3);
        CHECK_FALSE(h.holds);
        CHECK(std::isfinite(h.margin));
    }
}
