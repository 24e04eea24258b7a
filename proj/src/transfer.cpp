#include "renoise/transfer.hpp"
#include "renoise/error.hpp"
#include "renoise/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace renoise {

const char* op_kind_name(OpKind k)
{
    switch (k) {
    case OpKind::PdUnsigned: return "pd_unsigned";
    case OpKind::PdSigned: return "pd_signed_cumulant";
    case OpKind::CircleK: return "circle_K";
    case OpKind::CircleKhat: return "circle_Khat";
    }
    return "unknown";
}

namespace {

// Values at the N+1 first-kind nodes -> Chebyshev coefficients.
Eigen::MatrixXd dct_matrix(int N)
{
    Eigen::MatrixXd C(N + 1, N + 1);
    for (int k = 0; k <= N; ++k)
        for (int j = 0; j <= N; ++j)
            C(k, j) = (k == 0 ? 1.0 : 2.0) / (N + 1) * std::cos(std::numbers::pi * k * (j + 0.5) / (N + 1));
    return C;
}

// Row i holds T_0..T_N at reference point t_i.
Eigen::MatrixXd vandermonde(const std::vector<double>& t, int N)
{
    Eigen::MatrixXd V(t.size(), N + 1);
    std::vector<double> row(N + 1);
    for (size_t i = 0; i < t.size(); ++i) {
        cheb_basis(t[i], N, row.data());
        for (int j = 0; j <= N; ++j) V(i, j) = row[j];
    }
    return V;
}

double cheb_T(int j, double t)
{
    t = std::clamp(t, -1.0, 1.0);
    return std::cos(j * std::acos(t));
}

std::vector<double> ref_nodes(int N)
{
    std::vector<double> t(N + 1);
    for (int j = 0; j <= N; ++j) t[j] = std::cos(std::numbers::pi * (j + 0.5) / (N + 1));
    return t;
}

void require_inside(const Interval& dom, double x, const char* what, double z)
{
    if (!dom.contains(x, 1e-10)) {
        std::ostringstream os;
        os.precision(12);
        os << what << ": node z=" << z << " maps to " << x << " outside [" << dom.lo << ", " << dom.hi << "]";
        throw Error(ErrorKind::DomainEscape, os.str());
    }
}

} // namespace

TransferOp build_pd_operator(const UnimodalMap& f, double p, bool is_signed, int N, bool parallel)
{
    if (is_signed && std::abs(p - std::round(p)) > 1e-12)
        throw Error(ErrorKind::Config, "signed cumulant operator needs integer p");
    const Interval dom(-1.0, 1.0);
    EvenSeriesMap m = f.as_map();
    double lam = f.lambda();
    auto t = ref_nodes(N);
    std::vector<double> a(N + 1), b(N + 1), w(N + 1);
    for (int i = 0; i <= N; ++i) {
        a[i] = lam * t[i];
        b[i] = m.f(a[i]);
        if (std::abs(b[i]) > 1.0 + 1e-12) {
            std::ostringstream os;
            os << "f(lambda z) = " << b[i] << " at z=" << t[i];
            throw Error(ErrorKind::RangeEscape, os.str());
        }
        double d = -m.df(b[i]);
        if (!(d > 0.0)) {
            std::ostringstream os;
            os << "-f'(f(lambda z)) = " << d << " at z=" << t[i];
            throw Error(ErrorKind::PositivityViolated, os.str());
        }
        w[i] = is_signed ? std::pow(-d, std::round(p)) : std::pow(d, p);
    }
    double pref = is_signed ? std::pow(lam, -std::round(p)) : std::pow(-lam, -p);
    TransferOp op;
    op.p = p;
    op.kind = is_signed ? OpKind::PdSigned : OpKind::PdUnsigned;
    op.domain = dom;
    op.N = N;
    op.source = "pd:k=" + std::to_string(f.k) + ",N=" + std::to_string(N);
    Eigen::MatrixXd C = dct_matrix(N);
    if (parallel) {
        op.matrix.resize(N + 1, N + 1);
#pragma omp parallel for num_threads(worker_count()) schedule(static)
        for (int j = 0; j <= N; ++j) {
            Eigen::VectorXd vals(N + 1);
            for (int i = 0; i <= N; ++i) vals[i] = pref * (w[i] * cheb_T(j, a[i]) + cheb_T(j, b[i]));
            op.matrix.col(j) = C * vals;
        }
    } else {
        Eigen::MatrixXd Va = vandermonde(a, N), Vb = vandermonde(b, N);
        Eigen::VectorXd wv = Eigen::Map<Eigen::VectorXd>(w.data(), N + 1);
        op.matrix = pref * C * (wv.asDiagonal() * Va + Vb);
    }
    return op;
}

Interval circle_operator_domain(const CircleOpInputs& in, bool hat)
{
    const AnalyticFn& fa = *in.fa;
    const AnalyticFn& fb = *in.fb;
    double aa = in.alpha_a, ab = in.alpha_b;
    double lo = -1.0, hi = 1.0;
    for (int it = 0; it < 50; ++it) {
        double mn = 1e300, mx = -1e300;
        for (int j = 0; j <= 400; ++j) {
            double z = lo + (hi - lo) * j / 400.0;
            std::vector<double> args;
            if (!hat) {
                args.push_back(fa.eval_unchecked(ab * aa * z) / aa);
                args.push_back(ab * aa * z);
            } else {
                args.push_back(ab * z);
                args.push_back(aa * fb.eval_unchecked(ab * z));
            }
            for (double v : args) mn = std::min(mn, v), mx = std::max(mx, v);
        }
        double nlo = std::min(-1.0, mn - 0.02 * std::abs(mn));
        double nhi = std::max(1.0, mx + 0.02 * std::abs(mx));
        bool stable = std::abs(nlo - lo) < 1e-12 && std::abs(nhi - hi) < 1e-12;
        lo = std::min(lo, nlo);
        hi = std::max(hi, nhi);
        if (stable) break;
        if (hi - lo > 2.0 * fa.domain().hi) throw Error(ErrorKind::DomainEscape, "no invariant interval for circle operator");
    }
    return Interval(lo, hi);
}

TransferOp build_circle_operator(const CircleOpInputs& in, double p, bool hat, const Interval& dom, int N, bool parallel)
{
    const AnalyticFn& fa = *in.fa;
    const AnalyticFn& fb = *in.fb;
    AnalyticFn dfa = differentiate(fa), dfb = differentiate(fb);
    double aa = in.alpha_a, ab = in.alpha_b;
    Interval mdom = fa.domain();
    auto t = ref_nodes(N);
    int n1 = N + 1;
    // Block A acts on h, block B on q; each with argument (as reference point) and weight per node.
    std::vector<double> argA(n1), wA(n1), argB(n1), wB(n1);
    auto weight = [&](double d, const char* what, double z) {
        if (d < -1e-9) {
            std::ostringstream os;
            os << what << ": derivative " << d << " at node z=" << z;
            throw Error(ErrorKind::PositivityViolated, os.str());
        }
        return std::pow(std::max(d, 0.0), p);
    };
    for (int i = 0; i <= N; ++i) {
        double z = dom.from_ref(t[i]);
        if (!hat) {
            double s = ab * aa * z;
            require_inside(mdom, s, "R/T map argument", z);
            double r = fa(s) / aa;
            require_inside(dom, r, "R", z);
            require_inside(mdom, r, "T weight", z);
            require_inside(dom, s, "T", z);
            argA[i] = dom.to_ref(r);
            wA[i] = 1.0;
            argB[i] = dom.to_ref(s);
            wB[i] = weight(dfb(r), "T", z);
        } else {
            double s = ab * z;
            require_inside(mdom, s, "U/P map argument", z);
            double u = aa * fb(s);
            require_inside(dom, s, "U", z);
            require_inside(mdom, u, "U weight", z);
            require_inside(dom, u, "P", z);
            argA[i] = dom.to_ref(s);
            wA[i] = weight(dfa(u), "U", z);
            argB[i] = dom.to_ref(u);
            wB[i] = 1.0;
        }
    }
    TransferOp op;
    op.p = p;
    op.kind = hat ? OpKind::CircleKhat : OpKind::CircleK;
    op.domain = dom;
    op.N = N;
    op.blocks = 2;
    op.source = "circle:N=" + std::to_string(N);
    op.matrix = Eigen::MatrixXd::Zero(2 * n1, 2 * n1);
    Eigen::MatrixXd C = dct_matrix(N);
    // Identity block: interpolate at the degree N-4 node set, zero the top coefficients.
    int M = N - 4;
    Eigen::MatrixXd Cm = dct_matrix(M);
    Eigen::MatrixXd Vm = vandermonde(ref_nodes(M), N);
    Eigen::MatrixXd Iblk = Eigen::MatrixXd::Zero(n1, n1);
    Iblk.topRows(M + 1) = Cm * Vm;
    op.matrix.bottomLeftCorner(n1, n1) = Iblk;
    if (parallel) {
#pragma omp parallel for num_threads(worker_count()) schedule(static)
        for (int j = 0; j <= N; ++j) {
            Eigen::VectorXd va(n1), vb(n1);
            for (int i = 0; i <= N; ++i) {
                va[i] = wA[i] * cheb_T(j, argA[i]);
                vb[i] = wB[i] * cheb_T(j, argB[i]);
            }
            op.matrix.block(0, j, n1, 1) = C * va;
            op.matrix.block(0, n1 + j, n1, 1) = C * vb;
        }
    } else {
        Eigen::Map<Eigen::VectorXd> wa(wA.data(), n1), wb(wB.data(), n1);
        op.matrix.topLeftCorner(n1, n1) = C * (wa.asDiagonal() * vandermonde(argA, N));
        op.matrix.topRightCorner(n1, n1) = C * (wb.asDiagonal() * vandermonde(argB, N));
    }
    return op;
}

Eigen::VectorXd node_values(const TransferOp& op, const Eigen::VectorXd& coeffs)
{
    int n1 = op.N + 1;
    Eigen::MatrixXd V = vandermonde(ref_nodes(op.N), op.N);
    Eigen::VectorXd out(coeffs.size());
    for (int b = 0; b < op.blocks; ++b) out.segment(b * n1, n1) = V * coeffs.segment(b * n1, n1);
    return out;
}

Eigen::VectorXd constant_one(const TransferOp& op)
{
    int n1 = op.N + 1;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n1 * op.blocks);
    for (int b = 0; b < op.blocks; ++b) v[b * n1] = 1.0;
    return v;
}

SpectralResult spectral_radius(const TransferOp& op, double tol, int max_iter)
{
    SpectralResult res;
    int n1 = op.N + 1;
    Eigen::MatrixXd V = vandermonde(ref_nodes(op.N), op.N);
    auto sup_nodes = [&](const Eigen::VectorXd& c) {
        double m = 0.0;
        for (int b = 0; b < op.blocks; ++b) m = std::max(m, (V * c.segment(b * n1, n1)).cwiseAbs().maxCoeff());
        return m;
    };
    Eigen::VectorXd v = constant_one(op);
    v /= sup_nodes(v);
    double prev = 0.0, rq = 0.0;
    int it = 0;
    for (; it < max_iter; ++it) {
        Eigen::VectorXd w = op.matrix * v;
        rq = sup_nodes(w);
        v = w / rq;
        if (it > 3 && std::abs(rq - prev) < tol * rq) break;
        prev = rq;
    }
    if (it >= max_iter) throw Error(ErrorKind::NotConverged, "power iteration after " + std::to_string(max_iter));
    res.rho = rq;
    res.iters = it + 1;
    res.eigvec = v;
    Eigen::EigenSolver<Eigen::MatrixXd> es(op.matrix, false);
    double best = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) best = std::max(best, std::abs(es.eigenvalues()[i]));
    res.rho_dense = best;
    if (std::abs(res.rho - best) > 1e-6 * best) {
        std::ostringstream os;
        os.precision(12);
        os << "power iteration " << res.rho << " vs dense " << best;
        throw Error(ErrorKind::CrossCheckFailed, os.str());
    }
    double mn = 1e300;
    for (int b = 0; b < op.blocks; ++b) {
        Eigen::VectorXd c = v.segment(b * n1, n1);
        mn = std::min(mn, (V * c).minCoeff());
        res.eigfn.emplace_back(op.domain, std::vector<double>(c.data(), c.data() + n1));
    }
    res.min_node_value = mn;
    if (!(mn > 0.0)) throw Error(ErrorKind::NegativeEigenfunction, "min node value " + std::to_string(mn));
    return res;
}

namespace {

void fill_verdicts(ConvexityReport& r)
{
    size_t n = r.p_grid.size();
    r.monotone_margin = 1e300;
    r.logconvex_margin = 1e300;
    r.logrho_over_p_margin = 1e300;
    r.bounds_margin = 1e300;
    for (size_t i = 0; i + 1 < n; ++i) {
        r.monotone_margin = std::min(r.monotone_margin, std::log(r.rho[i + 1]) - std::log(r.rho[i]));
        r.logrho_over_p_margin = std::min(r.logrho_over_p_margin,
                                          std::log(r.rho[i]) / r.p_grid[i] - std::log(r.rho[i + 1]) / r.p_grid[i + 1]);
    }
    for (size_t i = 1; i + 1 < n; ++i) {
        double p0 = r.p_grid[i - 1], p1 = r.p_grid[i], p2 = r.p_grid[i + 1];
        double wgt = (p2 - p1) / (p2 - p0);
        double chord = wgt * std::log(r.rho[i - 1]) + (1.0 - wgt) * std::log(r.rho[i + 1]);
        r.logconvex_margin = std::min(r.logconvex_margin, chord - std::log(r.rho[i]));
    }
    for (size_t i = 0; i < n; ++i) {
        double m = r.scaled[i] - r.bound_lo[i];
        if (std::isfinite(r.bound_hi[i])) m = std::min(m, r.bound_hi[i] - r.scaled[i]);
        r.bounds_margin = std::min(r.bounds_margin, m);
    }
    r.monotone_ok = r.monotone_margin > 0.0;
    r.logconvex_ok = r.logconvex_margin > 0.0;
    r.logrho_over_p_decreasing_ok = r.logrho_over_p_margin > 0.0;
    r.bounds_ok = r.bounds_margin > 0.0;
}

} // namespace

ConvexityReport convexity_report(const UnimodalMap& g, const std::vector<double>& p_grid, int N)
{
    if (p_grid.size() < 4) throw Error(ErrorKind::Config, "p grid needs at least 4 points");
    ConvexityReport r;
    r.p_grid = p_grid;
    r.lambda = g.lambda();
    r.k = g.k;
    double al = std::abs(r.lambda);
    for (double p : p_grid) {
        if (!(p > 0.0)) throw Error(ErrorKind::Config, "p grid must be positive");
        double rho = spectral_radius(build_pd_operator(g, p, false, N)).rho;
        double rho2 = spectral_radius(build_pd_operator(g, p, false, N + 16)).rho;
        r.rho.push_back(rho);
        r.rho_check.push_back(rho2);
        r.resolution_gap = std::max(r.resolution_gap, std::abs(rho - rho2) / rho);
        r.scaled.push_back(std::pow(al, 2.0 * g.k * p) * rho);
        r.bound_lo.push_back(1.0);
        r.bound_hi.push_back(1.0 + std::pow(al, (2.0 * g.k - 1.0) * p));
    }
    fill_verdicts(r);
    return r;
}

ConvexityReport convexity_report_circle(const FibRenorm& R, int n, const std::vector<double>& p_grid, bool hat, int N)
{
    if (p_grid.size() < 4) throw Error(ErrorKind::Config, "p grid needs at least 4 points");
    ConvexityReport r;
    r.p_grid = p_grid;
    r.lambda = R.alphas.at(n);
    CircleOpInputs in{&R.maps.at(n - 2), &R.maps.at(n - 1), R.alphas.at(n - 2), R.alphas.at(n - 1)};
    Interval dom = circle_operator_domain(in, hat);
    double al = std::abs(r.lambda);
    for (double p : p_grid) {
        double rho = spectral_radius(build_circle_operator(in, p, hat, dom, N)).rho;
        double rho2 = spectral_radius(build_circle_operator(in, p, hat, dom, N + 16)).rho;
        r.rho.push_back(rho);
        r.rho_check.push_back(rho2);
        r.resolution_gap = std::max(r.resolution_gap, std::abs(rho - rho2) / rho);
        r.scaled.push_back(std::pow(al, 2.0 * p) * rho);
        r.bound_lo.push_back(1.0);
        r.bound_hi.push_back(std::numeric_limits<double>::infinity());
    }
    fill_verdicts(r);
    return r;
}

GammaValues pd_gamma(double rho1, double rho2, double rho3, double lambda)
{
    GammaValues g;
    double al = std::abs(lambda);
    g.gamma_raw = std::log2(rho1 * rho1 * rho1 / std::sqrt(rho2));
    double r1 = al * rho1, r2 = al * al * rho2, r3 = al * al * al * rho3;
    g.gamma = std::log2(r1 * r1 * r1 / std::sqrt(r2));
    g.be_term_raw = std::log2(rho2 * rho2 * rho2 / rho3);
    g.be_term = std::log2(r2 * r2 * r2 / r3);
    return g;
}

ProductGrowth product_growth(const std::vector<UnimodalMap>& trajectory, double p, double rho, int N)
{
    ProductGrowth out;
    Interval dom(-1.0, 1.0);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(N + 1);
    v[0] = 1.0;
    out.k.emplace_back(dom, std::vector<double>(v.data(), v.data() + N + 1));
    out.normalized_at0.push_back(1.0);
    auto nodes = cheb_nodes(dom, N);
    double scale = 1.0;
    for (size_t j = 0; j < trajectory.size(); ++j) {
        TransferOp op = build_pd_operator(trajectory[j], p, false, N);
        Eigen::VectorXd w = op.matrix * v;
        AnalyticFn prev(dom, std::vector<double>(v.data(), v.data() + N + 1));
        AnalyticFn next(dom, std::vector<double>(w.data(), w.data() + N + 1));
        double sup = 0.0, inf = 1e300;
        for (double z : nodes) {
            double q = next(z) / (rho * prev(z));
            sup = std::max(sup, q);
            inf = std::min(inf, q);
        }
        out.ratio_sup.push_back(sup);
        out.ratio_inf.push_back(inf);
        // Keep iterates O(1); the running scale restores k^{(j)}(0) / rho^j.
        double s = rho;
        scale *= w.cwiseAbs().maxCoeff() / s;
        v = w / w.cwiseAbs().maxCoeff();
        out.k.emplace_back(dom, std::vector<double>(v.data(), v.data() + N + 1));
        out.normalized_at0.push_back(out.k.back()(0.0) * scale);
    }
    return out;
}

CircleGrowth circle_product_growth(const FibRenorm& R, double p, double rho, int n_first, int n_last, int N)
{
    CircleGrowth out;
    out.n_first = n_first;
    double lo = -1.0, hi = 1.0;
    for (int m = n_first; m <= n_last; ++m) {
        CircleOpInputs in{&R.maps.at(m - 2), &R.maps.at(m - 1), R.alphas.at(m - 2), R.alphas.at(m - 1)};
        Interval d = circle_operator_domain(in, false);
        lo = std::min(lo, d.lo);
        hi = std::max(hi, d.hi);
    }
    Interval dom(lo, hi);
    int n1 = N + 1;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * n1);
    v[0] = 1.0;
    v[n1] = 1.0;
    double logscale = 0.0;
    double z0 = dom.to_ref(0.0);
    std::vector<double> basis(n1);
    cheb_basis(z0, N, basis.data());
    for (int m = n_first; m <= n_last; ++m) {
        CircleOpInputs in{&R.maps.at(m - 2), &R.maps.at(m - 1), R.alphas.at(m - 2), R.alphas.at(m - 1)};
        TransferOp op = build_circle_operator(in, p, false, dom, N);
        v = op.matrix * v;
        double s = v.cwiseAbs().maxCoeff();
        v /= s;
        logscale += std::log(s);
        double at0 = 0.0;
        for (int j = 0; j <= N; ++j) at0 += v[j] * basis[j];
        double val = std::exp(logscale) * at0;
        out.first_at0.push_back(val);
        out.normalized.push_back(std::exp(logscale + std::log(at0) - (m - n_first + 1) * std::log(rho)));
    }
    return out;
}

HypothesisCirc hypothesis_circ(const FibRenorm& R, int n, const std::vector<double>& p, const std::vector<double>& rho)
{
    HypothesisCirc h;
    const AnalyticFn& f = R.maps.at(n);
    AnalyticFn d1 = differentiate(f);
    AnalyticFn d3 = differentiate(differentiate(d1));
    double lam = R.alphas.at(n);
    h.lambda = lam;
    double lim = lam * lam;
    double s = d3(0.0) / 2.0;
    for (int j = 0; j <= 2000; ++j) {
        double x = -lim + 2.0 * lim * j / 2000.0;
        if (std::abs(x) < 1e-3) continue;
        s = std::min(s, d1(x) / (x * x));
    }
    h.s = s;
    h.p = p;
    h.margin = 1e300;
    double al = std::abs(lam);
    for (size_t i = 0; i < p.size(); ++i) {
        double v = std::pow(s * std::pow(al, 6.0), p[i]) * std::pow(al, 2.0 * p[i]) * rho[i];
        h.value.push_back(v);
        h.margin = std::min(h.margin, v - 1.0);
    }
    h.holds = h.margin > 0.0;
    return h;
}

nlohmann::json to_json(const ConvexityReport& r)
{
    nlohmann::json j;
    j["p_grid"] = r.p_grid;
    j["rho"] = r.rho;
    j["rho_check"] = r.rho_check;
    j["scaled"] = r.scaled;
    j["bound_lo"] = r.bound_lo;
    std::vector<nlohmann::json> hi;
    for (double v : r.bound_hi) hi.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr));
    j["bound_hi"] = hi;
    j["resolution_gap"] = r.resolution_gap;
    j["lambda"] = r.lambda;
    j["verdicts"] = {
        {"monotone_ok", r.monotone_ok},
        {"monotone_margin", r.monotone_margin},
        {"logconvex_ok", r.logconvex_ok},
        {"logconvex_margin", r.logconvex_margin},
        {"logrho_over_p_decreasing_ok", r.logrho_over_p_decreasing_ok},
        {"logrho_over_p_margin", r.logrho_over_p_margin},
        {"bounds_ok", r.bounds_ok},
        {"bounds_margin", r.bounds_margin},
    };
    return j;
}

} // namespace renoise
