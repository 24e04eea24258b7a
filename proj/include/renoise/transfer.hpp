#pragma once

#include "renoise/funcspace.hpp"
#include "renoise/renorm_circle.hpp"
#include "renoise/renorm_pd.hpp"

#include <Eigen/Dense>
#include "json.hpp"

#include <string>
#include <vector>

namespace renoise {

enum class OpKind { PdUnsigned, PdSigned, CircleK, CircleKhat };

const char* op_kind_name(OpKind k);

/// Collocation matrix acting on Chebyshev coefficient vectors. Circle kinds act on
/// stacked pairs (h, q), each of degree N on the same domain.
struct TransferOp {
    Eigen::MatrixXd matrix;
    double p = 0.0;
    OpKind kind = OpKind::PdUnsigned;
    std::string source;
    Interval domain;
    int N = 0;
    int blocks = 1;
};

TransferOp build_pd_operator(const UnimodalMap& f, double p, bool is_signed, int N = 48, bool parallel = true);

struct CircleOpInputs {
    const AnalyticFn* fa = nullptr; // f_{n-2}
    const AnalyticFn* fb = nullptr; // f_{n-1}
    double alpha_a = 0.0;           // alpha_{n-2}
    double alpha_b = 0.0;           // alpha_{n-1}
};

// Smallest interval [-1, hi] (K) or [lo, hi] (K-hat) that the block operator maps into itself.
Interval circle_operator_domain(const CircleOpInputs& in, bool hat);
TransferOp build_circle_operator(const CircleOpInputs& in, double p, bool hat, const Interval& dom, int N = 64,
                                 bool parallel = true);

// Values at the collocation nodes of each block, from a coefficient vector.
Eigen::VectorXd node_values(const TransferOp& op, const Eigen::VectorXd& coeffs);
Eigen::VectorXd constant_one(const TransferOp& op);

struct SpectralResult {
    double rho = 0.0;
    double rho_dense = 0.0;
    int iters = 0;
    Eigen::VectorXd eigvec; // coefficients, normalized to sup-norm 1 over nodes
    std::vector<AnalyticFn> eigfn;
    double min_node_value = 0.0;
};

SpectralResult spectral_radius(const TransferOp& op, double tol = 1e-13, int max_iter = 20000);

struct ConvexityReport {
    std::vector<double> p_grid;
    std::vector<double> rho;
    std::vector<double> rho_check;   // at N + 16
    std::vector<double> scaled;      // |lambda|^{2kp} rho_p
    std::vector<double> bound_lo;
    std::vector<double> bound_hi;
    double resolution_gap = 0.0;     // max relative |rho - rho_check|
    bool monotone_ok = false;
    double monotone_margin = 0.0;
    bool logconvex_ok = false;
    double logconvex_margin = 0.0;
    bool logrho_over_p_decreasing_ok = false;
    double logrho_over_p_margin = 0.0;
    bool bounds_ok = false;
    double bounds_margin = 0.0;
    double lambda = 0.0;
    int k = 1;
};

// Period-doubling report at a unimodal map; bounds 1 < |lambda|^{2kp} rho_p < 1 + |lambda|^{(2k-1)p}.
ConvexityReport convexity_report(const UnimodalMap& g, const std::vector<double>& p_grid, int N = 48);
// Circle report at proxy depth n; lower bound lambda^{2p} rho_p > 1 only.
ConvexityReport convexity_report_circle(const FibRenorm& R, int n, const std::vector<double>& p_grid, bool hat = false,
                                        int N = 64);

// Headline exponent from period-doubling radii. gamma_raw uses rho_p as the operator radius;
// gamma uses the per-doubling growth rate |lambda|^p rho_p of Lambda_p(0, 2^n).
struct GammaValues {
    double gamma_raw = 0.0;
    double gamma = 0.0;
    double be_term_raw = 0.0; // log2(rho_2^3 / rho_3)
    double be_term = 0.0;
};
GammaValues pd_gamma(double rho1, double rho2, double rho3, double lambda);

struct ProductGrowth {
    std::vector<AnalyticFn> k;        // k^{(j)}, j = 0..n
    std::vector<double> ratio_sup;    // sup_z k^{(j+1)} / (rho k^{(j)})
    std::vector<double> ratio_inf;
    std::vector<double> normalized_at0; // k^{(j)}(0) / rho^j
};

ProductGrowth product_growth(const std::vector<UnimodalMap>& trajectory, double p, double rho, int N = 48);
// Circle chain K_{n,p} ... K_{3,p} applied to (1, 1), using f_2 .. f_n of R.
struct CircleGrowth {
    std::vector<double> first_at0;    // first component at z = 0 after each step
    std::vector<double> normalized;   // first_at0 / rho^n
    int n_first = 0;
};
CircleGrowth circle_product_growth(const FibRenorm& R, double p, double rho, int n_first, int n_last, int N = 48);

struct HypothesisCirc {
    double s = 0.0;        // inf over |x| <= lambda^2 of f_n'(x) / x^2
    double lambda = 0.0;
    std::vector<double> p;
    std::vector<double> value; // (s lambda^6)^p lambda^{2p} rho_p
    bool holds = false;
    double margin = 0.0;
};
HypothesisCirc hypothesis_circ(const FibRenorm& R, int n, const std::vector<double>& p, const std::vector<double>& rho);

nlohmann::json to_json(const ConvexityReport& r);

} // namespace renoise
