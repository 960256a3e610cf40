#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rankgap/params.hpp"

namespace rankgap {

struct CheckResult {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    int grid_size = 0;
    long long elapsed_ms = 0;
    std::string note;
};

enum class VerifyLevel { quick, full };

struct VerificationReport {
    ModelParams params;
    VerifyLevel level = VerifyLevel::quick;
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;
    bool overall_pass = false;
};

// Single source of per-check tolerances.
const std::map<std::string, double>& default_tolerances();

VerificationReport run_verification(const ModelParams& p, VerifyLevel level, std::uint64_t seed,
                                    const std::map<std::string, double>& overrides = {});

std::string report_to_json(const VerificationReport& r);

namespace checks {

struct Measured {
    double residual = 0.0;
    int grid_size = 0;
    std::string note;
};

Measured branch_roots(const ModelParams& p);
Measured decoupling_identity(const ModelParams& p);
Measured gluing(const ModelParams& p);
Measured conformal_inverse(const ModelParams& p);
Measured boundary_ratio(const ModelParams& p);

Measured carleman(const ModelParams& p);
Measured continuation(const ModelParams& p);
Measured invariance(const ModelParams& p);
Measured transform_homogeneity(const ModelParams& p);
Measured product_vs_trig(const ModelParams& p);
Measured telescoping(const ModelParams& p);
Measured diagonal_transform(const ModelParams& p);

// Direct vs transformed theta series, both in extended precision, over the
// 60-point log grid u in [0.05, 50] and mu in {0.1, ..., 0.9}.
Measured theta_modular();
// The double-precision theta_mu against the extended-precision series.
Measured theta_double_accuracy();
Measured theta_ramanujan();
Measured theta_entrance_identity();
Measured theta_laplace_quadrature(const ModelParams& p);

Measured compensation_roots(const ModelParams& p);
Measured compensation_recursion(const ModelParams& p);
Measured grouped_coefficients(const ModelParams& p);
Measured boundary_specialization(const ModelParams& p);
// Pairwise relative disagreement of the nu_1 methods on 100 points of [0.05, 5].
Measured nu_method_triangle(const ModelParams& p);
Measured pi_normalization(const ModelParams& p);
Measured nu_normalization(const ModelParams& p);
Measured nu_mean(const ModelParams& p);
Measured sigma_exponential_moment(const ModelParams& p);
Measured pde(const ModelParams& p);
Measured boundary_conditions(const ModelParams& p);
// Composite Gauss-Legendre transform of pi_density on a 5x5 grid of [0,3]^2.
Measured bar_closed_loop(const ModelParams& p);
Measured density_homogeneity(const ModelParams& p);
Measured marginal_routes(const ModelParams& p);
Measured nonnegativity(const ModelParams& p);

// Numerical Laplace transform of pi on the tensor grid xs x ys.
Eigen::ArrayXXd pi_transform_quadrature(const ModelParams& p, const Eigen::ArrayXd& xs, const Eigen::ArrayXd& ys);

struct MonteCarloSummary {
    double ks_G = 0.0;
    double mean_sum = 0.0;
    double mean_sum_expected = 0.0;
    double max_cell_z = 0.0;
    std::size_t samples = 0;
    int cells_tested = 0;
    double tie_fraction = 0.0;
};
MonteCarloSummary simulate_and_compare(const ModelParams& p, std::uint64_t seed);

struct ConvolutionSummary {
    double ks_sigma = -1.0;
    double mean_rel_error = 0.0;
    std::size_t samples = 0;
};
ConvolutionSummary convolution_compare(const ModelParams& p, std::uint64_t seed, std::size_t ks_samples,
                                       std::size_t mean_samples);

// Cell probabilities of pi on a bins x bins grid over [0, range]^2.
Eigen::ArrayXXd pi_cell_probabilities(const ModelParams& p, int bins, double range);

}  // namespace checks

}  // namespace rankgap
