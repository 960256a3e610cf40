#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "rankgap/params.hpp"

namespace rankgap {

struct SimulationConfig {
    double dt = 1e-3;
    double t_total = 2000.0;
    // 50 / min(lambda1, lambda2) when absent
    std::optional<double> burn_in;
    int thin_stride = 1;
    std::uint64_t seed = 0;
    int n_chains = 1;
    std::array<double, 3> initial_positions{0.0, 0.0, 0.0};
};

struct GapSample {
    double g;
    double h;
    double t;
};

struct GapRun {
    // chain-major
    std::vector<GapSample> samples;
    std::vector<std::size_t> chain_offsets;
    std::uint64_t steps = 0;
    std::uint64_t ties = 0;
};

double effective_burn_in(const ModelParams& p, const SimulationConfig& cfg);
void validate(const SimulationConfig& cfg, const ModelParams& p);

GapRun simulate_gaps(const ModelParams& p, const SimulationConfig& cfg);

// Worker threads for chains and grids: RANKGAP_THREADS, else the hardware count.
int thread_count();
// body(i) for i in [0, n) over thread_count() workers; the first exception is rethrown.
void parallel_for(int n, const std::function<void(int)>& body);

struct EmpiricalDistribution {
    std::vector<double> sorted;
    std::size_t count = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double variance = 0.0;

    static EmpiricalDistribution from_samples(std::vector<double> samples);
};

enum class ConvolutionCase { sum_GH_symmetric, two_G_plus_H, nu_general };

struct ConvolutionSpec {
    ConvolutionCase kind = ConvolutionCase::sum_GH_symmetric;
    int side = 1;
};

// Rates used by a case up to k_max, and the deterministic tail mean beyond it.
std::vector<double> convolution_rates(const ConvolutionSpec& spec, const ModelParams& p, int k_max);
double convolution_tail_mean(const ConvolutionSpec& spec, const ModelParams& p, int k_max);

EmpiricalDistribution sample_exp_convolution(const ConvolutionSpec& spec, const ModelParams& p,
                                             std::size_t n_samples, int k_max, std::uint64_t seed);

double ks_statistic(const EmpiricalDistribution& emp, const std::function<double(double)>& cdf);

// Counts on a bins x bins grid over [0, range]^2; samples outside are dropped.
Eigen::ArrayXXd histogram_2d(const std::vector<GapSample>& samples, int bins, double range);

}  // namespace rankgap
