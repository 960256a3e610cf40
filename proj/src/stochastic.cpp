#include "rankgap/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "rankgap/errors.hpp"
#include "rankgap/laplace.hpp"
#include "rankgap/philox.hpp"

namespace rankgap {

namespace {

constexpr std::uint32_t simulation_stream = 0x51u;
constexpr std::uint32_t convolution_stream = 0xC0u;

}  // namespace

void parallel_for(int n, const std::function<void(int)>& body) {
    const int workers = std::max(1, std::min(thread_count(), n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < n; i += workers) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

int thread_count() {
    if (const char* env = std::getenv("RANKGAP_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

double effective_burn_in(const ModelParams& p, const SimulationConfig& cfg) {
    return cfg.burn_in.value_or(50.0 / std::min(p.lambda1, p.lambda2));
}

void validate(const SimulationConfig& cfg, const ModelParams& p) {
    if (!(cfg.dt > 0.0)) throw ParameterError("simulation: dt must be positive");
    if (!(cfg.dt <= 1e-2)) throw ParameterError("simulation: dt must not exceed 1e-2");
    if (!(cfg.t_total > 0.0) || !std::isfinite(cfg.t_total)) throw ParameterError("simulation: t_total must be positive");
    const double burn = effective_burn_in(p, cfg);
    if (!(burn >= 0.0)) throw ParameterError("simulation: burn_in must be nonnegative");
    if (!(burn < cfg.t_total)) throw ParameterError("simulation: burn_in must be smaller than t_total");
    if (cfg.thin_stride < 1) throw ParameterError("simulation: thin_stride must be at least 1");
    if (cfg.n_chains < 1) throw ParameterError("simulation: need at least one chain");
    if (!p.deltas) throw ParameterError("simulation: drifts are required");
}

GapRun simulate_gaps(const ModelParams& p, const SimulationConfig& cfg) {
    validate(cfg, p);
    const auto delta = *p.deltas;
    const double dt = cfg.dt, sq = std::sqrt(dt);
    const std::uint64_t total = static_cast<std::uint64_t>(std::llround(cfg.t_total / dt));
    const std::uint64_t burn = static_cast<std::uint64_t>(std::ceil(effective_burn_in(p, cfg) / dt - 1e-9));
    const auto key = Philox4x32::key_from_seed(cfg.seed);

    struct ChainOut {
        std::vector<GapSample> samples;
        std::uint64_t ties = 0;
    };
    std::vector<ChainOut> out(cfg.n_chains);
    parallel_for(cfg.n_chains, [&](int chain) {
        ChainOut& o = out[chain];
        o.samples.reserve(static_cast<std::size_t>((total - std::min(total, burn)) / cfg.thin_stride + 1));
        std::array<double, 3> x = cfg.initial_positions;
        for (std::uint64_t k = 0; k < total; ++k) {
            // rank by value descending, ties to the lower index
            std::array<int, 3> r{0, 1, 2};
            std::sort(r.begin(), r.end(), [&](int a, int b) { return x[a] > x[b] || (x[a] == x[b] && a < b); });
            if (x[r[0]] == x[r[1]] || x[r[1]] == x[r[2]]) ++o.ties;
            const auto block = Philox4x32::generate(
                {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32), static_cast<std::uint32_t>(chain),
                 simulation_stream},
                key);
            x[r[0]] += delta[0] * dt;
            x[r[1]] += delta[1] * dt + sq * Philox4x32::normal(block);
            x[r[2]] += delta[2] * dt;
            if (!std::isfinite(x[0]) || !std::isfinite(x[1]) || !std::isfinite(x[2]))
                throw SimulationError("simulation: non-finite state in chain " + std::to_string(chain), k);
            const std::uint64_t done = k + 1;
            if (done > burn && (done - burn) % cfg.thin_stride == 0) {
                std::array<double, 3> s = x;
                std::sort(s.begin(), s.end(), std::greater<>());
                o.samples.push_back({s[0] - s[1], s[1] - s[2], done * dt});
            }
        }
    });
    GapRun run;
    run.steps = total * cfg.n_chains;
    for (auto& o : out) {
        run.chain_offsets.push_back(run.samples.size());
        run.samples.insert(run.samples.end(), o.samples.begin(), o.samples.end());
        run.ties += o.ties;
    }
    return run;
}

EmpiricalDistribution EmpiricalDistribution::from_samples(std::vector<double> samples) {
    if (samples.empty()) throw UsageError("empirical distribution: no samples");
    EmpiricalDistribution e;
    std::sort(samples.begin(), samples.end());
    e.count = samples.size();
    e.min = samples.front();
    e.max = samples.back();
    double mean = 0.0, m2 = 0.0;
    std::size_t n = 0;
    for (double x : samples) {
        ++n;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    e.mean = mean;
    e.variance = n > 1 ? m2 / (n - 1) : 0.0;
    e.sorted = std::move(samples);
    return e;
}

namespace {

void check_convolution(const ConvolutionSpec& spec, const ModelParams& p, int k_max) {
    if (k_max < 50) throw UsageError("sample_exp_convolution: k_max must be at least 50");
    switch (spec.kind) {
        case ConvolutionCase::sum_GH_symmetric:
        case ConvolutionCase::two_G_plus_H:
            if (!p.symmetric) throw UsageError("sample_exp_convolution: this case needs lambda1 == lambda2");
            break;
        case ConvolutionCase::nu_general:
            check_side(spec.side);
            break;
    }
}

}  // namespace

std::vector<double> convolution_rates(const ConvolutionSpec& spec, const ModelParams& p, int k_max) {
    check_convolution(spec, p, k_max);
    std::vector<double> r;
    if (spec.kind == ConvolutionCase::nu_general) {
        const double mu = p.mu(spec.side), L = p.lambda_sum;
        for (int k = 2; k <= k_max; ++k) {
            r.push_back(nu_rate(k, mu, L));
            r.push_back(nu_rate(-k, mu, L));
        }
        return r;
    }
    const double lam = p.lambda1;
    const int first = spec.kind == ConvolutionCase::two_G_plus_H ? 0 : 1;
    for (int k = first; k <= k_max; ++k) r.push_back(lam * (k + 2.0) * (k + 3.0) / 2.0);
    return r;
}

double convolution_tail_mean(const ConvolutionSpec& spec, const ModelParams& p, int k_max) {
    check_convolution(spec, p, k_max);
    if (spec.kind == ConvolutionCase::nu_general)
        return reciprocal_rate_tail(p.mu(spec.side), k_max) / p.lambda_sum;
    // sum_{k > k_max} 2/(lambda (k+2)(k+3)) telescopes
    return 2.0 / (p.lambda1 * (k_max + 3.0));
}

EmpiricalDistribution sample_exp_convolution(const ConvolutionSpec& spec, const ModelParams& p,
                                             std::size_t n_samples, int k_max, std::uint64_t seed) {
    if (n_samples == 0) throw UsageError("sample_exp_convolution: need at least one sample");
    const std::vector<double> rates = convolution_rates(spec, p, k_max);
    const double tail = convolution_tail_mean(spec, p, k_max);
    std::vector<double> inv(rates.size());
    for (std::size_t j = 0; j < rates.size(); ++j) inv[j] = 1.0 / rates[j];
    const auto key = Philox4x32::key_from_seed(seed);
    std::vector<double> out(n_samples);
    const int chunks = static_cast<int>(std::min<std::size_t>(n_samples, 64));
    parallel_for(chunks, [&](int c) {
        const std::size_t lo = n_samples * c / chunks, hi = n_samples * (c + 1) / chunks;
        for (std::size_t i = lo; i < hi; ++i) {
            double s = tail;
            for (std::size_t j = 0; j < inv.size(); j += 2) {
                const auto block = Philox4x32::generate(
                    {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32),
                     static_cast<std::uint32_t>(j / 2), convolution_stream},
                    key);
                const auto u = Philox4x32::uniforms(block);
                s -= std::log(u[0]) * inv[j];
                if (j + 1 < inv.size()) s -= std::log(u[1]) * inv[j + 1];
            }
            out[i] = s;
        }
    });
    return EmpiricalDistribution::from_samples(std::move(out));
}

double ks_statistic(const EmpiricalDistribution& emp, const std::function<double(double)>& cdf) {
    if (emp.sorted.empty()) throw UsageError("ks_statistic: empty sample");
    const double n = static_cast<double>(emp.sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < emp.sorted.size(); ++i) {
        const double F = cdf(emp.sorted[i]);
        d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    return d;
}

Eigen::ArrayXXd histogram_2d(const std::vector<GapSample>& samples, int bins, double range) {
    if (bins < 1 || !(range > 0.0)) throw UsageError("histogram_2d: need bins >= 1 and range > 0");
    Eigen::ArrayXXd h = Eigen::ArrayXXd::Zero(bins, bins);
    for (const auto& s : samples) {
        if (s.g < 0.0 || s.h < 0.0 || s.g >= range || s.h >= range) continue;
        const int i = static_cast<int>(s.g / range * bins), j = static_cast<int>(s.h / range * bins);
        h(std::min(i, bins - 1), std::min(j, bins - 1)) += 1.0;
    }
    return h;
}

}  // namespace rankgap
