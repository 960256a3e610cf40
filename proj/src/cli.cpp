#include "rankgap/cli.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <locale>
#include <sstream>

#include <CLI11.hpp>

#include "rankgap/density.hpp"
#include "rankgap/errors.hpp"
#include "rankgap/laplace.hpp"
#include "rankgap/params.hpp"
#include "rankgap/stochastic.hpp"
#include "rankgap/theta.hpp"
#include "rankgap/verify.hpp"

namespace rankgap::cli {

std::vector<double> GridSpec::points() const {
    if (steps < 2) throw UsageError("grid needs at least 2 steps");
    if (!(max > min)) throw UsageError("grid needs max > min");
    std::vector<double> out(steps);
    for (int i = 0; i < steps; ++i) out[i] = i + 1 == steps ? max : min + i * (max - min) / (steps - 1);
    return out;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

namespace {

struct Options {
    CliConfig cfg;
    // subcommand specific
    std::string method = "theta";
    std::vector<double> mus{0.5};
    bool log_grid = false;
    double x_im = 0.0, y_im = 0.0;
    double dt = 1e-3;
    std::optional<double> t_total;
    std::optional<double> burn_in;
    std::optional<std::size_t> samples;
    int thin = 1;
    int chains = 1;
    int bins = 0;
    std::optional<double> range;
    std::string conv_case = "sum_gh";
    int side = 1;
    int k_max = 1000;
    std::string level = "quick";
    std::vector<std::string> overrides;
    // per-subcommand storage; CLI11 writes defaults at registration time
    GridSpec density_u, density_v, boundary_u, laplace_x, laplace_y, theta_u;
    double density_tol = 1e-10, boundary_tol = 1e-10, theta_tol = 1e-10;
};

ModelParams resolve_params(const CliConfig& c) {
    const bool lam = c.lambda1 || c.lambda2;
    const bool del = c.delta1 || c.delta2 || c.delta3;
    if (lam && del) throw UsageError("give either --lambda1/--lambda2 or --delta1/--delta2/--delta3, not both");
    if (lam) {
        if (!c.lambda1 || !c.lambda2) throw UsageError("both --lambda1 and --lambda2 are required");
        return params_from_lambdas(*c.lambda1, *c.lambda2);
    }
    if (del) {
        if (!c.delta1 || !c.delta2 || !c.delta3) throw UsageError("all of --delta1, --delta2, --delta3 are required");
        return params_from_deltas(*c.delta1, *c.delta2, *c.delta3);
    }
    throw UsageError("model parameters missing: give --lambda1/--lambda2 or --delta1/--delta2/--delta3");
}

std::string join(const std::vector<std::string>& fields) {
    std::string s;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) s += ',';
        s += fields[i];
    }
    return s;
}

class Output {
public:
    Output(const std::optional<std::string>& path, std::ostream& fallback) : stream_(&fallback) {
        if (path && *path != "-") {
            file_.open(*path, std::ios::out | std::ios::trunc);
            if (!file_) throw std::ios_base::failure("cannot open output file " + *path);
            stream_ = &file_;
        }
    }
    std::ostream& operator*() { return *stream_; }
    void close() {
        stream_->flush();
        if (!*stream_) throw std::ios_base::failure("write failed");
        if (file_.is_open()) file_.close();
    }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

std::string config_line(const Options& o, const ModelParams& p, const std::vector<std::pair<std::string, std::string>>& extra) {
    std::string s = "# rankgap " + o.cfg.subcommand;
    if (o.cfg.delta1 && p.deltas) {
        s += " --delta1 " + format_double((*p.deltas)[0]) + " --delta2 " + format_double((*p.deltas)[1]) +
             " --delta3 " + format_double((*p.deltas)[2]);
    } else {
        s += " --lambda1 " + format_double(p.lambda1) + " --lambda2 " + format_double(p.lambda2);
    }
    for (const auto& [k, v] : extra) s += " --" + k + " " + v;
    return s;
}

std::string fmt_int(long long x) { return std::to_string(x); }

// Rows are produced in parallel and written in grid order.
void write_rows(std::ostream& os, std::size_t n, const std::function<std::string(std::size_t)>& row) {
    std::vector<std::string> rows(n);
    parallel_for(int(n), [&](int i) { rows[i] = row(std::size_t(i)); });
    for (const auto& r : rows) os << r << '\n';
}

int run_density(const Options& o, const ModelParams& p, std::ostream& out, std::ostream& err) {
    const auto us = o.cfg.u.points(), vs = o.cfg.v.points();
    Output os(o.cfg.out, out);
    *os << config_line(o, p,
                       {{"u-min", format_double(o.cfg.u.min)}, {"u-max", format_double(o.cfg.u.max)},
                        {"v-min", format_double(o.cfg.v.min)}, {"v-max", format_double(o.cfg.v.max)},
                        {"u-steps", fmt_int(o.cfg.u.steps)}, {"v-steps", fmt_int(o.cfg.v.steps)},
                        {"tol", format_double(o.cfg.tol)}})
        << '\n';
    *os << "u,v,pi,tail_bound\n";
    std::atomic<int> rejected{0};
    write_rows(*os, us.size() * vs.size(), [&](std::size_t k) {
        const double u = us[k / vs.size()], v = vs[k % vs.size()];
        double value = std::nan(""), tail = std::nan("");
        if (u < 0.0 || v < 0.0) throw DomainError("density: grid must lie in the quadrant");
        if (u == 0.0 && v > 0.0) {
            const auto r = nu_density(1, v, p, NuMethod::theta_operator, o.cfg.tol);
            value = r.value;
            tail = r.tail_bound;
        } else if (v == 0.0 && u > 0.0) {
            const auto r = nu_density(2, u, p, NuMethod::theta_operator, o.cfg.tol);
            value = r.value;
            tail = r.tail_bound;
        } else if (p.lambda_sum * (u + v) < pi_density_min_scaled_sum) {
            ++rejected;
        } else {
            const auto r = pi_density(u, v, p, o.cfg.tol);
            value = r.value;
            tail = r.tail_bound;
        }
        return join({format_double(u), format_double(v), format_double(value), format_double(tail)});
    });
    os.close();
    if (rejected > 0)
        err << "warning: " << rejected.load() << " grid point(s) too close to the corner were written as nan\n";
    return 0;
}

NuMethod parse_method(const std::string& m) {
    if (m == "theta") return NuMethod::theta_operator;
    if (m == "bi-infinite") return NuMethod::bi_infinite;
    if (m == "symmetric") return NuMethod::symmetric;
    throw UsageError("unknown method " + m);
}

int run_boundary(const Options& o, const ModelParams& p, std::ostream& out, std::ostream&) {
    GridSpec g = o.cfg.u;
    if (g.min <= 0.0) g.min = g.max / g.steps;
    const auto us = g.points();
    const NuMethod m = parse_method(o.method);
    if (m == NuMethod::symmetric && !p.symmetric) throw UsageError("--method symmetric needs lambda1 == lambda2");
    Output os(o.cfg.out, out);
    *os << config_line(o, p,
                       {{"u-min", format_double(g.min)}, {"u-max", format_double(g.max)},
                        {"steps", fmt_int(g.steps)}, {"method", o.method}, {"tol", format_double(o.cfg.tol)}})
        << '\n';
    *os << "u,nu1,nu2\n";
    write_rows(*os, us.size(), [&](std::size_t i) {
        const double u = us[i];
        return join({format_double(u), format_double(nu_density(1, u, p, m, o.cfg.tol).value),
                     format_double(nu_density(2, u, p, m, o.cfg.tol).value)});
    });
    os.close();
    return 0;
}

int run_laplace(const Options& o, const ModelParams& p, std::ostream& out, std::ostream&) {
    const auto xs = o.cfg.u.points(), ys = o.cfg.v.points();
    Output os(o.cfg.out, out);
    *os << config_line(o, p,
                       {{"x-min", format_double(o.cfg.u.min)}, {"x-max", format_double(o.cfg.u.max)},
                        {"y-min", format_double(o.cfg.v.min)}, {"y-max", format_double(o.cfg.v.max)},
                        {"x-steps", fmt_int(o.cfg.u.steps)}, {"y-steps", fmt_int(o.cfg.v.steps)},
                        {"x-im", format_double(o.x_im)}, {"y-im", format_double(o.y_im)}})
        << '\n';
    *os << "x,y,re_pi_hat,im_pi_hat,re_nu1_hat,im_nu1_hat,re_nu2_hat,im_nu2_hat\n";
    write_rows(*os, xs.size() * ys.size(), [&](std::size_t k) {
        const Complex x(xs[k / ys.size()], o.x_im), y(ys[k % ys.size()], o.y_im);
        const Complex ph = pi_hat(x, y, p).value, n1 = nu1_hat(y, p).value, n2 = nu2_hat(x, p).value;
        return join({format_double(x.real()), format_double(y.real()), format_double(ph.real()),
                     format_double(ph.imag()), format_double(n1.real()), format_double(n1.imag()),
                     format_double(n2.real()), format_double(n2.imag())});
    });
    os.close();
    return 0;
}

int run_theta(const Options& o, std::ostream& out, std::ostream&) {
    std::vector<double> us = o.cfg.u.points();
    if (o.log_grid) {
        if (!(o.cfg.u.min > 0.0)) throw UsageError("--log needs --u-min > 0");
        for (int i = 0; i < o.cfg.u.steps; ++i)
            us[i] = o.cfg.u.min * std::pow(o.cfg.u.max / o.cfg.u.min, double(i) / (o.cfg.u.steps - 1));
    }
    for (double mu : o.mus)
        if (!(mu > 0.0 && mu < 1.0)) throw ParameterError("--mu must lie in (0, 1)");
    Output os(o.cfg.out, out);
    std::string mus;
    for (double m : o.mus) mus += (mus.empty() ? "" : " ") + format_double(m);
    *os << "# rankgap theta --u-min " << format_double(o.cfg.u.min) << " --u-max " << format_double(o.cfg.u.max)
        << " --steps " << o.cfg.u.steps << (o.log_grid ? " --log" : "") << " --mu " << mus << " --tol "
        << format_double(o.cfg.tol) << '\n';
    *os << "u,mu,theta,theta_prime,regime,tail_bound\n";
    write_rows(*os, us.size() * o.mus.size(), [&](std::size_t k) {
        const double mu = o.mus[k / us.size()], u = us[k % us.size()];
        const SeriesValue t = theta_mu(u, mu, o.cfg.tol);
        const SeriesValue d = theta_mu_derivative(u, mu, 1, o.cfg.tol, 1.0);
        return join({format_double(u), format_double(mu), format_double(t.value), format_double(d.value),
                     t.regime == SeriesRegime::direct ? "direct" : "transformed", format_double(t.tail_bound)});
    });
    os.close();
    return 0;
}

std::uint64_t require_seed(const CliConfig& c) {
    if (!c.seed) throw UsageError("--seed is required for stochastic subcommands");
    return *c.seed;
}

int run_simulate(const Options& o, const ModelParams& p, std::ostream& out, std::ostream&) {
    SimulationConfig s;
    s.seed = require_seed(o.cfg);
    s.dt = o.dt;
    s.burn_in = o.burn_in;
    s.thin_stride = o.thin;
    s.n_chains = o.chains;
    const double burn = effective_burn_in(p, s);
    if (o.samples) {
        const std::size_t per_chain = (*o.samples + o.chains - 1) / o.chains;
        s.t_total = burn + double(per_chain) * o.thin * o.dt;
    } else if (o.t_total) {
        s.t_total = *o.t_total;
    }
    validate(s, p);
    const GapRun run = simulate_gaps(p, s);
    Output os(o.cfg.out, out);
    std::vector<std::pair<std::string, std::string>> extra{
        {"seed", std::to_string(s.seed)}, {"dt", format_double(s.dt)}, {"t-total", format_double(s.t_total)},
        {"burn-in", format_double(burn)}, {"thin", fmt_int(s.thin_stride)}, {"chains", fmt_int(s.n_chains)}};
    if (o.bins > 0) {
        const double range = o.range.value_or(4.0 / p.lambda_sum);
        extra.emplace_back("bins", fmt_int(o.bins));
        extra.emplace_back("range", format_double(range));
        *os << config_line(o, p, extra) << '\n';
        *os << "u_lo,u_hi,v_lo,v_hi,count\n";
        const Eigen::ArrayXXd h = histogram_2d(run.samples, o.bins, range);
        const double w = range / o.bins;
        for (int i = 0; i < o.bins; ++i)
            for (int j = 0; j < o.bins; ++j)
                *os << join({format_double(i * w), format_double((i + 1) * w), format_double(j * w),
                             format_double((j + 1) * w), fmt_int(static_cast<long long>(h(i, j)))})
                    << '\n';
    } else {
        *os << config_line(o, p, extra) << '\n';
        *os << "g,h\n";
        for (const auto& x : run.samples) *os << format_double(x.g) << ',' << format_double(x.h) << '\n';
    }
    os.close();
    return 0;
}

int run_convolve(const Options& o, const ModelParams& p, std::ostream& out, std::ostream&) {
    ConvolutionSpec spec;
    if (o.conv_case == "sum_gh") {
        spec.kind = ConvolutionCase::sum_GH_symmetric;
    } else if (o.conv_case == "two_g_plus_h") {
        spec.kind = ConvolutionCase::two_G_plus_H;
    } else if (o.conv_case == "nu") {
        spec.kind = ConvolutionCase::nu_general;
    } else {
        throw UsageError("unknown --case " + o.conv_case);
    }
    spec.side = o.side;
    const std::uint64_t seed = require_seed(o.cfg);
    const std::size_t n = o.samples.value_or(100000);
    const auto e = sample_exp_convolution(spec, p, n, o.k_max, seed);
    Output os(o.cfg.out, out);
    *os << config_line(o, p,
                       {{"case", o.conv_case}, {"side", fmt_int(o.side)}, {"samples", std::to_string(n)},
                        {"k-max", fmt_int(o.k_max)}, {"seed", std::to_string(seed)}})
        << '\n';
    *os << "# mean " << format_double(e.mean) << " variance " << format_double(e.variance) << '\n';
    *os << "value\n";
    for (double x : e.sorted) *os << format_double(x) << '\n';
    os.close();
    return 0;
}

int run_verify(const Options& o, const ModelParams& p, std::ostream& out, std::ostream& err) {
    VerifyLevel level;
    if (o.level == "quick") {
        level = VerifyLevel::quick;
    } else if (o.level == "full") {
        level = VerifyLevel::full;
    } else {
        throw UsageError("unknown --level " + o.level);
    }
    if (o.cfg.format != "json") throw UsageError("verify writes json only");
    const std::uint64_t seed = level == VerifyLevel::full ? require_seed(o.cfg) : o.cfg.seed.value_or(0);
    std::map<std::string, double> overrides = o.cfg.tolerance_overrides;
    for (const auto& s : o.overrides) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw UsageError("--tol-override expects name=value");
        double v = 0.0;
        const std::string num = s.substr(eq + 1);
        const auto r = std::from_chars(num.data(), num.data() + num.size(), v);
        if (r.ec != std::errc() || r.ptr != num.data() + num.size() || !(v > 0.0))
            throw UsageError("bad tolerance in --tol-override " + s);
        overrides[s.substr(0, eq)] = v;
    }
    const VerificationReport r = run_verification(p, level, seed, overrides);
    Output os(o.cfg.out, out);
    *os << report_to_json(r) << '\n';
    os.close();
    for (const auto& c : r.checks)
        if (!c.pass) err << "check failed: " << c.name << " residual " << format_double(c.residual) << '\n';
    return r.overall_pass ? 0 : 2;
}

void add_params(CLI::App* app, CliConfig& c) {
    auto* l1 = app->add_option("--lambda1", c.lambda1, "drift gap rate lambda1 = 2(delta2 - delta1)");
    auto* l2 = app->add_option("--lambda2", c.lambda2, "drift gap rate lambda2 = 2(delta3 - delta2)");
    auto* d1 = app->add_option("--delta1", c.delta1, "drift of the top-ranked particle");
    auto* d2 = app->add_option("--delta2", c.delta2, "drift of the middle particle");
    auto* d3 = app->add_option("--delta3", c.delta3, "drift of the bottom-ranked particle");
    for (auto* l : {l1, l2})
        for (auto* d : {d1, d2, d3}) l->excludes(d);
    app->add_option("--out", c.out, "output file (default standard output)");
}

void add_grid(CLI::App* app, GridSpec& g, const std::string& name, double lo, double hi, int steps) {
    app->add_option("--" + name + "-min", g.min)->default_val(lo);
    app->add_option("--" + name + "-max", g.max)->default_val(hi);
    app->add_option("--" + name + "-steps", g.steps)->default_val(steps)->check(CLI::Range(2, 100000000));
}

}  // namespace

int cmd_dispatch(int argc, const char* const* argv) { return cmd_dispatch(argc, argv, std::cout, std::cerr); }

int cmd_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    // CLI11 formats defaults and help through the global locale
    struct ClassicLocale {
        std::locale saved = std::locale::global(std::locale::classic());
        ~ClassicLocale() { std::locale::global(saved); }
    } classic;
    CLI::App app{"Gap process of three competing Brownian particles: densities, transforms, simulation"};
    app.require_subcommand(1);
    Options o;
    CliConfig& c = o.cfg;

    auto* density = app.add_subcommand("density", "stationary density pi(u, v) on a grid");
    add_params(density, c);
    add_grid(density, o.density_u, "u", 0.0, 2.0, 50);
    add_grid(density, o.density_v, "v", 0.0, 2.0, 50);
    auto* dsteps = density->add_option("--steps", "steps along both axes")->check(CLI::Range(2, 100000));
    density->add_option("--tol", o.density_tol)->default_val(1e-10);

    auto* boundary = app.add_subcommand("boundary", "boundary densities nu1, nu2 on a grid");
    add_params(boundary, c);
    boundary->add_option("--u-min", o.boundary_u.min, "first grid point (default u-max/steps)")->default_val(0.0);
    boundary->add_option("--u-max", o.boundary_u.max)->default_val(2.0);
    boundary->add_option("--steps", o.boundary_u.steps)->default_val(200)->check(CLI::Range(2, 100000000));
    boundary->add_option("--method", o.method, "theta, bi-infinite or symmetric")->default_val("theta");
    boundary->add_option("--tol", o.boundary_tol)->default_val(1e-10);

    auto* laplace = app.add_subcommand("laplace", "Laplace transforms pi_hat, nu1_hat, nu2_hat on a grid");
    add_params(laplace, c);
    add_grid(laplace, o.laplace_x, "x", 0.0, 3.0, 5);
    add_grid(laplace, o.laplace_y, "y", 0.0, 3.0, 5);
    auto* lsteps = laplace->add_option("--steps", "steps along both axes")->check(CLI::Range(2, 100000));
    laplace->add_option("--x-im", o.x_im, "imaginary part added to every x")->default_val(0.0);
    laplace->add_option("--y-im", o.y_im, "imaginary part added to every y")->default_val(0.0);

    auto* theta = app.add_subcommand("theta", "theta_mu(exp(-u)) and its u-derivative");
    add_grid(theta, o.theta_u, "u", 0.05, 50.0, 60);
    theta->add_option("--out", c.out);
    auto* tsteps = theta->add_option("--steps", "alias of --u-steps")->check(CLI::Range(2, 100000000));
    theta->add_option("--mu", o.mus, "one or more mu in (0, 1)")->default_val(std::vector<double>{0.5});
    theta->add_flag("--log", o.log_grid, "logarithmic u grid");
    theta->add_option("--tol", o.theta_tol)->default_val(1e-10);

    auto* simulate = app.add_subcommand("simulate", "Euler simulation of the gap process");
    add_params(simulate, c);
    simulate->add_option("--seed", c.seed);
    simulate->add_option("--dt", o.dt)->default_val(1e-3);
    auto* total = simulate->add_option("--t-total", o.t_total, "simulated time per chain");
    simulate->add_option("--samples", o.samples, "post burn-in samples over all chains")->excludes(total);
    simulate->add_option("--burn-in", o.burn_in, "default 50/min(lambda1, lambda2)");
    simulate->add_option("--thin", o.thin)->default_val(1);
    simulate->add_option("--chains", o.chains)->default_val(1);
    simulate->add_option("--histogram-bins", o.bins, "write a bins x bins histogram instead of samples");
    simulate->add_option("--range", o.range, "histogram range per axis (default 4/(lambda1+lambda2))");

    auto* convolve = app.add_subcommand("convolve", "sample an infinite convolution of exponentials");
    add_params(convolve, c);
    convolve->add_option("--case", o.conv_case, "sum_gh, two_g_plus_h or nu")->default_val("sum_gh");
    convolve->add_option("--side", o.side)->default_val(1)->check(CLI::Range(1, 2));
    convolve->add_option("--samples", o.samples);
    convolve->add_option("--k-max", o.k_max)->default_val(1000)->check(CLI::Range(1, 100000000));
    convolve->add_option("--seed", c.seed);

    auto* verify = app.add_subcommand("verify", "run the verification suite and write a json report");
    add_params(verify, c);
    verify->add_option("--level", o.level, "quick or full")->default_val("quick");
    verify->add_option("--seed", c.seed, "required for --level full");
    verify->add_option("--tol-override", o.overrides, "name=value, repeatable");
    verify->add_option("--format", c.format)->default_val("json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        c.subcommand = sub->get_name();
        if (sub == density) {
            c.u = o.density_u;
            c.v = o.density_v;
            c.tol = o.density_tol;
            if (dsteps->count() > 0) c.u.steps = c.v.steps = dsteps->as<int>();
        } else if (sub == boundary) {
            c.u = o.boundary_u;
            c.tol = o.boundary_tol;
        } else if (sub == laplace) {
            c.u = o.laplace_x;
            c.v = o.laplace_y;
            if (lsteps->count() > 0) c.u.steps = c.v.steps = lsteps->as<int>();
        } else if (sub == theta) {
            c.u = o.theta_u;
            c.tol = o.theta_tol;
            if (tsteps->count() > 0) c.u.steps = tsteps->as<int>();
        }
        if (sub == theta) return run_theta(o, out, err);
        const ModelParams p = resolve_params(c);
        if (sub == density) return run_density(o, p, out, err);
        if (sub == boundary) return run_boundary(o, p, out, err);
        if (sub == laplace) return run_laplace(o, p, out, err);
        if (sub == simulate) return run_simulate(o, p, out, err);
        if (sub == convolve) return run_convolve(o, p, out, err);
        return run_verify(o, p, out, err);
    } catch (const ParameterError& e) {
        err << "parameter error: " << e.what() << '\n';
        return 1;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return 1;
    } catch (const std::ios_base::failure& e) {
        err << "i/o error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace rankgap::cli
