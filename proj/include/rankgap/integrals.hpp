#pragma once

#include "rankgap/params.hpp"

namespace rankgap {

struct IntegralValue {
    double value = 0.0;
    // truncation + rounding + the Chernoff bound on the excluded corner
    double error_bound = 0.0;
    int terms_used = 0;
};

// Scaled cut L delta separating the closed-form term-wise part from the corner.
constexpr double corner_scaled_cut = 0.2;

// Total mass of pi, integrated term by term over {u + v >= delta}.
IntegralValue pi_mass(const ModelParams& p);

// int_0^inf u^moment e^{s u} nu_side(u) du for moment in {0, 1} and s below
// the smallest rate, integrated term by term over [delta, inf).
IntegralValue nu_moment(int side, const ModelParams& p, int moment, double s = 0.0);

// Chernoff bound on int_0^delta nu_side: min_t e^{t delta} nuhat_side(t).
double nu_corner_bound(int side, const ModelParams& p, double delta);
// Chernoff bound on the mass of pi in {u + v < delta}.
double pi_corner_bound(const ModelParams& p, double delta);

}  // namespace rankgap
