#pragma once

#include <optional>

#include "rankgap/kernel.hpp"
#include "rankgap/params.hpp"

namespace rankgap {

enum class TransformMethod { trig_closed_form, infinite_product, via_BAR };

struct TransformValue {
    Complex value;
    TransformMethod method = TransformMethod::trig_closed_form;
    std::optional<int> product_terms;
};

// Laplace transforms of the boundary measures; meromorphic with poles at
// y = -k(k+mu_i)L, |k| >= 2.
TransformValue nu1_hat(Complex y, const ModelParams& p);
TransformValue nu2_hat(Complex x, const ModelParams& p);
TransformValue nu_hat(int side, Complex y, const ModelParams& p);

// Truncated infinite product over 2 <= |k| <= n_factors with a first-order tail
// correction. Valid for y above the first pole.
TransformValue nu1_hat_product(double y, const ModelParams& p, int n_factors);
TransformValue nu2_hat_product(double x, const ModelParams& p, int n_factors);

TransformValue pi_hat(Complex x, Complex y, const ModelParams& p);

Complex ml_shifted_cosine_partial(Complex s, double mu, int n_terms);

// Total mass of nu_i: (2/3)(2 lambda_i + lambda_j).
double nu_mass(int side, const ModelParams& p);

// Exponential rates of the convolution representation of nu_i (normalized):
// k(k+mu_i)L for k in Z \ {-1,0,1}.
double nu_rate(int k, double mu, double L);
// sum over |k| > n of 1/(k(k+mu)); the full sum over Z\{-1,0,1} for n = 1.
double reciprocal_rate_tail(double mu, int n);
// Mean of the normalized nu_i.
double nu_mean(int side, const ModelParams& p);

}  // namespace rankgap
