#pragma once

#include "rankgap/params.hpp"

namespace rankgap {

enum class SeriesRegime { direct, transformed };

struct SeriesValue {
    double value = 0.0;
    int terms_used = 0;
    double tail_bound = 0.0;
    SeriesRegime regime = SeriesRegime::direct;
};

// theta_mu(e^{-u}) = sum_{n in Z} (n + mu/2) e^{-n(n+mu)u}.
SeriesValue theta_mu(double u, double mu, double tol);

// d^order/du^order of u -> theta_mu(e^{-scale u}), order in {1,2,3}.
SeriesValue theta_mu_derivative(double u, double mu, int order, double tol, double scale);
SeriesValue theta_mu_derivative(double u, double mu, int order, double tol, const ModelParams& p);

// sum_k w[k] d^k/du^k theta_mu(e^{-scale u}), each term combined before summing.
SeriesValue theta_mu_combination(double u, double mu, const double (&w)[4], double tol, double scale);

// int_0^inf theta_mu1(e^{-L u}) e^{-x u} du; pole at x = 0.
double theta_laplace_closed(double x, const ModelParams& p);

// Brownian motion on (0,1) killed at both ends.
SeriesValue killed_bm_density(double t, double x, double y, double tol);
// Entrance density from 0 of the process conditioned to stay in (0,1).
SeriesValue entrance_density(double t, double y, double tol);

// Ramanujan's f(a,b) and g(a,b) for real a, b > 0 with ab < 1.
SeriesValue ramanujan_f(double a, double b, double tol);
SeriesValue ramanujan_g(double a, double b, double tol);
double ramanujan_relation_residual(double u, double mu, double tol);

namespace theta_detail {
SeriesValue killed_bm_images(double t, double x, double y, double tol);
SeriesValue killed_bm_eigen(double t, double x, double y, double tol);
}  // namespace theta_detail

}  // namespace rankgap
