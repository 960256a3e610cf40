#pragma once

#include <array>
#include <optional>
#include <string>

namespace rankgap {

struct ModelParams {
    std::optional<std::array<double, 3>> deltas;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double mu1 = 0.5;
    double mu2 = 0.5;
    double lambda_sum = 2.0;
    bool symmetric = true;

    // lambda1 <-> lambda2; maps every side-2 formula onto the side-1 one.
    ModelParams swapped() const;
    // (mu1, mu2): the same model with lambda_sum scaled to 1.
    ModelParams normalized() const;
    // lambda_i for side 1 or 2, and mu_i likewise.
    double lambda(int side) const;
    double mu(int side) const;
    std::string describe() const;
};

ModelParams params_from_deltas(double d1, double d2, double d3);
ModelParams params_from_lambdas(double l1, double l2);

// Throws UsageError unless side is 1 or 2.
void check_side(int side);

}  // namespace rankgap
