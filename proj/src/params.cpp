#include "rankgap/params.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "rankgap/errors.hpp"

namespace rankgap {

namespace {

ModelParams build(double l1, double l2) {
    ModelParams p;
    p.lambda1 = l1;
    p.lambda2 = l2;
    p.lambda_sum = l1 + l2;
    p.mu1 = l1 / (l1 + l2);
    p.mu2 = 1.0 - p.mu1;
    p.symmetric = std::abs(l1 - l2) <= 1e-14 * std::max(l1, l2);
    return p;
}

}  // namespace

ModelParams params_from_deltas(double d1, double d2, double d3) {
    if (!std::isfinite(d1) || !std::isfinite(d2) || !std::isfinite(d3))
        throw ParameterError("drifts must be finite");
    if (!(d1 < d2)) throw ParameterError("drift ordering violated: need delta1 < delta2");
    if (!(d2 < d3)) throw ParameterError("drift ordering violated: need delta2 < delta3");
    ModelParams p = build(2.0 * (d2 - d1), 2.0 * (d3 - d2));
    p.deltas = std::array<double, 3>{d1, d2, d3};
    return p;
}

ModelParams params_from_lambdas(double l1, double l2) {
    if (!std::isfinite(l1) || !(l1 > 0.0)) throw ParameterError("lambda1 must be positive and finite");
    if (!std::isfinite(l2) || !(l2 > 0.0)) throw ParameterError("lambda2 must be positive and finite");
    ModelParams p = build(l1, l2);
    p.deltas = std::array<double, 3>{0.0, l1 / 2.0, l1 / 2.0 + l2 / 2.0};
    return p;
}

ModelParams ModelParams::swapped() const { return params_from_lambdas(lambda2, lambda1); }

ModelParams ModelParams::normalized() const { return params_from_lambdas(mu1, mu2); }

double ModelParams::lambda(int side) const {
    check_side(side);
    return side == 1 ? lambda1 : lambda2;
}

double ModelParams::mu(int side) const {
    check_side(side);
    return side == 1 ? mu1 : mu2;
}

std::string ModelParams::describe() const {
    auto num = [](double x) {
        char buf[32];
        return std::string(buf, std::to_chars(buf, buf + sizeof buf, x).ptr);
    };
    std::string s = "lambda1=" + num(lambda1) + " lambda2=" + num(lambda2);
    if (deltas) s += " delta=(" + num((*deltas)[0]) + "," + num((*deltas)[1]) + "," + num((*deltas)[2]) + ")";
    return s;
}

void check_side(int side) {
    if (side != 1 && side != 2) throw UsageError("side must be 1 or 2");
}

}  // namespace rankgap
