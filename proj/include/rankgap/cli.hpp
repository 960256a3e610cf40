#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rankgap::cli {

struct GridSpec {
    double min = 0.0;
    double max = 1.0;
    int steps = 2;
    // min + i (max - min)/(steps - 1)
    std::vector<double> points() const;
};

struct CliConfig {
    std::string subcommand;
    std::optional<double> lambda1, lambda2;
    std::optional<double> delta1, delta2, delta3;
    GridSpec u{0.0, 2.0, 50};
    GridSpec v{0.0, 2.0, 50};
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    double tol = 1e-10;
    std::map<std::string, double> tolerance_overrides;
    std::string format = "csv";
};

// Locale-independent shortest round-trip text; "nan", "inf", "-inf" otherwise.
std::string format_double(double x);

// Exit codes: 0 ok, 1 parameter or usage error, 2 failed verification, 3 I/O or runtime failure.
int cmd_dispatch(int argc, const char* const* argv);
// As above with the default output and diagnostic streams replaced.
int cmd_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rankgap::cli
