#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "amput/asymptotics.hpp"
#include "amput/balayage.hpp"
#include "amput/canonical.hpp"
#include "amput/error.hpp"
#include "amput/io.hpp"
#include "amput/obstacle.hpp"

namespace amput::cli {

enum class Format { csv, json };

struct RunConfig {
    std::string mode;  ///< solve, balayage, asymptotics, lattice, perturb, transform, plotdata
    CanonicalParams params;
    std::optional<MarketParams> market;  ///< overrides params when set
    double t_max = 8.0;
    double h = 2.5e-3;
    double dt = 5e-4;
    LcpMethod method = LcpMethod::policy_iteration;
    fs::path output_dir = ".";
    Format format = Format::csv;

    fs::path boundary;  ///< input curve for balayage, asymptotics, plotdata
    fs::path report;    ///< optional report for plotdata
    std::vector<cplx> s_values{2.0, 4.0, 9.0, 16.0, {4.0, 2.0}, {4.0, -2.0}};
    std::size_t steps = 4000;  ///< lattice
    double expiry = 3.0;       ///< lattice, market time
    double delta = 0.05;       ///< perturb
    std::vector<double> times{0.5, 1.0, 2.0};
    std::vector<double> sweep_rho;
    bool params_given = false;  ///< rho/theta/market set explicitly rather than read from solution.json
    bool grid_given = false;    ///< h/dt set explicitly

    void validate() const;
};

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitIo = 4;

[[nodiscard]] int exit_code(ErrorKind kind);

/// Dispatches on config.mode; messages go to out, diagnostics to err.
[[nodiscard]] int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses flags (and an optional --config JSON file, which flags override) and runs.
[[nodiscard]] int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Columns t,phi,mu_line,lemma_lower_bound,expansion_n0.
void emit_plot_data(const BoundaryCurve& curve, const AsymptoticReport& report, const fs::path& path);

/// "re", "re+imi" or "re-imi".
[[nodiscard]] cplx parse_complex(const std::string& text);

}  // namespace amput::cli
