#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "amput/asymptotics.hpp"
#include "amput/balayage.hpp"
#include "amput/lattice.hpp"
#include "amput/obstacle.hpp"

#include <json.hpp>

namespace amput {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// Header `t,phi,varphi,dphi`, 17 significant digits.
void write_boundary_csv(const fs::path& path, const BoundaryCurve& curve);

/// Reads the columns back verbatim; params and mu come from the caller.
[[nodiscard]] BoundaryCurve read_boundary_csv(const fs::path& path, const CanonicalParams& p);

/// Header `t,s_star,x_canonical`; x_canonical is the shifted canonical boundary.
void write_lattice_csv(const fs::path& path, const LatticeBoundary& lb, const MarketParams& m);

/// Header `re_s,im_s,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,tail_estimate`.
void write_residual_table(const fs::path& path, const std::vector<BalayageResidual>& rows);

[[nodiscard]] json to_json(const AsymptoticReport& r);
[[nodiscard]] json to_json(const CanonicalParams& p);
[[nodiscard]] json to_json(const GridSpec& g);

[[nodiscard]] json read_json(const fs::path& path);
void write_json(const fs::path& path, const json& doc);
void write_text(const fs::path& path, const std::string& text);

/// %.17g
[[nodiscard]] std::string fmt_double(double v);

}  // namespace amput
