#pragma once

#include "amput/obstacle.hpp"
#include "amput/tail.hpp"

namespace amput {

/// Standoff from the line Re s = 1.
inline constexpr double kBalayageStandoff = 0.05;

struct LaplacePoint {
    cplx s;
    cplx z;  ///< principal square root, Re z >= 0

    [[nodiscard]] static LaplacePoint from_s(cplx s) { return {s, std::sqrt(s)}; }
};

struct BalayageResidual {
    cplx s;
    cplx lhs;
    cplx rhs;
    double abs_err = 0.0;
    double rel_err = 0.0;
    double tail_estimate = 0.0;
};

/// int_0^inf e^{-varphi (rho + sqrt s)} e^{-(s-1) t} dt: trapezoid on the samples plus the
/// closed-form tail with varphi = 0 past t_max.
[[nodiscard]] cplx balayage_lhs(const BoundaryCurve& curve, cplx s, double* tail_estimate = nullptr);

/// e^{-mu rho}/(1-rho) (1 - rho + theta (rho + sqrt s))/(s - 1) e^{-mu sqrt s}.
[[nodiscard]] cplx balayage_rhs(cplx s, const CanonicalParams& p);

[[nodiscard]] BalayageResidual residual(const BoundaryCurve& curve, cplx s);

enum class DerivativeMode {
    stieltjes,  ///< sums over boundary increments
    pointwise,  ///< trapezoid with the finite-difference derivative
};

/// int |varphi'| e^{-varphi (rho + sqrt s)} e^{-(s-1) t} dt against theta e^{-mu rho}/(1-rho) e^{-mu sqrt s}.
[[nodiscard]] BalayageResidual derivative_identity_residual(const BoundaryCurve& curve, cplx s,
                                                            DerivativeMode mode = DerivativeMode::stieltjes);

struct FluxIdentity {
    double sum = 0.0;       ///< Stieltjes sum over the samples
    double tail = 0.0;      ///< model contribution past t_max
    double integral = 0.0;  ///< sum + tail
    double target = 0.0;    ///< theta e^{-mu rho} / (1 - rho)
    double residual = 0.0;  ///< |integral - target|
};

/// int |varphi'| e^{-rho varphi} e^t dt = theta e^{-mu rho}/(1 - rho).
[[nodiscard]] FluxIdentity flux_identity(const BoundaryCurve& curve);
[[nodiscard]] double flux_identity_residual(const BoundaryCurve& curve);

[[nodiscard]] cplx taylor_partial_sum(cplx z, int N);

/// E_{N+1}(z) = e^z - sum_{k<=N} z^k/k!, summed from the tail for moderate |z|.
[[nodiscard]] cplx taylor_remainder(cplx z, int N);

enum class PhiMode { direct, continued };

/// Phi(z) = L[varphi](z^2 - 1). `direct` integrates the samples (Re z > 0, Re z^2 > 0);
/// `continued` uses [G(z) + E2(z)] / (z + rho), valid for Re z^2 > -1, z != -1.
[[nodiscard]] cplx phi_transform(const BoundaryCurve& curve, cplx z, PhiMode mode);

/// int E_2(-(rho + z) varphi) e^{-(z^2 - 1) t} dt.
[[nodiscard]] cplx e2_integral(const BoundaryCurve& curve, cplx z);

/// 1/(z^2 - 1) - e^{-mu rho}/(1-rho) (1 - rho + theta (z + rho))/(z^2 - 1) e^{-mu z}.
[[nodiscard]] cplx g_closed_form(cplx z, const CanonicalParams& p);

enum class PsiMode {
    from_phi,  ///< mu - (z^2 - 1) Phi(z) with the continued Phi
    e1_form,   ///< theta e^{-mu (z + rho)}/(1 - rho) + int varphi' E_1(-varphi (z + rho)) e^{-(z^2-1) t} dt
    direct,    ///< int |varphi'| e^{-(z^2 - 1) t} dt, Re z^2 > 0
};

[[nodiscard]] cplx psi_transform(const BoundaryCurve& curve, cplx z, PsiMode mode = PsiMode::from_phi);

}  // namespace amput
