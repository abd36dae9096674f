#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mirrorvi/mirror_map.hpp"
#include "mirrorvi/operators.hpp"

namespace mirrorvi {

/// Subgradient-selection rule realizing the named methods:
///   MirrorProx         both selections are psi_grad(u_k); for the
///                      single-call framework this is operator extrapolation.
///   DualExtrapolation  first selection psi_grad(u_k), second the tracked
///                      dual-average vector (two-call framework only).
///   BregmanDual        both selections are the tracked dual vector.
enum class DualPolicy { MirrorProx, DualExtrapolation, BregmanDual };

enum class Framework { Meg, Mep };

const char* to_string(DualPolicy p);
const char* to_string(Framework f);
std::optional<DualPolicy> policy_from_string(const std::string& s);

/// State of the two-call (extragradient) iteration. `f_ubar` caches the
/// operator value at the last extrapolated point so each step performs
/// exactly the two evaluations of the scheme.
struct MegState {
    Vector u;       // u_k
    Vector dual;    // tracked dual vector (unused by MirrorProx)
    Vector ubar;    // last extrapolated point
    Vector f_ubar;  // F(ubar); empty before the first step
    long k = 0;
};

/// State of the single-call (extrapolation) iteration. Operator values are
/// cached so each step performs exactly one fresh evaluation.
struct MepState {
    Vector u;       // u_k
    Vector u_prev;  // u_{k-1}
    Vector f_u;     // F(u_k)
    Vector f_prev;  // F(u_{k-1})
    Vector dual;    // tracked dual vector (BregmanDual only)
    long k = 0;
};

MegState meg_init(const MirrorMap& map, const Vector& u0);
MepState mep_init(const MirrorMap& map, const Operator& f, const Vector& u0);

/// One two-call step:
///   ubar   = conj_grad(sel1 - (alpha/beta) F(u_k))
///   u_next = conj_grad(sel2 - alpha F(ubar))
/// with sel1/sel2 given by the policy; tracking policies update
/// dual <- sel2 - alpha F(ubar). Requires alpha > 0 and beta in (0, 1].
MegState meg_step(const MegState& state, const Operator& f,
                  const MirrorMap& map, double alpha, double beta,
                  DualPolicy policy);

/// One single-call step:
///   xi     = alpha F(u_k) + alpha beta (F(u_k) - F(u_{k-1}))
///   u_next = conj_grad(sel - xi)
/// with sel = psi_grad(u_k) (MirrorProx) or the tracked dual (BregmanDual,
/// which also updates dual <- sel - xi). Requires alpha > 0, beta >= 0.
MepState mep_step(const MepState& state, const Operator& f,
                  const MirrorMap& map, double alpha, double beta,
                  DualPolicy policy);

/// Step-parameter schedules, named after the convergence guarantee whose
/// hypotheses they satisfy:
///   MegConstant  alpha_k = beta/lambda, beta in (0,1] (ergodic-gap bound)
///   MegPlus      alpha_k = 1/(2 lambda), beta = 1/2 (min-residual bound)
///   MepMonotone  alpha_k = 1/(2 lambda), beta_k = 1 (ergodic-gap bound)
///   MepLinear    alpha_k = theta0/(2 lambda), beta_k = 1/(1 + kappa theta0)
///                with kappa = mu/lambda and
///                theta0 = (kappa - 1 + sqrt(1 + kappa^2))/kappa; beta equals
///                the per-step rate factor sqrt(1 + kappa^2) - kappa exactly.
///   MepLan       baseline alpha_k = 1/(2 lambda), beta_k = 1/(1 + kappa)
///                (the comparison schedule for the linear-rate method).
enum class ScheduleKind { MegConstant, MegPlus, MepMonotone, MepLinear, MepLan };

const char* to_string(ScheduleKind k);
std::optional<ScheduleKind> schedule_kind_from_string(const std::string& s);

struct Schedule {
    ScheduleKind kind = ScheduleKind::MegConstant;
    double lambda = 0.0;
    double mu = std::numeric_limits<double>::quiet_NaN();
    double alpha0 = 0.0;
    double beta0 = 1.0;
    // Derived constants for the linear-rate schedules.
    double theta0 = std::numeric_limits<double>::quiet_NaN();
    double kappa = std::numeric_limits<double>::quiet_NaN();
    double rate_factor = std::numeric_limits<double>::quiet_NaN();

    double alpha(long /*k*/) const { return alpha0; }
    double beta(long /*k*/) const { return beta0; }
};

Schedule make_schedule(ScheduleKind kind, double lambda,
                       std::optional<double> mu = std::nullopt,
                       std::optional<double> beta_override = std::nullopt);

/// One recorded iteration. `point` is the updated iterate u_{k+1}; `ubar` is
/// the extrapolated point (two-call framework only). `res_sq` is the squared
/// dual norm of F at the extrapolated point (Meg) or at the base point u_k
/// (Mep). `dist_to_sol` is D_omega(u^, u_{k+1}) when a solution is known.
struct TraceRow {
    long k = 0;
    double alpha = 0.0;
    double beta = 0.0;
    Vector point;
    Vector ubar;
    double res_sq = 0.0;
    double dist_to_sol = std::numeric_limits<double>::quiet_NaN();
};

struct RunTrace {
    Framework framework = Framework::Meg;
    DualPolicy policy = DualPolicy::MirrorProx;
    Schedule schedule;
    std::uint64_t seed = 0;
    Vector u0;
    double dist0 = std::numeric_limits<double>::quiet_NaN();  // D(u^, u0)
    std::vector<TraceRow> rows;
    std::vector<double> cum_alpha;  // s_t = sum_{k<=t} alpha_k, strictly increasing

    long iterations() const { return static_cast<long>(rows.size()); }
    bool has_distances() const { return std::isfinite(dist0); }
};

/// Iterate the chosen stepper T times from u0 (feasible, interior), recording
/// points, residuals, distances to the known solution, and the running step
/// sums used by the ergodic averages. A run owns its state exclusively and is
/// sequential; distinct runs share only immutable maps and operators and may
/// execute concurrently.
RunTrace run(Framework framework, DualPolicy policy, const Schedule& schedule,
             const Operator& f, const MirrorMap& map, const Vector& u0, long T);

} // namespace mirrorvi
