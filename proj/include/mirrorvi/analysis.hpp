#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mirrorvi/solvers.hpp"

namespace mirrorvi {

/// Thrown when a certificate is requested against a trace whose schedule was
/// not generated under the corresponding hypotheses.
class ProvenanceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Step-weighted ergodic average through row index `upto` (inclusive):
/// (1/s_t) sum alpha_k p_k over the extrapolated points (Meg) or the updated
/// iterates (Mep). A convex combination, hence feasible on simplex domains.
Vector ergodic_point(const RunTrace& trace, long upto);

/// Exact duality gap of the bilinear game x'Ay on simplices:
/// max_j (A'x)_j - min_i (Ay)_i. Nonnegative; zero exactly at equilibria.
double duality_gap_bilinear(const Matrix& a, const Vector& x, const Vector& y);

/// max over probes u of <F(u), u_tilde - u>: a sampled lower estimate of the
/// weak-solution gap sup_u <F(u), u_tilde - u>.
double weak_gap(const Operator& f, const Vector& u_tilde,
                const std::vector<Vector>& probes);

/// Certified bound families, named after what they control:
///   MegErgodicGap   ergodic weak gap of the two-call method,
///                   lambda*D0/(beta*(t+1)) under the constant schedule.
///   MegMinResidual  min squared residual of the two-call method under weak
///                   MVI monotonicity, 16 lambda^2 D0/((t+1)(kappa0-4 lambda rho)).
///   MepErgodicGap   ergodic weak gap of the single-call method,
///                   2*lambda*D0/(t+1).
///   MepLinearRate   distance to the solution under restricted monotonicity,
///                   (sqrt(1+kappa^2)-kappa)^{t+1} (2+1/kappa) D0.
enum class BoundKind { MegErgodicGap, MegMinResidual, MepErgodicGap, MepLinearRate };

const char* to_string(BoundKind k);
std::optional<BoundKind> bound_kind_from_string(const std::string& s);

/// Schedule family each bound certificate requires.
ScheduleKind required_schedule(BoundKind kind);

double ergodic_gap_bound(double lambda, double beta, double d0, long t);
double mep_gap_bound(double lambda, double d0, long t);

/// Requires kappa0 - 4*lambda*rho > 0; throws std::domain_error naming the
/// positivity requirement otherwise.
double min_residual_bound(double lambda, double rho, double kappa0, double d0,
                          long t);

double linear_rate_factor(double kappa);  // sqrt(1+kappa^2) - kappa
double linear_rate_bound(double kappa, double d0, long t);

/// Baseline linear-rate bound (1/(1+kappa))^{t+1} (1+1/kappa) D0 used for
/// comparison against the optimized schedule.
double oe_baseline_bound(double kappa, double d0, long t);

struct CertifyParams {
    double d0 = 0.0;  // comparator Bregman distance (or a valid upper bound)
    std::function<double(const Vector&)> gap_oracle;  // gap-based bounds
    double rho = std::numeric_limits<double>::quiet_NaN();     // MegMinResidual
    double kappa0 = std::numeric_limits<double>::quiet_NaN();  // MegMinResidual
};

struct BoundCertificate {
    BoundKind kind = BoundKind::MegErgodicGap;
    double tol = 0.0;
    std::vector<double> bound_values;
    std::vector<double> observed_values;
    bool all_satisfied = false;
    std::optional<long> first_violation;
    double slack_min = 0.0;  // min over t of bound*(1+tol) - observed
};

/// Compare the observed quantity against the certified bound at every
/// recorded t: observed <= bound * (1 + tol). The trace's schedule provenance
/// must match the bound's hypotheses.
BoundCertificate certify(const RunTrace& trace, BoundKind kind,
                         const CertifyParams& params, double tol);

/// Upper bound on D_omega(u, u0) over the feasible set, attained at vertices:
/// sum of per-block worst-vertex KL values for the entropy map, or the
/// farthest box corner for the box map. Throws std::domain_error for
/// unbounded domains.
double vertex_d0_bound(const MirrorMap& map, const Vector& u0);

} // namespace mirrorvi
