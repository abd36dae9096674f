#include "mirrorvi/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace mirrorvi {

const char* to_string(BoundKind k) {
    switch (k) {
        case BoundKind::MegErgodicGap: return "meg-ergodic-gap";
        case BoundKind::MegMinResidual: return "meg-min-residual";
        case BoundKind::MepErgodicGap: return "mep-ergodic-gap";
        case BoundKind::MepLinearRate: return "mep-linear-rate";
    }
    return "?";
}

std::optional<BoundKind> bound_kind_from_string(const std::string& s) {
    if (s == "meg-ergodic-gap") return BoundKind::MegErgodicGap;
    if (s == "meg-min-residual") return BoundKind::MegMinResidual;
    if (s == "mep-ergodic-gap") return BoundKind::MepErgodicGap;
    if (s == "mep-linear-rate") return BoundKind::MepLinearRate;
    return std::nullopt;
}

ScheduleKind required_schedule(BoundKind kind) {
    switch (kind) {
        case BoundKind::MegErgodicGap: return ScheduleKind::MegConstant;
        case BoundKind::MegMinResidual: return ScheduleKind::MegPlus;
        case BoundKind::MepErgodicGap: return ScheduleKind::MepMonotone;
        case BoundKind::MepLinearRate: return ScheduleKind::MepLinear;
    }
    return ScheduleKind::MegConstant;
}

Vector ergodic_point(const RunTrace& trace, long upto) {
    if (upto < 0 || upto >= trace.iterations())
        throw std::invalid_argument("ergodic_point: index out of range");
    const bool use_ubar = trace.framework == Framework::Meg;
    Vector num = Vector::Zero(trace.u0.size());
    for (long k = 0; k <= upto; ++k) {
        const TraceRow& row = trace.rows[static_cast<size_t>(k)];
        num += row.alpha * (use_ubar ? row.ubar : row.point);
    }
    return num / trace.cum_alpha[static_cast<size_t>(upto)];
}

namespace {

void check_simplex(const Vector& v, const char* name) {
    if (v.size() == 0 || v.minCoeff() < -1e-12 ||
        std::abs(v.sum() - 1.0) > 1e-9)
        throw std::invalid_argument(std::string("duality gap: ") + name +
                                    " is not a simplex point");
}

} // namespace

double duality_gap_bilinear(const Matrix& a, const Vector& x, const Vector& y) {
    if (x.size() != a.rows() || y.size() != a.cols())
        throw std::invalid_argument("duality gap: dimension mismatch");
    check_simplex(x, "x");
    check_simplex(y, "y");
    const double best_col = (a.transpose() * x).maxCoeff();  // max_y' f(x, y')
    const double best_row = (a * y).minCoeff();              // min_x' f(x', y)
    return best_col - best_row;
}

double weak_gap(const Operator& f, const Vector& u_tilde,
                const std::vector<Vector>& probes) {
    if (probes.empty())
        throw std::invalid_argument("weak_gap: probe set must be nonempty");
    double worst = -std::numeric_limits<double>::infinity();
    for (const Vector& u : probes)
        worst = std::max(worst, f(u).dot(u_tilde - u));
    return worst;
}

double ergodic_gap_bound(double lambda, double beta, double d0, long t) {
    return lambda * d0 / (beta * static_cast<double>(t + 1));
}

double mep_gap_bound(double lambda, double d0, long t) {
    return 2.0 * lambda * d0 / static_cast<double>(t + 1);
}

double min_residual_bound(double lambda, double rho, double kappa0, double d0,
                          long t) {
    const double denom = kappa0 - 4.0 * lambda * rho;
    if (!(denom > 0.0))
        throw std::domain_error(
            "min_residual_bound: requires kappa0 - 4*lambda*rho > 0");
    return 16.0 * lambda * lambda * d0 / (static_cast<double>(t + 1) * denom);
}

double linear_rate_factor(double kappa) {
    return std::sqrt(1.0 + kappa * kappa) - kappa;
}

double linear_rate_bound(double kappa, double d0, long t) {
    return std::pow(linear_rate_factor(kappa), static_cast<double>(t + 1)) *
           (2.0 + 1.0 / kappa) * d0;
}

double oe_baseline_bound(double kappa, double d0, long t) {
    return std::pow(1.0 / (1.0 + kappa), static_cast<double>(t + 1)) *
           (1.0 + 1.0 / kappa) * d0;
}

BoundCertificate certify(const RunTrace& trace, BoundKind kind,
                         const CertifyParams& params, double tol) {
    const ScheduleKind want = required_schedule(kind);
    if (trace.schedule.kind != want)
        throw ProvenanceError(std::string("trace not generated under the bound's "
                                          "hypotheses: certificate ") +
                              to_string(kind) + " requires schedule " +
                              to_string(want) + ", trace has " +
                              to_string(trace.schedule.kind));
    const Framework want_fw = (kind == BoundKind::MegErgodicGap ||
                               kind == BoundKind::MegMinResidual)
                                  ? Framework::Meg
                                  : Framework::Mep;
    if (trace.framework != want_fw)
        throw ProvenanceError("trace framework does not match the certificate");

    const long T = trace.iterations();
    BoundCertificate cert;
    cert.kind = kind;
    cert.tol = tol;
    cert.bound_values.resize(static_cast<size_t>(T));
    cert.observed_values.resize(static_cast<size_t>(T));

    const double lambda = trace.schedule.lambda;
    const bool gap_based =
        kind == BoundKind::MegErgodicGap || kind == BoundKind::MepErgodicGap;
    if (gap_based && !params.gap_oracle)
        throw std::invalid_argument("certify: gap oracle required");
    if (kind == BoundKind::MepLinearRate && !trace.has_distances())
        throw std::invalid_argument(
            "certify: distance-based certificate needs a known solution");
    if (kind == BoundKind::MegMinResidual &&
        (!std::isfinite(params.rho) || !std::isfinite(params.kappa0)))
        throw std::invalid_argument("certify: rho and kappa0 required");

    Vector erg_num;
    if (gap_based) erg_num = Vector::Zero(trace.u0.size());
    double min_res = std::numeric_limits<double>::infinity();

    for (long t = 0; t < T; ++t) {
        const TraceRow& row = trace.rows[static_cast<size_t>(t)];
        double observed = 0.0, bound = 0.0;
        switch (kind) {
            case BoundKind::MegErgodicGap: {
                erg_num += row.alpha * row.ubar;
                observed = params.gap_oracle(
                    erg_num / trace.cum_alpha[static_cast<size_t>(t)]);
                bound = ergodic_gap_bound(lambda, trace.schedule.beta0,
                                          params.d0, t);
                break;
            }
            case BoundKind::MepErgodicGap: {
                erg_num += row.alpha * row.point;
                observed = params.gap_oracle(
                    erg_num / trace.cum_alpha[static_cast<size_t>(t)]);
                bound = mep_gap_bound(lambda, params.d0, t);
                break;
            }
            case BoundKind::MegMinResidual: {
                min_res = std::min(min_res, row.res_sq);
                observed = min_res;
                bound = min_residual_bound(lambda, params.rho, params.kappa0,
                                           params.d0, t);
                break;
            }
            case BoundKind::MepLinearRate: {
                observed = row.dist_to_sol;
                bound = linear_rate_bound(trace.schedule.kappa, params.d0, t);
                break;
            }
        }
        cert.observed_values[static_cast<size_t>(t)] = observed;
        cert.bound_values[static_cast<size_t>(t)] = bound;
    }

    cert.all_satisfied = true;
    cert.slack_min = std::numeric_limits<double>::infinity();
    for (long t = 0; t < T; ++t) {
        const double slack = cert.bound_values[static_cast<size_t>(t)] * (1.0 + tol) -
                             cert.observed_values[static_cast<size_t>(t)];
        cert.slack_min = std::min(cert.slack_min, slack);
        if (slack < 0.0 && cert.all_satisfied) {
            cert.all_satisfied = false;
            cert.first_violation = t;
        }
    }
    return cert;
}

double vertex_d0_bound(const MirrorMap& map, const Vector& u0) {
    return map.domain_distance_bound(u0);
}

} // namespace mirrorvi
