#include "mirrorvi/solvers.hpp"

#include <cmath>
#include <stdexcept>

namespace mirrorvi {

const char* to_string(DualPolicy p) {
    switch (p) {
        case DualPolicy::MirrorProx: return "mirror-prox";
        case DualPolicy::DualExtrapolation: return "dual-extrapolation";
        case DualPolicy::BregmanDual: return "bregman-dual";
    }
    return "?";
}

const char* to_string(Framework f) {
    return f == Framework::Meg ? "meg" : "mep";
}

std::optional<DualPolicy> policy_from_string(const std::string& s) {
    if (s == "mirror-prox") return DualPolicy::MirrorProx;
    if (s == "dual-extrapolation") return DualPolicy::DualExtrapolation;
    if (s == "bregman-dual") return DualPolicy::BregmanDual;
    return std::nullopt;
}

const char* to_string(ScheduleKind k) {
    switch (k) {
        case ScheduleKind::MegConstant: return "meg-constant";
        case ScheduleKind::MegPlus: return "meg-plus";
        case ScheduleKind::MepMonotone: return "mep-monotone";
        case ScheduleKind::MepLinear: return "mep-linear";
        case ScheduleKind::MepLan: return "mep-lan";
    }
    return "?";
}

std::optional<ScheduleKind> schedule_kind_from_string(const std::string& s) {
    if (s == "meg-constant") return ScheduleKind::MegConstant;
    if (s == "meg-plus") return ScheduleKind::MegPlus;
    if (s == "mep-monotone") return ScheduleKind::MepMonotone;
    if (s == "mep-linear") return ScheduleKind::MepLinear;
    if (s == "mep-lan") return ScheduleKind::MepLan;
    return std::nullopt;
}

MegState meg_init(const MirrorMap& map, const Vector& u0) {
    if (!map.contains(u0))
        throw std::domain_error("meg_init: u0 must be feasible");
    MegState s;
    s.u = u0;
    s.dual = map.psi_grad(u0);  // makes all policies coincide at k = 0
    s.ubar = u0;
    s.k = 0;
    return s;
}

MepState mep_init(const MirrorMap& map, const Operator& f, const Vector& u0) {
    if (!map.contains(u0))
        throw std::domain_error("mep_init: u0 must be feasible");
    MepState s;
    s.u = u0;
    s.u_prev = u0;  // u_{-1} = u_0, so the extrapolation term vanishes at k = 0
    s.f_u = f(u0);
    s.f_prev = s.f_u;
    s.dual = map.psi_grad(u0);
    s.k = 0;
    return s;
}

MegState meg_step(const MegState& state, const Operator& f,
                  const MirrorMap& map, double alpha, double beta,
                  DualPolicy policy) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("meg_step: alpha must be positive");
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("meg_step: beta must lie in (0, 1]");

    const Vector f_u = f(state.u);
    const Vector sel1 = (policy == DualPolicy::BregmanDual)
                            ? state.dual
                            : map.psi_grad(state.u);
    const Vector ubar = map.conj_grad(sel1 - (alpha / beta) * f_u);
    const Vector f_ubar = f(ubar);
    const Vector& sel2 =
        (policy == DualPolicy::MirrorProx) ? sel1 : state.dual;

    MegState next;
    next.dual = sel2 - alpha * f_ubar;
    next.u = map.conj_grad(next.dual);
    if (policy == DualPolicy::MirrorProx) next.dual = state.dual;  // untracked
    next.ubar = ubar;
    next.f_ubar = f_ubar;
    next.k = state.k + 1;
    return next;
}

MepState mep_step(const MepState& state, const Operator& f,
                  const MirrorMap& map, double alpha, double beta,
                  DualPolicy policy) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("mep_step: alpha must be positive");
    if (!(beta >= 0.0))
        throw std::invalid_argument("mep_step: beta must be nonnegative");
    if (policy == DualPolicy::DualExtrapolation)
        throw std::invalid_argument(
            "mep_step: policy must be mirror-prox (operator extrapolation) or "
            "bregman-dual");

    const Vector xi = alpha * state.f_u + (alpha * beta) * (state.f_u - state.f_prev);
    const Vector sel = (policy == DualPolicy::BregmanDual)
                           ? state.dual
                           : map.psi_grad(state.u);

    MepState next;
    next.dual = sel - xi;
    next.u = map.conj_grad(next.dual);
    if (policy != DualPolicy::BregmanDual) next.dual = state.dual;
    next.u_prev = state.u;
    next.f_prev = state.f_u;
    next.f_u = f(next.u);  // the single fresh evaluation of this step
    next.k = state.k + 1;
    return next;
}

Schedule make_schedule(ScheduleKind kind, double lambda,
                       std::optional<double> mu,
                       std::optional<double> beta_override) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("make_schedule: lambda must be positive");

    Schedule s;
    s.kind = kind;
    s.lambda = lambda;
    switch (kind) {
        case ScheduleKind::MegConstant: {
            const double beta = beta_override.value_or(1.0);
            if (!(beta > 0.0 && beta <= 1.0))
                throw std::invalid_argument(
                    "make_schedule: meg-constant needs beta in (0, 1]");
            s.beta0 = beta;
            s.alpha0 = beta / lambda;
            break;
        }
        case ScheduleKind::MegPlus:
            s.alpha0 = 1.0 / (2.0 * lambda);
            s.beta0 = 0.5;
            break;
        case ScheduleKind::MepMonotone:
            s.alpha0 = 1.0 / (2.0 * lambda);
            s.beta0 = 1.0;
            break;
        case ScheduleKind::MepLinear: {
            if (!mu || !(*mu > 0.0))
                throw std::invalid_argument(
                    "make_schedule: mep-linear needs mu > 0");
            s.mu = *mu;
            s.kappa = s.mu / lambda;
            s.theta0 = (s.kappa - 1.0 + std::sqrt(1.0 + s.kappa * s.kappa)) / s.kappa;
            s.alpha0 = s.theta0 / (2.0 * lambda);
            s.beta0 = 1.0 / (1.0 + s.kappa * s.theta0);
            s.rate_factor = std::sqrt(1.0 + s.kappa * s.kappa) - s.kappa;
            break;
        }
        case ScheduleKind::MepLan: {
            if (!mu || !(*mu > 0.0))
                throw std::invalid_argument("make_schedule: mep-lan needs mu > 0");
            s.mu = *mu;
            s.kappa = s.mu / lambda;
            s.alpha0 = 1.0 / (2.0 * lambda);
            s.beta0 = 1.0 / (1.0 + s.kappa);
            s.rate_factor = 1.0 / (1.0 + s.kappa);
            break;
        }
    }
    return s;
}

namespace {

double solution_distance(const MirrorMap& map, const Vector& hat,
                         const Vector& at) {
    return bregman(map, hat, at).value;
}

} // namespace

RunTrace run(Framework framework, DualPolicy policy, const Schedule& schedule,
             const Operator& f, const MirrorMap& map, const Vector& u0,
             long T) {
    if (T < 1) throw std::invalid_argument("run: iteration count must be >= 1");
    if (!map.contains(u0)) throw std::domain_error("run: u0 must be feasible");

    RunTrace trace;
    trace.framework = framework;
    trace.policy = policy;
    trace.schedule = schedule;
    trace.u0 = u0;
    trace.rows.reserve(static_cast<size_t>(T));
    trace.cum_alpha.reserve(static_cast<size_t>(T));
    if (f.known_solution)
        trace.dist0 = solution_distance(map, *f.known_solution, u0);

    double s_t = 0.0;
    if (framework == Framework::Meg) {
        MegState state = meg_init(map, u0);
        for (long k = 0; k < T; ++k) {
            const double a = schedule.alpha(k);
            const double b = schedule.beta(k);
            state = meg_step(state, f, map, a, b, policy);
            TraceRow row;
            row.k = k;
            row.alpha = a;
            row.beta = b;
            row.point = state.u;
            row.ubar = state.ubar;
            const double res = map.dual_norm(state.f_ubar);
            row.res_sq = res * res;
            if (f.known_solution)
                row.dist_to_sol =
                    solution_distance(map, *f.known_solution, state.u);
            s_t += a;
            trace.cum_alpha.push_back(s_t);
            trace.rows.push_back(std::move(row));
        }
    } else {
        MepState state = mep_init(map, f, u0);
        for (long k = 0; k < T; ++k) {
            const double a = schedule.alpha(k);
            const double b = schedule.beta(k);
            const double res = map.dual_norm(state.f_u);  // F at the base point u_k
            state = mep_step(state, f, map, a, b, policy);
            TraceRow row;
            row.k = k;
            row.alpha = a;
            row.beta = b;
            row.point = state.u;
            row.res_sq = res * res;
            if (f.known_solution)
                row.dist_to_sol =
                    solution_distance(map, *f.known_solution, state.u);
            s_t += a;
            trace.cum_alpha.push_back(s_t);
            trace.rows.push_back(std::move(row));
        }
    }
    return trace;
}

} // namespace mirrorvi
