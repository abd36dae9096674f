#include "mirrorvi/certify.hpp"

#include <limits>
#include <stdexcept>

namespace mirrorvi {

namespace {

void require_samples(long n) {
    if (n < 1) throw std::invalid_argument("certifier needs at least one sample");
}

CertReport base_report(std::string assumption, double constant,
                       const Sampler& sampler, long n) {
    CertReport r;
    r.assumption = std::move(assumption);
    r.tested_constant = constant;
    r.max_violation = -std::numeric_limits<double>::infinity();
    r.samples_used = n;
    r.seed = sampler.seed;
    return r;
}

void consider(CertReport& r, double violation, std::vector<Vector> sample) {
    if (violation > r.max_violation) {
        r.max_violation = violation;
        r.witness = std::move(sample);
    }
}

} // namespace

CertReport certify_relative_lipschitz(const Operator& f, const MirrorMap& map,
                                      double lambda, const Sampler& sampler,
                                      long n) {
    require_samples(n);
    auto report = base_report("relative-lipschitz", lambda, sampler, n);
    Rng rng(sampler.seed);
    for (long i = 0; i < n; ++i) {
        Vector u = sampler.domain.sample(rng);
        Vector v = sampler.domain.sample(rng);
        Vector z = sampler.domain.sample(rng);
        const double lhs = (f(v) - f(u)).dot(v - z);
        const double rhs = bregman(map, v, u).value + bregman(map, z, v).value;
        consider(report, lhs - lambda * rhs, {u, v, z});
    }
    return report;
}

CertReport certify_eta_monotone(const Operator& f, double eta,
                                const Sampler& sampler, long n) {
    require_samples(n);
    auto report = base_report("eta-monotone", eta, sampler, n);
    Rng rng(sampler.seed);
    for (long i = 0; i < n; ++i) {
        Vector u = sampler.domain.sample(rng);
        Vector up = sampler.domain.sample(rng);
        const Vector du = u - up;
        consider(report, eta * du.squaredNorm() - (f(u) - f(up)).dot(du),
                 {u, up});
    }
    return report;
}

CertReport certify_tau_comonotone(const Operator& f, double tau,
                                  const Sampler& sampler, long n) {
    require_samples(n);
    auto report = base_report("tau-comonotone", tau, sampler, n);
    Rng rng(sampler.seed);
    for (long i = 0; i < n; ++i) {
        Vector u = sampler.domain.sample(rng);
        Vector up = sampler.domain.sample(rng);
        const Vector df = f(u) - f(up);
        consider(report, tau * df.squaredNorm() - df.dot(u - up), {u, up});
    }
    return report;
}

CertReport certify_generalized_monotone(const Operator& f,
                                        const Vector& u_star,
                                        const Sampler& sampler, long n) {
    require_samples(n);
    if (u_star.size() != f.dim)
        throw std::invalid_argument("u_star dimension mismatch");
    auto report = base_report("generalized-monotone", 0.0, sampler, n);
    Rng rng(sampler.seed);
    for (long i = 0; i < n; ++i) {
        Vector ub = sampler.domain.sample(rng);
        consider(report, -f(ub).dot(ub - u_star), {ub});
    }
    return report;
}

CertReport certify_pseudo_monotone(const Operator& f, const Sampler& sampler,
                                   long n) {
    require_samples(n);
    auto report = base_report("pseudo-monotone", 0.0, sampler, n);
    Rng rng(sampler.seed);
    long used = 0;
    for (long i = 0; i < n; ++i) {
        Vector u = sampler.domain.sample(rng);
        Vector up = sampler.domain.sample(rng);
        const Vector d = up - u;
        if (f(u).dot(d) < 0.0) {
            ++report.skipped;
            continue;
        }
        ++used;
        consider(report, -f(up).dot(d), {u, up});
    }
    report.samples_used = used;
    if (used == 0) {
        report.vacuous = true;
        report.max_violation = 0.0;
    }
    return report;
}

CertReport certify_weak_mvi(const Operator& f, double rho, const Vector& u_star,
                            const Sampler& sampler, long n) {
    require_samples(n);
    if (!(rho > 0.0))
        throw std::invalid_argument("weak MVI requires rho > 0");
    if (u_star.size() != f.dim)
        throw std::invalid_argument("u_star dimension mismatch");
    auto report = base_report("weak-mvi", rho, sampler, n);
    Rng rng(sampler.seed);
    for (long i = 0; i < n; ++i) {
        Vector ub = sampler.domain.sample(rng);
        const Vector fu = f(ub);
        consider(report, -(fu.dot(ub - u_star) + 0.5 * rho * fu.squaredNorm()),
                 {ub});
    }
    return report;
}

CertReport certify_restricted_monotone(const Operator& f, const MirrorMap& map,
                                       double mu, const Vector& u_star,
                                       const Sampler& sampler, long n) {
    require_samples(n);
    if (u_star.size() != f.dim)
        throw std::invalid_argument("u_star dimension mismatch");
    auto report = base_report("restricted-monotone", mu, sampler, n);
    Rng rng(sampler.seed);
    for (long i = 0; i < n; ++i) {
        Vector ub = sampler.domain.sample(rng);
        const double d = bregman(map, u_star, ub).value;
        consider(report, 2.0 * mu * d - f(ub).dot(ub - u_star), {ub});
    }
    return report;
}

} // namespace mirrorvi
