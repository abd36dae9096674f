#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mirrorvi/mirror_map.hpp"
#include "mirrorvi/operators.hpp"
#include "mirrorvi/sampling.hpp"

namespace mirrorvi {

/// Outcome of sampling one of the Lipschitz-like / monotone-like conditions
/// at a fixed constant. max_violation <= 0 means "certified at the tested
/// constant on the sample"; these are sampled checks, never proofs, hence the
/// fixed disclaimer tag. Each certifier call owns its seeded generator, so
/// concurrent invocations are safe.
struct CertReport {
    std::string assumption;        // e.g. "relative-lipschitz"
    double tested_constant = 0.0;  // lambda, eta, tau, rho, or mu
    double max_violation = 0.0;
    std::vector<Vector> witness;   // sample achieving max_violation
    long samples_used = 0;
    long skipped = 0;              // pairs failing an antecedent (pseudo-monotone)
    std::uint64_t seed = 0;
    bool vacuous = false;          // every sample skipped
    static constexpr const char* kDisclaimer = "sample-certified";

    bool certified() const { return !vacuous && max_violation <= 0.0; }
};

/// <F(v)-F(u), v-z> <= lambda * (D^{u*}(v,u) + D^{v*}(z,v)) on sampled
/// triples (u, v, z), canonical subgradients u* = psi_grad(u), v* = psi_grad(v).
CertReport certify_relative_lipschitz(const Operator& f, const MirrorMap& map,
                                      double lambda, const Sampler& sampler,
                                      long n);

/// <F(u)-F(u'), u-u'> >= eta * ||u-u'||^2 on sampled pairs (Euclidean norm).
CertReport certify_eta_monotone(const Operator& f, double eta,
                                const Sampler& sampler, long n);

/// <F(u)-F(u'), u-u'> >= tau * ||F(u)-F(u')||^2 on sampled pairs.
CertReport certify_tau_comonotone(const Operator& f, double tau,
                                  const Sampler& sampler, long n);

/// <F(u_bar), u_bar - u_star> >= 0 on sampled u_bar, for a supplied strong
/// solution u_star.
CertReport certify_generalized_monotone(const Operator& f,
                                        const Vector& u_star,
                                        const Sampler& sampler, long n);

/// <F(u), u'-u> >= 0  implies  <F(u'), u'-u> >= 0 on sampled pairs; pairs
/// failing the antecedent are skipped and counted, and a fully skipped sample
/// is flagged vacuous.
CertReport certify_pseudo_monotone(const Operator& f, const Sampler& sampler,
                                   long n);

/// <F(u_bar), u_bar - u_star> >= -(rho/2) * ||F(u_bar)||^2 on sampled u_bar;
/// rho must be positive.
CertReport certify_weak_mvi(const Operator& f, double rho,
                            const Vector& u_star, const Sampler& sampler,
                            long n);

/// <F(u_bar), u_bar - u_star> >= 2*mu * D^{u_bar*}(u_star, u_bar) on sampled
/// interior u_bar with the canonical subgradient.
CertReport certify_restricted_monotone(const Operator& f,
                                       const MirrorMap& map, double mu,
                                       const Vector& u_star,
                                       const Sampler& sampler, long n);

} // namespace mirrorvi
