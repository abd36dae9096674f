#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mirrorvi/types.hpp"

namespace mirrorvi {

/// Distance-generating function omega = psi + indicator(U) with the oracles
/// the solvers need: psi, grad psi on the interior of dom psi, the conjugate
/// gradient of omega (which maps any dual vector into U), and membership in U.
///
/// Shipped maps: unconstrained Euclidean (conj_grad = identity), Euclidean on
/// a box (conj_grad = clamp), and negative entropy on a product of simplices
/// (conj_grad = blockwise softmax).
///
/// All oracles are pure and stateless; one map instance may be shared across
/// concurrent runs without synchronization.
class MirrorMap {
public:
    virtual ~MirrorMap() = default;

    virtual int dim() const = 0;

    /// psi(u); +infinity outside dom psi.
    virtual double psi_value(const Vector& u) const = 0;

    /// grad psi(u); throws std::domain_error outside int dom psi
    /// (e.g. on simplex boundary points, where no gradient exists).
    virtual Vector psi_grad(const Vector& u) const = 0;

    /// grad omega*(v). Total: defined for every dual vector, and the result
    /// always lies in the feasible set.
    virtual Vector conj_grad(const Vector& v) const = 0;

    /// Membership in U (with a small numeric tolerance on equality constraints).
    virtual bool contains(const Vector& u) const = 0;

    /// Strong convexity modulus of omega w.r.t. the map's primal norm,
    /// or nullopt when unknown.
    virtual std::optional<double> strong_convexity_mu0() const = 0;

    /// Lipschitz constant of grad omega (needed only by squared-residual
    /// bounds), or nullopt when unknown.
    virtual std::optional<double> grad_lipschitz_l0() const = 0;

    /// Norm pairing: Euclidean maps use l2/l2; the entropy map uses the
    /// per-block l1 norm (combined in quadrature) and its blockwise linf dual.
    virtual double primal_norm(const Vector& x) const = 0;
    virtual double dual_norm(const Vector& g) const = 0;

    /// max over feasible u of D_omega(u, u0), attained at vertices for the
    /// shipped constrained maps; throws std::domain_error when U is unbounded.
    virtual double domain_distance_bound(const Vector& u0) const = 0;

    virtual std::string describe() const = 0;
};

using MapPtr = std::shared_ptr<MirrorMap>;

/// psi = 0.5*||.||^2 on all of R^d; conj_grad and psi_grad are the identity.
MapPtr euclidean_map(int dim);

/// psi = 0.5*||.||^2 with U = [lo, hi]; conj_grad is the componentwise clamp.
MapPtr euclidean_box_map(Vector lo, Vector hi);

/// Negative entropy psi(u) = sum_i u_i ln u_i - u_i (0 ln 0 := 0) on a product
/// of simplices with the given block sizes; conj_grad is blockwise softmax
/// with a max shift before exponentiation.
MapPtr entropy_simplex_map(std::vector<int> block_sizes);

/// Generalized Bregman distance D_omega^{v*}(u, v) evaluated at a chosen
/// subgradient v* of omega at v. `value` is +infinity when u is infeasible
/// (the indicator part of omega).
struct BregmanEval {
    double value = 0.0;
    Vector point_u;
    Vector point_v;
    Vector subgrad_vstar;

    bool is_finite() const { return std::isfinite(value); }
};

/// D_omega^{v*}(u, v) = omega(u) - omega(v) - <v*, u - v>.
/// Pre: v feasible, v* a subgradient of omega at v (caller-supplied).
/// Infeasible u yields the distinguished infinite result.
BregmanEval bregman(const MirrorMap& map, const Vector& u, const Vector& v,
                    const Vector& v_star);

/// Convenience overload with the canonical subgradient v* = psi_grad(v);
/// throws std::domain_error when v is not interior.
BregmanEval bregman(const MirrorMap& map, const Vector& u, const Vector& v);

/// Floating-point residual of the three-point identity
///   D^{p*}(u,p) - D^{q*}(u,q) + D^{q*}(p,q) - <q* - p*, u - p>,
/// which is identically zero in exact arithmetic.
/// Throws std::domain_error on infeasible arguments.
double three_point_residual(const MirrorMap& map, const Vector& u,
                            const Vector& p, const Vector& q,
                            const Vector& p_star, const Vector& q_star);

} // namespace mirrorvi
