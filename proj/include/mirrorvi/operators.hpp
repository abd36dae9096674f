#pragma once

#include <functional>
#include <optional>
#include <string>

#include "mirrorvi/sampling.hpp"
#include "mirrorvi/types.hpp"

namespace mirrorvi {

/// A variational-inequality operator F on a feasible set U, with an optional
/// analytically known strong solution (a point u^ with <F(u^), u - u^> >= 0
/// for all feasible u).
struct Operator {
    int dim = 0;
    std::function<Vector(const Vector&)> eval;
    std::optional<Vector> known_solution;
    std::string description;

    Vector operator()(const Vector& u) const { return eval(u); }
};

/// A smooth saddle-point problem min_x max_y f(x, y) given through its
/// partial-gradient oracles. For the bilinear case f = x' A y the payoff
/// matrix is carried alongside (exact gap computations need it).
struct SaddleProblem {
    int dim_x = 0, dim_y = 0;
    std::function<Vector(const Vector& x, const Vector& y)> grad_x, grad_y;
    std::optional<Matrix> payoff;
};

/// The induced operator u = (x, y) -> (grad_x f, -grad_y f).
Operator saddle_gradient(const SaddleProblem& problem,
                         std::optional<Vector> solution = std::nullopt);

/// SaddleProblem for f(x, y) = x' A y.
SaddleProblem bilinear_saddle(const Matrix& a);

/// Saddle-point gradient operator of the bilinear game f(x, y) = x' A y on
/// simplices: u = (x, y) -> (A y, -A' x). `solution` is recorded only when
/// supplied by the caller.
Operator bilinear_game(const Matrix& a,
                       std::optional<Vector> solution = std::nullopt);

/// Affine test operator u -> M u - b on R^d. known_solution = M^{-1} b when M
/// is invertible; with `require_solution` set, a singular M raises
/// std::invalid_argument ("no unique solution").
Operator affine_operator(const Matrix& m, const Vector& b,
                         bool require_solution = false);

/// Planar rotation F(u) = (u2, -u1): monotone, skew, spectral norm 1.
Operator rotation_operator();

/// Max over n sampled feasible u of -<F(u^), u - u^>: nonpositive (up to eps)
/// certifies known_solution as a strong solution on the sample.
double strong_solution_violation(const Operator& f, const Sampler& sampler,
                                 long n);

} // namespace mirrorvi
