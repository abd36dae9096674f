#include "mirrorvi/operators.hpp"

#include <stdexcept>

namespace mirrorvi {

Operator saddle_gradient(const SaddleProblem& problem,
                         std::optional<Vector> solution) {
    if (problem.dim_x < 1 || problem.dim_y < 1)
        throw std::invalid_argument("saddle problem needs positive dimensions");
    if (!problem.grad_x || !problem.grad_y)
        throw std::invalid_argument("saddle problem needs both gradient oracles");

    const int p = problem.dim_x, q = problem.dim_y;
    Operator op;
    op.dim = p + q;
    op.eval = [problem, p, q](const Vector& u) -> Vector {
        if (u.size() != p + q)
            throw std::invalid_argument("saddle gradient: bad point dimension");
        const Vector x = u.head(p), y = u.tail(q);
        Vector out(p + q);
        out.head(p) = problem.grad_x(x, y);
        out.tail(q) = -problem.grad_y(x, y);
        return out;
    };
    op.known_solution = std::move(solution);
    op.description =
        "saddle-gradient(" + std::to_string(p) + "+" + std::to_string(q) + ")";
    return op;
}

SaddleProblem bilinear_saddle(const Matrix& a) {
    SaddleProblem sp;
    sp.dim_x = static_cast<int>(a.rows());
    sp.dim_y = static_cast<int>(a.cols());
    sp.grad_x = [a](const Vector&, const Vector& y) -> Vector { return a * y; };
    sp.grad_y = [a](const Vector& x, const Vector&) -> Vector {
        return a.transpose() * x;
    };
    sp.payoff = a;
    return sp;
}

Operator bilinear_game(const Matrix& a, std::optional<Vector> solution) {
    const auto p = a.rows();
    const auto q = a.cols();
    if (p < 1 || q < 1)
        throw std::invalid_argument("payoff matrix must be at least 1x1");

    Operator op;
    op.dim = static_cast<int>(p + q);
    op.eval = [a, p, q](const Vector& u) -> Vector {
        if (u.size() != p + q)
            throw std::invalid_argument("bilinear game: bad point dimension");
        Vector out(p + q);
        out.head(p) = a * u.tail(q);           // grad_x of x'Ay
        out.tail(q) = -a.transpose() * u.head(p);  // -grad_y of x'Ay
        return out;
    };
    op.known_solution = std::move(solution);
    op.description = "bilinear-game(" + std::to_string(p) + "x" +
                     std::to_string(q) + ")";
    return op;
}

Operator affine_operator(const Matrix& m, const Vector& b,
                         bool require_solution) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("affine operator needs a square matrix");
    if (b.size() != m.rows())
        throw std::invalid_argument("affine operator: offset dimension mismatch");

    Operator op;
    op.dim = static_cast<int>(m.rows());
    op.eval = [m, b](const Vector& u) -> Vector { return m * u - b; };
    op.description = "affine(" + std::to_string(m.rows()) + "d)";

    Eigen::FullPivLU<Matrix> lu(m);
    if (lu.isInvertible()) {
        op.known_solution = lu.solve(b);
    } else if (require_solution) {
        throw std::invalid_argument("affine operator: no unique solution (singular matrix)");
    }
    return op;
}

Operator rotation_operator() {
    Matrix m(2, 2);
    m << 0.0, 1.0, -1.0, 0.0;
    Operator op = affine_operator(m, Vector::Zero(2));
    op.description = "rotation";
    return op;
}

double strong_solution_violation(const Operator& f, const Sampler& sampler,
                                 long n) {
    if (!f.known_solution)
        throw std::invalid_argument("operator has no known solution to check");
    if (n < 1) throw std::invalid_argument("sample count must be positive");
    const Vector& hat = *f.known_solution;
    const Vector f_hat = f(hat);
    Rng rng(sampler.seed);
    double worst = -std::numeric_limits<double>::infinity();
    for (long i = 0; i < n; ++i) {
        const Vector u = sampler.domain.sample(rng);
        worst = std::max(worst, -f_hat.dot(u - hat));
    }
    return worst;
}

} // namespace mirrorvi
