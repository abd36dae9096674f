#include "mirrorvi/mirror_map.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mirrorvi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSimplexSumTol = 1e-12;
constexpr double kBoxTol = 1e-12;

void check_dim(const MirrorMap& map, const Vector& u, const char* what) {
    if (u.size() != map.dim()) {
        std::ostringstream msg;
        msg << what << ": expected dimension " << map.dim() << ", got "
            << u.size();
        throw std::invalid_argument(msg.str());
    }
}

class EuclideanMap final : public MirrorMap {
public:
    explicit EuclideanMap(int dim) : dim_(dim) {
        if (dim <= 0) throw std::invalid_argument("dimension must be positive");
    }

    int dim() const override { return dim_; }

    double psi_value(const Vector& u) const override {
        check_dim(*this, u, "psi_value");
        return 0.5 * u.squaredNorm();
    }

    Vector psi_grad(const Vector& u) const override {
        check_dim(*this, u, "psi_grad");
        return u;
    }

    Vector conj_grad(const Vector& v) const override {
        check_dim(*this, v, "conj_grad");
        return v;
    }

    bool contains(const Vector& u) const override { return u.size() == dim_; }

    std::optional<double> strong_convexity_mu0() const override { return 1.0; }
    std::optional<double> grad_lipschitz_l0() const override { return 1.0; }

    double primal_norm(const Vector& x) const override { return x.norm(); }
    double dual_norm(const Vector& g) const override { return g.norm(); }

    double domain_distance_bound(const Vector&) const override {
        throw std::domain_error(
            "domain_distance_bound: unconstrained Euclidean domain is unbounded");
    }

    std::string describe() const override {
        return "euclidean(dim=" + std::to_string(dim_) + ")";
    }

private:
    int dim_;
};

class EuclideanBoxMap final : public MirrorMap {
public:
    EuclideanBoxMap(Vector lo, Vector hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
        if (lo_.size() != hi_.size() || lo_.size() == 0)
            throw std::invalid_argument("box bounds must have equal positive size");
        if ((lo_.array() > hi_.array()).any())
            throw std::invalid_argument("box lower bound exceeds upper bound");
    }

    int dim() const override { return static_cast<int>(lo_.size()); }

    double psi_value(const Vector& u) const override {
        check_dim(*this, u, "psi_value");
        return 0.5 * u.squaredNorm();
    }

    Vector psi_grad(const Vector& u) const override {
        check_dim(*this, u, "psi_grad");
        return u;
    }

    Vector conj_grad(const Vector& v) const override {
        check_dim(*this, v, "conj_grad");
        return v.cwiseMax(lo_).cwiseMin(hi_);
    }

    bool contains(const Vector& u) const override {
        if (u.size() != lo_.size()) return false;
        return (u.array() >= lo_.array() - kBoxTol).all() &&
               (u.array() <= hi_.array() + kBoxTol).all();
    }

    std::optional<double> strong_convexity_mu0() const override { return 1.0; }
    std::optional<double> grad_lipschitz_l0() const override { return 1.0; }

    double primal_norm(const Vector& x) const override { return x.norm(); }
    double dual_norm(const Vector& g) const override { return g.norm(); }

    double domain_distance_bound(const Vector& u0) const override {
        check_dim(*this, u0, "domain_distance_bound");
        double s = 0.0;
        for (int i = 0; i < lo_.size(); ++i) {
            const double a = lo_[i] - u0[i];
            const double b = hi_[i] - u0[i];
            s += std::max(a * a, b * b);
        }
        return 0.5 * s;
    }

    std::string describe() const override {
        return "euclidean-box(dim=" + std::to_string(lo_.size()) + ")";
    }

    const Vector& lower() const { return lo_; }
    const Vector& upper() const { return hi_; }

private:
    Vector lo_, hi_;
};

class EntropySimplexMap final : public MirrorMap {
public:
    explicit EntropySimplexMap(std::vector<int> blocks) : blocks_(std::move(blocks)) {
        if (blocks_.empty())
            throw std::invalid_argument("at least one simplex block required");
        dim_ = 0;
        for (int b : blocks_) {
            if (b < 1) throw std::invalid_argument("block sizes must be >= 1");
            dim_ += b;
        }
    }

    int dim() const override { return dim_; }

    double psi_value(const Vector& u) const override {
        check_dim(*this, u, "psi_value");
        double s = 0.0;
        for (int i = 0; i < u.size(); ++i) {
            const double ui = u[i];
            if (ui < 0.0) return kInf;
            if (ui > 0.0) s += ui * std::log(ui) - ui;
            // 0 ln 0 := 0, and the -u_i term vanishes too
        }
        return s;
    }

    Vector psi_grad(const Vector& u) const override {
        check_dim(*this, u, "psi_grad");
        Vector g(u.size());
        for (int i = 0; i < u.size(); ++i) {
            if (!(u[i] > 0.0))
                throw std::domain_error(
                    "entropy psi_grad requires a strictly positive point");
            g[i] = std::log(u[i]);
        }
        return g;
    }

    Vector conj_grad(const Vector& v) const override {
        check_dim(*this, v, "conj_grad");
        Vector u(v.size());
        int off = 0;
        for (int b : blocks_) {
            const auto vb = v.segment(off, b);
            const double shift = vb.maxCoeff();
            Eigen::ArrayXd e = (vb.array() - shift).exp();
            u.segment(off, b) = e / e.sum();
            off += b;
        }
        return u;
    }

    bool contains(const Vector& u) const override {
        if (u.size() != dim_) return false;
        int off = 0;
        for (int b : blocks_) {
            double sum = 0.0;
            for (int i = 0; i < b; ++i) {
                const double ui = u[off + i];
                if (ui < -0.0) return false;
                sum += ui;
            }
            if (std::abs(sum - 1.0) > kSimplexSumTol) return false;
            off += b;
        }
        return true;
    }

    // 1-strongly convex w.r.t. the blockwise l1 norm (combined in quadrature).
    std::optional<double> strong_convexity_mu0() const override { return 1.0; }
    std::optional<double> grad_lipschitz_l0() const override { return std::nullopt; }

    double primal_norm(const Vector& x) const override {
        double s = 0.0;
        int off = 0;
        for (int b : blocks_) {
            const double l1 = x.segment(off, b).lpNorm<1>();
            s += l1 * l1;
            off += b;
        }
        return std::sqrt(s);
    }

    double dual_norm(const Vector& g) const override {
        double s = 0.0;
        int off = 0;
        for (int b : blocks_) {
            const double linf = g.segment(off, b).lpNorm<Eigen::Infinity>();
            s += linf * linf;
            off += b;
        }
        return std::sqrt(s);
    }

    // max over u of KL(u || u0) per block is attained at the vertex with the
    // smallest reference weight: ln(1 / min_i u0_i).
    double domain_distance_bound(const Vector& u0) const override {
        check_dim(*this, u0, "domain_distance_bound");
        double s = 0.0;
        int off = 0;
        for (int b : blocks_) {
            const double mn = u0.segment(off, b).minCoeff();
            if (!(mn > 0.0))
                throw std::domain_error(
                    "domain_distance_bound: reference point must be interior");
            s += std::log(1.0 / mn);
            off += b;
        }
        return s;
    }

    std::string describe() const override {
        std::ostringstream os;
        os << "entropy-simplex(blocks=[";
        for (size_t i = 0; i < blocks_.size(); ++i)
            os << (i ? "," : "") << blocks_[i];
        os << "])";
        return os.str();
    }

    const std::vector<int>& blocks() const { return blocks_; }

private:
    std::vector<int> blocks_;
    int dim_ = 0;
};

} // namespace

MapPtr euclidean_map(int dim) { return std::make_shared<EuclideanMap>(dim); }

MapPtr euclidean_box_map(Vector lo, Vector hi) {
    return std::make_shared<EuclideanBoxMap>(std::move(lo), std::move(hi));
}

MapPtr entropy_simplex_map(std::vector<int> block_sizes) {
    return std::make_shared<EntropySimplexMap>(std::move(block_sizes));
}

BregmanEval bregman(const MirrorMap& map, const Vector& u, const Vector& v,
                    const Vector& v_star) {
    check_dim(map, u, "bregman");
    check_dim(map, v, "bregman");
    check_dim(map, v_star, "bregman");
    if (!map.contains(v))
        throw std::domain_error("bregman: base point v must be feasible");

    BregmanEval out;
    out.point_u = u;
    out.point_v = v;
    out.subgrad_vstar = v_star;
    if (!map.contains(u)) {
        out.value = kInf;
        return out;
    }
    out.value = map.psi_value(u) - map.psi_value(v) - v_star.dot(u - v);
    return out;
}

BregmanEval bregman(const MirrorMap& map, const Vector& u, const Vector& v) {
    return bregman(map, u, v, map.psi_grad(v));
}

double three_point_residual(const MirrorMap& map, const Vector& u,
                            const Vector& p, const Vector& q,
                            const Vector& p_star, const Vector& q_star) {
    if (!map.contains(u) || !map.contains(p) || !map.contains(q))
        throw std::domain_error("three_point_residual: all points must be feasible");
    const double d_up = bregman(map, u, p, p_star).value;
    const double d_uq = bregman(map, u, q, q_star).value;
    const double d_pq = bregman(map, p, q, q_star).value;
    return d_up - d_uq + d_pq - (q_star - p_star).dot(u - p);
}

} // namespace mirrorvi
