#include <doctest.h>

#include <cmath>

#include "mirrorvi/analysis.hpp"

using namespace mirrorvi;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

Matrix pennies() {
    Matrix a(2, 2);
    a << 1, -1, -1, 1;
    return a;
}

// Hand-built scalar trace with given weights and extrapolated points.
RunTrace toy_trace(const std::vector<double>& alphas,
                   const std::vector<double>& points) {
    RunTrace t;
    t.framework = Framework::Meg;
    t.u0 = vec({0.0});
    double s = 0.0;
    for (size_t k = 0; k < alphas.size(); ++k) {
        TraceRow row;
        row.k = static_cast<long>(k);
        row.alpha = alphas[k];
        row.beta = 1.0;
        row.ubar = vec({points[k]});
        row.point = vec({points[k]});
        s += alphas[k];
        t.cum_alpha.push_back(s);
        t.rows.push_back(row);
    }
    return t;
}

} // namespace

TEST_CASE("ergodic point is the step-weighted average") {
    auto constant = toy_trace({1, 1, 1}, {2.5, 2.5, 2.5});
    CHECK(ergodic_point(constant, 2)[0] == doctest::Approx(2.5).epsilon(1e-15));

    auto mean = toy_trace({1, 1}, {0.0, 2.0});
    CHECK(ergodic_point(mean, 1)[0] == doctest::Approx(1.0).epsilon(1e-15));

    auto weighted = toy_trace({1, 3}, {0.0, 2.0});
    CHECK(ergodic_point(weighted, 1)[0] == doctest::Approx(1.5).epsilon(1e-15));

    CHECK_THROWS_AS((void)ergodic_point(weighted, 2), std::invalid_argument);
    CHECK_THROWS_AS((void)ergodic_point(weighted, -1), std::invalid_argument);
}

TEST_CASE("bilinear duality gap") {
    const Matrix a = pennies();
    CHECK(duality_gap_bilinear(a, vec({0.5, 0.5}), vec({0.5, 0.5})) == 0.0);
    CHECK(duality_gap_bilinear(a, vec({1, 0}), vec({1, 0})) ==
          doctest::Approx(2.0).epsilon(1e-15));
    CHECK(duality_gap_bilinear(Matrix::Zero(2, 3), vec({0.5, 0.5}),
                               vec({0.2, 0.3, 0.5})) == 0.0);
    CHECK_THROWS_AS(
        (void)duality_gap_bilinear(a, vec({0.7, 0.6}), vec({0.5, 0.5})),
        std::invalid_argument);
    // Nonnegative on random feasible pairs
    Rng rng(21);
    SampleDomain sx = SampleDomain::simplex_product({2});
    for (int i = 0; i < 200; ++i)
        CHECK(duality_gap_bilinear(a, sx.sample(rng), sx.sample(rng)) >= 0.0);
}

TEST_CASE("weak gap over probes") {
    auto id = affine_operator(Matrix::Identity(1, 1), Vector::Zero(1));
    const std::vector<Vector> probes = {vec({1.0}), vec({-1.0})};
    CHECK(weak_gap(id, vec({0.0}), probes) == doctest::Approx(-1.0));
    CHECK(weak_gap(id, vec({1.0}), {vec({1.0})}) == 0.0);
    CHECK_THROWS_AS((void)weak_gap(id, vec({0.0}), {}), std::invalid_argument);

    // At an equilibrium of the bilinear game, every vertex probe gives <= 0.
    auto game = bilinear_game(pennies());
    const Vector eq = vec({0.5, 0.5, 0.5, 0.5});
    std::vector<Vector> vertices;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Vector v = Vector::Zero(4);
            v[i] = 1.0;
            v[2 + j] = 1.0;
            vertices.push_back(v);
        }
    CHECK(weak_gap(game, eq, vertices) <= 1e-15);
}

TEST_CASE("bound formulas at frozen values") {
    CHECK(ergodic_gap_bound(2.0, 1.0, std::log(4.0), 9) ==
          doctest::Approx(0.2772588722239781).epsilon(1e-15));
    CHECK(ergodic_gap_bound(2.0, 1.0, std::log(4.0), 9) ==
          doctest::Approx(0.277259).epsilon(1e-6));
    CHECK(ergodic_gap_bound(1.0, 1.0, 0.0, 5) == 0.0);
    // 1/(t+1) shape
    const double b10 = ergodic_gap_bound(1.5, 0.5, 2.0, 9);
    const double b20 = ergodic_gap_bound(1.5, 0.5, 2.0, 19);
    CHECK(b10 / b20 == doctest::Approx(2.0).epsilon(1e-14));

    CHECK(min_residual_bound(std::sqrt(1.01), 0.19802, 1.0, 1.0, 99) ==
          doctest::Approx(0.7922755028859286).epsilon(1e-14));
    CHECK(min_residual_bound(1.0, 0.0, 1.0, 1.0, 0) == doctest::Approx(16.0));
    CHECK(min_residual_bound(std::sqrt(1.01), 0.19802, 1.0, 0.0, 99) == 0.0);
    CHECK_THROWS_WITH_AS((void)min_residual_bound(1.0, 0.3, 1.0, 1.0, 0),
                         doctest::Contains("kappa0 - 4*lambda*rho > 0"),
                         std::domain_error);

    CHECK(linear_rate_bound(1.0, 1.0, 0) ==
          doctest::Approx(3.0 * (std::sqrt(2.0) - 1.0)).epsilon(1e-15));
    CHECK(linear_rate_bound(1.0, 1.0, 0) == doctest::Approx(1.242641).epsilon(1e-6));
    CHECK(linear_rate_bound(1.0, 1.0, 1) == doctest::Approx(0.514719).epsilon(1e-6));
    CHECK(linear_rate_bound(0.7, 0.0, 3) == 0.0);
}

TEST_CASE("optimized rate factor beats the baseline for every kappa") {
    for (double kappa : {0.01, 0.1, 0.19611613513818402, 0.5, 1.0, 2.0, 10.0}) {
        CHECK(linear_rate_factor(kappa) < 1.0 / (1.0 + kappa));
        CHECK(linear_rate_factor(kappa) > 0.0);
    }
    CHECK(linear_rate_factor(1.0) == doctest::Approx(0.414214).epsilon(1e-6));
    CHECK(1.0 / (1.0 + 1.0) == 0.5);
}

TEST_CASE("linear-rate certificate on the strongly monotone test problem") {
    Matrix m(2, 2);
    m << 0.2, 1, -1, 0.2;
    auto f = affine_operator(m, Vector::Zero(2));
    auto eu = euclidean_map(2);
    const double lambda = std::sqrt(1.04);
    auto schedule = make_schedule(ScheduleKind::MepLinear, lambda, 0.2);
    auto trace = run(Framework::Mep, DualPolicy::MirrorProx, schedule, f, *eu,
                     vec({1.0, 1.0}), 200);

    CertifyParams params;
    params.d0 = trace.dist0;
    auto cert = certify(trace, BoundKind::MepLinearRate, params, 1e-9);
    CHECK(cert.all_satisfied);
    CHECK(!cert.first_violation.has_value());
    CHECK(cert.observed_values.back() < 1e-12);

    // The distance envelope decreases: the rotation part produces small
    // periodic bumps, but over any 10-step window the distance must shrink.
    for (long t = 0; t + 10 < trace.iterations(); ++t)
        CHECK(cert.observed_values[static_cast<size_t>(t + 10)] <
              cert.observed_values[static_cast<size_t>(t)]);
}

TEST_CASE("ergodic-gap certificate on the matrix game") {
    const Matrix a = pennies();
    auto f = bilinear_game(a);
    auto ent = entropy_simplex_map({2, 2});
    const Vector u0 = vec({0.5, 0.5, 0.5, 0.5});
    auto schedule = make_schedule(ScheduleKind::MegConstant, 2.0);
    auto trace = run(Framework::Meg, DualPolicy::MirrorProx, schedule, f, *ent,
                     u0, 500);

    CertifyParams params;
    params.d0 = ent->domain_distance_bound(u0);
    params.gap_oracle = [&a](const Vector& u) {
        return duality_gap_bilinear(a, u.head(2), u.tail(2));
    };
    auto cert = certify(trace, BoundKind::MegErgodicGap, params, 1e-9);
    CHECK(cert.all_satisfied);
    CHECK(cert.observed_values.back() <= cert.bound_values.back() * (1 + 1e-9));
}

TEST_CASE("ergodic-gap certificate holds for every selection policy") {
    const Matrix a = pennies();
    auto f = bilinear_game(a);
    auto ent = entropy_simplex_map({2, 2});
    const Vector u0 = vec({0.4, 0.6, 0.25, 0.75});
    auto schedule = make_schedule(ScheduleKind::MegConstant, 2.0);
    CertifyParams params;
    params.d0 = ent->domain_distance_bound(u0);
    params.gap_oracle = [&a](const Vector& u) {
        return duality_gap_bilinear(a, u.head(2), u.tail(2));
    };
    for (DualPolicy p : {DualPolicy::MirrorProx, DualPolicy::DualExtrapolation,
                         DualPolicy::BregmanDual}) {
        auto trace = run(Framework::Meg, p, schedule, f, *ent, u0, 400);
        auto cert = certify(trace, BoundKind::MegErgodicGap, params, 1e-9);
        CHECK(cert.all_satisfied);
        CHECK(cert.observed_values.back() > 0.0);  // off-equilibrium start
    }
}

TEST_CASE("min-residual certificate under the weak MVI setup") {
    Matrix m(2, 2);
    m << -0.1, 1, -1, -0.1;
    auto f = affine_operator(m, Vector::Zero(2));
    auto eu = euclidean_map(2);
    const double lambda = std::sqrt(1.01);
    auto schedule = make_schedule(ScheduleKind::MegPlus, lambda);
    auto trace = run(Framework::Meg, DualPolicy::MirrorProx, schedule, f, *eu,
                     vec({1.0, 1.0}), 300);

    CertifyParams params;
    params.d0 = trace.dist0;
    params.rho = 0.2;
    params.kappa0 = 1.0;
    auto cert = certify(trace, BoundKind::MegMinResidual, params, 1e-9);
    CHECK(cert.all_satisfied);
    // min residual is nonincreasing by construction
    for (size_t t = 1; t < cert.observed_values.size(); ++t)
        CHECK(cert.observed_values[t] <= cert.observed_values[t - 1]);
}

TEST_CASE("optimized schedule stays ahead of the baseline at kappa = 1") {
    // F = identity has lambda = mu = 1.
    auto f = affine_operator(Matrix::Identity(2, 2), Vector::Zero(2));
    auto eu = euclidean_map(2);
    const Vector u0 = vec({1.0, -0.5});
    auto lin = run(Framework::Mep, DualPolicy::MirrorProx,
                   make_schedule(ScheduleKind::MepLinear, 1.0, 1.0), f, *eu, u0,
                   150);
    auto lan = run(Framework::Mep, DualPolicy::MirrorProx,
                   make_schedule(ScheduleKind::MepLan, 1.0, 1.0), f, *eu, u0,
                   150);
    for (long t : {10L, 100L}) {
        CHECK(lin.rows[static_cast<size_t>(t)].dist_to_sol <=
              lan.rows[static_cast<size_t>(t)].dist_to_sol);
        CHECK(linear_rate_bound(1.0, lin.dist0, t) <
              oe_baseline_bound(1.0, lan.dist0, t));
    }
    // Bound-sequence comparison is exact: (sqrt(2)-1)^t shrinks faster than 2^-t.
    CHECK(linear_rate_factor(1.0) < 0.5);
}

TEST_CASE("certificates demand matching schedule provenance") {
    auto eu = euclidean_map(2);
    Matrix m(2, 2);
    m << -0.1, 1, -1, -0.1;
    auto f = affine_operator(m, Vector::Zero(2));
    auto trace = run(Framework::Meg, DualPolicy::MirrorProx,
                     make_schedule(ScheduleKind::MegPlus, 1.0), f, *eu,
                     vec({1.0, 1.0}), 10);
    CertifyParams params;
    params.d0 = 1.0;
    CHECK_THROWS_AS((void)certify(trace, BoundKind::MepLinearRate, params, 1e-9),
                    ProvenanceError);
    CHECK_THROWS_AS((void)certify(trace, BoundKind::MegErgodicGap, params, 1e-9),
                    ProvenanceError);
}

TEST_CASE("weak gap of a monotone ergodic run is below the certified bound") {
    auto rot = rotation_operator();
    auto box = euclidean_box_map(vec({-1, -1}), vec({1, 1}));
    const Vector u0 = vec({0.5, 0.5});
    auto schedule = make_schedule(ScheduleKind::MepMonotone, 1.0);
    auto trace = run(Framework::Mep, DualPolicy::MirrorProx, schedule, rot, *box,
                     u0, 600);

    SampleDomain dom = SampleDomain::box(vec({-1, -1}), vec({1, 1}));
    Rng rng(33);
    std::vector<Vector> probes;
    for (int i = 0; i < 100; ++i) probes.push_back(dom.sample(rng));

    CertifyParams params;
    params.d0 = box->domain_distance_bound(u0);
    params.gap_oracle = [&](const Vector& ut) { return weak_gap(rot, ut, probes); };
    auto cert = certify(trace, BoundKind::MepErgodicGap, params, 1e-9);
    CHECK(cert.all_satisfied);
}
