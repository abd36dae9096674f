#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mirrorvi/analysis.hpp"
#include "mirrorvi/certify.hpp"
#include "mirrorvi/experiment.hpp"
#include "mirrorvi/mirror_map.hpp"
#include "mirrorvi/operators.hpp"
#include "mirrorvi/sampling.hpp"
#include "mirrorvi/solvers.hpp"

namespace py = pybind11;
using namespace mirrorvi;

namespace {

std::optional<double> opt_nan(double v) {
    if (std::isnan(v)) return std::nullopt;
    return v;
}

} // namespace

PYBIND11_MODULE(_mirrorvi, m) {
    m.doc() = "Mirror extragradient / extrapolation solvers for variational "
              "inequalities, with sampled assumption certifiers and "
              "convergence-bound certificates";

    py::class_<MirrorMap, MapPtr>(m, "MirrorMap")
        .def_property_readonly("dim", &MirrorMap::dim)
        .def("psi_value", &MirrorMap::psi_value, py::arg("u"))
        .def("psi_grad", &MirrorMap::psi_grad, py::arg("u"))
        .def("conj_grad", &MirrorMap::conj_grad, py::arg("v"))
        .def("contains", &MirrorMap::contains, py::arg("u"))
        .def_property_readonly("strong_convexity_mu0",
                               &MirrorMap::strong_convexity_mu0)
        .def_property_readonly("grad_lipschitz_l0", &MirrorMap::grad_lipschitz_l0)
        .def("primal_norm", &MirrorMap::primal_norm, py::arg("x"))
        .def("dual_norm", &MirrorMap::dual_norm, py::arg("g"))
        .def("domain_distance_bound", &MirrorMap::domain_distance_bound,
             py::arg("u0"))
        .def("__repr__", &MirrorMap::describe);

    m.def("euclidean_map", &euclidean_map, py::arg("dim"));
    m.def("euclidean_box_map", &euclidean_box_map, py::arg("lo"), py::arg("hi"));
    m.def("entropy_simplex_map", &entropy_simplex_map, py::arg("block_sizes"));

    py::class_<BregmanEval>(m, "BregmanEval")
        .def_readonly("value", &BregmanEval::value)
        .def_readonly("point_u", &BregmanEval::point_u)
        .def_readonly("point_v", &BregmanEval::point_v)
        .def_readonly("subgrad_vstar", &BregmanEval::subgrad_vstar)
        .def("is_finite", &BregmanEval::is_finite);

    m.def(
        "bregman",
        [](const MapPtr& map, const Vector& u, const Vector& v,
           std::optional<Vector> v_star) {
            return v_star ? bregman(*map, u, v, *v_star) : bregman(*map, u, v);
        },
        py::arg("map"), py::arg("u"), py::arg("v"), py::arg("v_star") = py::none());
    m.def(
        "three_point_residual",
        [](const MapPtr& map, const Vector& u, const Vector& p, const Vector& q,
           const Vector& p_star, const Vector& q_star) {
            return three_point_residual(*map, u, p, q, p_star, q_star);
        },
        py::arg("map"), py::arg("u"), py::arg("p"), py::arg("q"),
        py::arg("p_star"), py::arg("q_star"));

    py::class_<Operator>(m, "Operator")
        .def_readonly("dim", &Operator::dim)
        .def_readonly("known_solution", &Operator::known_solution)
        .def_readonly("description", &Operator::description)
        .def("__call__", [](const Operator& op, const Vector& u) { return op(u); })
        .def("eval", [](const Operator& op, const Vector& u) { return op(u); });

    py::class_<SaddleProblem>(m, "SaddleProblem")
        .def(py::init([](int dim_x, int dim_y,
                         std::function<Vector(const Vector&, const Vector&)> gx,
                         std::function<Vector(const Vector&, const Vector&)> gy,
                         std::optional<Matrix> payoff) {
                 SaddleProblem sp;
                 sp.dim_x = dim_x;
                 sp.dim_y = dim_y;
                 sp.grad_x = std::move(gx);
                 sp.grad_y = std::move(gy);
                 sp.payoff = std::move(payoff);
                 return sp;
             }),
             py::arg("dim_x"), py::arg("dim_y"), py::arg("grad_x"),
             py::arg("grad_y"), py::arg("payoff") = py::none())
        .def_readonly("dim_x", &SaddleProblem::dim_x)
        .def_readonly("dim_y", &SaddleProblem::dim_y)
        .def_readonly("payoff", &SaddleProblem::payoff);

    m.def("saddle_gradient", &saddle_gradient, py::arg("problem"),
          py::arg("solution") = py::none());
    m.def("bilinear_saddle", &bilinear_saddle, py::arg("a"));
    m.def("bilinear_game", &bilinear_game, py::arg("a"),
          py::arg("solution") = py::none());
    m.def("affine_operator", &affine_operator, py::arg("m"), py::arg("b"),
          py::arg("require_solution") = false);
    m.def("rotation_operator", &rotation_operator);

    py::class_<SampleDomain>(m, "SampleDomain")
        .def_static("box", &SampleDomain::box, py::arg("lo"), py::arg("hi"))
        .def_static("unit_box", &SampleDomain::unit_box, py::arg("dim"))
        .def_static("simplex_product", &SampleDomain::simplex_product,
                    py::arg("blocks"))
        .def_property_readonly("dim", &SampleDomain::dim);

    py::class_<Sampler>(m, "Sampler")
        .def(py::init([](const SampleDomain& d, std::uint64_t seed) {
                 return Sampler{d, seed};
             }),
             py::arg("domain"), py::arg("seed"))
        .def_readonly("seed", &Sampler::seed);

    py::class_<CertReport>(m, "CertReport")
        .def_readonly("assumption", &CertReport::assumption)
        .def_readonly("tested_constant", &CertReport::tested_constant)
        .def_readonly("max_violation", &CertReport::max_violation)
        .def_readonly("witness", &CertReport::witness)
        .def_readonly("samples_used", &CertReport::samples_used)
        .def_readonly("skipped", &CertReport::skipped)
        .def_readonly("seed", &CertReport::seed)
        .def_readonly("vacuous", &CertReport::vacuous)
        .def("certified", &CertReport::certified);

    m.def(
        "certify_relative_lipschitz",
        [](const Operator& f, const MapPtr& map, double lambda,
           const Sampler& sampler, long n) {
            return certify_relative_lipschitz(f, *map, lambda, sampler, n);
        },
        py::arg("f"), py::arg("map"), py::arg("lam"), py::arg("sampler"),
        py::arg("n"));
    m.def("certify_eta_monotone", &certify_eta_monotone, py::arg("f"),
          py::arg("eta"), py::arg("sampler"), py::arg("n"));
    m.def("certify_tau_comonotone", &certify_tau_comonotone, py::arg("f"),
          py::arg("tau"), py::arg("sampler"), py::arg("n"));
    m.def("certify_generalized_monotone", &certify_generalized_monotone,
          py::arg("f"), py::arg("u_star"), py::arg("sampler"), py::arg("n"));
    m.def("certify_pseudo_monotone", &certify_pseudo_monotone, py::arg("f"),
          py::arg("sampler"), py::arg("n"));
    m.def("certify_weak_mvi", &certify_weak_mvi, py::arg("f"), py::arg("rho"),
          py::arg("u_star"), py::arg("sampler"), py::arg("n"));
    m.def(
        "certify_restricted_monotone",
        [](const Operator& f, const MapPtr& map, double mu, const Vector& u_star,
           const Sampler& sampler, long n) {
            return certify_restricted_monotone(f, *map, mu, u_star, sampler, n);
        },
        py::arg("f"), py::arg("map"), py::arg("mu"), py::arg("u_star"),
        py::arg("sampler"), py::arg("n"));
    m.def("strong_solution_violation", &strong_solution_violation, py::arg("f"),
          py::arg("sampler"), py::arg("n"));

    py::enum_<DualPolicy>(m, "DualPolicy")
        .value("MirrorProx", DualPolicy::MirrorProx)
        .value("DualExtrapolation", DualPolicy::DualExtrapolation)
        .value("BregmanDual", DualPolicy::BregmanDual);
    py::enum_<Framework>(m, "Framework")
        .value("Meg", Framework::Meg)
        .value("Mep", Framework::Mep);
    py::enum_<ScheduleKind>(m, "ScheduleKind")
        .value("MegConstant", ScheduleKind::MegConstant)
        .value("MegPlus", ScheduleKind::MegPlus)
        .value("MepMonotone", ScheduleKind::MepMonotone)
        .value("MepLinear", ScheduleKind::MepLinear)
        .value("MepLan", ScheduleKind::MepLan);
    py::enum_<BoundKind>(m, "BoundKind")
        .value("MegErgodicGap", BoundKind::MegErgodicGap)
        .value("MegMinResidual", BoundKind::MegMinResidual)
        .value("MepErgodicGap", BoundKind::MepErgodicGap)
        .value("MepLinearRate", BoundKind::MepLinearRate);

    py::class_<Schedule>(m, "Schedule")
        .def_readonly("kind", &Schedule::kind)
        .def_readonly("lambda_", &Schedule::lambda)
        .def_property_readonly("mu", [](const Schedule& s) { return opt_nan(s.mu); })
        .def_readonly("alpha0", &Schedule::alpha0)
        .def_readonly("beta0", &Schedule::beta0)
        .def_property_readonly("theta0",
                               [](const Schedule& s) { return opt_nan(s.theta0); })
        .def_property_readonly("kappa",
                               [](const Schedule& s) { return opt_nan(s.kappa); })
        .def_property_readonly(
            "rate_factor", [](const Schedule& s) { return opt_nan(s.rate_factor); })
        .def("alpha", &Schedule::alpha, py::arg("k"))
        .def("beta", &Schedule::beta, py::arg("k"));

    m.def("make_schedule", &make_schedule, py::arg("kind"), py::arg("lam"),
          py::arg("mu") = py::none(), py::arg("beta_override") = py::none());

    py::class_<RunTrace>(m, "RunTrace")
        .def_readonly("framework", &RunTrace::framework)
        .def_readonly("policy", &RunTrace::policy)
        .def_readonly("schedule", &RunTrace::schedule)
        .def_readonly("u0", &RunTrace::u0)
        .def_property_readonly("dist0",
                               [](const RunTrace& t) { return opt_nan(t.dist0); })
        .def_property_readonly("iterations", &RunTrace::iterations)
        .def("point", [](const RunTrace& t, long k) { return t.rows.at(k).point; })
        .def("ubar", [](const RunTrace& t, long k) { return t.rows.at(k).ubar; })
        .def("res_sq",
             [](const RunTrace& t) {
                 Vector v(t.iterations());
                 for (long k = 0; k < t.iterations(); ++k) v[k] = t.rows[k].res_sq;
                 return v;
             })
        .def("dist_to_sol",
             [](const RunTrace& t) {
                 Vector v(t.iterations());
                 for (long k = 0; k < t.iterations(); ++k)
                     v[k] = t.rows[k].dist_to_sol;
                 return v;
             })
        .def("cum_alpha", [](const RunTrace& t) { return t.cum_alpha; })
        .def("ergodic_point",
             [](const RunTrace& t, long upto) { return ergodic_point(t, upto); });

    m.def(
        "run",
        [](Framework fw, DualPolicy policy, const Schedule& schedule,
           const Operator& f, const MapPtr& map, const Vector& u0, long T) {
            return run(fw, policy, schedule, f, *map, u0, T);
        },
        py::arg("framework"), py::arg("policy"), py::arg("schedule"),
        py::arg("f"), py::arg("map"), py::arg("u0"), py::arg("iterations"));

    m.def("duality_gap_bilinear", &duality_gap_bilinear, py::arg("a"),
          py::arg("x"), py::arg("y"));
    m.def("weak_gap", &weak_gap, py::arg("f"), py::arg("u_tilde"),
          py::arg("probes"));
    m.def("ergodic_gap_bound", &ergodic_gap_bound, py::arg("lam"), py::arg("beta"),
          py::arg("d0"), py::arg("t"));
    m.def("mep_gap_bound", &mep_gap_bound, py::arg("lam"), py::arg("d0"),
          py::arg("t"));
    m.def("min_residual_bound", &min_residual_bound, py::arg("lam"), py::arg("rho"),
          py::arg("kappa0"), py::arg("d0"), py::arg("t"));
    m.def("linear_rate_factor", &linear_rate_factor, py::arg("kappa"));
    m.def("linear_rate_bound", &linear_rate_bound, py::arg("kappa"), py::arg("d0"),
          py::arg("t"));
    m.def("oe_baseline_bound", &oe_baseline_bound, py::arg("kappa"), py::arg("d0"),
          py::arg("t"));

    py::class_<BoundCertificate>(m, "BoundCertificate")
        .def_readonly("kind", &BoundCertificate::kind)
        .def_readonly("tol", &BoundCertificate::tol)
        .def_readonly("bound_values", &BoundCertificate::bound_values)
        .def_readonly("observed_values", &BoundCertificate::observed_values)
        .def_readonly("all_satisfied", &BoundCertificate::all_satisfied)
        .def_readonly("first_violation", &BoundCertificate::first_violation)
        .def_readonly("slack_min", &BoundCertificate::slack_min);

    m.def(
        "certify",
        [](const RunTrace& trace, BoundKind kind, double d0,
           std::optional<std::function<double(const Vector&)>> gap_oracle,
           std::optional<double> rho, std::optional<double> kappa0, double tol) {
            CertifyParams params;
            params.d0 = d0;
            if (gap_oracle) params.gap_oracle = *gap_oracle;
            if (rho) params.rho = *rho;
            if (kappa0) params.kappa0 = *kappa0;
            return certify(trace, kind, params, tol);
        },
        py::arg("trace"), py::arg("kind"), py::arg("d0"),
        py::arg("gap_oracle") = py::none(), py::arg("rho") = py::none(),
        py::arg("kappa0") = py::none(), py::arg("tol") = 1e-9);

    m.def(
        "run_experiment_file",
        [](const std::filesystem::path& config, const std::filesystem::path& out_dir,
           std::optional<std::uint64_t> seed, bool quiet) {
            const auto cfg = load_config_file(config);
            return static_cast<int>(run_experiment(cfg, out_dir, quiet, seed).status);
        },
        py::arg("config"), py::arg("out_dir"), py::arg("seed") = py::none(),
        py::arg("quiet") = true);
    m.def(
        "compare_methods_files",
        [](const std::vector<std::filesystem::path>& configs,
           const std::filesystem::path& out_dir, std::optional<std::uint64_t> seed,
           bool quiet) {
            std::vector<ExperimentConfig> cfgs;
            for (const auto& p : configs) cfgs.push_back(load_config_file(p));
            return static_cast<int>(compare_methods(cfgs, out_dir, quiet, seed).status);
        },
        py::arg("configs"), py::arg("out_dir"), py::arg("seed") = py::none(),
        py::arg("quiet") = true);

    py::register_exception<ProvenanceError>(m, "ProvenanceError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
}
