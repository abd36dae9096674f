#include "mirrorvi/experiment.hpp"

#include "mirrorvi/certify.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace mirrorvi {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config field '" + path + "': " + what);
}

const json& require_field(const json& j, const std::string& key,
                          const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) fail(path + key, "missing");
    return *it;
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

long get_integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<long>();
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

Vector parse_vector(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array");
    Vector v(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) fail(path, "expected numeric entries");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

Matrix parse_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty 2d array");
    const size_t rows = j.size();
    size_t cols = 0;
    Matrix m;
    for (size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].empty()) fail(path, "expected rows of numbers");
        if (r == 0) {
            cols = j[r].size();
            m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        } else if (j[r].size() != cols) {
            fail(path, "ragged rows");
        }
        for (size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number()) fail(path, "expected numeric entries");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                j[r][c].get<double>();
        }
    }
    return m;
}

Matrix load_matrix_file(const fs::path& file, const std::string& path) {
    if (!fs::exists(file)) fail(path, "referenced file does not exist: " + file.string());
    std::ifstream is(file);
    json j;
    try {
        j = json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        fail(path, std::string("cannot parse matrix file: ") + e.what());
    }
    if (j.is_object() && j.contains("matrix")) return parse_matrix(j["matrix"], path);
    return parse_matrix(j, path);
}

Matrix rotation_like(double diag) {
    Matrix m(2, 2);
    m << diag, 1.0, -1.0, diag;
    return m;
}

void apply_preset(ExperimentConfig& cfg, const json& pj, const std::string& path) {
    const std::string preset = get_string(require_field(pj, "preset", path), path + "preset");
    cfg.problem.preset = preset;
    if (preset == "matching-pennies") {
        Matrix a(2, 2);
        a << 1.0, -1.0, -1.0, 1.0;
        cfg.problem.kind = ProblemSpec::Kind::Bilinear;
        cfg.problem.matrix = a;
        Vector sol(4);
        sol << 0.5, 0.5, 0.5, 0.5;
        cfg.problem.solution = sol;
    } else if (preset == "rotation-a") {
        double a = -0.1;
        if (pj.contains("a")) a = get_number(pj["a"], path + "a");
        cfg.problem.kind = ProblemSpec::Kind::Affine;
        cfg.problem.matrix = rotation_like(a);
        cfg.problem.offset = Vector::Zero(2);
    } else if (preset == "strongly-monotone-mu") {
        double mu = 0.2;
        if (pj.contains("mu")) mu = get_number(pj["mu"], path + "mu");
        cfg.problem.kind = ProblemSpec::Kind::Affine;
        cfg.problem.matrix = rotation_like(mu);
        cfg.problem.offset = Vector::Zero(2);
        if (!cfg.mu) cfg.mu = mu;  // restricted-monotonicity constant
    } else {
        fail(path + "preset", "unknown preset '" + preset + "'");
    }
}

int problem_dim(const ProblemSpec& p) {
    if (p.kind == ProblemSpec::Kind::Bilinear)
        return static_cast<int>(p.matrix.rows() + p.matrix.cols());
    return static_cast<int>(p.matrix.rows());
}

void default_map(ExperimentConfig& cfg) {
    if (cfg.problem.kind == ProblemSpec::Kind::Bilinear) {
        cfg.map.type = "entropy-simplex";
        cfg.map.blocks = {static_cast<int>(cfg.problem.matrix.rows()),
                          static_cast<int>(cfg.problem.matrix.cols())};
    } else {
        cfg.map.type = "euclidean";
    }
}

void parse_map(ExperimentConfig& cfg, const json& mj) {
    const std::string path = "map.";
    cfg.map.type = get_string(require_field(mj, "type", path), path + "type");
    if (cfg.map.type == "euclidean") {
        if (mj.contains("box")) {
            const json& bj = mj["box"];
            cfg.map.has_box = true;
            cfg.map.box_lo = parse_vector(require_field(bj, "lo", path + "box."),
                                          path + "box.lo");
            cfg.map.box_hi = parse_vector(require_field(bj, "hi", path + "box."),
                                          path + "box.hi");
        }
    } else if (cfg.map.type == "entropy-simplex") {
        if (mj.contains("blocks")) {
            const json& bl = mj["blocks"];
            if (!bl.is_array() || bl.empty()) fail(path + "blocks", "expected an array");
            cfg.map.blocks.clear();
            for (const auto& e : bl)
                cfg.map.blocks.push_back(static_cast<int>(get_integer(e, path + "blocks")));
        } else if (cfg.problem.kind == ProblemSpec::Kind::Bilinear) {
            cfg.map.blocks = {static_cast<int>(cfg.problem.matrix.rows()),
                              static_cast<int>(cfg.problem.matrix.cols())};
        } else {
            fail(path + "blocks", "missing (required for non-bilinear problems)");
        }
    } else {
        fail(path + "type", "unknown map type '" + cfg.map.type + "'");
    }
}

void validate_map(const ExperimentConfig& cfg) {
    const int d = problem_dim(cfg.problem);
    if (cfg.map.type == "entropy-simplex") {
        int sum = 0;
        for (int b : cfg.map.blocks) {
            if (b < 1) fail("map.blocks", "block sizes must be >= 1");
            sum += b;
        }
        if (sum != d) fail("map.blocks", "block sizes must sum to the operator dimension");
    } else if (cfg.map.has_box) {
        if (cfg.map.box_lo.size() != d || cfg.map.box_hi.size() != d)
            fail("map.box", "box bounds must match the operator dimension");
    }
}

void parse_schedule(ExperimentConfig& cfg, const json& sj) {
    const std::string path = "schedule.";
    const std::string prov =
        get_string(require_field(sj, "provenance", path), path + "provenance");
    auto kind = schedule_kind_from_string(prov);
    if (!kind) fail(path + "provenance", "unknown provenance '" + prov + "'");
    cfg.schedule_kind = *kind;

    const json& lj = require_field(sj, "lambda", path);
    if (lj.is_string()) {
        if (lj.get<std::string>() != "auto")
            fail(path + "lambda", "expected a number or \"auto\"");
        cfg.lambda_auto = true;
        if (!sj.contains("sampler_budget"))
            fail(path + "sampler_budget",
                 "required when lambda is \"auto\"");
        cfg.sampler_budget = get_integer(sj["sampler_budget"], path + "sampler_budget");
        if (cfg.sampler_budget < 1)
            fail(path + "sampler_budget", "must be >= 1");
    } else {
        cfg.lambda = get_number(lj, path + "lambda");
        if (!(cfg.lambda > 0.0)) fail(path + "lambda", "must be positive");
    }

    if (sj.contains("mu")) cfg.mu = get_number(sj["mu"], path + "mu");
    if (sj.contains("beta"))
        cfg.beta_override = get_number(sj["beta"], path + "beta");

    const bool needs_mu = cfg.schedule_kind == ScheduleKind::MepLinear ||
                          cfg.schedule_kind == ScheduleKind::MepLan;
    if (needs_mu && (!cfg.mu || !(*cfg.mu > 0.0)))
        fail(path + "mu", "required (positive) for this provenance");
    if (cfg.beta_override && cfg.schedule_kind == ScheduleKind::MegConstant &&
        !(*cfg.beta_override > 0.0 && *cfg.beta_override <= 1.0))
        fail(path + "beta", "must lie in (0, 1]");
}

void parse_certify(ExperimentConfig& cfg, const json& cj) {
    if (!cj.is_array()) fail("certify", "expected an array");
    for (size_t i = 0; i < cj.size(); ++i) {
        const std::string path = "certify[" + std::to_string(i) + "].";
        const json& tj = cj[i];
        CertifyTarget t;
        const std::string name =
            get_string(require_field(tj, "bound", path), path + "bound");
        auto kind = bound_kind_from_string(name);
        if (!kind) fail(path + "bound", "unknown bound '" + name + "'");
        t.kind = *kind;
        if (tj.contains("tol")) {
            t.tol = get_number(tj["tol"], path + "tol");
            if (!(t.tol >= 0.0)) fail(path + "tol", "must be nonnegative");
        }
        if (tj.contains("probes")) {
            t.probe_count = get_integer(tj["probes"], path + "probes");
            if (t.probe_count < 1) fail(path + "probes", "must be >= 1");
        }
        if (tj.contains("rho")) t.rho = get_number(tj["rho"], path + "rho");
        if (required_schedule(t.kind) != cfg.schedule_kind)
            fail(path + "bound",
                 std::string("provenance error: certificate '") + name +
                     "' requires schedule '" +
                     to_string(required_schedule(t.kind)) +
                     "', config uses '" + to_string(cfg.schedule_kind) + "'");
        const bool meg_bound = t.kind == BoundKind::MegErgodicGap ||
                               t.kind == BoundKind::MegMinResidual;
        if (meg_bound != (cfg.framework == Framework::Meg))
            fail(path + "bound", "certificate framework does not match the run");
        cfg.targets.push_back(t);
    }
}

} // namespace

ExperimentConfig parse_config(const json& j, const fs::path& base_dir) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    ExperimentConfig cfg;
    cfg.echo = j;
    if (j.contains("name")) cfg.name = get_string(j["name"], "name");

    const json& pj = require_field(j, "problem", "");
    if (!pj.is_object()) fail("problem", "expected an object");
    if (pj.contains("preset")) {
        apply_preset(cfg, pj, "problem.");
    } else if (pj.contains("bilinear")) {
        const json& bj = pj["bilinear"];
        cfg.problem.kind = ProblemSpec::Kind::Bilinear;
        if (bj.contains("matrix_file")) {
            const fs::path f = base_dir / get_string(bj["matrix_file"],
                                                     "problem.bilinear.matrix_file");
            cfg.problem.matrix = load_matrix_file(f, "problem.bilinear.matrix_file");
        } else {
            cfg.problem.matrix = parse_matrix(
                require_field(bj, "matrix", "problem.bilinear."),
                "problem.bilinear.matrix");
        }
        if (bj.contains("solution"))
            cfg.problem.solution =
                parse_vector(bj["solution"], "problem.bilinear.solution");
    } else if (pj.contains("affine")) {
        const json& aj = pj["affine"];
        cfg.problem.kind = ProblemSpec::Kind::Affine;
        cfg.problem.matrix =
            parse_matrix(require_field(aj, "matrix", "problem.affine."),
                         "problem.affine.matrix");
        if (aj.contains("offset"))
            cfg.problem.offset = parse_vector(aj["offset"], "problem.affine.offset");
        else
            cfg.problem.offset = Vector::Zero(cfg.problem.matrix.rows());
        if (cfg.problem.matrix.rows() != cfg.problem.matrix.cols())
            fail("problem.affine.matrix", "must be square");
        if (cfg.problem.offset.size() != cfg.problem.matrix.rows())
            fail("problem.affine.offset", "dimension mismatch");
    } else {
        fail("problem", "expected one of preset | bilinear | affine");
    }

    if (j.contains("map"))
        parse_map(cfg, j["map"]);
    else
        default_map(cfg);
    validate_map(cfg);

    const std::string fw = get_string(require_field(j, "framework", ""), "framework");
    if (fw == "meg")
        cfg.framework = Framework::Meg;
    else if (fw == "mep")
        cfg.framework = Framework::Mep;
    else
        fail("framework", "expected \"meg\" or \"mep\"");

    const std::string pol = get_string(require_field(j, "policy", ""), "policy");
    auto policy = policy_from_string(pol);
    if (!policy) fail("policy", "unknown policy '" + pol + "'");
    cfg.policy = *policy;
    if (cfg.framework == Framework::Mep &&
        cfg.policy == DualPolicy::DualExtrapolation)
        fail("policy", "the single-call framework supports mirror-prox or bregman-dual");

    parse_schedule(cfg, require_field(j, "schedule", ""));

    cfg.iterations = get_integer(require_field(j, "iterations", ""), "iterations");
    if (cfg.iterations < 1) fail("iterations", "must be >= 1");
    if (j.contains("seed"))
        cfg.seed = static_cast<std::uint64_t>(get_integer(j["seed"], "seed"));

    if (j.contains("u0")) {
        if (j["u0"].is_string()) {
            if (j["u0"].get<std::string>() != "uniform")
                fail("u0", "expected an array or \"uniform\"");
        } else {
            cfg.u0 = parse_vector(j["u0"], "u0");
        }
    }

    if (j.contains("certify")) parse_certify(cfg, j["certify"]);

    cfg.trace_name = cfg.name + "_trace.csv";
    cfg.summary_name = cfg.name + "_summary.json";
    if (j.contains("output")) {
        const json& oj = j["output"];
        if (oj.contains("trace")) cfg.trace_name = get_string(oj["trace"], "output.trace");
        if (oj.contains("summary"))
            cfg.summary_name = get_string(oj["summary"], "output.summary");
    }

    if (j.contains("checkpoints")) {
        const json& ck = j["checkpoints"];
        if (!ck.is_array() || ck.empty()) fail("checkpoints", "expected a nonempty array");
        cfg.checkpoints.clear();
        for (const auto& e : ck) cfg.checkpoints.push_back(get_integer(e, "checkpoints"));
    }
    return cfg;
}

ExperimentConfig load_config_file(const fs::path& path) {
    if (!fs::exists(path))
        throw ConfigError("config file does not exist: " + path.string());
    std::ifstream is(path);
    json j;
    try {
        j = json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
    ExperimentConfig cfg = parse_config(j, path.parent_path());
    if (!path.stem().empty() && !j.contains("name")) {
        cfg.name = path.stem().string();
        cfg.trace_name = cfg.name + "_trace.csv";
        cfg.summary_name = cfg.name + "_summary.json";
        if (j.contains("output")) {
            const json& oj = j["output"];
            if (oj.contains("trace")) cfg.trace_name = oj["trace"].get<std::string>();
            if (oj.contains("summary")) cfg.summary_name = oj["summary"].get<std::string>();
        }
    }
    return cfg;
}

BuiltProblem build_problem(const ExperimentConfig& cfg) {
    BuiltProblem bp;
    if (cfg.problem.kind == ProblemSpec::Kind::Bilinear)
        bp.op = bilinear_game(cfg.problem.matrix, cfg.problem.solution);
    else
        bp.op = affine_operator(cfg.problem.matrix, cfg.problem.offset);

    if (cfg.map.type == "entropy-simplex") {
        bp.map = entropy_simplex_map(cfg.map.blocks);
    } else if (cfg.map.has_box) {
        bp.map = euclidean_box_map(cfg.map.box_lo, cfg.map.box_hi);
    } else {
        bp.map = euclidean_map(problem_dim(cfg.problem));
    }

    if (cfg.u0) {
        bp.u0 = *cfg.u0;
        if (!bp.map->contains(bp.u0)) fail("u0", "not feasible for the chosen map");
    } else if (cfg.map.type == "entropy-simplex") {
        bp.u0.resize(bp.map->dim());
        int off = 0;
        for (int b : cfg.map.blocks) {
            bp.u0.segment(off, b).setConstant(1.0 / b);
            off += b;
        }
    } else if (cfg.map.has_box) {
        bp.u0 = 0.5 * (cfg.map.box_lo + cfg.map.box_hi);
    } else {
        bp.u0 = Vector::Ones(problem_dim(cfg.problem));
    }
    return bp;
}

namespace {

SampleDomain sample_domain_for(const ExperimentConfig& cfg) {
    if (cfg.map.type == "entropy-simplex")
        return SampleDomain::simplex_product(cfg.map.blocks);
    if (cfg.map.has_box) return SampleDomain::box(cfg.map.box_lo, cfg.map.box_hi);
    return SampleDomain::unit_box(problem_dim(cfg.problem));
}

double spectral_norm(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

struct LambdaInfo {
    double lambda = 0.0;
    bool was_auto = false;
    CertReport report;  // meaningful only when was_auto
    int doublings = 0;
};

LambdaInfo resolve_lambda(const ExperimentConfig& cfg, const BuiltProblem& bp) {
    LambdaInfo info;
    if (!cfg.lambda_auto) {
        info.lambda = cfg.lambda;
        return info;
    }
    info.was_auto = true;
    double candidate = cfg.problem.kind == ProblemSpec::Kind::Bilinear
                           ? 2.0 * cfg.problem.matrix.cwiseAbs().maxCoeff()
                           : spectral_norm(cfg.problem.matrix);
    Sampler sampler{sample_domain_for(cfg), cfg.seed};
    for (int attempt = 0; attempt < 7; ++attempt) {
        info.report = certify_relative_lipschitz(bp.op, *bp.map, candidate,
                                                 sampler, cfg.sampler_budget);
        if (info.report.certified()) {
            info.lambda = candidate;
            info.doublings = attempt;
            return info;
        }
        candidate *= 2.0;
    }
    throw std::domain_error(
        "auto lambda: relative Lipschitz certification failed up to " +
        std::to_string(candidate));
}

std::string fmt(double v) {
    if (!std::isfinite(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json cert_to_json(const BoundCertificate& c) {
    json j;
    j["bound"] = to_string(c.kind);
    j["tol"] = c.tol;
    j["all_satisfied"] = c.all_satisfied;
    if (c.first_violation)
        j["first_violation"] = *c.first_violation;
    else
        j["first_violation"] = nullptr;
    j["slack_min"] = c.slack_min;
    return j;
}

json report_to_json(const CertReport& r) {
    json j;
    j["assumption"] = r.assumption;
    j["tested_constant"] = r.tested_constant;
    j["max_violation"] = r.max_violation;
    j["samples_used"] = r.samples_used;
    j["skipped"] = r.skipped;
    j["seed"] = r.seed;
    j["vacuous"] = r.vacuous;
    j["disclaimer"] = CertReport::kDisclaimer;
    json w = json::array();
    for (const auto& v : r.witness) {
        json pt = json::array();
        for (int i = 0; i < v.size(); ++i) pt.push_back(v[i]);
        w.push_back(pt);
    }
    j["witness"] = w;
    return j;
}

std::function<double(const Vector&)> make_gap_oracle(const ExperimentConfig& cfg,
                                                     const BuiltProblem& bp,
                                                     const CertifyTarget& target) {
    if (cfg.problem.kind == ProblemSpec::Kind::Bilinear) {
        const Matrix a = cfg.problem.matrix;
        const Eigen::Index p = a.rows(), q = a.cols();
        return [a, p, q](const Vector& u) {
            return duality_gap_bilinear(a, u.head(p), u.tail(q));
        };
    }
    // Weak-gap estimate over frozen probes; operator values precomputed.
    SampleDomain domain = sample_domain_for(cfg);
    Rng rng(cfg.seed + 1);
    auto probes = std::make_shared<std::vector<Vector>>();
    auto fvals = std::make_shared<std::vector<Vector>>();
    for (long i = 0; i < target.probe_count; ++i) {
        probes->push_back(domain.sample(rng));
        fvals->push_back(bp.op(probes->back()));
    }
    return [probes, fvals](const Vector& ut) {
        double worst = -std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < probes->size(); ++i)
            worst = std::max(worst, (*fvals)[i].dot(ut - (*probes)[i]));
        return worst;
    };
}

BoundCertificate certify_target(const ExperimentConfig& cfg,
                                const BuiltProblem& bp, const RunTrace& trace,
                                const CertifyTarget& target) {
    CertifyParams params;
    switch (target.kind) {
        case BoundKind::MegErgodicGap:
        case BoundKind::MepErgodicGap: {
            try {
                params.d0 = bp.map->domain_distance_bound(bp.u0);
            } catch (const std::domain_error& e) {
                throw ConfigError(std::string("gap certificate: ") + e.what());
            }
            params.gap_oracle = make_gap_oracle(cfg, bp, target);
            break;
        }
        case BoundKind::MegMinResidual: {
            if (!std::isfinite(target.rho))
                throw ConfigError("certify: meg-min-residual needs a 'rho' field");
            auto mu0 = bp.map->strong_convexity_mu0();
            auto l0 = bp.map->grad_lipschitz_l0();
            if (!mu0 || !l0)
                throw ConfigError(
                    "certify: meg-min-residual needs a map with known mu0 and L0");
            params.rho = target.rho;
            params.kappa0 = *mu0 / *l0;
            if (!trace.has_distances())
                throw ConfigError("certify: meg-min-residual needs a known solution");
            params.d0 = trace.dist0;
            break;
        }
        case BoundKind::MepLinearRate: {
            if (!trace.has_distances())
                throw ConfigError("certify: mep-linear-rate needs a known solution");
            params.d0 = trace.dist0;
            break;
        }
    }
    return certify(trace, target.kind, params, target.tol);
}

void write_trace_csv(const fs::path& path, const RunTrace& trace,
                     const BoundCertificate* primary, bool primary_is_gap) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os << "k,alpha,beta,res_sq,dist_to_sol,gap,bound\n";
    for (long t = 0; t < trace.iterations(); ++t) {
        const TraceRow& row = trace.rows[static_cast<size_t>(t)];
        os << row.k << ',' << fmt(row.alpha) << ',' << fmt(row.beta) << ','
           << fmt(row.res_sq) << ',' << fmt(row.dist_to_sol) << ',';
        if (primary && primary_is_gap)
            os << fmt(primary->observed_values[static_cast<size_t>(t)]);
        os << ',';
        if (primary) os << fmt(primary->bound_values[static_cast<size_t>(t)]);
        os << '\n';
    }
}

json schedule_to_json(const Schedule& s) {
    json j;
    j["provenance"] = to_string(s.kind);
    j["lambda"] = s.lambda;
    if (std::isfinite(s.mu)) j["mu"] = s.mu;
    j["alpha"] = s.alpha0;
    j["beta"] = s.beta0;
    if (std::isfinite(s.theta0)) j["theta0"] = s.theta0;
    if (std::isfinite(s.kappa)) j["kappa"] = s.kappa;
    if (std::isfinite(s.rate_factor)) j["rate_factor"] = s.rate_factor;
    return j;
}

ExitStatus classify_exception() {
    try {
        throw;
    } catch (const ConfigError&) {
        return ExitStatus::ConfigError;
    } catch (const ProvenanceError&) {
        return ExitStatus::ConfigError;
    } catch (const nlohmann::json::exception&) {
        return ExitStatus::ConfigError;
    } catch (const std::exception&) {
        return ExitStatus::NumericError;
    }
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg_in,
                                const fs::path& out_dir, bool quiet,
                                std::optional<std::uint64_t> seed_override) {
    ExperimentResult res;
    try {
        ExperimentConfig cfg = cfg_in;
        if (seed_override) cfg.seed = *seed_override;
        fs::create_directories(out_dir);

        BuiltProblem bp = build_problem(cfg);
        LambdaInfo li = resolve_lambda(cfg, bp);
        res.lambda_used = li.lambda;
        Schedule schedule =
            make_schedule(cfg.schedule_kind, li.lambda, cfg.mu, cfg.beta_override);

        RunTrace trace = run(cfg.framework, cfg.policy, schedule, bp.op, *bp.map,
                             bp.u0, cfg.iterations);
        trace.seed = cfg.seed;

        for (const CertifyTarget& target : cfg.targets)
            res.certificates.push_back(certify_target(cfg, bp, trace, target));

        const BoundCertificate* primary =
            res.certificates.empty() ? nullptr : &res.certificates.front();
        const bool primary_is_gap =
            primary && (primary->kind == BoundKind::MegErgodicGap ||
                        primary->kind == BoundKind::MepErgodicGap);

        res.trace_path = out_dir / cfg.trace_name;
        res.summary_path = out_dir / cfg.summary_name;
        write_trace_csv(res.trace_path, trace, primary, primary_is_gap);

        json summary;
        summary["name"] = cfg.name;
        summary["status"] = 0;
        summary["lambda"] = json{{"value", li.lambda},
                                 {"source", li.was_auto ? "auto" : "explicit"}};
        if (li.was_auto) {
            summary["lambda"]["certification"] = report_to_json(li.report);
            summary["lambda"]["doublings"] = li.doublings;
        }
        summary["schedule"] = schedule_to_json(schedule);
        const TraceRow& last = trace.rows.back();
        json final_metrics;
        final_metrics["iterations"] = trace.iterations();
        final_metrics["res_sq"] = last.res_sq;
        if (std::isfinite(last.dist_to_sol))
            final_metrics["dist_to_sol"] = last.dist_to_sol;
        if (primary) {
            if (primary_is_gap)
                final_metrics["gap"] = primary->observed_values.back();
            final_metrics["bound"] = primary->bound_values.back();
        }
        summary["final"] = final_metrics;
        json certs = json::array();
        for (const auto& c : res.certificates) certs.push_back(cert_to_json(c));
        summary["certificates"] = certs;
        summary["config"] = cfg.echo;

        for (const auto& c : res.certificates) {
            if (!c.all_satisfied) {
                res.status = ExitStatus::CertificationFailed;
                std::ostringstream msg;
                msg << "certificate " << to_string(c.kind)
                    << " violated first at t=" << *c.first_violation;
                res.message = msg.str();
                break;
            }
        }
        summary["status"] = static_cast<int>(res.status);

        std::ofstream os(res.summary_path, std::ios::binary);
        os << summary.dump(2) << '\n';

        res.trace = std::move(trace);
        if (!quiet) {
            std::cout << cfg.name << ": status " << static_cast<int>(res.status);
            if (!res.message.empty()) std::cout << " (" << res.message << ")";
            std::cout << "\n";
        }
    } catch (const std::exception& e) {
        res.status = classify_exception();
        res.message = e.what();
        if (!quiet)
            std::cerr << cfg_in.name << ": error (status "
                      << static_cast<int>(res.status) << "): " << e.what() << "\n";
    }
    return res;
}

namespace {

bool same_problem(const ExperimentConfig& a, const ExperimentConfig& b) {
    if (a.problem.kind != b.problem.kind) return false;
    if (a.problem.matrix.rows() != b.problem.matrix.rows() ||
        a.problem.matrix.cols() != b.problem.matrix.cols())
        return false;
    if (a.problem.matrix != b.problem.matrix) return false;
    if (a.problem.kind == ProblemSpec::Kind::Affine &&
        a.problem.offset != b.problem.offset)
        return false;
    if (a.map.type != b.map.type || a.map.blocks != b.map.blocks ||
        a.map.has_box != b.map.has_box)
        return false;
    if (a.map.has_box &&
        (a.map.box_lo != b.map.box_lo || a.map.box_hi != b.map.box_hi))
        return false;
    return true;
}

std::optional<double> checkpoint_bound(const ExperimentConfig& cfg,
                                       const ExperimentResult& r, long t) {
    if (!r.certificates.empty())
        return r.certificates.front().bound_values[static_cast<size_t>(t)];
    const Schedule& s = r.trace.schedule;
    switch (s.kind) {
        case ScheduleKind::MepLinear:
            if (r.trace.has_distances())
                return linear_rate_bound(s.kappa, r.trace.dist0, t);
            return std::nullopt;
        case ScheduleKind::MepLan:
            if (r.trace.has_distances())
                return oe_baseline_bound(s.kappa, r.trace.dist0, t);
            return std::nullopt;
        case ScheduleKind::MegConstant:
        case ScheduleKind::MepMonotone: {
            BuiltProblem bp = build_problem(cfg);
            try {
                const double d0 = bp.map->domain_distance_bound(bp.u0);
                return s.kind == ScheduleKind::MegConstant
                           ? ergodic_gap_bound(s.lambda, s.beta0, d0, t)
                           : mep_gap_bound(s.lambda, d0, t);
            } catch (const std::domain_error&) {
                return std::nullopt;
            }
        }
        case ScheduleKind::MegPlus:
            return std::nullopt;  // needs rho; available only via a certify target
    }
    return std::nullopt;
}

} // namespace

CompareResult compare_methods(const std::vector<ExperimentConfig>& cfgs,
                              const fs::path& out_dir, bool quiet,
                              std::optional<std::uint64_t> seed_override) {
    CompareResult out;
    try {
        if (cfgs.empty()) throw ConfigError("compare: at least one config required");
        for (size_t i = 1; i < cfgs.size(); ++i)
            if (!same_problem(cfgs[0], cfgs[i]))
                throw ConfigError("compare: configs must share problem and map (config '" +
                                  cfgs[i].name + "' differs)");
        for (size_t i = 0; i < cfgs.size(); ++i)
            for (size_t k = i + 1; k < cfgs.size(); ++k)
                if (cfgs[i].name == cfgs[k].name)
                    throw ConfigError("compare: config names must be distinct ('" +
                                      cfgs[i].name + "')");
        const std::vector<long>& checkpoints = cfgs[0].checkpoints;
        for (const auto& cfg : cfgs)
            for (long cp : checkpoints)
                if (cp < 0 || cp >= cfg.iterations)
                    throw ConfigError("compare: checkpoint t=" + std::to_string(cp) +
                                      " is beyond the run of config '" + cfg.name + "'");

        fs::create_directories(out_dir);
        for (const auto& cfg : cfgs) {
            out.runs.push_back(run_experiment(cfg, out_dir, quiet, seed_override));
            if (out.runs.back().status != ExitStatus::Ok &&
                out.status == ExitStatus::Ok) {
                out.status = out.runs.back().status;
                out.message = cfgs[out.runs.size() - 1].name + ": " +
                              out.runs.back().message;
            }
        }

        out.table_path = out_dir / "compare.csv";
        std::ofstream os(out.table_path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + out.table_path.string());
        os << "method,t,res_sq,dist_to_sol,gap,bound\n";
        for (size_t i = 0; i < cfgs.size(); ++i) {
            const ExperimentResult& r = out.runs[i];
            if (r.trace.rows.empty()) continue;  // failed before producing a trace
            for (long cp : checkpoints) {
                const TraceRow& row = r.trace.rows[static_cast<size_t>(cp)];
                os << cfgs[i].name << ',' << cp << ',' << fmt(row.res_sq) << ','
                   << fmt(row.dist_to_sol) << ',';
                if (cfgs[i].problem.kind == ProblemSpec::Kind::Bilinear) {
                    const Vector erg = ergodic_point(r.trace, cp);
                    os << fmt(duality_gap_bilinear(
                        cfgs[i].problem.matrix,
                        erg.head(cfgs[i].problem.matrix.rows()),
                        erg.tail(cfgs[i].problem.matrix.cols())));
                }
                os << ',';
                if (auto b = checkpoint_bound(cfgs[i], r, cp)) os << fmt(*b);
                os << '\n';
            }
        }

        json summary = json::array();
        for (size_t i = 0; i < cfgs.size(); ++i) {
            json entry;
            entry["name"] = cfgs[i].name;
            entry["status"] = static_cast<int>(out.runs[i].status);
            entry["trace"] = out.runs[i].trace_path.filename().string();
            entry["summary"] = out.runs[i].summary_path.filename().string();
            json certs = json::array();
            for (const auto& c : out.runs[i].certificates)
                certs.push_back(cert_to_json(c));
            entry["certificates"] = certs;
            summary.push_back(entry);
        }
        std::ofstream ss(out_dir / "compare_summary.json", std::ios::binary);
        ss << summary.dump(2) << '\n';
    } catch (const std::exception& e) {
        out.status = classify_exception();
        out.message = e.what();
        if (!quiet)
            std::cerr << "compare: error (status " << static_cast<int>(out.status)
                      << "): " << e.what() << "\n";
    }
    return out;
}

} // namespace mirrorvi
