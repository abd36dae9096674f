#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mirrorvi/analysis.hpp"

namespace mirrorvi {

enum class ExitStatus : int {
    Ok = 0,
    CertificationFailed = 1,
    ConfigError = 2,
    NumericError = 3,
};

/// Configuration / parse / validation problem; reported with a field path.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CertifyTarget {
    BoundKind kind = BoundKind::MegErgodicGap;
    double tol = 1e-9;
    long probe_count = 100;  // weak-gap probes for non-bilinear problems
    double rho = std::numeric_limits<double>::quiet_NaN();  // min-residual only
};

struct MapSpec {
    std::string type;  // "euclidean" | "entropy-simplex"
    bool has_box = false;
    Vector box_lo, box_hi;
    std::vector<int> blocks;
};

struct ProblemSpec {
    enum class Kind { Bilinear, Affine };
    Kind kind = Kind::Bilinear;
    Matrix matrix;
    Vector offset;  // affine only
    std::optional<Vector> solution;
    std::string preset;  // nonempty when built from a preset
};

struct ExperimentConfig {
    std::string name = "experiment";
    ProblemSpec problem;
    MapSpec map;
    Framework framework = Framework::Meg;
    DualPolicy policy = DualPolicy::MirrorProx;
    ScheduleKind schedule_kind = ScheduleKind::MegConstant;
    bool lambda_auto = false;
    double lambda = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> mu;
    std::optional<double> beta_override;
    long sampler_budget = 0;  // required when lambda is "auto"
    long iterations = 0;
    std::uint64_t seed = 0;
    std::optional<Vector> u0;
    std::vector<CertifyTarget> targets;
    std::string trace_name, summary_name;
    std::vector<long> checkpoints = {10, 100, 1000};
    nlohmann::ordered_json echo;  // the raw config, for the summary
};

ExperimentConfig parse_config(const nlohmann::ordered_json& j,
                              const std::filesystem::path& base_dir);
ExperimentConfig load_config_file(const std::filesystem::path& path);

/// Operator, mirror map, and start point realized from a config.
struct BuiltProblem {
    Operator op;
    MapPtr map;
    Vector u0;
};
BuiltProblem build_problem(const ExperimentConfig& cfg);

struct ExperimentResult {
    ExitStatus status = ExitStatus::Ok;
    std::string message;
    std::filesystem::path trace_path, summary_path;
    double lambda_used = std::numeric_limits<double>::quiet_NaN();
    std::vector<BoundCertificate> certificates;
    RunTrace trace;
};

/// Run one config end to end: resolve lambda (sample-certifying it when
/// "auto"), iterate, certify every requested bound, and write the trace CSV
/// and summary JSON under out_dir. Never throws; failures are reported
/// through the status/message pair (certificate failure 1, config problems 2,
/// numeric domain errors 3).
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir,
                                bool quiet = false,
                                std::optional<std::uint64_t> seed_override = std::nullopt);

struct CompareResult {
    ExitStatus status = ExitStatus::Ok;
    std::string message;
    std::filesystem::path table_path;
    std::vector<ExperimentResult> runs;
};

/// Run several configs that share one problem and map, then tabulate metric
/// values side by side at the configured checkpoints (CSV row per method per
/// checkpoint). Heterogeneous problems or checkpoints beyond the iteration
/// counts are config errors.
CompareResult compare_methods(const std::vector<ExperimentConfig>& cfgs,
                              const std::filesystem::path& out_dir,
                              bool quiet = false,
                              std::optional<std::uint64_t> seed_override = std::nullopt);

} // namespace mirrorvi
