#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "opdmin/stage2.hpp"

namespace opdmin {

enum class Algo { Estr, FullOful, Oracle };

const char* algo_name(Algo a);

enum class T1Rule { Sqrt, Theory, Explicit };

struct ExperimentConfig {
    // Instance
    int n = 16;
    int num_arms = 100;
    GraphParams graph;
    std::string edge_list_path;  // when set, the graph is loaded from disk
    ArmRegime regime = ArmRegime::Local;
    int num_edits = 0;  // 0 means |V|
    bool allow_edge_removal = false;
    double weight_lo = 0.5;
    double weight_hi = 1.5;
    OpinionMode opinion_mode = OpinionMode::Uniform;
    double sigma = 0.1;

    // Protocol
    long horizon = 10000;
    T1Rule t1_rule = T1Rule::Sqrt;
    long t1_explicit = 0;
    double ell_s = 0.0;  // lower bound on |s|^2, theory rule
    double kappa = 1.0;  // curvature constant, theory rule
    double delta = 0.001;

    // Learner
    double lambda_reg = 0.1;
    LambdaMode lambda_mode = LambdaMode::None;
    LxMode lx_mode = LxMode::SqrtN;
    BetaForm beta_form = BetaForm::Determinant;
    ExploreMode explore_mode = ExploreMode::Auto;
    EstimatorOptions estimator;
    bool reuse_stage1 = false;

    // Harness
    std::vector<Algo> algorithms = {Algo::Estr};
    int repetitions = 1;
    std::uint64_t master_seed = 1;
    std::string output_prefix;  // empty disables CSV output
    int workers = 0;            // 0 means available parallelism
    bool dump_stage1 = false;
    std::atomic<bool>* cancel = nullptr;  // cooperative interrupt

    void validate() const;
    long resolve_t1() const;
};

struct RunRecord {
    int rep = 0;
    Algo algo = Algo::Estr;
    bool completed = false;
    RegretTrace trace;
};

struct ExperimentResult {
    std::vector<RunRecord> runs;  // rep-major, algorithms in config order

    const RegretTrace* trace(int rep, Algo algo) const;
    // Mean and sample standard deviation of cumulative regret at round t.
    std::pair<double, double> regret_stats(Algo algo, long t) const;
    std::pair<double, double> runtime_stats(Algo algo) const;
};

// Runs the paired design: per repetition one instance (graph, opinions,
// arms), every requested algorithm on that instance, each with its own
// deterministic noise stream. Writes <prefix>_rounds.csv and
// <prefix>_summary.csv when a prefix is configured.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct ScalabilityRow {
    int n = 0;
    double mean_seconds = 0.0;
    double std_seconds = 0.0;
};

// Times the configured pipeline per node count; writes <prefix>_scalability.csv.
std::vector<ScalabilityRow> run_scalability(const ExperimentConfig& cfg,
                                            const std::vector<int>& node_counts);

enum class SweepAxis { Sigma, NumArms };

struct SensitivityRow {
    double value = 0.0;
    Algo algo = Algo::Estr;
    double final_regret_mean = 0.0;
    double final_regret_std = 0.0;
};

// One paired experiment per axis value, all else fixed (same master seed);
// writes <prefix>_sensitivity.csv.
std::vector<SensitivityRow> run_sensitivity(const ExperimentConfig& cfg, SweepAxis axis,
                                            const std::vector<double>& values);

// Round checkpoints reported in the summary: {100, 1000, 10000} clipped to T.
std::vector<long> summary_checkpoints(long horizon);

void write_rounds_csv(const std::string& path, const ExperimentResult& result);
void write_summary_csv(const std::string& path, const ExperimentResult& result,
                       const std::vector<Algo>& algorithms, long horizon);

}  // namespace opdmin
