#include "opdmin/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "opdmin/errors.hpp"
#include "opdmin/kernels.hpp"
#include "opdmin/parallel.hpp"
#include "opdmin/rng.hpp"

namespace opdmin {

const char* algo_name(Algo a) {
    switch (a) {
        case Algo::Estr: return "estr";
        case Algo::FullOful: return "full_oful";
        case Algo::Oracle: return "oracle";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    if (repetitions < 1) throw ConfigError("config: repetitions must be >= 1");
    if (horizon < 1) throw ConfigError("config: T must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("config: delta must be in (0,1)");
    if (sigma < 0.0) throw ConfigError("config: sigma must be >= 0");
    if (num_arms < 1) throw ConfigError("config: K must be >= 1");
    if (edge_list_path.empty() && n < 2) throw ConfigError("config: n must be >= 2");
    if (algorithms.empty()) throw ConfigError("config: no algorithms selected");
    long t1 = resolve_t1();
    if (t1 < 1 || t1 > horizon) throw ConfigError("config: need T >= T1 >= 1");
    if (t1_rule == T1Rule::Theory && !(ell_s > 0.0))
        throw ConfigError("config: theory T1 rule requires --ell-s > 0");
}

long ExperimentConfig::resolve_t1() const {
    switch (t1_rule) {
        case T1Rule::Sqrt:
            return std::max<long>(1, std::lround(std::sqrt(static_cast<double>(horizon))));
        case T1Rule::Theory: {
            if (!(ell_s > 0.0) || !(kappa > 0.0)) return 0;
            double t1 = 6.0 / (ell_s * kappa) *
                        std::sqrt(static_cast<double>(horizon) * std::log(2.0 * n / delta));
            return std::min<long>(horizon, std::max<long>(1, std::lround(t1)));
        }
        case T1Rule::Explicit:
            return t1_explicit;
    }
    return 0;
}

const RegretTrace* ExperimentResult::trace(int rep, Algo algo) const {
    for (const RunRecord& r : runs)
        if (r.rep == rep && r.algo == algo && r.completed) return &r.trace;
    return nullptr;
}

namespace {
std::pair<double, double> mean_std(const std::vector<double>& xs) {
    if (xs.empty()) return {0.0, 0.0};
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    if (xs.size() < 2) return {m, 0.0};
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    return {m, std::sqrt(v / static_cast<double>(xs.size() - 1))};
}
}  // namespace

std::pair<double, double> ExperimentResult::regret_stats(Algo algo, long t) const {
    std::vector<double> xs;
    for (const RunRecord& r : runs)
        if (r.algo == algo && r.completed) xs.push_back(r.trace.regret_at(t));
    return mean_std(xs);
}

std::pair<double, double> ExperimentResult::runtime_stats(Algo algo) const {
    std::vector<double> xs;
    for (const RunRecord& r : runs)
        if (r.algo == algo && r.completed) xs.push_back(r.trace.total_seconds);
    return mean_std(xs);
}

// ---------------------------------------------------------------------------

namespace {

struct Instance {
    WeightedGraph graph;
    OpinionVector opinions;
    ArmSet arms;
};

Instance build_instance(const ExperimentConfig& cfg, const WeightedGraph* fixed_graph, int rep) {
    Instance inst;
    if (fixed_graph) {
        inst.graph = *fixed_graph;
    } else {
        inst.graph = make_graph(cfg.n, cfg.graph,
                                derive_seed(cfg.master_seed, "graph", rep));
    }
    const int n = inst.graph.n;
    inst.opinions = sample_opinions(n, cfg.opinion_mode,
                                    derive_seed(cfg.master_seed, "opinions", rep));
    std::uint64_t arm_seed = derive_seed(cfg.master_seed, "arms", rep);
    if (cfg.regime == ArmRegime::Local) {
        int edits = cfg.num_edits > 0 ? cfg.num_edits : n;
        inst.arms = perturb_local(inst.graph, edits, cfg.weight_lo, cfg.weight_hi,
                                  cfg.num_arms, arm_seed, cfg.allow_edge_removal);
    } else {
        inst.arms = generate_diverse(n, cfg.num_arms, cfg.graph, arm_seed);
    }
    return inst;
}

AlgoConfig algo_config(const ExperimentConfig& cfg, std::uint64_t algo_seed) {
    AlgoConfig ac;
    ac.horizon = cfg.horizon;
    ac.t1 = cfg.resolve_t1();
    ac.delta = cfg.delta;
    ac.lambda_reg = cfg.lambda_reg;
    ac.lambda_mode = cfg.lambda_mode;
    ac.explore_mode = cfg.explore_mode;
    ac.lx_mode = cfg.lx_mode;
    ac.beta_form = cfg.beta_form;
    ac.estimator = cfg.estimator;
    ac.reuse_stage1 = cfg.reuse_stage1;
    ac.algo_seed = algo_seed;
    return ac;
}

void dump_stage1_files(const ExperimentConfig& cfg, int rep, const ThetaEstimate& est) {
    const int n = static_cast<int>(est.s_hat.size());
    std::string theta_path = cfg.output_prefix + "_theta_rep" + std::to_string(rep) + ".txt";
    std::FILE* f = std::fopen(theta_path.c_str(), "w");
    if (!f) throw ConfigError("cannot write " + theta_path);
    std::fprintf(f, "%d\n", n);
    if (est.theta_hat.n() == n)
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j)
                std::fprintf(f, "%.17g%c", est.theta_hat(i, j), j + 1 == n ? '\n' : ' ');
        }
    std::fclose(f);
    std::string shat_path = cfg.output_prefix + "_shat_rep" + std::to_string(rep) + ".txt";
    f = std::fopen(shat_path.c_str(), "w");
    if (!f) throw ConfigError("cannot write " + shat_path);
    std::fprintf(f, "%d\n", n);
    for (int i = 0; i < n; ++i) std::fprintf(f, "%.17g\n", est.s_hat[i]);
    std::fclose(f);
}

void run_one(const ExperimentConfig& cfg, const WeightedGraph* fixed_graph, int rep,
             std::vector<RunRecord>& out, std::size_t slot) {
    Instance inst = build_instance(cfg, fixed_graph, rep);
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
        Algo algo = cfg.algorithms[a];
        std::uint64_t algo_id = static_cast<std::uint64_t>(algo);
        Environment env(inst.opinions, cfg.sigma,
                        derive_seed(cfg.master_seed, "noise", rep, algo_id));
        AlgoConfig ac = algo_config(cfg, derive_seed(cfg.master_seed, "algo", rep, algo_id));
        ThetaEstimate stage1;
        if (cfg.dump_stage1 && algo == Algo::Estr && !cfg.output_prefix.empty())
            ac.stage1_out = &stage1;

        RunRecord& rec = out[slot + a];
        rec.rep = rep;
        rec.algo = algo;
        switch (algo) {
            case Algo::Estr: rec.trace = run_estr(env, inst.arms, ac); break;
            case Algo::FullOful: rec.trace = run_full_oful(env, inst.arms, ac); break;
            case Algo::Oracle: rec.trace = run_oracle_subspace(env, inst.arms, ac); break;
        }
        rec.completed = true;
        if (ac.stage1_out) dump_stage1_files(cfg, rep, stage1);
    }
}

}  // namespace

std::vector<long> summary_checkpoints(long horizon) {
    std::vector<long> cps;
    for (long c : {100L, 1000L, 10000L})
        if (c <= horizon) cps.push_back(c);
    if (cps.empty() || cps.back() != horizon) cps.push_back(horizon);
    return cps;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.workers > 0) set_num_threads(cfg.workers);

    WeightedGraph loaded;
    const WeightedGraph* fixed_graph = nullptr;
    if (!cfg.edge_list_path.empty()) {
        loaded = load_edge_list(cfg.edge_list_path);
        fixed_graph = &loaded;
    }

    ExperimentResult result;
    result.runs.resize(static_cast<std::size_t>(cfg.repetitions) * cfg.algorithms.size());

    bool parallel_reps = cfg.repetitions > 1 && max_threads() > 1;
    if (parallel_reps) {
#pragma omp parallel for schedule(dynamic)
        for (int rep = 0; rep < cfg.repetitions; ++rep) {
            if (cfg.cancel && cfg.cancel->load()) continue;
            run_one(cfg, fixed_graph, rep, result.runs, rep * cfg.algorithms.size());
        }
    } else {
        for (int rep = 0; rep < cfg.repetitions; ++rep) {
            if (cfg.cancel && cfg.cancel->load()) break;
            run_one(cfg, fixed_graph, rep, result.runs, rep * cfg.algorithms.size());
        }
    }

    if (!cfg.output_prefix.empty()) {
        write_rounds_csv(cfg.output_prefix + "_rounds.csv", result);
        write_summary_csv(cfg.output_prefix + "_summary.csv", result, cfg.algorithms,
                          cfg.horizon);
    }
    return result;
}

void write_rounds_csv(const std::string& path, const ExperimentResult& result) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ConfigError("cannot write " + path);
    std::fprintf(f, "rep,algo,t,chosen_arm,instant_regret,cumulative_regret\n");
    for (const RunRecord& r : result.runs) {
        if (!r.completed) continue;
        const RegretTrace& tr = r.trace;
        for (long t = 0; t < tr.rounds(); ++t) {
            std::fprintf(f, "%d,%s,%ld,%d,%.17g,%.17g\n", r.rep, algo_name(r.algo), t + 1,
                         tr.chosen()[t], tr.instants()[t], tr.cumulative()[t]);
        }
    }
    std::fclose(f);
}

void write_summary_csv(const std::string& path, const ExperimentResult& result,
                       const std::vector<Algo>& algorithms, long horizon) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ConfigError("cannot write " + path);
    std::fprintf(f, "algo,checkpoint_t,regret_mean,regret_std,runtime_mean_s,runtime_std_s\n");
    std::vector<long> cps = summary_checkpoints(horizon);
    for (Algo algo : algorithms) {
        auto [rt_mean, rt_std] = result.runtime_stats(algo);
        for (long cp : cps) {
            auto [m, s] = result.regret_stats(algo, cp);
            std::fprintf(f, "%s,%ld,%.17g,%.17g,%.17g,%.17g\n", algo_name(algo), cp, m, s,
                         rt_mean, rt_std);
        }
    }
    std::fclose(f);
}

std::vector<ScalabilityRow> run_scalability(const ExperimentConfig& cfg,
                                            const std::vector<int>& node_counts) {
    if (node_counts.empty()) throw ConfigError("scalability: need at least one n");
    for (std::size_t i = 1; i < node_counts.size(); ++i)
        if (node_counts[i] <= node_counts[i - 1])
            throw ConfigError("scalability: node counts must be ascending");

    std::vector<ScalabilityRow> rows;
    for (int n : node_counts) {
        ExperimentConfig c = cfg;
        c.n = n;
        c.edge_list_path.clear();  // the sweep generates graphs at each size
        c.output_prefix.clear();
        c.validate();
        std::vector<double> times;
        for (int rep = 0; rep < cfg.repetitions; ++rep) {
            ExperimentConfig single = c;
            single.repetitions = 1;
            single.master_seed = derive_seed(cfg.master_seed, "scalability", n, rep);
            auto start = std::chrono::steady_clock::now();
            run_experiment(single);
            times.push_back(
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count());
        }
        auto [m, s] = mean_std(times);
        rows.push_back({n, m, s});
    }

    if (!cfg.output_prefix.empty()) {
        std::string path = cfg.output_prefix + "_scalability.csv";
        std::FILE* f = std::fopen(path.c_str(), "w");
        if (!f) throw ConfigError("cannot write " + path);
        std::fprintf(f, "n,mean_seconds,std_seconds\n");
        for (const ScalabilityRow& r : rows)
            std::fprintf(f, "%d,%.17g,%.17g\n", r.n, r.mean_seconds, r.std_seconds);
        std::fclose(f);
    }
    return rows;
}

std::vector<SensitivityRow> run_sensitivity(const ExperimentConfig& cfg, SweepAxis axis,
                                            const std::vector<double>& values) {
    if (values.empty()) throw ConfigError("sensitivity: need at least one value");
    std::vector<SensitivityRow> rows;
    for (double v : values) {
        ExperimentConfig c = cfg;
        c.output_prefix.clear();
        if (axis == SweepAxis::Sigma) {
            c.sigma = v;
        } else {
            c.num_arms = static_cast<int>(v);
            if (c.num_arms < 1) throw ConfigError("sensitivity: K values must be >= 1");
        }
        ExperimentResult res = run_experiment(c);
        for (Algo algo : cfg.algorithms) {
            auto [m, s] = res.regret_stats(algo, cfg.horizon);
            rows.push_back({v, algo, m, s});
        }
    }

    if (!cfg.output_prefix.empty()) {
        std::string path = cfg.output_prefix + "_sensitivity.csv";
        std::FILE* f = std::fopen(path.c_str(), "w");
        if (!f) throw ConfigError("cannot write " + path);
        std::fprintf(f, "axis,value,algo,final_regret_mean,final_regret_std\n");
        const char* axis_name = axis == SweepAxis::Sigma ? "sigma" : "K";
        for (const SensitivityRow& r : rows)
            std::fprintf(f, "%s,%.17g,%s,%.17g,%.17g\n", axis_name, r.value,
                         algo_name(r.algo), r.final_regret_mean, r.final_regret_std);
        std::fclose(f);
    }
    return rows;
}

}  // namespace opdmin
