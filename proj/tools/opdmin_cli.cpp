// Experiment driver: run / scalability / sensitivity / rsc subcommands.
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "opdmin/errors.hpp"
#include "opdmin/experiment.hpp"
#include "opdmin/parallel.hpp"
#include "opdmin/rsc.hpp"

namespace {

std::atomic<bool> g_cancel{false};

void handle_sigint(int) { g_cancel.store(true); }

struct CliState {
    opdmin::ExperimentConfig cfg;
    std::string config_path_display;
    std::string family = "er";
    std::string regime = "local";
    std::string opinions = "uniform";
    std::vector<std::string> algorithms = {"estr"};
    std::string t1_rule = "sqrt";
    std::string lambda_mode = "none";
    std::string lx_mode = "sqrt";
    std::string beta_form = "determinant";
    std::string explore_mode = "auto";
};

void add_instance_options(CLI::App* cmd, CliState& st) {
    auto& cfg = st.cfg;
    cmd->add_option("--n", cfg.n, "number of nodes");
    cmd->add_option("--num-arms,-K", cfg.num_arms, "number of arms");
    cmd->add_option("--family", st.family, "graph family")
        ->check(CLI::IsMember({"er", "sbm"}));
    cmd->add_option("--er-p", cfg.graph.er_p, "ER edge probability");
    cmd->add_option("--sbm-frac1", cfg.graph.sbm_frac1, "SBM first community fraction");
    cmd->add_option("--sbm-p-in", cfg.graph.sbm_p_in, "SBM intra-community probability");
    cmd->add_option("--sbm-p-out", cfg.graph.sbm_p_out, "SBM inter-community probability");
    cmd->add_option("--edge-list", cfg.edge_list_path, "edge list file (overrides --family)");
    cmd->add_option("--regime", st.regime, "arm construction regime")
        ->check(CLI::IsMember({"local", "diverse"}));
    cmd->add_option("--num-edits", cfg.num_edits,
                    "edge edits per local arm (0 means |V|)");
    cmd->add_flag("--allow-edge-removal", cfg.allow_edge_removal,
                  "local edits may also subtract weight");
    cmd->add_option("--weight-lo", cfg.weight_lo, "edit weight lower bound");
    cmd->add_option("--weight-hi", cfg.weight_hi, "edit weight upper bound");
    cmd->add_option("--opinions", st.opinions, "innate opinion distribution")
        ->check(CLI::IsMember({"uniform", "polarized"}));
    cmd->add_option("--sigma", cfg.sigma, "observation noise standard deviation");
}

void add_protocol_options(CLI::App* cmd, CliState& st) {
    auto& cfg = st.cfg;
    cmd->add_option("--horizon,-T", cfg.horizon, "total rounds");
    cmd->add_option("--t1-rule", st.t1_rule, "exploration length rule")
        ->check(CLI::IsMember({"sqrt", "theory", "explicit"}));
    cmd->add_option("--t1", cfg.t1_explicit, "explicit T1 (with --t1-rule explicit)");
    cmd->add_option("--ell-s", cfg.ell_s, "lower bound on |s|^2 (theory rule)");
    cmd->add_option("--kappa", cfg.kappa, "curvature constant (theory rule)");
    cmd->add_option("--delta", cfg.delta, "confidence parameter");
    cmd->add_option("--lambda-reg", cfg.lambda_reg, "ridge regularization");
    cmd->add_option("--lambda-mode", st.lambda_mode, "nuclear penalty schedule")
        ->check(CLI::IsMember({"none", "theory", "experiment"}));
    cmd->add_option("--lx-mode", st.lx_mode, "action norm bound for the full baseline")
        ->check(CLI::IsMember({"sqrt", "conservative"}));
    cmd->add_option("--beta-form", st.beta_form, "confidence radius form")
        ->check(CLI::IsMember({"determinant", "dimensional"}));
    cmd->add_option("--explore-mode", st.explore_mode, "Stage-1 sampling scheme")
        ->check(CLI::IsMember({"auto", "with", "without"}));
    cmd->add_option("--prox-max-iter", cfg.estimator.max_iter, "Stage-1 iteration cap");
    cmd->add_option("--prox-tol", cfg.estimator.tol, "Stage-1 relative objective tolerance");
    cmd->add_flag("--reuse-stage1", cfg.reuse_stage1,
                  "warm-start Stage 2 with the exploration samples");
    cmd->add_flag("--dump-stage1", cfg.dump_stage1, "write Theta-hat and s-hat per repetition");
}

void add_harness_options(CLI::App* cmd, CliState& st, bool seed_required) {
    auto& cfg = st.cfg;
    // consumed before parsing; registered here so it shows up in --help
    cmd->add_option("--config", st.config_path_display,
                    "key-value config file, long option names (flags override)");
    cmd->add_option("--algorithms", st.algorithms,
                    "algorithms to run: estr, full_oful, oracle")
        ->delimiter(',');
    cmd->add_option("--repetitions,-r", cfg.repetitions, "independent repetitions");
    auto* seed = cmd->add_option("--seed", cfg.master_seed, "master seed");
    if (seed_required) seed->required();
    cmd->add_option("--output,-o", cfg.output_prefix, "output file prefix");
    cmd->add_option("--threads", cfg.workers, "worker pool size (0 = available parallelism)");
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Expands `--config <file>` into ordinary options. The file holds one
// `key = value` pair per line with long option names, `#` comments allowed.
// Keys already given explicitly on the command line are skipped, so flags
// override the file.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    static const std::map<std::string, std::string> short_alias = {
        {"horizon", "-T"}, {"num-arms", "-K"}, {"repetitions", "-r"}, {"output", "-o"}};

    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw opdmin::ConfigError("--config needs a file path");
            path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + i);
            break;
        }
    }
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) throw opdmin::ConfigError("cannot open config file: " + path);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw opdmin::ParseError("config file: expected key=value", line_no);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw opdmin::ParseError("config file: empty key", line_no);

        std::string flag = "--" + key;
        bool given = false;
        for (const std::string& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
        if (auto it = short_alias.find(key); it != short_alias.end())
            for (const std::string& a : args)
                if (a == it->second || a.rfind(it->second, 0) == 0) given = true;
        if (given) continue;

        if (value == "true" || value == "yes" || value == "on") {
            args.push_back(flag);
        } else if (value == "false" || value == "no" || value == "off") {
            continue;  // flags default off
        } else {
            args.push_back(flag);
            args.push_back(value);
        }
    }
    return args;
}

void finalize(CliState& st) {
    auto& cfg = st.cfg;
    cfg.graph.family =
        st.family == "er" ? opdmin::GraphFamily::ErdosRenyi : opdmin::GraphFamily::Sbm;
    cfg.regime = st.regime == "local" ? opdmin::ArmRegime::Local : opdmin::ArmRegime::Diverse;
    cfg.opinion_mode = st.opinions == "uniform" ? opdmin::OpinionMode::Uniform
                                                : opdmin::OpinionMode::Polarized;
    cfg.t1_rule = st.t1_rule == "sqrt"     ? opdmin::T1Rule::Sqrt
                  : st.t1_rule == "theory" ? opdmin::T1Rule::Theory
                                           : opdmin::T1Rule::Explicit;
    cfg.lambda_mode = st.lambda_mode == "none"     ? opdmin::LambdaMode::None
                      : st.lambda_mode == "theory" ? opdmin::LambdaMode::Theory
                                                   : opdmin::LambdaMode::Experiment;
    cfg.lx_mode =
        st.lx_mode == "sqrt" ? opdmin::LxMode::SqrtN : opdmin::LxMode::Conservative;
    cfg.beta_form = st.beta_form == "determinant" ? opdmin::BetaForm::Determinant
                                                  : opdmin::BetaForm::Dimensional;
    cfg.explore_mode = st.explore_mode == "auto"   ? opdmin::ExploreMode::Auto
                       : st.explore_mode == "with" ? opdmin::ExploreMode::WithReplacement
                                                   : opdmin::ExploreMode::WithoutReplacement;
    cfg.algorithms.clear();
    for (const std::string& name : st.algorithms) {
        if (name == "estr") cfg.algorithms.push_back(opdmin::Algo::Estr);
        else if (name == "full_oful") cfg.algorithms.push_back(opdmin::Algo::FullOful);
        else if (name == "oracle") cfg.algorithms.push_back(opdmin::Algo::Oracle);
        else throw opdmin::ConfigError("unknown algorithm: " + name);
    }
    cfg.cancel = &g_cancel;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online polarization and disagreement minimization simulator"};
    app.require_subcommand(1);

    CliState st;

    CLI::App* run = app.add_subcommand("run", "paired experiment over repetitions");
    add_instance_options(run, st);
    add_protocol_options(run, st);
    add_harness_options(run, st, /*seed_required=*/true);

    CLI::App* scal = app.add_subcommand("scalability", "time the pipeline across node counts");
    std::vector<int> node_counts = {64, 128, 256};
    scal->add_option("--sizes", node_counts, "ascending node counts")->delimiter(',');
    add_instance_options(scal, st);
    add_protocol_options(scal, st);
    add_harness_options(scal, st, /*seed_required=*/false);

    CLI::App* sens = app.add_subcommand("sensitivity", "sweep sigma or K with paired seeds");
    std::string axis = "sigma";
    std::vector<double> values;
    sens->add_option("--axis", axis, "sweep axis")->check(CLI::IsMember({"sigma", "K"}));
    sens->add_option("--values", values, "axis values")->delimiter(',')->required();
    add_instance_options(sens, st);
    add_protocol_options(sens, st);
    add_harness_options(sens, st, /*seed_required=*/false);

    CLI::App* rsc = app.add_subcommand("rsc", "arm-set curvature diagnostics");
    opdmin::RscTrialConfig rc;
    std::string rsc_family = "er";
    std::vector<std::string> rsc_regimes = {"diverse", "local"};
    std::string rsc_output;
    rsc->add_option("--n", rc.n, "number of nodes");
    rsc->add_option("--num-arms,-K", rc.num_arms, "number of arms");
    rsc->add_option("--trials", rc.trials, "independent trials");
    rsc->add_option("--family", rsc_family, "graph family")
        ->check(CLI::IsMember({"er", "sbm"}));
    rsc->add_option("--er-p", rc.graph.er_p, "ER edge probability");
    rsc->add_option("--regimes", rsc_regimes, "arm regimes to probe")->delimiter(',');
    rsc->add_option("--num-edits", rc.num_edits, "edits per local arm (0 means 2|V|)");
    rsc->add_option("--restarts", rc.pgd.restarts, "PGD restarts");
    rsc->add_option("--iters", rc.pgd.iterations, "PGD iterations per restart");
    rsc->add_option("--step", rc.pgd.step, "PGD step multiplier");
    rsc->add_option("--seed", rc.seed, "master seed");
    rsc->add_option("--output,-o", rsc_output, "output CSV path (default stdout)");
    std::string rsc_config;
    rsc->add_option("--config", rsc_config, "key-value config file (flags override)");
    int rsc_threads = 0;
    rsc->add_option("--threads", rsc_threads, "worker pool size");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const opdmin::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    std::signal(SIGINT, handle_sigint);
    try {
        finalize(st);
        if (run->parsed()) {
            opdmin::run_experiment(st.cfg);
        } else if (scal->parsed()) {
            if (st.cfg.output_prefix.empty()) st.cfg.output_prefix = "opdmin";
            opdmin::run_scalability(st.cfg, node_counts);
        } else if (sens->parsed()) {
            if (st.cfg.output_prefix.empty()) st.cfg.output_prefix = "opdmin";
            opdmin::run_sensitivity(
                st.cfg, axis == "sigma" ? opdmin::SweepAxis::Sigma : opdmin::SweepAxis::NumArms,
                values);
        } else if (rsc->parsed()) {
            opdmin::set_num_threads(rsc_threads);
            rc.graph.family = rsc_family == "er" ? opdmin::GraphFamily::ErdosRenyi
                                                 : opdmin::GraphFamily::Sbm;
            std::FILE* out = stdout;
            if (!rsc_output.empty()) {
                out = std::fopen(rsc_output.c_str(), "w");
                if (!out) throw opdmin::ConfigError("cannot write " + rsc_output);
            }
            std::fprintf(out, "family,regime,n,K,kappa_min,kappa_hat_mean,kappa_hat_std\n");
            for (const std::string& regime : rsc_regimes) {
                opdmin::RscTrialConfig c = rc;
                c.regime = regime == "local" ? opdmin::ArmRegime::Local
                                             : opdmin::ArmRegime::Diverse;
                opdmin::RscSummary s = opdmin::rsc_trials(c);
                std::fprintf(out, "%s,%s,%d,%d,%.17g,%.17g,%.17g\n", rsc_family.c_str(),
                             regime.c_str(), rc.n, rc.num_arms, s.kappa_min_mean,
                             s.kappa_hat_mean, s.kappa_hat_std);
            }
            if (out != stdout) std::fclose(out);
        }
    } catch (const opdmin::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const opdmin::NumericError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    if (g_cancel.load()) {
        std::fprintf(stderr, "interrupted: partial results flushed\n");
        return 130;
    }
    return 0;
}
