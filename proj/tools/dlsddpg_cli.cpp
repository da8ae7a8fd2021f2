// Command-line front end: train / eval / suite.

#include "dlsddpg/dlsddpg.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace dlsddpg;

namespace {

constexpr int kExitDiverged = 3;

struct CommonArgs {
    std::string profile = "desk";
    std::string config_file;
    std::string env;
    std::string action_mode;
    std::string zero_reg;
    std::uint64_t seed = 0;
    long steps = -1;
    double fix_beta_c = -1.0;
    bool no_ddpg_actor = false;
    bool no_ddpg_critic = false;
    bool no_lr_actor = false;
    bool no_lr_critic = false;
    std::string out_dir = "out";
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--profile", args.profile, "Hyperparameter profile")
        ->check(CLI::IsMember({"paper", "desk"}));
    cmd->add_option("--config", args.config_file, "key=value config file");
    cmd->add_option("--env", args.env, "Environment name")
        ->check(CLI::IsMember({"pendulum", "balancebot"}));
    cmd->add_option("--seed", args.seed, "Run seed");
    cmd->add_option("--steps", args.steps, "Total environment steps (t_max)");
    cmd->add_option("--action-mode", args.action_mode, "Action selection mode")
        ->check(CLI::IsMember({"oac", "aac"}));
    cmd->add_flag("--no-ddpg-actor", args.no_ddpg_actor, "Disable the DDPG actor update");
    cmd->add_flag("--no-ddpg-critic", args.no_ddpg_critic, "Disable the DDPG critic update");
    cmd->add_flag("--no-lr-actor", args.no_lr_actor, "Disable the least-squares actor update");
    cmd->add_flag("--no-lr-critic", args.no_lr_critic,
                  "Disable the least-squares critic update");
    cmd->add_option("--fix-beta-c", args.fix_beta_c,
                    "Freeze beta_c and beta_c_prime at this value (disables their schedule)");
    cmd->add_option("--zero-reg", args.zero_reg,
                    "Zero the regularization coefficients of the actor, critic or all")
        ->check(CLI::IsMember({"actor", "critic", "all"}));
    cmd->add_option("--out", args.out_dir, "Output directory");
}

TrainConfig build_config(const CLI::App* cmd, const CommonArgs& args) {
    TrainConfig cfg = args.profile == "paper" ? paper_profile() : desk_profile();
    if (!args.config_file.empty()) {
        load_config_file(cfg, args.config_file);
    }
    if (cmd->count("--env")) cfg.env = args.env;
    if (cmd->count("--seed")) cfg.seed = args.seed;
    if (cmd->count("--steps")) cfg.t_max = args.steps;
    if (cmd->count("--action-mode")) {
        cfg.action_mode = args.action_mode == "oac" ? ActionMode::oac : ActionMode::aac;
    }
    if (args.no_ddpg_actor) cfg.use_ddpg_actor = false;
    if (args.no_ddpg_critic) cfg.use_ddpg_critic = false;
    if (args.no_lr_actor) cfg.use_lr_actor = false;
    if (args.no_lr_critic) cfg.use_lr_critic = false;
    if (cmd->count("--fix-beta-c")) cfg.fix_beta_c = args.fix_beta_c;
    if (cmd->count("--zero-reg")) {
        if (args.zero_reg == "actor") cfg.zero_reg = ZeroReg::actor;
        else if (args.zero_reg == "critic") cfg.zero_reg = ZeroReg::critic;
        else cfg.zero_reg = ZeroReg::all;
    }
    cfg.validate();
    return cfg;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const std::uint64_t lo = std::stoull(text.substr(0, dots));
        const std::uint64_t hi = std::stoull(text.substr(dots + 2));
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
        std::size_t pos = 0;
        while (pos < text.size()) {
            const auto comma = text.find(',', pos);
            const std::string tok =
                text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            if (!tok.empty()) seeds.push_back(std::stoull(tok));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    if (seeds.empty()) {
        throw CLI::ValidationError("--seeds", "no seeds parsed from '" + text + "'");
    }
    return seeds;
}

void write_csv_file(const fs::path& path, const std::vector<EvalRecord>& curve) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_curve_csv(out, curve);
}

int cmd_train(const CLI::App* cmd, const CommonArgs& args, long checkpoint_at,
              const std::string& resume_path) {
    const TrainConfig cfg = build_config(cmd, args);
    fs::create_directories(args.out_dir);

    Trainer trainer(cfg);
    if (!resume_path.empty()) {
        trainer.restore(load_checkpoint(resume_path));
        std::cout << "resumed from step " << trainer.step() << "\n";
    }

    TrainOptions opts;
    opts.progress = &std::cout;
    const fs::path out_dir(args.out_dir);
    if (checkpoint_at >= 0) {
        opts.checkpoint_at = checkpoint_at;
        opts.checkpoint_path = (out_dir / ("checkpoint_step" + std::to_string(checkpoint_at) +
                                           "_seed" + std::to_string(cfg.seed) + ".bin"))
                                   .string();
    }

    const RunResult result = trainer.run(opts);

    write_csv_file(out_dir / ("curve_seed" + std::to_string(cfg.seed) + ".csv"), result.curve);
    save_checkpoint((out_dir / ("checkpoint_seed" + std::to_string(cfg.seed) + ".bin")).string(),
                    trainer.make_checkpoint());

    if (result.diverged) {
        std::cerr << "run diverged at step " << result.diverged_step << ": "
                  << result.divergence_reason << "\n";
        return kExitDiverged;
    }
    std::cout << "final window score: "
              << final_window_score(result.curve, cfg.t_max, cfg.final_window_fraction)
              << "\n";
    return 0;
}

int cmd_eval(const std::string& checkpoint_path, int episodes, std::uint64_t seed,
             const std::string& mode) {
    const Checkpoint cp = load_checkpoint(checkpoint_path);
    auto env = make_env(cp.env_spec.name);

    AgentState agent;
    agent.actor = cp.actor;
    agent.critic = cp.critic;
    agent.actor_target = cp.actor_target;
    agent.critic_target = cp.critic_target;
    agent.coeffs = cp.coeffs;

    EvalPolicy policy;
    policy.mode = mode == "aac" ? ActionMode::aac : ActionMode::oac;
    Rng rng(seed_combine(seed, cp.step, 0xE7A1));
    const auto [mean, stddev] = evaluate(agent, *env, episodes, rng, policy);
    std::cout << "episodes " << episodes << "  mean " << format_double(mean) << "  std "
              << format_double(stddev) << "\n";
    return 0;
}

int cmd_suite(const CLI::App* cmd, const CommonArgs& args, const std::string& seeds_text,
              int jobs) {
    const TrainConfig base = build_config(cmd, args);
    const std::vector<std::uint64_t> seeds = parse_seeds(seeds_text);
    fs::create_directories(args.out_dir);

    const SuiteResult suite = run_suite(base, seeds, jobs);

    const fs::path out_dir(args.out_dir);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        write_csv_file(out_dir / ("curve_seed" + std::to_string(seeds[i]) + ".csv"),
                       suite.runs[i].curve);
    }
    std::ofstream agg(out_dir / "aggregate.csv");
    write_suite_csv(agg, suite);

    bool any_diverged = false;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        std::cout << "seed " << seeds[i] << "  final score " << suite.final_scores[i];
        if (suite.runs[i].diverged) {
            std::cout << "  (diverged at step " << suite.runs[i].diverged_step << ")";
            any_diverged = true;
        }
        std::cout << "\n";
    }
    std::cout << "final score over last " << base.final_window_fraction * 100.0
              << "% of training: " << suite.final_mean << " +/- " << suite.final_std << "\n";
    return any_diverged ? kExitDiverged : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DDPG / DLS-DDPG continuous-control training harness"};
    app.require_subcommand(1);

    CommonArgs train_args;
    long checkpoint_at = -1;
    std::string resume_path;
    CLI::App* train = app.add_subcommand("train", "Run one training seed");
    add_common_options(train, train_args);
    train->add_option("--checkpoint-at", checkpoint_at,
                      "Save a checkpoint when reaching this global step");
    train->add_option("--resume", resume_path, "Resume from a checkpoint file");

    std::string eval_checkpoint;
    int eval_episodes = 10;
    std::uint64_t eval_seed = 0;
    std::string eval_mode = "oac";
    CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
    eval_cmd->add_option("--checkpoint", eval_checkpoint, "Checkpoint file")->required();
    eval_cmd->add_option("--episodes", eval_episodes, "Number of evaluation episodes");
    eval_cmd->add_option("--seed", eval_seed, "Evaluation seed");
    eval_cmd->add_option("--action-mode", eval_mode, "Action selection mode")
        ->check(CLI::IsMember({"oac", "aac"}));

    CommonArgs suite_args;
    std::string seeds_text = "0..7";
    int jobs = 0;
    CLI::App* suite = app.add_subcommand("suite", "Run several seeds and aggregate");
    add_common_options(suite, suite_args);
    suite->add_option("--seeds", seeds_text, "Seed list: 'lo..hi' or comma-separated");
    suite->add_option("--jobs", jobs, "Parallel runs (default: hardware threads)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            return cmd_train(train, train_args, checkpoint_at, resume_path);
        }
        if (eval_cmd->parsed()) {
            return cmd_eval(eval_checkpoint, eval_episodes, eval_seed, eval_mode);
        }
        if (suite->parsed()) {
            return cmd_suite(suite, suite_args, seeds_text, jobs);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
