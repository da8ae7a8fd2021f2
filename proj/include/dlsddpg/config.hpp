#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dlsddpg {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ActionMode { oac, aac };
enum class ZeroReg { none, actor, critic, all };

inline std::string to_string(ActionMode m) { return m == ActionMode::oac ? "oac" : "aac"; }

// Full run configuration. The defaults are the desk-scale profile used by the
// tests; paper_profile() restores the full-scale hyperparameter table.
struct TrainConfig {
    std::string env = "pendulum";
    long t_max = 60000;
    long t_rand = 1000;
    double gamma = 0.99;
    double noise_sigma = 0.1;
    double learning_rate = 0.001;
    std::size_t buffer_capacity = 1000000;
    int n_mb = 256;
    int n_lrmb = 2000;
    int t_lr = 1000;
    double w_a = 2.0;
    double tau_ddpg = 0.005;
    double tau_lr = 0.1;
    int qn_max_iter = 10;
    double qn_action_bound = 0.4; // b: trust range of the optimal-action search
    double clip_penalty_coeff = 0.001; // c: weight of the out-of-box actor penalty

    double beta_a0 = 0.01;
    double beta_a_min = 0.001;
    double beta_a_prime0 = 0.01;
    double beta_a_prime_min = 0.001;
    double beta_c0 = 0.01;
    double beta_c_min = 0.001;
    double beta_c_prime0 = 0.01;
    double beta_c_prime_min = 0.001;
    double delta = 0.95;
    double c_a = 1.0;
    double c_c = 10.0;

    int hidden_width = 256;
    bool use_ddpg_actor = true;
    bool use_ddpg_critic = true;
    bool use_lr_actor = true;
    bool use_lr_critic = true;
    ActionMode action_mode = ActionMode::oac;
    std::uint64_t seed = 0;
    long eval_interval = 2000;
    int eval_episodes = 10;
    int moving_average_window = 10;
    double final_window_fraction = 0.1;

    // Ablation switches.
    std::optional<double> fix_beta_c; // freeze beta_c and beta_c_prime at this value
    ZeroReg zero_reg = ZeroReg::none; // zero out regularization coefficient pairs

    void validate() const {
        auto require = [](bool ok, const std::string& what) {
            if (!ok) throw ConfigError("invalid config: " + what);
        };
        require(env == "pendulum" || env == "balancebot", "env must be pendulum or balancebot");
        require(t_max > 0, "t_max must be positive");
        require(t_rand >= 0, "t_rand must be nonnegative");
        require(gamma >= 0.0 && gamma < 1.0, "gamma must be in [0,1)");
        require(noise_sigma >= 0.0, "noise_sigma must be nonnegative");
        require(learning_rate > 0.0, "learning_rate must be positive");
        require(buffer_capacity > 0, "buffer_capacity must be positive");
        require(n_mb > 0 && n_lrmb > 0 && t_lr > 0, "batch sizes must be positive");
        require(n_lrmb > t_lr, "n_lrmb must exceed t_lr");
        require(n_lrmb > n_mb, "n_lrmb must exceed n_mb");
        require(w_a >= 0.0, "w_a must be nonnegative");
        require(tau_ddpg >= 0.0 && tau_ddpg <= 1.0, "tau_ddpg must be in [0,1]");
        require(tau_lr >= 0.0 && tau_lr <= 1.0, "tau_lr must be in [0,1]");
        require(qn_max_iter > 0, "qn_max_iter must be positive");
        require(qn_action_bound > 0.0, "qn_action_bound must be positive");
        require(hidden_width > 0, "hidden_width must be positive");
        require(eval_interval > 0, "eval_interval must be positive");
        require(eval_episodes >= 1, "eval_episodes must be at least 1");
        require(moving_average_window >= 1, "moving_average_window must be at least 1");
        require(final_window_fraction > 0.0 && final_window_fraction <= 1.0,
                "final_window_fraction must be in (0,1]");
    }
};

// Full-scale hyperparameter profile.
inline TrainConfig paper_profile() {
    TrainConfig cfg;
    cfg.t_max = 1000000;
    cfg.t_rand = 25000;
    cfg.n_lrmb = 10000;
    cfg.hidden_width = 1024;
    return cfg;
}

inline TrainConfig desk_profile() {
    return TrainConfig{};
}

namespace config_detail {

inline bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("cannot parse boolean value '" + v + "'");
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace config_detail

// Applies one key=value assignment, keys named exactly as the TrainConfig
// fields.
inline void apply_config_entry(TrainConfig& cfg, const std::string& key,
                               const std::string& value) {
    using config_detail::parse_bool;
    auto as_double = [&] { return std::stod(value); };
    auto as_long = [&] { return std::stol(value); };
    auto as_int = [&] { return std::stoi(value); };

    if (key == "env") cfg.env = value;
    else if (key == "t_max") cfg.t_max = as_long();
    else if (key == "t_rand") cfg.t_rand = as_long();
    else if (key == "gamma") cfg.gamma = as_double();
    else if (key == "noise_sigma") cfg.noise_sigma = as_double();
    else if (key == "learning_rate") cfg.learning_rate = as_double();
    else if (key == "buffer_capacity") cfg.buffer_capacity = static_cast<std::size_t>(as_long());
    else if (key == "n_mb") cfg.n_mb = as_int();
    else if (key == "n_lrmb") cfg.n_lrmb = as_int();
    else if (key == "t_lr") cfg.t_lr = as_int();
    else if (key == "w_a") cfg.w_a = as_double();
    else if (key == "tau_ddpg") cfg.tau_ddpg = as_double();
    else if (key == "tau_lr") cfg.tau_lr = as_double();
    else if (key == "qn_max_iter") cfg.qn_max_iter = as_int();
    else if (key == "qn_action_bound") cfg.qn_action_bound = as_double();
    else if (key == "clip_penalty_coeff") cfg.clip_penalty_coeff = as_double();
    else if (key == "beta_a0") cfg.beta_a0 = as_double();
    else if (key == "beta_a_min") cfg.beta_a_min = as_double();
    else if (key == "beta_a_prime0") cfg.beta_a_prime0 = as_double();
    else if (key == "beta_a_prime_min") cfg.beta_a_prime_min = as_double();
    else if (key == "beta_c0") cfg.beta_c0 = as_double();
    else if (key == "beta_c_min") cfg.beta_c_min = as_double();
    else if (key == "beta_c_prime0") cfg.beta_c_prime0 = as_double();
    else if (key == "beta_c_prime_min") cfg.beta_c_prime_min = as_double();
    else if (key == "delta") cfg.delta = as_double();
    else if (key == "c_a") cfg.c_a = as_double();
    else if (key == "c_c") cfg.c_c = as_double();
    else if (key == "hidden_width") cfg.hidden_width = as_int();
    else if (key == "use_ddpg_actor") cfg.use_ddpg_actor = parse_bool(value);
    else if (key == "use_ddpg_critic") cfg.use_ddpg_critic = parse_bool(value);
    else if (key == "use_lr_actor") cfg.use_lr_actor = parse_bool(value);
    else if (key == "use_lr_critic") cfg.use_lr_critic = parse_bool(value);
    else if (key == "action_mode") {
        if (value == "oac") cfg.action_mode = ActionMode::oac;
        else if (value == "aac") cfg.action_mode = ActionMode::aac;
        else throw ConfigError("action_mode must be oac or aac, got '" + value + "'");
    }
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "eval_interval") cfg.eval_interval = as_long();
    else if (key == "eval_episodes") cfg.eval_episodes = as_int();
    else if (key == "moving_average_window") cfg.moving_average_window = as_int();
    else if (key == "final_window_fraction") cfg.final_window_fraction = as_double();
    else if (key == "fix_beta_c") cfg.fix_beta_c = as_double();
    else if (key == "zero_reg") {
        if (value == "none") cfg.zero_reg = ZeroReg::none;
        else if (value == "actor") cfg.zero_reg = ZeroReg::actor;
        else if (value == "critic") cfg.zero_reg = ZeroReg::critic;
        else if (value == "all") cfg.zero_reg = ZeroReg::all;
        else throw ConfigError("zero_reg must be actor, critic or all, got '" + value + "'");
    }
    else throw ConfigError("unknown config key '" + key + "'");
}

// Flat key=value file; '#' starts a comment, blank lines are ignored.
inline void load_config_file(TrainConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = config_detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + " is not key=value");
        }
        const std::string key = config_detail::trim(line.substr(0, eq));
        const std::string value = config_detail::trim(line.substr(eq + 1));
        try {
            apply_config_entry(cfg, key, value);
        } catch (const std::invalid_argument&) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": cannot parse value '" + value + "' for key '" + key + "'");
        }
    }
}

} // namespace dlsddpg
