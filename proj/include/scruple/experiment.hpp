#pragma once

#include "scruple/agent.hpp"
#include "scruple/roc.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace scruple {

enum class Method { Random, Unshaped, Cmps, CmpsOracle, Soft, Reward, RewardOracle, Utility };

std::string method_name(Method m);
std::optional<Method> parse_method(const std::string& name);

struct ExperimentPlan {
    std::vector<std::string> games;  // empty = all bundled games
    std::vector<int> starts = {0, 20, 40, 60, 80};
    std::vector<Method> methods = {Method::Random, Method::Unshaped, Method::Cmps,
                                   Method::CmpsOracle};
    std::vector<uint64_t> seeds = {1};
    AgentConfig agent;  // steps, envs, learning settings
    double gamma_shape = 10.0;
    double reward_penalty = 0.5;
    std::string out_dir = "out";
    int workers = 0;  // 0 = auto

    // scorer calibration settings (Appendix-B style)
    int roc_n_per_step = 100;
    double target_auroc = 0.725;
    double auroc_tol = 0.005;
    double target_fpr = 0.10;
    double noisy_base_hi = 0.7;
    double noisy_base_lo = 0.3;
    uint64_t calibration_seed = 9001;
};

struct SuiteCalibration {
    double sigma = 0;
    double tau_noisy = 0;
    double auroc_noisy = 0;
    double fpr_noisy = 0;
    double tau_utility = 0;
    double auroc_utility = 0;
    double fpr_utility = 0;
    double base_hi = 0.7;
    double base_lo = 0.3;
    uint64_t seed = 0;
    size_t dataset_size = 0;
};

SuiteCalibration calibrate_suite(const std::vector<std::string>& games,
                                 const ExperimentPlan& plan);

struct CellResult {
    std::string game;
    int k = 0;
    Method method = Method::Unshaped;
    uint64_t seed = 0;
    double last_window_immorality = 0;
    double last_window_completion = 0;
    std::array<double, 4> last_window_by_category{};
    double last_window_degree3 = 0;  // neg-others degree-3 mass per episode
    int episodes = 0;
    int last_window_used = 0;
    long ban_violations = 0;
    long flagged_executions = 0;
    bool early_stopped = false;
    std::vector<std::string> coverage;
    double wall_seconds = 0;
};

struct ExperimentResults {
    std::vector<CellResult> cells;  // plan order
    std::optional<SuiteCalibration> calibration;
    std::string summary_csv_path;
};

// Executes every (game, start, method, seed) cell via train(), skipping cells
// whose result record already exists, and writes per-episode logs plus the
// aggregated summary CSV. Deterministic per plan; cells fan out to a worker
// pool and share nothing.
ExperimentResults run_experiment(const ExperimentPlan& plan);

// Summary rows recomputed from cell results (same routine run_experiment
// uses to write summary.csv).
std::string summary_csv(const ExperimentPlan& plan, const std::vector<CellResult>& cells);

// Builds the per-method agent/shaping configuration for one cell.
std::pair<AgentConfig, ShapingConfig> cell_configs(const ExperimentPlan& plan,
                                                   const SuiteCalibration* calibration,
                                                   const std::string& game, int k, Method method,
                                                   uint64_t seed);

ExperimentPlan load_plan_file(const std::string& path);
std::string plan_to_json(const ExperimentPlan& plan);

// Score after replaying the first floor(k/100 * len) walkthrough actions.
int starting_score(const WorldModel& world, int k);

}  // namespace scruple
