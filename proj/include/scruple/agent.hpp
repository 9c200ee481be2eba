#pragma once

#include "scruple/env.hpp"
#include "scruple/qfunction.hpp"
#include "scruple/rng.hpp"
#include "scruple/scorer.hpp"

#include <memory>
#include <set>
#include <string>
#include <vector>

namespace scruple {

enum class ShapingMode { None, Policy, Soft, Reward, UtilityPolicy };

std::string shaping_mode_name(ShapingMode m);

struct ShapingConfig {
    ShapingMode mode = ShapingMode::None;
    double gamma_shape = 10.0;
    double reward_penalty = 0.5;
    ScorerConfig scorer;  // binding used by Policy/Soft/Reward/UtilityPolicy
};

struct AgentConfig {
    int candidate_count = 30;
    double temperature = 1.0;
    bool greedy = false;  // argmax selection (the temperature -> 0 limit)
    double learning_rate = 0.001;
    double discount = 0.9;
    int replay_capacity = 10000;
    int batch_size = 16;
    int training_steps = 15000;
    int parallel_envs = 8;
    int early_stop_step = 5000;  // stop when max raw score <= 0 by this step
    int episode_step_limit = 100;
    int last_window = 50;
    int feature_log2_dim = 20;
    double random_weight_scale = 0.0;  // > 0: start from fixed random weights
    bool keep_logs = false;            // retain full logs of the last-window episodes
    uint64_t seed = 0;
};

struct Transition {
    std::string context;
    std::string action;
    double reward = 0;  // already shaped under Reward mode
    std::string next_context;
    std::vector<std::string> next_candidates;
    bool done = false;
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {}
    void add(Transition t);
    const Transition& sample(Rng& rng) const;
    size_t size() const { return items_.size(); }

private:
    size_t capacity_;
    size_t next_ = 0;
    std::vector<Transition> items_;
};

// Deterministic sample of k valid actions, always including every movement
// command; the whole valid set when it fits.
std::vector<std::string> generate_candidates(const Episode& env, int k, uint64_t seed);

// Q'_i = Q_i - gamma * flag_i.
std::vector<double> shape_q(const std::vector<double>& q_values,
                            const std::vector<uint8_t>& immoral_flags, double gamma_shape);

// Q'_i = Q_i - gamma * score_i, scores in [0,1].
std::vector<double> shape_q_soft(const std::vector<double>& q_values,
                                 const std::vector<double>& soft_scores, double gamma_shape);

// r - penalty * flag. Logged env rewards stay raw; this feeds learning only.
double shape_reward(double reward, bool immoral_flag, double penalty = 0.5);

// Numerically safe softmax (max subtraction), optional temperature.
std::vector<double> softmax(const std::vector<double>& values, double temperature = 1.0);

struct SelectionTrace {
    std::vector<double> q;
    std::vector<double> shaped_q;
    std::vector<double> probabilities;  // empty under greedy selection
    std::vector<uint8_t> flags;         // Policy/UtilityPolicy modes
    std::vector<double> soft_scores;    // Soft mode
    int chosen = -1;
};

// Applies the configured shaping to the candidates' Q-values and samples the
// softmax (or takes the argmax under greedy). `scorer`/`env` are consulted
// for flags in Policy/Soft/UtilityPolicy modes.
SelectionTrace select_action(const QFunction& qf, const std::string& context,
                             const std::vector<std::string>& candidates,
                             const ShapingConfig& shaping, const Scorer* scorer,
                             const Episode* env, double temperature, bool greedy, Rng& rng);

struct RejectionResult {
    std::string action;  // the action whose outcome ended the loop
    StepResult outcome;
    int env_steps = 0;
    double reward_sum = 0;
    bool executed_flag = false;    // shaping-scorer flag of the executed action
    int ban_violations = 0;        // emitted harm while an unflagged candidate remained
    int flagged_executions = 0;
    SelectionTrace trace;
};

// Samples an action; on the fixed invalid reply retries the highest shaped-Q
// untried candidate until a valid outcome, episode end, or exhaustion.
RejectionResult rejection_loop(Episode& env, const QFunction& qf, const std::string& context,
                               const std::vector<std::string>& candidates,
                               const ShapingConfig& shaping, const Scorer* scorer,
                               const AgentConfig& agent, Rng& rng);

struct EpisodeSummary {
    long global_step = 0;
    int env_id = 0;
    double episode_return = 0;  // raw s_a - s_k
    double immorality = 0;      // negative-to-others degree sum
    std::array<double, 4> immorality_by_category{};
    int length = 0;  // env steps
    double percent_completion = 0;
    EpisodeEnd end = EpisodeEnd::Running;
};

struct TrainResult {
    std::vector<EpisodeSummary> episodes;
    std::vector<EpisodeLog> retained_logs;  // last-window episodes, when keep_logs
    double last_window_immorality = 0;
    double last_window_completion = 0;
    int last_window_used = 0;  // may shrink to the available episodes
    std::set<std::string> coverage;  // annotated rules emitted during training
    long ban_violations = 0;
    long flagged_executions = 0;
    int max_score_seen = 0;
    bool early_stopped = false;
    long decision_steps = 0;
    long env_steps = 0;
};

// The training loop: round-robin over parallel environments, candidate
// generation, rejection-loop execution, replay, and TD updates.
TrainResult train(std::shared_ptr<const WorldModel> world, int starting_percentage,
                  const AgentConfig& agent, const ShapingConfig& shaping);

// Observation context fed to the Q-function: room, inventory, latest text.
std::string build_context(const Episode& env);

}  // namespace scruple
