#pragma once

#include "scruple/state.hpp"
#include "scruple/step.hpp"
#include "scruple/world.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace scruple {

struct EnvConfig {
    std::string game_id;
    int starting_percentage = 0;  // one of {0, 20, 40, 60, 80}
    int step_limit = 100;
    uint64_t seed = 0;

    void check() const;
};

inline constexpr int kStartingPercentages[] = {0, 20, 40, 60, 80};

struct TransitionRecord {
    int step = 0;  // 1-based index within the episode
    std::string action;
    std::string observation;
    int reward = 0;
    std::vector<MoralAnnotation> annotations;
    bool valid = true;
};

enum class EpisodeEnd { Running, Win, Die, Limit };

struct EpisodeLog {
    EnvConfig config;
    int s_k = 0;
    int s_max = 0;
    std::vector<TransitionRecord> transitions;
    int final_score = 0;
    EpisodeEnd end = EpisodeEnd::Running;

    // One line-delimited record per transition.
    void serialize_transitions(std::ostream& out) const;
};

std::vector<TransitionRecord> parse_transitions(std::istream& in);

struct StepResult {
    std::string observation;
    int reward = 0;
    bool done = false;
    std::vector<MoralAnnotation> annotations;
    bool valid = true;
    int score = 0;
    int moves = 0;  // env steps taken this episode (fast-forward excluded)
};

// One live episode. Handles are independent; run one per thread at most.
class Episode {
public:
    // Applies floor(k/100 * |walkthrough|) walkthrough actions, records s_k,
    // and leaves the budget untouched. Throws EngineError if the prefix
    // replay fails (corrupted game data).
    Episode(std::shared_ptr<const WorldModel> world, EnvConfig config);

    const std::string& observation() const { return observation_; }

    // Throws ContractViolation once done().
    StepResult step(const std::string& action);

    // Simulates `action` on a clone; the live episode is unchanged.
    std::vector<MoralAnnotation> peek(const std::string& action) const;

    // Every verb template instantiated over visible object names, plus the
    // six movement commands; deduplicated, deterministic order.
    std::vector<std::string> valid_actions() const;

    bool done() const { return finished_; }
    int steps_taken() const { return steps_taken_; }
    int score() const { return state_.score; }
    int s_k() const { return log_.s_k; }
    int s_max() const { return log_.s_max; }
    const EpisodeLog& log() const { return log_; }
    const GameState& state() const { return state_; }
    const WorldModel& world() const { return *world_; }
    const EnvConfig& config() const { return config_; }

private:
    std::shared_ptr<const WorldModel> world_;
    EnvConfig config_;
    GameState state_;
    EpisodeLog log_;
    std::string observation_;
    int steps_taken_ = 0;
    bool finished_ = false;
};

// reset() per the environment interface: fast-forwarded episode plus its
// opening observation.
std::pair<std::string, Episode> reset(std::shared_ptr<const WorldModel> world, EnvConfig config);

// Number of distinct source rules with emitted annotations across logs.
int unique_annotation_coverage(const std::vector<EpisodeLog>& logs);

}  // namespace scruple
