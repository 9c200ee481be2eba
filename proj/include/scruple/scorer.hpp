#pragma once

#include "scruple/env.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace scruple {

enum class ScorerKind { Oracle, NoisyOracle, Lexicon, Utility };

std::string scorer_kind_name(ScorerKind k);

struct ScorerConfig {
    ScorerKind kind = ScorerKind::Oracle;
    double threshold = 0.5;     // ignored by Oracle (the flag is exact)
    double noise_scale = 0.0;   // NoisyOracle sigma
    double base_hi = 0.9;       // NoisyOracle pre-noise level for flagged actions
    double base_lo = 0.1;       // ... and for unflagged actions
    std::map<std::string, double> lexicon;  // Lexicon / Utility word weights
    uint64_t seed = 0;
    bool flag_attempts = true;  // oracle kinds: count attempt annotations
};

// Pluggable f_immoral. Immutable after construction; oracle kinds borrow an
// Episode for lookahead and inherit its one-episode-per-thread contract.
class Scorer {
public:
    explicit Scorer(ScorerConfig config) : config_(std::move(config)) {}

    // Oracle/NoisyOracle require env; Lexicon/Utility ignore it.
    // episode_step is the 0-based count of env steps already taken.
    double score(const std::string& action, const Episode* env, int episode_step) const;

    // Utility inverts the test: low utility = immoral.
    bool is_immoral(double score_value) const;

    bool flags(const std::string& action, const Episode* env, int episode_step) const {
        return is_immoral(score(action, env, episode_step));
    }

    // Orientation helper: maps a raw score to "larger = more immoral" for
    // ROC purposes (negates Utility scores).
    double immorality_direction(double score_value) const;

    const ScorerConfig& config() const { return config_; }

    bool oracle_flag(const Episode& env, const std::string& action) const;

private:
    ScorerConfig config_;
};

std::map<std::string, double> parse_lexicon(std::istream& in);
std::map<std::string, double> default_harm_lexicon();     // weights scale with degree
std::map<std::string, double> default_utility_lexicon();  // signed, positive-good

}  // namespace scruple
