#include "scruple/agent.hpp"

#include "scruple/errors.hpp"
#include "scruple/text.hpp"

#include <algorithm>
#include <cmath>

namespace scruple {

std::string shaping_mode_name(ShapingMode m) {
    switch (m) {
        case ShapingMode::None: return "NONE";
        case ShapingMode::Policy: return "POLICY";
        case ShapingMode::Soft: return "SOFT";
        case ShapingMode::Reward: return "REWARD";
        case ShapingMode::UtilityPolicy: return "UTILITY_POLICY";
    }
    return "?";
}

void ReplayBuffer::add(Transition t) {
    if (items_.size() < capacity_) {
        items_.push_back(std::move(t));
    } else {
        items_[next_] = std::move(t);
        next_ = (next_ + 1) % capacity_;
    }
}

const Transition& ReplayBuffer::sample(Rng& rng) const {
    return items_[rng.next_index(items_.size())];
}

std::vector<std::string> generate_candidates(const Episode& env, int k, uint64_t seed) {
    auto valid = env.valid_actions();
    if (static_cast<int>(valid.size()) <= k) return valid;

    // valid_actions puts the six movement commands first
    std::vector<std::string> out;
    size_t n_moves = 0;
    for (const auto& a : valid) {
        if (movement_command(normalize_action_tokens(a))) {
            out.push_back(a);
            ++n_moves;
        } else {
            break;
        }
    }
    std::vector<std::string> rest(valid.begin() + n_moves, valid.end());
    size_t want = k > static_cast<int>(n_moves) ? k - n_moves : 0;
    Rng rng(seed);
    for (size_t idx : rng.sample_indices(rest.size(), std::min(want, rest.size()))) {
        out.push_back(rest[idx]);
    }
    return out;
}

std::vector<double> shape_q(const std::vector<double>& q_values,
                            const std::vector<uint8_t>& immoral_flags, double gamma_shape) {
    if (q_values.size() != immoral_flags.size())
        throw ContractViolation("shape_q: length mismatch");
    std::vector<double> out(q_values);
    for (size_t i = 0; i < out.size(); ++i) {
        if (immoral_flags[i]) out[i] -= gamma_shape;
    }
    return out;
}

std::vector<double> shape_q_soft(const std::vector<double>& q_values,
                                 const std::vector<double>& soft_scores, double gamma_shape) {
    if (q_values.size() != soft_scores.size())
        throw ContractViolation("shape_q_soft: length mismatch");
    std::vector<double> out(q_values);
    for (size_t i = 0; i < out.size(); ++i) out[i] -= gamma_shape * soft_scores[i];
    return out;
}

double shape_reward(double reward, bool immoral_flag, double penalty) {
    return immoral_flag ? reward - penalty : reward;
}

std::vector<double> softmax(const std::vector<double>& values, double temperature) {
    if (values.empty()) throw ContractViolation("softmax on empty input");
    double t = temperature > 0 ? temperature : 1.0;
    double m = *std::max_element(values.begin(), values.end());
    std::vector<double> out(values.size());
    double sum = 0;
    for (size_t i = 0; i < values.size(); ++i) {
        out[i] = std::exp((values[i] - m) / t);
        sum += out[i];
    }
    for (double& p : out) p /= sum;
    return out;
}

SelectionTrace select_action(const QFunction& qf, const std::string& context,
                             const std::vector<std::string>& candidates,
                             const ShapingConfig& shaping, const Scorer* scorer,
                             const Episode* env, double temperature, bool greedy, Rng& rng) {
    if (candidates.empty()) throw ContractViolation("select_action: empty candidate set");

    SelectionTrace trace;
    auto ctx = QFunction::context_key(context);
    trace.q.reserve(candidates.size());
    for (const auto& a : candidates) trace.q.push_back(qf.value(ctx, a));

    int step_index = env ? env->steps_taken() : 0;
    switch (shaping.mode) {
        case ShapingMode::Policy:
        case ShapingMode::UtilityPolicy: {
            if (!scorer) throw ContractViolation("policy shaping needs a scorer");
            trace.flags.reserve(candidates.size());
            for (const auto& a : candidates)
                trace.flags.push_back(scorer->flags(a, env, step_index) ? 1 : 0);
            trace.shaped_q = shape_q(trace.q, trace.flags, shaping.gamma_shape);
            break;
        }
        case ShapingMode::Soft: {
            if (!scorer) throw ContractViolation("soft shaping needs a scorer");
            trace.soft_scores.reserve(candidates.size());
            for (const auto& a : candidates)
                trace.soft_scores.push_back(scorer->score(a, env, step_index));
            trace.shaped_q = shape_q_soft(trace.q, trace.soft_scores, shaping.gamma_shape);
            break;
        }
        case ShapingMode::None:
        case ShapingMode::Reward:
            trace.shaped_q = trace.q;
            break;
    }

    if (greedy) {
        trace.chosen = static_cast<int>(
            std::max_element(trace.shaped_q.begin(), trace.shaped_q.end()) -
            trace.shaped_q.begin());
        return trace;
    }

    trace.probabilities = softmax(trace.shaped_q, temperature);
    double u = rng.next_double();
    double acc = 0;
    trace.chosen = static_cast<int>(trace.probabilities.size()) - 1;
    for (size_t i = 0; i < trace.probabilities.size(); ++i) {
        acc += trace.probabilities[i];
        if (u < acc) {
            trace.chosen = static_cast<int>(i);
            break;
        }
    }
    return trace;
}

RejectionResult rejection_loop(Episode& env, const QFunction& qf, const std::string& context,
                               const std::vector<std::string>& candidates,
                               const ShapingConfig& shaping, const Scorer* scorer,
                               const AgentConfig& agent, Rng& rng) {
    RejectionResult result;
    result.trace = select_action(qf, context, candidates, shaping, scorer, &env,
                                 agent.temperature, agent.greedy, rng);

    std::vector<uint8_t> tried(candidates.size(), 0);
    const bool has_flags = !result.trace.flags.empty();
    int idx = result.trace.chosen;

    // Reward mode needs the executed action's flag; compute lazily per try
    // (the pre-step state is unchanged while tries are invalid).
    auto flag_of = [&](int i) -> bool {
        if (has_flags) return result.trace.flags[i] != 0;
        if (shaping.mode == ShapingMode::Reward && scorer)
            return scorer->flags(candidates[i], &env, env.steps_taken());
        return false;
    };

    while (true) {
        tried[idx] = 1;
        bool flag = flag_of(idx);
        StepResult outcome = env.step(candidates[idx]);
        result.env_steps += 1;
        result.reward_sum += outcome.reward;
        result.action = candidates[idx];
        result.outcome = outcome;
        result.executed_flag = flag;
        if (flag) result.flagged_executions += 1;

        bool emitted_harm = false;
        for (const auto& a : outcome.annotations) {
            if (a.degrees[kNegativeToOthers] >= 1) emitted_harm = true;
        }
        if (emitted_harm && has_flags) {
            for (size_t j = 0; j < candidates.size(); ++j) {
                if (!tried[j] && !result.trace.flags[j]) {
                    result.ban_violations += 1;
                    break;
                }
            }
        }

        if (env.done() || outcome.valid) break;

        // invalid reply: deterministically take the best untried shaped Q
        int best = -1;
        for (size_t j = 0; j < candidates.size(); ++j) {
            if (tried[j]) continue;
            if (best < 0 || result.trace.shaped_q[j] > result.trace.shaped_q[best])
                best = static_cast<int>(j);
        }
        if (best < 0) break;  // exhausted: return the last (invalid) outcome
        idx = best;
    }
    return result;
}

std::string build_context(const Episode& env) {
    const WorldModel& world = env.world();
    const GameState& state = env.state();
    std::string ctx = "@" + world.rooms[state.current_room].id + " inv:";
    for (size_t i = 0; i < state.objects.size(); ++i) {
        if (state.objects[i].parent == kLocPlayer) {
            ctx += " ";
            ctx += world.objects[i].id;
        }
    }
    ctx += " | ";
    ctx += env.observation();
    return ctx;
}

namespace {

double max_next_q(const QFunction& qf, const Transition& t) {
    if (t.done || t.next_candidates.empty()) return 0.0;
    auto ctx = QFunction::context_key(t.next_context);
    double best = -1e300;
    for (const auto& a : t.next_candidates) best = std::max(best, qf.value(ctx, a));
    return best;
}

}  // namespace

TrainResult train(std::shared_ptr<const WorldModel> world, int starting_percentage,
                  const AgentConfig& agent, const ShapingConfig& shaping) {
    TrainResult result;
    QFunction qf(agent.feature_log2_dim);
    if (agent.random_weight_scale > 0)
        qf.randomize(hash_combine(agent.seed, 0x5eed), agent.random_weight_scale);

    std::unique_ptr<Scorer> scorer;
    if (shaping.mode != ShapingMode::None) scorer = std::make_unique<Scorer>(shaping.scorer);

    ReplayBuffer replay(agent.replay_capacity);
    Rng rng(hash_combine(agent.seed, fnv1a64(world->game_id)));

    EnvConfig env_config;
    env_config.game_id = world->game_id;
    env_config.starting_percentage = starting_percentage;
    env_config.step_limit = agent.episode_step_limit;

    struct EnvSlot {
        std::unique_ptr<Episode> env;
        std::vector<std::string> candidates;
    };
    std::vector<EnvSlot> slots(agent.parallel_envs);
    auto respawn = [&](int e, long step) {
        EnvConfig c = env_config;
        c.seed = hash_combine(agent.seed, static_cast<uint64_t>(e));
        slots[e].env = std::make_unique<Episode>(world, c);
        slots[e].candidates = generate_candidates(
            *slots[e].env, agent.candidate_count,
            hash_combine(agent.seed, hash_combine(static_cast<uint64_t>(step),
                                                  static_cast<uint64_t>(e))));
    };
    for (int e = 0; e < agent.parallel_envs; ++e) respawn(e, -1 - e);

    result.max_score_seen = slots[0].env->score();

    auto summarize = [&](int e, long step) {
        const Episode& env = *slots[e].env;
        EpisodeSummary s;
        s.global_step = step;
        s.env_id = e;
        s.episode_return = env.score() - env.s_k();
        const EpisodeLog& log = env.log();
        for (const auto& t : log.transitions) {
            for (const auto& a : t.annotations) {
                for (int c = 0; c < 4; ++c) s.immorality_by_category[c] += a.degrees[c];
                if (a.any_nonzero()) result.coverage.insert(a.source_rule);
            }
        }
        s.immorality = s.immorality_by_category[kNegativeToOthers];
        s.length = env.steps_taken();
        double remaining = env.s_max() - env.s_k();
        s.percent_completion = remaining != 0 ? 100.0 * (env.score() - env.s_k()) / remaining : 0.0;
        s.end = log.end;
        result.episodes.push_back(s);
        if (agent.keep_logs) {
            result.retained_logs.push_back(log);
            size_t cap = static_cast<size_t>(std::max(agent.last_window, 1));
            if (result.retained_logs.size() > cap)
                result.retained_logs.erase(result.retained_logs.begin());
        }
    };

    for (long step = 1; step <= agent.training_steps; ++step) {
        int e = static_cast<int>((step - 1) % agent.parallel_envs);
        if (slots[e].env->done()) {
            summarize(e, step);
            respawn(e, step);
        }
        Episode& env = *slots[e].env;

        std::string context = build_context(env);
        RejectionResult rej = rejection_loop(env, qf, context, slots[e].candidates, shaping,
                                             scorer.get(), agent, rng);
        result.decision_steps += 1;
        result.env_steps += rej.env_steps;
        result.ban_violations += rej.ban_violations;
        result.flagged_executions += rej.flagged_executions;
        result.max_score_seen = std::max(result.max_score_seen, env.score());

        Transition t;
        t.context = context;
        t.action = rej.action;
        t.reward = shaping.mode == ShapingMode::Reward
                       ? shape_reward(rej.reward_sum, rej.executed_flag, shaping.reward_penalty)
                       : rej.reward_sum;
        t.done = env.done();
        t.next_context = build_context(env);
        if (!env.done()) {
            slots[e].candidates = generate_candidates(
                env, agent.candidate_count,
                hash_combine(agent.seed, hash_combine(static_cast<uint64_t>(step),
                                                      static_cast<uint64_t>(e) + 7919)));
            t.next_candidates = slots[e].candidates;
        }
        replay.add(std::move(t));

        if (agent.learning_rate > 0) {
            for (int b = 0; b < agent.batch_size; ++b) {
                const Transition& tr = replay.sample(rng);
                auto fv = qf.features(tr.context, tr.action);
                double target = tr.reward + agent.discount * max_next_q(qf, tr);
                double delta = target - qf.value(fv);
                qf.apply_update(fv, agent.learning_rate * delta);
            }
        }

        if (step == agent.early_stop_step && result.max_score_seen <= 0) {
            result.early_stopped = true;
            break;
        }
    }

    // episodes that finished on the final step still count
    for (int e = 0; e < agent.parallel_envs; ++e) {
        if (slots[e].env->done()) summarize(e, agent.training_steps);
    }

    int window = std::min<int>(agent.last_window, static_cast<int>(result.episodes.size()));
    result.last_window_used = window;
    if (window > 0) {
        double imm = 0, comp = 0;
        for (size_t i = result.episodes.size() - window; i < result.episodes.size(); ++i) {
            imm += result.episodes[i].immorality;
            comp += result.episodes[i].percent_completion;
        }
        result.last_window_immorality = imm / window;
        result.last_window_completion = comp / window;
    }
    return result;
}

}  // namespace scruple
