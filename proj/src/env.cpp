#include "scruple/env.hpp"

#include "scruple/errors.hpp"
#include "scruple/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

namespace scruple {

void EnvConfig::check() const {
    bool ok = false;
    for (int k : kStartingPercentages) {
        if (starting_percentage == k) ok = true;
    }
    if (!ok)
        throw EngineError("starting_percentage must be one of {0,20,40,60,80}, got " +
                          std::to_string(starting_percentage));
    if (step_limit < 1) throw EngineError("step_limit must be >= 1");
}

Episode::Episode(std::shared_ptr<const WorldModel> world, EnvConfig config)
    : world_(std::move(world)), config_(std::move(config)) {
    config_.check();
    state_ = initial_state(*world_);
    log_.config = config_;
    log_.s_max = world_->max_score;

    size_t prefix =
        world_->walkthrough.size() * static_cast<size_t>(config_.starting_percentage) / 100;
    observation_ = room_observation(*world_, state_.current_room);
    for (size_t i = 0; i < prefix; ++i) {
        if (state_.done)
            throw EngineError("fast-forward ended the game early at action " +
                              std::to_string(i + 1));
        StepOutcome out = scruple::step(state_, world_->walkthrough[i], *world_);
        if (!out.valid)
            throw EngineError("fast-forward action '" + world_->walkthrough[i] +
                              "' produced the invalid reply");
        observation_ = out.observation;
    }
    log_.s_k = state_.score;
}

StepResult Episode::step(const std::string& action) {
    if (finished_) throw ContractViolation("step() on a finished episode");

    StepOutcome out = scruple::step(state_, action, *world_);
    steps_taken_ += 1;

    TransitionRecord rec;
    rec.step = steps_taken_;
    rec.action = action;
    rec.observation = out.observation;
    rec.reward = out.reward;
    rec.annotations = out.annotations;
    rec.valid = out.valid;
    log_.transitions.push_back(std::move(rec));

    if (out.done) {
        finished_ = true;
        log_.end = state_.reason == DoneReason::Win ? EpisodeEnd::Win : EpisodeEnd::Die;
    } else if (steps_taken_ >= config_.step_limit) {
        finished_ = true;
        log_.end = EpisodeEnd::Limit;
    }
    log_.final_score = state_.score;
    observation_ = out.observation;

    StepResult res;
    res.observation = out.observation;
    res.reward = out.reward;
    res.done = finished_;
    res.annotations = out.annotations;
    res.valid = out.valid;
    res.score = state_.score;
    res.moves = steps_taken_;
    return res;
}

std::vector<MoralAnnotation> Episode::peek(const std::string& action) const {
    GameState clone = state_;
    StepOutcome out = scruple::step(clone, action, *world_);
    return out.annotations;
}

std::vector<std::string> Episode::valid_actions() const {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    auto push = [&](std::string s) {
        if (seen.insert(s).second) out.push_back(std::move(s));
    };

    for (int d = 0; d < kDirectionCount; ++d)
        push(std::string(direction_token(static_cast<Direction>(d))));

    // visible objects in id order
    std::vector<int> objs;
    for (int i = 0; i < static_cast<int>(world_->objects.size()); ++i) {
        if (object_visible(*world_, state_, i)) objs.push_back(i);
    }
    std::sort(objs.begin(), objs.end(), [&](int a, int b) {
        return world_->objects[a].id < world_->objects[b].id;
    });

    // template shapes per verb come from the declared rules
    struct Shape {
        bool has_dobj;
        std::string prep;  // empty when no indirect object
        bool operator==(const Shape&) const = default;
    };
    for (const auto& verb : world_->verbs) {
        std::vector<Shape> shapes;
        for (const auto& rule : world_->rules) {
            if (rule.pattern.verb != verb.word) continue;
            Shape s{rule.pattern.direct_object >= 0, rule.pattern.preposition};
            if (std::find(shapes.begin(), shapes.end(), s) == shapes.end())
                shapes.push_back(std::move(s));
        }
        for (const auto& shape : shapes) {
            if (!shape.has_dobj) {
                push(verb.word);
            } else if (shape.prep.empty()) {
                for (int o : objs) push(verb.word + " " + to_lower(world_->objects[o].name));
            } else {
                for (int a : objs) {
                    for (int b : objs) {
                        if (a == b) continue;
                        push(verb.word + " " + to_lower(world_->objects[a].name) + " " +
                             shape.prep + " " + to_lower(world_->objects[b].name));
                    }
                }
            }
        }
    }
    return out;
}

std::pair<std::string, Episode> reset(std::shared_ptr<const WorldModel> world, EnvConfig config) {
    Episode ep(std::move(world), std::move(config));
    return {ep.observation(), std::move(ep)};
}

int unique_annotation_coverage(const std::vector<EpisodeLog>& logs) {
    std::set<std::string> rules;
    for (const auto& log : logs) {
        for (const auto& t : log.transitions) {
            for (const auto& a : t.annotations) rules.insert(a.source_rule);
        }
    }
    return static_cast<int>(rules.size());
}

void EpisodeLog::serialize_transitions(std::ostream& out) const {
    for (const auto& t : transitions) {
        nlohmann::json j;
        j["step"] = t.step;
        j["action"] = t.action;
        j["observation"] = t.observation;
        j["reward"] = t.reward;
        j["valid"] = t.valid;
        auto anns = nlohmann::json::array();
        for (const auto& a : t.annotations) {
            anns.push_back({{"degrees", a.degrees},
                            {"description", a.description},
                            {"rule", a.source_rule},
                            {"attempt", a.attempt}});
        }
        j["annotations"] = std::move(anns);
        out << j.dump() << '\n';
    }
}

std::vector<TransitionRecord> parse_transitions(std::istream& in) {
    std::vector<TransitionRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        TransitionRecord t;
        t.step = j.at("step").get<int>();
        t.action = j.at("action").get<std::string>();
        t.observation = j.at("observation").get<std::string>();
        t.reward = j.at("reward").get<int>();
        t.valid = j.at("valid").get<bool>();
        for (const auto& a : j.at("annotations")) {
            MoralAnnotation ann;
            auto d = a.at("degrees");
            for (int i = 0; i < 4; ++i) ann.degrees[i] = d.at(i).get<int>();
            ann.description = a.at("description").get<std::string>();
            ann.source_rule = a.at("rule").get<std::string>();
            ann.attempt = a.at("attempt").get<bool>();
            t.annotations.push_back(std::move(ann));
        }
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace scruple
