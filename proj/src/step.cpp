#include "scruple/step.hpp"

#include "scruple/errors.hpp"
#include "scruple/text.hpp"

#include <algorithm>

namespace scruple {

namespace {

const char* kPrepositions[] = {"with", "in", "into", "on", "onto", "at",
                               "to",   "under", "behind", "from", "over", "about"};

bool is_preposition(const std::string& w) {
    for (const char* p : kPrepositions) {
        if (w == p) return true;
    }
    return false;
}

bool in_inventory(const GameState& state, int object) {
    int code = state.objects[object].parent;
    int hops = 0;
    const int n = static_cast<int>(state.objects.size());
    while (loc_is_object(code)) {
        if (++hops > n) return false;
        code = state.objects[code].parent;
    }
    return code == kLocPlayer;
}

// Matches a noun phrase (already lowercased, article-free) against one
// object: either the full display name or a single-word synonym.
bool noun_matches(const GameObject& obj, const std::vector<std::string>& phrase) {
    if (phrase.empty()) return false;
    if (phrase.size() == 1) {
        if (std::find(obj.synonyms.begin(), obj.synonyms.end(), phrase[0]) != obj.synonyms.end())
            return true;
    }
    return join(phrase) == to_lower(obj.name);
}

int resolve_noun(const std::vector<std::string>& phrase, const GameState& state,
                 const WorldModel& world) {
    int best = -1;
    bool best_inv = false;
    for (int i = 0; i < static_cast<int>(world.objects.size()); ++i) {
        if (!object_visible(world, state, i)) continue;
        if (!noun_matches(world.objects[i], phrase)) continue;
        bool inv = in_inventory(state, i);
        if (best < 0 || (inv && !best_inv)) {
            best = i;
            best_inv = inv;
        }
    }
    return best;
}

bool conditions_hold(const Rule& rule, const GameState& state, const WorldModel& world) {
    for (const auto& c : rule.preconditions) {
        switch (c.kind) {
            case Condition::Kind::At:
                if (state.current_room != c.target) return false;
                break;
            case Condition::Kind::Has:
                if (!in_inventory(state, c.target)) return false;
                break;
            case Condition::Kind::Here:
                if (!object_visible(world, state, c.target)) return false;
                break;
            case Condition::Kind::Attr:
                if (state.attr(c.target, c.attr_bit) != c.attr_value) return false;
                break;
        }
    }
    return true;
}

void apply_effects(const Rule& rule, int rule_index, GameState& state, const WorldModel& world,
                   StepOutcome& out) {
    std::vector<std::string> prints;
    for (const auto& e : rule.effects) {
        switch (e.kind) {
            case Effect::Kind::Move: {
                if (loc_is_object(e.dest) &&
                    contains_or_equal(state, e.object, e.dest)) {
                    throw EngineError("MOVE would create a containment cycle at rule '" +
                                      rule.id + "'");
                }
                state.objects[e.object].parent = e.dest;
                break;
            }
            case Effect::Kind::SetAttr:
                state.set_attr(e.object, e.attr_bit, e.attr_value);
                break;
            case Effect::Kind::Print:
                prints.push_back(e.text);
                break;
            case Effect::Kind::Score:
                if (!state.fired_rules[rule_index]) {
                    out.reward += e.amount;
                    state.score += e.amount;
                }
                break;
            case Effect::Kind::Reveal:
                state.objects[e.object].revealed = true;
                break;
            case Effect::Kind::Destroy:
                state.objects[e.object].parent = kLocLimbo;
                break;
            case Effect::Kind::Win:
                state.done = true;
                state.reason = DoneReason::Win;
                break;
            case Effect::Kind::Die:
                state.done = true;
                state.reason = DoneReason::Die;
                break;
        }
    }
    if (rule.has_score_effect) state.fired_rules[rule_index] = 1;
    out.observation = prints.empty() ? "Done." : join(prints, "\n");
    out.done = state.done;
}

}  // namespace

bool object_visible(const WorldModel& world, const GameState& state, int object) {
    const int n = static_cast<int>(world.objects.size());
    const GameObject& decl = world.objects[object];
    if (decl.hidden && !state.objects[object].revealed) return false;
    if (decl.global) return true;
    int code = state.objects[object].parent;
    int hops = 0;
    while (loc_is_object(code)) {
        if (world.objects[code].hidden && !state.objects[code].revealed) return false;
        if (++hops > n) return false;
        code = state.objects[code].parent;
    }
    return code == kLocPlayer || (loc_is_room(code) && loc_room_index(code) == state.current_room);
}

std::optional<Direction> movement_command(const std::vector<std::string>& tokens) {
    if (tokens.size() == 1) return parse_direction(tokens[0]);
    if (tokens.size() == 2 && tokens[0] == "go") return parse_direction(tokens[1]);
    return std::nullopt;
}

std::optional<Command> parse_command(std::string_view text, const GameState& state,
                                     const WorldModel& world) {
    auto tokens = normalize_action_tokens(text);
    if (tokens.empty()) return std::nullopt;

    auto verb_it = world.verb_lookup.find(tokens[0]);
    if (verb_it == world.verb_lookup.end()) return std::nullopt;

    Command cmd;
    cmd.verb = verb_it->second;
    if (tokens.size() == 1) return cmd;

    // split the remainder at the first preposition
    std::vector<std::string> first, second;
    std::string prep;
    size_t i = 1;
    for (; i < tokens.size(); ++i) {
        if (is_preposition(tokens[i])) {
            prep = tokens[i];
            break;
        }
        first.push_back(tokens[i]);
    }
    for (++i; i < tokens.size(); ++i) second.push_back(tokens[i]);

    if (!first.empty()) {
        cmd.direct_object = resolve_noun(first, state, world);
        if (cmd.direct_object < 0) return std::nullopt;
    }
    if (!prep.empty()) {
        if (second.empty()) return std::nullopt;
        cmd.preposition = prep;
        cmd.indirect_object = resolve_noun(second, state, world);
        if (cmd.indirect_object < 0) return std::nullopt;
    }
    return cmd;
}

std::string room_observation(const WorldModel& world, int room_index) {
    const Room& r = world.rooms[room_index];
    return r.name + "\n" + r.description;
}

StepOutcome step(GameState& state, std::string_view action_text, const WorldModel& world) {
    if (state.done) throw ContractViolation("step() on a finished state");

    StepOutcome out;
    state.moves += 1;

    auto tokens = normalize_action_tokens(action_text);
    if (auto dir = movement_command(tokens)) {
        int target = world.rooms[state.current_room].exits[static_cast<int>(*dir)];
        if (target < 0) {
            out.observation = std::string(kNothingHappens);
            out.valid = false;
            return out;
        }
        state.current_room = target;
        out.observation = room_observation(world, target);
        return out;
    }

    auto cmd = parse_command(action_text, state, world);
    if (cmd) {
        for (size_t r = 0; r < world.rules.size(); ++r) {
            const Rule& rule = world.rules[r];
            if (rule.pattern.verb != cmd->verb) continue;
            if (rule.pattern.direct_object != cmd->direct_object) continue;
            if (rule.pattern.preposition != cmd->preposition) continue;
            if (rule.pattern.indirect_object != cmd->indirect_object) continue;

            // first matching rule decides the step
            if (conditions_hold(rule, state, world)) {
                apply_effects(rule, static_cast<int>(r), state, world, out);
                if (rule.annotation) out.annotations.push_back(*rule.annotation);
            } else {
                out.observation = "You can't do that.";
                if (rule.annotation) out.annotations.push_back(rule.annotation->attempt_form());
            }
            return out;
        }
    }

    out.observation = std::string(kNothingHappens);
    out.valid = false;
    return out;
}

}  // namespace scruple
