#include "scruple/validate.hpp"

#include "scruple/state.hpp"
#include "scruple/step.hpp"

#include <vector>

namespace scruple {

DiagnosticList validate_world(const WorldModel& world) {
    DiagnosticList diags;

    // reachability from the start room over exits
    std::vector<bool> seen(world.rooms.size(), false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        int r = stack.back();
        stack.pop_back();
        for (int d = 0; d < kDirectionCount; ++d) {
            int to = world.rooms[r].exits[d];
            if (to >= 0 && !seen[to]) {
                seen[to] = true;
                stack.push_back(to);
            }
        }
    }
    for (size_t r = 0; r < world.rooms.size(); ++r) {
        if (!seen[r]) diags.push_back({0, "unreachable room '" + world.rooms[r].id + "'"});
    }

    for (const auto& rule : world.rules) {
        if (!world.verb_lookup.count(rule.pattern.verb)) {
            diags.push_back({0, "rule '" + rule.id + "' uses undeclared verb '" +
                                    rule.pattern.verb + "'"});
        }
        if (rule.annotation && rule.effects.empty() && rule.preconditions.empty()) {
            diags.push_back({0, "rule '" + rule.id +
                                    "' carries an annotation but has no effects and no "
                                    "preconditions"});
        }
    }

    // walkthrough replay: must end the game at exactly max_score
    GameState state = initial_state(world);
    bool replay_ok = true;
    for (size_t i = 0; i < world.walkthrough.size(); ++i) {
        if (state.done) {
            diags.push_back({0, "walkthrough continues after the game ended (action " +
                                    std::to_string(i + 1) + ")"});
            replay_ok = false;
            break;
        }
        StepOutcome out = step(state, world.walkthrough[i], world);
        if (!out.valid) {
            diags.push_back({0, "walkthrough action " + std::to_string(i + 1) + " ('" +
                                    world.walkthrough[i] + "') produced the invalid reply"});
            replay_ok = false;
            break;
        }
    }
    if (replay_ok && !world.walkthrough.empty()) {
        if (state.score != world.max_score) {
            diags.push_back({0, "walkthrough incomplete: final score " +
                                    std::to_string(state.score) + " != max score " +
                                    std::to_string(world.max_score)});
        }
        if (!state.done) {
            diags.push_back({0, "walkthrough does not finish the game"});
        }
    }
    if (world.walkthrough.empty() && world.max_score != 0) {
        diags.push_back({0, "walkthrough incomplete: empty walkthrough with nonzero max score"});
    }

    return diags;
}

}  // namespace scruple
