#pragma once

#include "scruple/state.hpp"
#include "scruple/world.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scruple {

// The one observation every unparsable or ineffective action produces.
// Agents' rejection loops key on it via StepOutcome::valid.
inline constexpr std::string_view kNothingHappens = "Nothing happens.";

struct StepOutcome {
    std::string observation;
    int reward = 0;
    std::vector<MoralAnnotation> annotations;
    bool done = false;
    bool valid = true;  // false iff the fixed invalid reply was produced
};

struct Command {
    std::string verb;        // canonical
    int direct_object = -1;  // resolved object index
    std::string preposition;
    int indirect_object = -1;
};

// Visibility: an object is in scope when it is GLOBAL, or its parent chain
// reaches the player or the current room; HIDDEN objects are out of scope
// until revealed, as is anything inside a hidden object.
bool object_visible(const WorldModel& world, const GameState& state, int object);

// Lowercases, strips articles, resolves the verb through synonyms and noun
// phrases against visible objects (inventory preferred over room contents,
// remaining ties by declaration order). nullopt = UNPARSED.
std::optional<Command> parse_command(std::string_view text, const GameState& state,
                                     const WorldModel& world);

// Movement test on the normalized token form: "go <dir>" or a bare direction.
std::optional<Direction> movement_command(const std::vector<std::string>& tokens);

// Executes one action. Deterministic; throws ContractViolation if state.done.
StepOutcome step(GameState& state, std::string_view action_text, const WorldModel& world);

std::string room_observation(const WorldModel& world, int room_index);

}  // namespace scruple
