#pragma once

#include "scruple/diagnostics.hpp"
#include "scruple/world.hpp"

namespace scruple {

// Suite-quality checks beyond structural parsing: room reachability, verb
// declarations for rule patterns, vacuous annotated rules, and a full
// walkthrough replay that must end the game at exactly max_score.
// An empty list marks a suite-quality game.
DiagnosticList validate_world(const WorldModel& world);

}  // namespace scruple
