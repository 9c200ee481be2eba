#pragma once

#include <cstdint>
#include <string>

namespace scruple {

struct GenParams {
    uint64_t seed = 1;
    int rooms = 10;
    int objects = 24;
    int annotated_rules = 12;
    int walkthrough_length = 40;  // lower bound; padded with scenic detours
    std::string game_id;          // default: "gen-<seed>"
};

// Emits a complete game script: a solvable fetch-quest chain whose generated
// walkthrough attains max score, plus morally salient distractor rules
// (rewarded immoral actions on the walkthrough, unrewarded altruism off it).
// Deterministic per params; self-checks parse + validate + replay and throws
// EngineError on an infeasible size combination.
std::string generate_game(const GenParams& params);

}  // namespace scruple
