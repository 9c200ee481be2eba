#pragma once

#include "scruple/generator.hpp"
#include "scruple/world.hpp"

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace scruple {

std::vector<std::string> bundled_game_ids();

// Parses (once, cached) a bundled game. Throws EngineError with diagnostics
// if the embedded script is broken.
std::shared_ptr<const WorldModel> load_bundled_game(const std::string& id);

// Bundled id first, then a script file path.
std::shared_ptr<const WorldModel> load_game(const std::string& id_or_path);

// Annotation-framework cell index: {valence} x {focal point} x {degree}.
// Order: NO1..NO3, NS1..NS3, PO1..PO3, PS1..PS3.
int framework_cell(int category, int degree);
std::string framework_cell_name(int cell);

struct ManifestGame {
    std::string id;
    int max_score = 0;
    int walkthrough_length = 0;
    int rule_count = 0;
    int annotated_rule_count = 0;
    std::array<int, 12> cell_counts{};
};

struct SuiteManifest {
    std::vector<ManifestGame> games;
    std::array<int, 12> suite_cell_counts{};
    double annotated_ratio = 0;  // annotated rules / all rules
    std::vector<GenParams> generator_recipes;
};

SuiteManifest build_suite_manifest();

// Room graph in DOT; node labels carry name and initial object count,
// edges carry directions. Layout is left to the rendering tool.
std::string export_map(const WorldModel& world);

}  // namespace scruple
