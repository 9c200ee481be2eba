#include "scruple/suite.hpp"

#include "scruple/errors.hpp"
#include "scruple/script.hpp"
#include "scruple/state.hpp"

#include <map>
#include <mutex>
#include <sstream>

namespace scruple {

namespace {

struct EmbeddedGame {
    const char* name;
    const char* script;
};

#include "games_embedded.inc"

std::mutex g_cache_mutex;
std::map<std::string, std::shared_ptr<const WorldModel>> g_cache;

}  // namespace

std::vector<std::string> bundled_game_ids() {
    std::vector<std::string> ids;
    for (const auto& g : kEmbeddedGames) ids.push_back(g.name);
    return ids;
}

std::shared_ptr<const WorldModel> load_bundled_game(const std::string& id) {
    {
        std::lock_guard<std::mutex> lock(g_cache_mutex);
        auto it = g_cache.find(id);
        if (it != g_cache.end()) return it->second;
    }
    for (const auto& g : kEmbeddedGames) {
        if (id == g.name) {
            ParseResult r = parse_script(g.script);
            if (!r.ok())
                throw EngineError("bundled game '" + id + "' failed to parse:\n" +
                                  format_diagnostics(r.diagnostics));
            auto world = std::make_shared<const WorldModel>(std::move(*r.world));
            std::lock_guard<std::mutex> lock(g_cache_mutex);
            g_cache[id] = world;
            return world;
        }
    }
    throw EngineError("unknown game '" + id + "'");
}

std::shared_ptr<const WorldModel> load_game(const std::string& id_or_path) {
    for (const auto& g : kEmbeddedGames) {
        if (id_or_path == g.name) return load_bundled_game(id_or_path);
    }
    ParseResult r = parse_script_file(id_or_path);
    if (!r.ok())
        throw EngineError("cannot load '" + id_or_path + "':\n" +
                          format_diagnostics(r.diagnostics));
    return std::make_shared<const WorldModel>(std::move(*r.world));
}

int framework_cell(int category, int degree) {
    return category * 3 + (degree - 1);
}

std::string framework_cell_name(int cell) {
    static const char* names[12] = {
        "negative-others-1", "negative-others-2", "negative-others-3",
        "negative-self-1",   "negative-self-2",   "negative-self-3",
        "positive-others-1", "positive-others-2", "positive-others-3",
        "positive-self-1",   "positive-self-2",   "positive-self-3",
    };
    return names[cell];
}

SuiteManifest build_suite_manifest() {
    SuiteManifest manifest;
    int total_rules = 0, total_annotated = 0;
    for (const auto& id : bundled_game_ids()) {
        auto world = load_bundled_game(id);
        ManifestGame g;
        g.id = id;
        g.max_score = world->max_score;
        g.walkthrough_length = static_cast<int>(world->walkthrough.size());
        g.rule_count = static_cast<int>(world->rules.size());
        for (const auto& rule : world->rules) {
            if (!rule.annotation) continue;
            g.annotated_rule_count += 1;
            for (int c = 0; c < 4; ++c) {
                int d = rule.annotation->degrees[c];
                if (d > 0) {
                    g.cell_counts[framework_cell(c, d)] += 1;
                    manifest.suite_cell_counts[framework_cell(c, d)] += 1;
                }
            }
        }
        total_rules += g.rule_count;
        total_annotated += g.annotated_rule_count;
        manifest.games.push_back(std::move(g));
    }
    manifest.annotated_ratio =
        total_rules > 0 ? static_cast<double>(total_annotated) / total_rules : 0.0;
    // held-out recipes for zero-shot checks
    manifest.generator_recipes = {
        {101, 9, 26, 12, 36, "gen-101"},
        {202, 11, 30, 14, 48, "gen-202"},
        {303, 12, 32, 16, 56, "gen-303"},
    };
    return manifest;
}

std::string export_map(const WorldModel& world) {
    GameState init = initial_state(world);
    std::ostringstream out;
    out << "digraph \"" << world.game_id << "\" {\n";
    out << "  node [shape=box];\n";
    for (size_t r = 0; r < world.rooms.size(); ++r) {
        int count = 0;
        for (const auto& obj : init.objects) {
            if (loc_is_room(obj.parent) && loc_room_index(obj.parent) == static_cast<int>(r))
                ++count;
        }
        out << "  \"" << world.rooms[r].id << "\" [label=\"" << world.rooms[r].name
            << "\\nobjects: " << count << "\"];\n";
    }
    for (const auto& room : world.rooms) {
        for (int d = 0; d < kDirectionCount; ++d) {
            if (room.exits[d] >= 0) {
                out << "  \"" << room.id << "\" -> \"" << world.rooms[room.exits[d]].id
                    << "\" [label=\"" << direction_name(static_cast<Direction>(d)) << "\"];\n";
            }
        }
    }
    out << "}\n";
    return out.str();
}

}  // namespace scruple
