#pragma once

#include "scruple/world.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace scruple {

enum class DoneReason { None, Win, Die };

// Mutable episode state. Plain value type: copying yields an independent
// clone in O(object count); no heap graph beyond the vectors.
struct GameState {
    struct ObjState {
        int parent = kLocLimbo;  // encoded location
        uint64_t attrs = 0;
        bool revealed = false;
        bool operator==(const ObjState&) const = default;
    };

    int current_room = 0;
    std::vector<ObjState> objects;      // indexed as WorldModel::objects
    std::vector<uint8_t> fired_rules;   // score rules that already paid out
    int score = 0;
    int moves = 0;
    bool done = false;
    DoneReason reason = DoneReason::None;

    bool attr(int object, int bit) const {
        return (objects[object].attrs >> bit) & 1;
    }
    void set_attr(int object, int bit, bool v) {
        if (v) objects[object].attrs |= uint64_t{1} << bit;
        else objects[object].attrs &= ~(uint64_t{1} << bit);
    }
    bool operator==(const GameState&) const = default;
};

GameState initial_state(const WorldModel& world);

// True when `ancestor` appears on the parent chain of `object` (or equals it).
bool contains_or_equal(const GameState& state, int ancestor, int object);

// Object snapshot plus the room graph: everything needed to reconstruct a
// state against the same world, and to export the world layout.
struct ObjectTreeSnapshot {
    struct ObjectRecord {
        std::string id;
        std::string parent;  // room/object id, PLAYER, or LIMBO
        std::vector<std::pair<std::string, bool>> attrs;
        bool revealed = false;
    };
    struct RoomEdge {
        std::string from;
        std::string dir;
        std::string to;
    };

    std::string game_id;
    std::string current_room;
    int score = 0;
    int moves = 0;
    bool done = false;
    std::string reason;
    std::vector<std::string> fired_rules;
    std::vector<ObjectRecord> objects;
    std::vector<RoomEdge> room_graph;
};

ObjectTreeSnapshot object_tree_snapshot(const GameState& state, const WorldModel& world);
GameState restore_snapshot(const ObjectTreeSnapshot& snap, const WorldModel& world);

// One record per object, plus header/graph sections; round-trips through
// parse_snapshot_text.
std::string snapshot_to_text(const ObjectTreeSnapshot& snap);
ObjectTreeSnapshot parse_snapshot_text(const std::string& text);

}  // namespace scruple
