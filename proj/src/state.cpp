#include "scruple/state.hpp"

#include "scruple/errors.hpp"
#include "scruple/text.hpp"

#include <sstream>

namespace scruple {

GameState initial_state(const WorldModel& world) {
    GameState s;
    s.current_room = 0;
    s.objects.resize(world.objects.size());
    for (size_t i = 0; i < world.objects.size(); ++i) {
        s.objects[i].parent = world.objects[i].initial_parent;
        s.objects[i].attrs = world.objects[i].initial_attrs;
        s.objects[i].revealed = false;
    }
    s.fired_rules.assign(world.rules.size(), 0);
    return s;
}

bool contains_or_equal(const GameState& state, int ancestor, int object) {
    int code = object;
    int hops = 0;
    const int n = static_cast<int>(state.objects.size());
    while (loc_is_object(code)) {
        if (code == ancestor) return true;
        if (++hops > n) return false;  // containment is a forest; bail on corrupt chains
        code = state.objects[code].parent;
    }
    return false;
}

ObjectTreeSnapshot object_tree_snapshot(const GameState& state, const WorldModel& world) {
    ObjectTreeSnapshot snap;
    snap.game_id = world.game_id;
    snap.current_room = world.rooms[state.current_room].id;
    snap.score = state.score;
    snap.moves = state.moves;
    snap.done = state.done;
    snap.reason = state.reason == DoneReason::Win   ? "WIN"
                  : state.reason == DoneReason::Die ? "DIE"
                                                    : "NONE";
    for (size_t r = 0; r < state.fired_rules.size(); ++r) {
        if (state.fired_rules[r]) snap.fired_rules.push_back(world.rules[r].id);
    }
    for (size_t i = 0; i < world.objects.size(); ++i) {
        ObjectTreeSnapshot::ObjectRecord rec;
        rec.id = world.objects[i].id;
        rec.parent = world.location_to_string(state.objects[i].parent);
        rec.revealed = state.objects[i].revealed;
        for (size_t b = 0; b < world.attr_names.size(); ++b) {
            if (state.attr(static_cast<int>(i), static_cast<int>(b)))
                rec.attrs.emplace_back(world.attr_names[b], true);
        }
        snap.objects.push_back(std::move(rec));
    }
    for (const auto& room : world.rooms) {
        for (int d = 0; d < kDirectionCount; ++d) {
            if (room.exits[d] >= 0) {
                snap.room_graph.push_back({room.id,
                                           std::string(direction_name(static_cast<Direction>(d))),
                                           world.rooms[room.exits[d]].id});
            }
        }
    }
    return snap;
}

GameState restore_snapshot(const ObjectTreeSnapshot& snap, const WorldModel& world) {
    GameState s = initial_state(world);
    int room = world.find_room(snap.current_room);
    if (room < 0) throw EngineError("snapshot references unknown room '" + snap.current_room + "'");
    s.current_room = room;
    s.score = snap.score;
    s.moves = snap.moves;
    s.done = snap.done;
    s.reason = snap.reason == "WIN"   ? DoneReason::Win
               : snap.reason == "DIE" ? DoneReason::Die
                                      : DoneReason::None;
    s.fired_rules.assign(world.rules.size(), 0);
    for (const auto& rid : snap.fired_rules) {
        bool found = false;
        for (size_t r = 0; r < world.rules.size(); ++r) {
            if (world.rules[r].id == rid) {
                s.fired_rules[r] = 1;
                found = true;
                break;
            }
        }
        if (!found) throw EngineError("snapshot references unknown rule '" + rid + "'");
    }
    for (const auto& rec : snap.objects) {
        int idx = world.find_object(rec.id);
        if (idx < 0) throw EngineError("snapshot references unknown object '" + rec.id + "'");
        int parent;
        if (rec.parent == "PLAYER") parent = kLocPlayer;
        else if (rec.parent == "LIMBO") parent = kLocLimbo;
        else {
            int r = world.find_room(rec.parent);
            if (r >= 0) parent = loc_room(r);
            else {
                int o = world.find_object(rec.parent);
                if (o < 0)
                    throw EngineError("snapshot references unknown location '" + rec.parent + "'");
                parent = o;
            }
        }
        s.objects[idx].parent = parent;
        s.objects[idx].revealed = rec.revealed;
        s.objects[idx].attrs = 0;
        for (const auto& [name, value] : rec.attrs) {
            int bit = world.find_attr(name);
            if (bit < 0) throw EngineError("snapshot references unknown attribute '" + name + "'");
            s.set_attr(idx, bit, value);
        }
    }
    return s;
}

std::string snapshot_to_text(const ObjectTreeSnapshot& snap) {
    std::ostringstream out;
    out << "SNAPSHOT " << snap.game_id << "\n";
    out << "AT " << snap.current_room << " SCORE " << snap.score << " MOVES " << snap.moves
        << " DONE " << (snap.done ? 1 : 0) << " REASON " << snap.reason << "\n";
    out << "FIRED";
    for (const auto& r : snap.fired_rules) out << ' ' << r;
    out << "\n";
    for (const auto& rec : snap.objects) {
        out << "OBJ " << rec.id << " PARENT " << rec.parent << " REVEALED "
            << (rec.revealed ? 1 : 0);
        if (!rec.attrs.empty()) {
            out << " ATTRS";
            for (const auto& [name, value] : rec.attrs) out << ' ' << name << '=' << (value ? 1 : 0);
        }
        out << "\n";
    }
    for (const auto& e : snap.room_graph) {
        out << "EDGE " << e.from << ' ' << e.dir << ' ' << e.to << "\n";
    }
    return out.str();
}

ObjectTreeSnapshot parse_snapshot_text(const std::string& text) {
    ObjectTreeSnapshot snap;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        // case-preserving whitespace split; ids are case-sensitive here
        std::vector<std::string> toks;
        std::istringstream ls(line);
        std::string w;
        while (ls >> w) toks.push_back(w);
        if (toks.empty()) continue;
        if (toks[0] == "SNAPSHOT" && toks.size() >= 2) {
            snap.game_id = toks[1];
        } else if (toks[0] == "AT" && toks.size() >= 10) {
            snap.current_room = toks[1];
            snap.score = std::stoi(toks[3]);
            snap.moves = std::stoi(toks[5]);
            snap.done = toks[7] == "1";
            snap.reason = toks[9];
        } else if (toks[0] == "FIRED") {
            for (size_t i = 1; i < toks.size(); ++i) snap.fired_rules.push_back(toks[i]);
        } else if (toks[0] == "OBJ" && toks.size() >= 6) {
            ObjectTreeSnapshot::ObjectRecord rec;
            rec.id = toks[1];
            rec.parent = toks[3];
            rec.revealed = toks[5] == "1";
            size_t i = 6;
            if (i < toks.size() && toks[i] == "ATTRS") {
                for (++i; i < toks.size(); ++i) {
                    auto eq = toks[i].find('=');
                    if (eq == std::string::npos) continue;
                    rec.attrs.emplace_back(toks[i].substr(0, eq), toks[i].substr(eq + 1) == "1");
                }
            }
            snap.objects.push_back(std::move(rec));
        } else if (toks[0] == "EDGE" && toks.size() >= 4) {
            snap.room_graph.push_back({toks[1], toks[2], toks[3]});
        }
    }
    return snap;
}

}  // namespace scruple
