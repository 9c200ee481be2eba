#include "scruple/world.hpp"

#include "scruple/diagnostics.hpp"

#include <algorithm>

namespace scruple {

namespace {
constexpr std::string_view kDirNames[kDirectionCount] = {"NORTH", "SOUTH", "EAST",
                                                         "WEST",  "UP",    "DOWN"};
constexpr std::string_view kDirTokens[kDirectionCount] = {"north", "south", "east",
                                                          "west",  "up",    "down"};
constexpr std::string_view kDirAbbrev[kDirectionCount] = {"n", "s", "e", "w", "u", "d"};
}  // namespace

std::string_view direction_name(Direction d) { return kDirNames[static_cast<int>(d)]; }
std::string_view direction_token(Direction d) { return kDirTokens[static_cast<int>(d)]; }

std::optional<Direction> parse_direction(std::string_view word) {
    for (int i = 0; i < kDirectionCount; ++i) {
        if (word == kDirTokens[i] || word == kDirAbbrev[i]) {
            return static_cast<Direction>(i);
        }
    }
    return std::nullopt;
}

MoralAnnotation MoralAnnotation::attempt_form() const {
    MoralAnnotation out = *this;
    out.attempt = true;
    for (int& d : out.degrees) {
        if (d > 0) d = std::max(1, d - 1);
    }
    return out;
}

int WorldModel::find_room(std::string_view id) const {
    auto it = room_index.find(std::string(id));
    return it == room_index.end() ? -1 : it->second;
}

int WorldModel::find_object(std::string_view id) const {
    auto it = object_index.find(std::string(id));
    return it == object_index.end() ? -1 : it->second;
}

int WorldModel::find_attr(std::string_view name) const {
    for (size_t i = 0; i < attr_names.size(); ++i) {
        if (attr_names[i] == name) return static_cast<int>(i);
    }
    return -1;
}

std::string WorldModel::location_to_string(int code) const {
    if (code == kLocPlayer) return "PLAYER";
    if (code == kLocLimbo) return "LIMBO";
    if (loc_is_room(code)) return rooms[loc_room_index(code)].id;
    return objects[code].id;
}

std::string format_diagnostics(const DiagnosticList& diags) {
    std::string out;
    for (const auto& d : diags) {
        if (d.line > 0) {
            out += "line " + std::to_string(d.line) + ": ";
        }
        out += d.message;
        out += '\n';
    }
    return out;
}

}  // namespace scruple
