#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace scruple {

inline constexpr int kDirectionCount = 6;

enum class Direction { North, South, East, West, Up, Down };

std::string_view direction_name(Direction d);
std::string_view direction_token(Direction d);  // lowercase command word
std::optional<Direction> parse_direction(std::string_view word);

// Annotation categories, in vector order.
enum AnnotationCategory {
    kNegativeToOthers = 0,
    kNegativeToSelf = 1,
    kPositiveToOthers = 2,
    kPositiveToSelf = 3,
};

// One moral judgement: per-category ordinal degree 0-3, at least one nonzero.
// `attempt` is set on emitted copies when the rule matched but its
// preconditions failed; degrees are then already reduced (d -> max(1, d-1)).
struct MoralAnnotation {
    std::array<int, 4> degrees{0, 0, 0, 0};
    std::string description;
    std::string source_rule;
    bool attempt = false;

    bool any_nonzero() const {
        return degrees[0] || degrees[1] || degrees[2] || degrees[3];
    }
    MoralAnnotation attempt_form() const;
};

struct Room {
    std::string id;
    std::string name;
    std::string description;
    std::array<int, kDirectionCount> exits;  // room index, -1 = no exit

    Room() { exits.fill(-1); }
};

struct GameObject {
    std::string id;
    std::string name;                   // display name, e.g. "brass key"
    std::vector<std::string> synonyms;  // single lowercase words
    int initial_parent = 0;             // encoded location, see location codes below
    bool takeable = false;
    bool container = false;
    bool hidden = false;
    bool global = false;
    uint64_t initial_attrs = 0;

    // The noun used when instantiating action templates.
    const std::string& primary_noun() const { return synonyms.front(); }
};

// Location encoding shared by GameObject/GameState: objects and rooms are
// indexed; PLAYER and LIMBO are sentinels. Packed into one int so that
// per-object state stays trivially copyable.
inline constexpr int kLocPlayer = -1;
inline constexpr int kLocLimbo = -2;
constexpr int loc_room(int room_index) { return -3 - room_index; }
constexpr bool loc_is_room(int code) { return code <= -3; }
constexpr int loc_room_index(int code) { return -3 - code; }
constexpr bool loc_is_object(int code) { return code >= 0; }

struct Condition {
    enum class Kind { At, Has, Here, Attr };
    Kind kind;
    int target = -1;      // room index for At, object index otherwise
    int attr_bit = -1;    // Attr only
    bool attr_value = false;
};

struct Effect {
    enum class Kind { Move, SetAttr, Print, Score, Reveal, Destroy, Win, Die };
    Kind kind;
    int object = -1;      // Move/SetAttr/Reveal/Destroy
    int dest = 0;         // Move: encoded location
    int attr_bit = -1;    // SetAttr
    bool attr_value = false;
    int amount = 0;       // Score
    std::string text;     // Print
};

struct RulePattern {
    std::string verb;        // canonical verb word
    int direct_object = -1;  // object index, -1 = absent
    std::string preposition; // empty = absent
    int indirect_object = -1;
};

struct Rule {
    std::string id;
    RulePattern pattern;
    std::vector<Condition> preconditions;
    std::vector<Effect> effects;
    std::optional<MoralAnnotation> annotation;
    bool has_score_effect = false;
};

struct Verb {
    std::string word;                   // canonical
    std::vector<std::string> synonyms;  // aliases, not including `word`
};

// Immutable compiled game. Built by parse_script; safe to share across
// threads once constructed.
struct WorldModel {
    std::string game_id;
    int max_score = 0;
    std::vector<Room> rooms;          // declaration order; rooms[0] is the start
    std::vector<GameObject> objects;  // declaration order
    std::vector<Verb> verbs;          // declaration order
    std::vector<Rule> rules;          // declaration order; first match wins
    std::vector<std::string> walkthrough;
    std::vector<std::string> attr_names;  // global attribute-name table (bit index)

    std::unordered_map<std::string, int> room_index;
    std::unordered_map<std::string, int> object_index;
    std::unordered_map<std::string, std::string> verb_lookup;  // word/synonym -> canonical

    int find_room(std::string_view id) const;
    int find_object(std::string_view id) const;
    int find_attr(std::string_view name) const;
    std::string location_to_string(int code) const;
};

}  // namespace scruple
