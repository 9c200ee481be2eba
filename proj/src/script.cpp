#include "scruple/script.hpp"

#include "scruple/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace scruple {

namespace {

// Splits a directive line into tokens; double-quoted spans become single
// tokens with the quotes stripped. No escape sequences.
bool split_line(const std::string& line, std::vector<std::string>& out, std::string& err) {
    out.clear();
    size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '"') {
            size_t end = line.find('"', i + 1);
            if (end == std::string::npos) {
                err = "unterminated quoted string";
                return false;
            }
            out.push_back(line.substr(i + 1, end - i - 1));
            i = end + 1;
        } else {
            size_t end = i;
            while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end])) &&
                   line[end] != '"') {
                ++end;
            }
            out.push_back(line.substr(i, end - i));
            i = end;
        }
    }
    return true;
}

struct RawExit {
    int line;
    std::string from, dir, to;
};

struct RawCondition {
    int line;
    std::vector<std::string> tokens;  // after REQUIRE
};

struct RawEffect {
    int line;
    std::vector<std::string> tokens;  // after DO
};

struct RawRule {
    int line;
    std::string id;
    std::string pattern;
    std::vector<RawCondition> conditions;
    std::vector<RawEffect> effects;
    std::optional<MoralAnnotation> annotation;
    int annotation_line = 0;
};

struct RawObject {
    int line;
    int index;
    std::string loc;
};

class Parser {
public:
    ParseResult run(std::string_view source) {
        std::istringstream in{std::string(source)};
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            handle_line(line, line_no);
        }
        finish();
        ParseResult result;
        result.diagnostics = std::move(diags_);
        if (result.diagnostics.empty()) result.world = std::move(world_);
        return result;
    }

private:
    enum class Section { Body, Walkthrough, Ended };

    void error(int line, std::string msg) { diags_.push_back({line, std::move(msg)}); }

    void handle_line(const std::string& line, int line_no) {
        // comments and blanks are fine everywhere, including the walkthrough;
        // a '#' inside a quoted string is literal text
        size_t hash = std::string::npos;
        bool in_quote = false;
        for (size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_quote = !in_quote;
            else if (line[i] == '#' && !in_quote) {
                hash = i;
                break;
            }
        }
        std::string body = hash == std::string::npos ? line : line.substr(0, hash);
        bool blank = std::all_of(body.begin(), body.end(), [](unsigned char c) {
            return std::isspace(c);
        });
        if (blank) return;

        if (section_ == Section::Ended) {
            error(line_no, "content after END");
            return;
        }
        if (section_ == Section::Walkthrough) {
            std::vector<std::string> toks;
            std::string err;
            if (split_line(body, toks, err) && toks.size() == 1 && toks[0] == "END") {
                section_ = Section::Ended;
                saw_end_ = true;
                return;
            }
            // one action per line, free text
            std::string action = body;
            // trim
            while (!action.empty() && std::isspace(static_cast<unsigned char>(action.front())))
                action.erase(action.begin());
            while (!action.empty() && std::isspace(static_cast<unsigned char>(action.back())))
                action.pop_back();
            world_.walkthrough.push_back(action);
            return;
        }

        std::vector<std::string> toks;
        std::string err;
        if (!split_line(body, toks, err)) {
            error(line_no, err);
            return;
        }
        if (toks.empty()) return;
        const std::string& head = toks[0];

        if (head == "GAME") {
            if (toks.size() != 2) return error(line_no, "GAME expects one id");
            world_.game_id = toks[1];
        } else if (head == "MAXSCORE") {
            if (toks.size() != 2) return error(line_no, "MAXSCORE expects one integer");
            if (!parse_int(toks[1], world_.max_score))
                return error(line_no, "bad integer '" + toks[1] + "'");
        } else if (head == "ROOM") {
            handle_room(toks, line_no);
        } else if (head == "EXIT") {
            if (toks.size() != 4) return error(line_no, "EXIT expects <room> <DIR> <room>");
            raw_exits_.push_back({line_no, toks[1], toks[2], toks[3]});
            context_ = Context::None;
        } else if (head == "OBJECT") {
            handle_object(toks, line_no);
        } else if (head == "FLAGS") {
            handle_flags(toks, line_no);
        } else if (head == "SYNONYMS") {
            handle_synonyms(toks, line_no);
        } else if (head == "VERB") {
            handle_verb(toks, line_no);
        } else if (head == "RULE") {
            handle_rule(toks, line_no);
        } else if (head == "REQUIRE") {
            if (context_ != Context::Rule) return error(line_no, "REQUIRE outside RULE");
            raw_rules_.back().conditions.push_back(
                {line_no, std::vector<std::string>(toks.begin() + 1, toks.end())});
        } else if (head == "DO") {
            if (context_ != Context::Rule) return error(line_no, "DO outside RULE");
            raw_rules_.back().effects.push_back(
                {line_no, std::vector<std::string>(toks.begin() + 1, toks.end())});
        } else if (head == "ANNOTATE") {
            handle_annotate(toks, line_no);
        } else if (head == "WALKTHROUGH") {
            section_ = Section::Walkthrough;
            saw_walkthrough_ = true;
            context_ = Context::None;
        } else if (head == "END") {
            section_ = Section::Ended;
            saw_end_ = true;
        } else {
            error(line_no, "unknown directive '" + head + "'");
        }
    }

    void handle_room(const std::vector<std::string>& toks, int line_no) {
        context_ = Context::None;
        if (toks.size() != 4) return error(line_no, "ROOM expects <id> \"<name>\" \"<desc>\"");
        if (world_.room_index.count(toks[1]))
            return error(line_no, "duplicate room id '" + toks[1] + "'");
        if (toks[3].empty()) error(line_no, "room '" + toks[1] + "' has empty description");
        Room r;
        r.id = toks[1];
        r.name = toks[2];
        r.description = toks[3];
        world_.room_index[r.id] = static_cast<int>(world_.rooms.size());
        world_.rooms.push_back(std::move(r));
    }

    void handle_object(const std::vector<std::string>& toks, int line_no) {
        if (toks.size() != 5 || toks[3] != "LOC")
            return error(line_no, "OBJECT expects <id> \"<name>\" LOC <loc>");
        if (world_.object_index.count(toks[1]))
            return error(line_no, "duplicate object id '" + toks[1] + "'");
        GameObject o;
        o.id = toks[1];
        o.name = toks[2];
        int index = static_cast<int>(world_.objects.size());
        world_.object_index[o.id] = index;
        world_.objects.push_back(std::move(o));
        raw_objects_.push_back({line_no, index, toks[4]});
        context_ = Context::Object;
    }

    void handle_flags(const std::vector<std::string>& toks, int line_no) {
        if (context_ != Context::Object) return error(line_no, "FLAGS outside OBJECT");
        GameObject& o = world_.objects.back();
        for (size_t i = 1; i < toks.size(); ++i) {
            const std::string& f = toks[i];
            if (f == "TAKEABLE") o.takeable = true;
            else if (f == "CONTAINER") o.container = true;
            else if (f == "HIDDEN") o.hidden = true;
            else if (f == "GLOBAL") o.global = true;
            else error(line_no, "unknown flag '" + f + "'");
        }
    }

    void handle_synonyms(const std::vector<std::string>& toks, int line_no) {
        if (context_ != Context::Object) return error(line_no, "SYNONYMS outside OBJECT");
        GameObject& o = world_.objects.back();
        for (size_t i = 1; i < toks.size(); ++i) o.synonyms.push_back(to_lower(toks[i]));
    }

    void handle_verb(const std::vector<std::string>& toks, int line_no) {
        context_ = Context::None;
        if (toks.size() < 2) return error(line_no, "VERB expects a word");
        Verb v;
        v.word = to_lower(toks[1]);
        if (world_.verb_lookup.count(v.word))
            return error(line_no, "duplicate verb '" + v.word + "'");
        world_.verb_lookup[v.word] = v.word;
        for (size_t i = 2; i < toks.size(); ++i) {
            std::string syn = to_lower(toks[i]);
            if (world_.verb_lookup.count(syn)) {
                error(line_no, "duplicate verb '" + syn + "'");
                continue;
            }
            world_.verb_lookup[syn] = v.word;
            v.synonyms.push_back(std::move(syn));
        }
        world_.verbs.push_back(std::move(v));
    }

    void handle_rule(const std::vector<std::string>& toks, int line_no) {
        if (toks.size() != 4 || toks[2] != "ON")
            return error(line_no, "RULE expects <id> ON \"<pattern>\"");
        for (const auto& r : raw_rules_) {
            if (r.id == toks[1]) {
                error(line_no, "duplicate rule id '" + toks[1] + "'");
                return;
            }
        }
        RawRule r;
        r.line = line_no;
        r.id = toks[1];
        r.pattern = toks[3];
        raw_rules_.push_back(std::move(r));
        context_ = Context::Rule;
    }

    void handle_annotate(const std::vector<std::string>& toks, int line_no) {
        if (context_ != Context::Rule) return error(line_no, "ANNOTATE outside RULE");
        RawRule& r = raw_rules_.back();
        if (r.annotation) return error(line_no, "duplicate ANNOTATE for rule '" + r.id + "'");
        if (toks.size() != 6) return error(line_no, "ANNOTATE expects 4 degrees and a description");
        MoralAnnotation a;
        bool ok = true;
        for (int i = 0; i < 4; ++i) {
            int v = 0;
            if (!parse_int(toks[1 + i], v)) {
                error(line_no, "bad integer '" + toks[1 + i] + "'");
                ok = false;
                continue;
            }
            if (v < 0 || v > 3) {
                error(line_no, "degree out of range 0-3: " + toks[1 + i]);
                ok = false;
            }
            a.degrees[i] = v;
        }
        if (ok && !a.any_nonzero()) {
            error(line_no, "annotation must have at least one nonzero degree");
            ok = false;
        }
        a.description = toks[5];
        a.source_rule = r.id;
        if (ok) {
            r.annotation = std::move(a);
            r.annotation_line = line_no;
        }
    }

    static bool parse_int(const std::string& s, int& out) {
        if (s.empty()) return false;
        size_t pos = 0;
        try {
            out = std::stoi(s, &pos);
        } catch (...) {
            return false;
        }
        return pos == s.size();
    }

    int attr_bit(const std::string& name, int line_no) {
        int idx = world_.find_attr(name);
        if (idx >= 0) return idx;
        if (world_.attr_names.size() >= 64) {
            error(line_no, "too many distinct attribute names (max 64)");
            return -1;
        }
        world_.attr_names.push_back(name);
        return static_cast<int>(world_.attr_names.size() - 1);
    }

    int resolve_location(const std::string& s, int line_no) {
        if (s == "PLAYER") return kLocPlayer;
        if (s == "LIMBO") return kLocLimbo;
        int room = world_.find_room(s);
        if (room >= 0) return loc_room(room);
        int obj = world_.find_object(s);
        if (obj >= 0) return obj;
        error(line_no, "unknown location '" + s + "'");
        return kLocLimbo;
    }

    int resolve_room(const std::string& s, int line_no) {
        int room = world_.find_room(s);
        if (room < 0) error(line_no, "unknown room '" + s + "'");
        return room;
    }

    int resolve_object(const std::string& s, int line_no) {
        int obj = world_.find_object(s);
        if (obj < 0) error(line_no, "unknown object '" + s + "'");
        return obj;
    }

    void finish() {
        if (!saw_walkthrough_) diags_.push_back({0, "missing WALKTHROUGH section"});
        else if (!saw_end_) diags_.push_back({0, "missing END after WALKTHROUGH"});
        if (world_.game_id.empty()) diags_.push_back({0, "missing GAME directive"});
        if (world_.rooms.empty()) diags_.push_back({0, "no rooms declared"});

        for (const auto& e : raw_exits_) {
            int from = resolve_room(e.from, e.line);
            int to = resolve_room(e.to, e.line);
            Direction dir;
            bool dir_ok = false;
            for (int i = 0; i < kDirectionCount; ++i) {
                if (e.dir == direction_name(static_cast<Direction>(i))) {
                    dir = static_cast<Direction>(i);
                    dir_ok = true;
                }
            }
            if (!dir_ok) {
                error(e.line, "unknown direction '" + e.dir + "'");
                continue;
            }
            if (from < 0 || to < 0) continue;
            int& slot = world_.rooms[from].exits[static_cast<int>(dir)];
            if (slot >= 0) error(e.line, "duplicate exit " + e.dir + " from '" + e.from + "'");
            slot = to;
        }

        for (const auto& ro : raw_objects_) {
            GameObject& o = world_.objects[ro.index];
            o.initial_parent = resolve_location(ro.loc, ro.line);
            // the display name itself always resolves; keep its last word as
            // an implicit one-word synonym
            auto words = tokenize(o.name);
            if (!words.empty()) {
                const std::string& last = words.back();
                if (std::find(o.synonyms.begin(), o.synonyms.end(), last) == o.synonyms.end())
                    o.synonyms.push_back(last);
            }
            if (o.synonyms.empty()) error(ro.line, "object '" + o.id + "' has no usable noun");
        }
        check_initial_containment();

        for (auto& rr : raw_rules_) compile_rule(rr);
    }

    void check_initial_containment() {
        // the containment relation must be a forest: walking parents from any
        // object terminates at a room, PLAYER, or LIMBO
        const int n = static_cast<int>(world_.objects.size());
        for (int i = 0; i < n; ++i) {
            int code = world_.objects[i].initial_parent;
            int hops = 0;
            while (loc_is_object(code)) {
                if (++hops > n) {
                    diags_.push_back({0, "containment cycle involving object '" +
                                             world_.objects[i].id + "'"});
                    break;
                }
                code = world_.objects[code].initial_parent;
            }
        }
    }

    void compile_rule(RawRule& rr) {
        Rule rule;
        rule.id = rr.id;
        rule.annotation = std::move(rr.annotation);

        auto pat = tokenize(rr.pattern);
        if (pat.empty() || pat.size() == 3 || pat.size() > 4) {
            error(rr.line, "malformed rule pattern '" + rr.pattern + "'");
            return;
        }
        rule.pattern.verb = pat[0];
        if (pat.size() >= 2) rule.pattern.direct_object = resolve_object(pat[1], rr.line);
        if (pat.size() == 4) {
            rule.pattern.preposition = pat[2];
            rule.pattern.indirect_object = resolve_object(pat[3], rr.line);
        }

        for (const auto& rc : rr.conditions) {
            const auto& t = rc.tokens;
            Condition c;
            if (t.size() == 2 && t[0] == "AT") {
                c.kind = Condition::Kind::At;
                c.target = resolve_room(t[1], rc.line);
            } else if (t.size() == 2 && (t[0] == "HAS" || t[0] == "HERE")) {
                c.kind = t[0] == "HAS" ? Condition::Kind::Has : Condition::Kind::Here;
                c.target = resolve_object(t[1], rc.line);
            } else if (t.size() == 4 && t[0] == "ATTR") {
                c.kind = Condition::Kind::Attr;
                c.target = resolve_object(t[1], rc.line);
                c.attr_bit = attr_bit(t[2], rc.line);
                int v = 0;
                if (!parse_int(t[3], v) || (v != 0 && v != 1)) {
                    error(rc.line, "ATTR value must be 0 or 1");
                    continue;
                }
                c.attr_value = v == 1;
            } else {
                error(rc.line, "malformed REQUIRE clause");
                continue;
            }
            rule.preconditions.push_back(c);
        }

        for (const auto& re : rr.effects) {
            const auto& t = re.tokens;
            Effect e;
            if (t.size() == 3 && t[0] == "MOVE") {
                e.kind = Effect::Kind::Move;
                e.object = resolve_object(t[1], re.line);
                e.dest = resolve_location(t[2], re.line);
            } else if (t.size() == 4 && t[0] == "SETATTR") {
                e.kind = Effect::Kind::SetAttr;
                e.object = resolve_object(t[1], re.line);
                e.attr_bit = attr_bit(t[2], re.line);
                int v = 0;
                if (!parse_int(t[3], v) || (v != 0 && v != 1)) {
                    error(re.line, "SETATTR value must be 0 or 1");
                    continue;
                }
                e.attr_value = v == 1;
            } else if (t.size() == 2 && t[0] == "PRINT") {
                e.kind = Effect::Kind::Print;
                e.text = t[1];
            } else if (t.size() == 2 && t[0] == "SCORE") {
                e.kind = Effect::Kind::Score;
                if (!parse_int(t[1], e.amount)) {
                    error(re.line, "bad integer '" + t[1] + "'");
                    continue;
                }
                rule.has_score_effect = true;
            } else if (t.size() == 2 && (t[0] == "REVEAL" || t[0] == "DESTROY")) {
                e.kind = t[0] == "REVEAL" ? Effect::Kind::Reveal : Effect::Kind::Destroy;
                e.object = resolve_object(t[1], re.line);
            } else if (t.size() == 1 && t[0] == "WIN") {
                e.kind = Effect::Kind::Win;
            } else if (t.size() == 1 && t[0] == "DIE") {
                e.kind = Effect::Kind::Die;
            } else {
                error(re.line, "malformed DO clause");
                continue;
            }
            rule.effects.push_back(std::move(e));
        }

        world_.rules.push_back(std::move(rule));
    }

    enum class Context { None, Object, Rule };

    WorldModel world_;
    DiagnosticList diags_;
    Section section_ = Section::Body;
    Context context_ = Context::None;
    bool saw_walkthrough_ = false;
    bool saw_end_ = false;
    std::vector<RawExit> raw_exits_;
    std::vector<RawObject> raw_objects_;
    std::vector<RawRule> raw_rules_;
};

}  // namespace

ParseResult parse_script(std::string_view source) {
    Parser p;
    return p.run(source);
}

ParseResult parse_script_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ParseResult r;
        r.diagnostics.push_back({0, "cannot open '" + path + "'"});
        return r;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_script(ss.str());
}

}  // namespace scruple
