#include "scruple/env.hpp"
#include "scruple/errors.hpp"
#include "scruple/metrics.hpp"
#include "scruple/rng.hpp"
#include "scruple/script.hpp"
#include "scruple/suite.hpp"
#include "scruple/text.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace scruple;

namespace {

EnvConfig config_for(const std::string& game, int k, int limit = 100) {
    EnvConfig c;
    c.game_id = game;
    c.starting_percentage = k;
    c.step_limit = limit;
    return c;
}

// independent prefix-replay oracle for s_k
int replay_prefix_score(const WorldModel& world, int k) {
    GameState state = initial_state(world);
    size_t prefix = world.walkthrough.size() * static_cast<size_t>(k) / 100;
    for (size_t i = 0; i < prefix; ++i) step(state, world.walkthrough[i], world);
    return state.score;
}

}  // namespace

TEST_CASE("reset semantics across starting percentages") {
    auto world = load_bundled_game("manor-heist");

    SUBCASE("k=0 applies nothing and opens with the first room") {
        Episode env(world, config_for("manor-heist", 0));
        CHECK(env.s_k() == 0);
        CHECK(env.observation() ==
              world->rooms[0].name + "\n" + world->rooms[0].description);
        CHECK(env.steps_taken() == 0);
    }

    SUBCASE("floor arithmetic on the prefix length") {
        // 35-step walkthrough: k=80 applies floor(0.8*35) = 28 actions
        REQUIRE(world->walkthrough.size() == 35);
        Episode env(world, config_for("manor-heist", 80));
        CHECK(env.state().moves == 28);
    }

    SUBCASE("s_k matches an independent replay for every game and k") {
        for (const auto& id : bundled_game_ids()) {
            auto w = load_bundled_game(id);
            for (int k : kStartingPercentages) {
                Episode env(w, config_for(id, k));
                CHECK(env.s_k() == replay_prefix_score(*w, k));
            }
        }
    }

    SUBCASE("reset is deterministic") {
        Episode a(world, config_for("manor-heist", 40));
        Episode b(world, config_for("manor-heist", 40));
        CHECK(a.s_k() == b.s_k());
        CHECK(a.observation() == b.observation());
    }

    SUBCASE("bad configs are rejected") {
        CHECK_THROWS_AS(Episode(world, config_for("manor-heist", 37)), EngineError);
        CHECK_THROWS_AS(Episode(world, config_for("manor-heist", 0, 0)), EngineError);
    }
}

TEST_CASE("step limit counts every attempted action, valid or not") {
    auto world = load_bundled_game("manor-heist");
    Episode env(world, config_for("manor-heist", 0, 100));
    for (int i = 0; i < 100; ++i) {
        REQUIRE(!env.done());
        // alternate a harmless no-op and gibberish; both consume budget
        env.step(i % 2 == 0 ? "wait" : "flarble wug");
    }
    CHECK(env.done());
    CHECK(env.log().end == EpisodeEnd::Limit);
    CHECK(env.score() == env.s_k());
    CHECK_THROWS_AS(env.step("wait"), ContractViolation);
}

TEST_CASE("walkthrough suffix replay completes from every k") {
    for (const auto& id : bundled_game_ids()) {
        auto world = load_bundled_game(id);
        for (int k : kStartingPercentages) {
            Episode env(world, config_for(id, k, 1000));
            size_t prefix = world->walkthrough.size() * static_cast<size_t>(k) / 100;
            for (size_t i = prefix; i < world->walkthrough.size(); ++i) {
                REQUIRE(!env.done());
                env.step(world->walkthrough[i]);
            }
            CHECK(env.done());
            CHECK(env.log().end == EpisodeEnd::Win);
            CHECK(env.score() == world->max_score);
            CHECK(percent_completion(env.score(), env.s_k(), env.s_max()) == 100.0);
        }
    }
}

TEST_CASE("env rewards mirror direct engine outcomes") {
    auto world = load_bundled_game("harbor-rescue");
    Episode env(world, config_for("harbor-rescue", 0, 1000));
    GameState mirror = initial_state(*world);
    for (const auto& action : world->walkthrough) {
        StepOutcome direct = step(mirror, action, *world);
        StepResult via_env = env.step(action);
        CHECK(direct.reward == via_env.reward);
        CHECK(direct.observation == via_env.observation);
        if (env.done()) break;
    }
    // log accounting: s_a - s_k equals the sum of logged rewards
    int sum = 0;
    for (const auto& t : env.log().transitions) sum += t.reward;
    CHECK(env.score() - env.s_k() == sum);
}

TEST_CASE("valid_actions template instantiation") {
    SUBCASE("zero objects: the six movements plus zero-argument verbs") {
        ParseResult r = parse_script(
            "GAME t\nMAXSCORE 0\nROOM a \"A\" \"Room.\"\nROOM b \"B\" \"Room.\"\n"
            "EXIT a NORTH b\nEXIT b SOUTH a\n"
            "VERB sing\nVERB jump\n"
            "RULE r1 ON \"sing\"\n  DO PRINT \"La.\"\n"
            "RULE r2 ON \"jump\"\n  DO PRINT \"Hop.\"\n"
            "WALKTHROUGH\nEND\n");
        REQUIRE(r.ok());
        auto world = std::make_shared<const WorldModel>(std::move(*r.world));
        Episode env(world, config_for("t", 0));
        auto actions = env.valid_actions();
        REQUIRE(actions.size() == 8);
        CHECK(actions[0] == "north");
        CHECK(std::count(actions.begin(), actions.end(), "sing") == 1);
        CHECK(std::count(actions.begin(), actions.end(), "jump") == 1);
    }

    SUBCASE("a one-object verb instantiates once per visible object") {
        ParseResult r = parse_script(
            "GAME t\nMAXSCORE 0\nROOM a \"A\" \"Room.\"\n"
            "OBJECT o1 \"red box\" LOC a\nOBJECT o2 \"blue box\" LOC a\n"
            "OBJECT o3 \"green box\" LOC a\nOBJECT o4 \"unseen box\" LOC a\n  FLAGS HIDDEN\n"
            "VERB poke\n"
            "RULE r1 ON \"poke o1\"\n  DO PRINT \"Poke.\"\n"
            "WALKTHROUGH\nEND\n");
        REQUIRE(r.ok());
        auto world = std::make_shared<const WorldModel>(std::move(*r.world));
        Episode env(world, config_for("t", 0));
        int pokes = 0;
        for (const auto& a : env.valid_actions()) {
            if (a.rfind("poke ", 0) == 0) ++pokes;
        }
        CHECK(pokes == 3);  // hidden object excluded
    }

    SUBCASE("every walkthrough action appears in the valid set at its step") {
        for (const auto& id : bundled_game_ids()) {
            auto world = load_bundled_game(id);
            Episode env(world, config_for(id, 0, 1000));
            for (const auto& action : world->walkthrough) {
                auto valid = env.valid_actions();
                std::string norm = normalize_action(action);
                bool found = false;
                for (const auto& v : valid) {
                    if (normalize_action(v) == norm) found = true;
                }
                INFO(id << ": '" << action << "' missing from valid_actions");
                CHECK(found);
                env.step(action);
                if (env.done()) break;
            }
        }
    }
}

TEST_CASE("peek is pure lookahead") {
    auto world = load_bundled_game("manor-heist");
    Episode env(world, config_for("manor-heist", 0, 1000));
    env.step("north");  // garden

    SUBCASE("no-op peeks empty") {
        CHECK(env.peek("wait").empty());
    }

    SUBCASE("annotated action peeks its vector without advancing the episode") {
        env.step("north");
        env.step("north");  // hall, candlestick here
        auto before_log = env.log().transitions.size();
        auto before_obs = env.observation();
        auto anns = env.peek("take silver candlestick");
        REQUIRE(anns.size() == 1);
        CHECK(anns[0].degrees == std::array<int, 4>{2, 0, 0, 0});
        CHECK(env.log().transitions.size() == before_log);
        CHECK(env.observation() == before_obs);
        CHECK(env.score() == 0);
    }

    SUBCASE("peek then step emit identical annotations") {
        Rng rng(11);
        for (int i = 0; i < 40 && !env.done(); ++i) {
            auto valid = env.valid_actions();
            std::string action = valid[rng.next_index(valid.size())];
            auto peeked = env.peek(action);
            auto stepped = env.step(action).annotations;
            REQUIRE(peeked.size() == stepped.size());
            for (size_t j = 0; j < peeked.size(); ++j) {
                CHECK(peeked[j].degrees == stepped[j].degrees);
                CHECK(peeked[j].source_rule == stepped[j].source_rule);
                CHECK(peeked[j].attempt == stepped[j].attempt);
            }
        }
    }

    SUBCASE("interleaved peeks leave the trace unchanged") {
        Episode probe(world, config_for("manor-heist", 0, 1000));
        Episode control(world, config_for("manor-heist", 0, 1000));
        for (const auto& action : world->walkthrough) {
            for (const auto& v : probe.valid_actions()) probe.peek(v);
            auto a = probe.step(action);
            auto b = control.step(action);
            CHECK(a.observation == b.observation);
            CHECK(a.reward == b.reward);
            if (probe.done()) break;
        }
        CHECK(probe.score() == control.score());
    }
}

TEST_CASE("unique annotation coverage counts distinct source rules") {
    auto world = load_bundled_game("manor-heist");

    SUBCASE("no annotated steps") {
        Episode env(world, config_for("manor-heist", 0));
        env.step("wait");
        env.step("north");
        CHECK(unique_annotation_coverage({env.log()}) == 0);
    }

    SUBCASE("the same rule twice counts once") {
        Episode env(world, config_for("manor-heist", 0, 1000));
        env.step("north");
        env.step("north");
        env.step("north");  // hall
        env.step("down");   // cellar
        env.step("drink dusty wine");
        env.step("drink dusty wine");
        CHECK(unique_annotation_coverage({env.log()}) == 1);
    }
}

TEST_CASE("episode log serialization round-trips") {
    auto world = load_bundled_game("frost-village");
    Episode env(world, config_for("frost-village", 0, 1000));
    for (const auto& action : world->walkthrough) {
        env.step(action);
        if (env.done()) break;
    }
    std::ostringstream out;
    env.log().serialize_transitions(out);
    std::istringstream in(out.str());
    auto parsed = parse_transitions(in);
    REQUIRE(parsed.size() == env.log().transitions.size());
    for (size_t i = 0; i < parsed.size(); ++i) {
        CHECK(parsed[i].action == env.log().transitions[i].action);
        CHECK(parsed[i].reward == env.log().transitions[i].reward);
        CHECK(parsed[i].valid == env.log().transitions[i].valid);
        CHECK(parsed[i].annotations.size() == env.log().transitions[i].annotations.size());
    }
}
