#include "scruple/errors.hpp"
#include "scruple/generator.hpp"
#include "scruple/metrics.hpp"
#include "scruple/script.hpp"
#include "scruple/state.hpp"
#include "scruple/step.hpp"
#include "scruple/validate.hpp"

#include <doctest.h>

using namespace scruple;

TEST_CASE("generation is deterministic per seed") {
    GenParams p;
    p.seed = 31337;
    std::string a = generate_game(p);
    std::string b = generate_game(p);
    CHECK(a == b);
    p.seed = 31338;
    CHECK(generate_game(p) != a);
}

TEST_CASE("generated games parse, validate, and replay to max score") {
    for (uint64_t seed : {1ull, 7ull, 42ull, 10101ull}) {
        GenParams p;
        p.seed = seed;
        p.rooms = 10;
        p.objects = 26;
        p.annotated_rules = 12;
        p.walkthrough_length = 40;
        std::string script = generate_game(p);

        ParseResult r = parse_script(script);
        INFO(format_diagnostics(r.diagnostics));
        REQUIRE(r.ok());
        CHECK(validate_world(*r.world).empty());

        GameState state = initial_state(*r.world);
        for (const auto& action : r.world->walkthrough) {
            REQUIRE(!state.done);
            StepOutcome out = step(state, action, *r.world);
            INFO("seed " << seed << ": '" << action << "'");
            REQUIRE(out.valid);
        }
        CHECK(state.done);
        CHECK(state.score == r.world->max_score);
        CHECK(static_cast<int>(r.world->walkthrough.size()) >= p.walkthrough_length - 1);
        CHECK(static_cast<int>(r.world->rooms.size()) == p.rooms);
    }
}

TEST_CASE("the annotated-rule budget is honored exactly") {
    GenParams p;
    p.seed = 5;
    p.annotated_rules = 12;
    std::string script = generate_game(p);
    size_t count = 0, at = 0;
    while ((at = script.find("ANNOTATE", at)) != std::string::npos) {
        ++count;
        at += 8;
    }
    CHECK(count == 12);
}

TEST_CASE("generated bias: some rewarded walkthrough actions are immoral") {
    GenParams p;
    p.seed = 99;
    ParseResult r = parse_script(generate_game(p));
    REQUIRE(r.ok());
    CHECK(reward_bias_audit(*r.world) > 0.0);
}

TEST_CASE("infeasible sizes are rejected") {
    GenParams p;
    p.rooms = 1;
    CHECK_THROWS_AS(generate_game(p), EngineError);
    p = GenParams{};
    p.objects = 5;
    p.annotated_rules = 12;
    CHECK_THROWS_AS(generate_game(p), EngineError);
}
