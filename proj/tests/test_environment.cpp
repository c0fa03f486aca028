#include <doctest.h>

#include <cmath>

#include "dogfight/environment.hpp"

using namespace dogfight;

namespace {

constexpr ActionCommand kHold{0, 0, 0, -1};
constexpr ActionCommand kFire{0, 0, 0, 1};

EngagementState head_on() {
    EngagementState s;
    s.blue = {0, 0, 5000, 300, 0, 0};
    s.red = {5000, 0, 5000, 300, 0, kPi};
    return s;
}

StepResult run_to_end(EngagementState& s, const ActionCommand& blue, const ActionCommand& red) {
    StepResult r;
    for (int i = 0; i < 1000 && !s.done(); ++i) {
        r = env_step(s, blue, red);
        if (!r.done) {
            CHECK(r.reward[0] == 0.0);
            CHECK(r.reward[1] == 0.0);
        }
    }
    return r;
}

}  // namespace

TEST_CASE("reset is deterministic") {
    for (std::uint64_t seed : {0ULL, 1ULL, 99ULL, 0xdeadbeefULL})
        CHECK(reset(seed, {}) == reset(seed, {}));
    CHECK_FALSE(reset(1, {}) == reset(2, {}));
}

TEST_CASE("reset samples inside the scenario bounds") {
    const ScenarioConfig sc;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        const auto s = reset(seed, sc);
        for (const auto* a : {&s.blue, &s.red}) {
            CHECK(a->v >= 250.0);
            CHECK(a->v <= 400.0);
            CHECK(a->z >= 3000.0);
            CHECK(a->z <= 8000.0);
            CHECK(a->gamma == 0.0);
        }
        const double sep = std::hypot(s.blue.x - s.red.x, s.blue.y - s.red.y);
        CHECK(sep >= 5000.0 - 1e-9);
        CHECK(sep <= 15000.0 + 1e-9);
        CHECK(s.t == 0.0);
        CHECK(s.outcome == Outcome::Ongoing);
    }
}

TEST_CASE("degenerate separation interval") {
    ScenarioConfig sc;
    sc.separation = {1000, 1000};
    const auto s = reset(4, sc);
    CHECK(std::hypot(s.blue.x - s.red.x, s.blue.y - s.red.y) == doctest::Approx(1000.0).epsilon(1e-12));
}

TEST_CASE("scenario validation") {
    ScenarioConfig sc;
    sc.speed = {400, 250};
    CHECK_THROWS_AS(reset(0, sc), ConfigError);
    sc = {};
    sc.altitude = {-5, 100};
    CHECK_THROWS_AS(reset(0, sc), ConfigError);
}

TEST_CASE("observation scaling") {
    auto s = head_on();
    const auto o = observe(s, Side::Blue);
    CHECK(o[2] == doctest::Approx(1.0 / 3.0));         // speed 300 in [250, 400]
    CHECK(o[3] == doctest::Approx(0.5));               // altitude 5000 in [0, 10000]
    CHECK(o[4] == doctest::Approx(0.25));              // 5 km in [0, 20 km]
    CHECK(o[6] == doctest::Approx(0.5));               // target dead ahead
    CHECK(o[10] == 1.0);                               // no incoming missile
    CHECK(o[12] == 0.0);
    CHECK(o[5] == 0.0);
    const auto r = observe(s, Side::Red);
    CHECK(r[6] == doctest::Approx(0.5));
    CHECK(r[8] == doctest::Approx(0.5));  // blue heads east
}

TEST_CASE("observation flags follow the missiles") {
    auto s = head_on();
    env_step(s, kFire, kHold);
    const auto blue = observe(s, Side::Blue);
    const auto red = observe(s, Side::Red);
    CHECK(blue[5] == 1.0);
    CHECK(red[12] == 1.0);
    CHECK(red[10] < 1.0);
    CHECK(blue[12] == 0.0);
}

TEST_CASE("observation mirror symmetry") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto s = reset(seed, {});
        for (int i = 0; i < 5; ++i) env_step(s, {0.3, 0.1, 0.4, 1}, {-0.2, 0, -1, 1});
        CHECK(observe(s, Side::Blue) == observe(s.swapped(), Side::Red));
        CHECK(observe(s, Side::Red) == observe(s.swapped(), Side::Blue));
    }
}

TEST_CASE("observations stay in the unit box for arbitrary states") {
    Rng rng(17);
    for (int i = 0; i < 100000; ++i) {
        EngagementState s;
        for (AircraftState* a : {&s.blue, &s.red})
            *a = {rng.uniform(-5e4, 5e4), rng.uniform(-5e4, 5e4), rng.uniform(-1e3, 2e4),
                  rng.uniform(50, 900),   rng.uniform(-1.6, 1.6),  rng.uniform(-kPi, kPi)};
        if (i % 2 == 0) {
            s.red_missile = launch_missile(s.red, Side::Red);
            s.red_missile->xm += rng.uniform(-3e4, 3e4);
        }
        for (Side side : {Side::Blue, Side::Red})
            for (double f : observe(s, side)) {
                CHECK(f >= 0.0);
                CHECK(f <= 1.0);
            }
    }
}

TEST_CASE("holding trim without firing draws at the time limit") {
    auto s = reset(3, {});
    StepResult last;
    int steps = 0;
    while (!s.done()) {
        last = env_step(s, kHold, kHold);
        ++steps;
    }
    CHECK(last.outcome == Outcome::Draw);
    CHECK(steps == 400);
    CHECK(s.t == doctest::Approx(200.0));
    CHECK(last.reward[0] == 0.0);
    CHECK(last.reward[1] == 0.0);
}

TEST_CASE("head-on launch by blue ends in a blue win") {
    auto s = head_on();
    const auto r = run_to_end(s, kFire, kHold);
    CHECK(r.outcome == Outcome::BlueWin);
    CHECK(r.reward[0] == 1.0);
    CHECK(r.reward[1] == -1.0);
    CHECK(s.blue_fired);
    CHECK_FALSE(s.red_fired);
}

TEST_CASE("launch gate") {
    SUBCASE("target behind") {
        EngagementState s;
        s.blue = {0, 0, 5000, 300, 0, 0};
        s.red = {-3000, 0, 5000, 300, 0, 0};
        CHECK_FALSE(launch_allowed(s, Side::Blue));
        env_step(s, kFire, kHold);
        CHECK_FALSE(s.blue_fired);
        CHECK_FALSE(s.blue_missile.has_value());
    }
    SUBCASE("out of range") {
        EngagementState s;
        s.blue = {0, 0, 5000, 300, 0, 0};
        s.red = {12500, 0, 5000, 300, 0, 0};
        CHECK_FALSE(launch_allowed(s, Side::Blue));
    }
    SUBCASE("one missile per side") {
        auto s = head_on();
        CHECK(launch_allowed(s, Side::Blue));
        env_step(s, kFire, kHold);
        CHECK(s.blue_fired);
        CHECK_FALSE(launch_allowed(s, Side::Blue));
    }
    SUBCASE("non-positive logit never fires") {
        auto s = head_on();
        env_step(s, {0, 0, 0, 0.0}, kHold);
        CHECK_FALSE(s.blue_fired);
    }
}

TEST_CASE("ground impact loses") {
    EngagementState s;
    s.blue = {0, 0, 400, 300, -0.5, 0};
    s.red = {0, 9000, 6000, 300, 0, 0};
    const auto r = run_to_end(s, {-5, 0, 0, -1}, kHold);
    CHECK(r.outcome == Outcome::RedWin);
    CHECK(r.reward[0] + r.reward[1] == 0.0);
}

TEST_CASE("decision step is 25 physics substeps") {
    auto s = reset(5, {});
    int calls = 0;
    env_step(s, kHold, kHold, {}, [&calls](const EngagementState&) { ++calls; });
    CHECK(calls == 25);
    CHECK(s.physics_steps == 25);
    CHECK(s.t == doctest::Approx(0.5));
    EnvConfig bad;
    bad.decision_dt = 0.03;
    CHECK_THROWS_AS(env_step(s, kHold, kHold, bad), ConfigError);
}

TEST_CASE("rewards are sparse and zero-sum under random play") {
    Rng rng(23);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        auto s = reset(seed, {});
        while (!s.done()) {
            ActionCommand a{}, b{};
            for (auto& v : a) v = rng.normal();
            for (auto& v : b) v = rng.normal();
            const auto r = env_step(s, a, b);
            CHECK(r.reward[0] + r.reward[1] == 0.0);
            if (!r.done) CHECK(r.reward[0] == 0.0);
        }
    }
}

TEST_CASE("a finished engagement does not advance") {
    auto s = head_on();
    run_to_end(s, kFire, kHold);
    const auto before = s;
    const auto r = env_step(s, kFire, kFire);
    CHECK(r.done);
    CHECK(s == before);
}

TEST_CASE("zero action flies level near cruise") {
    AircraftState a{0, 0, 5000, 325, 0, 0};
    const auto c = controls_from_action(a, {0, 0, 0, 0});
    CHECK(c.nx == doctest::Approx(0.0));
    CHECK(c.nz == doctest::Approx(1.0));
    CHECK(c.mu == 0.0);
    CHECK_THROWS_AS(controls_from_action(a, {std::nan(""), 0, 0, 0}), ConfigError);
}
