#pragma once

// Two-aircraft engagement: reset, decision steps with physics sub-steps,
// observations and sparse outcome rewards.

#include <array>
#include <functional>
#include <optional>

#include "dogfight/dynamics.hpp"
#include "dogfight/missile.hpp"

namespace dogfight {

inline constexpr std::size_t kObservationSize = 13;
inline constexpr std::size_t kActionSize = 4;
inline constexpr double kDecisionDt = 0.5;
inline constexpr double kMaxEpisodeTime = 200.0;
inline constexpr double kGroundFloor = 100.0;
inline constexpr double kLaunchRange = 12000.0;
inline constexpr double kLaunchBearing = kPi / 3.0;

using Observation = std::array<double, kObservationSize>;

/// Raw policy output: (nz, nx, roll, fire-logit), before clamping.
using ActionCommand = std::array<double, kActionSize>;

enum class Outcome : std::uint8_t { Ongoing, BlueWin, RedWin, Draw };

std::string_view to_string(Outcome o);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct ScenarioConfig {
    Interval speed{250.0, 400.0};
    Interval altitude{3000.0, 8000.0};
    Interval separation{5000.0, 15000.0};

    /// Throws ConfigError for inverted, non-finite or physically invalid bounds.
    void validate() const;
    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct EngagementState {
    AircraftState blue;
    AircraftState red;
    std::optional<MissileState> blue_missile;
    std::optional<MissileState> red_missile;
    bool blue_fired = false;
    bool red_fired = false;
    double t = 0.0;
    std::int64_t physics_steps = 0;
    Outcome outcome = Outcome::Ongoing;

    friend bool operator==(const EngagementState&, const EngagementState&) = default;

    const AircraftState& aircraft(Side s) const { return s == Side::Blue ? blue : red; }
    AircraftState& aircraft(Side s) { return s == Side::Blue ? blue : red; }
    const std::optional<MissileState>& missile(Side s) const {
        return s == Side::Blue ? blue_missile : red_missile;
    }
    bool fired(Side s) const { return s == Side::Blue ? blue_fired : red_fired; }
    bool done() const { return outcome != Outcome::Ongoing; }

    /// Same engagement seen with the two sides exchanged.
    EngagementState swapped() const;
};

struct StepResult {
    std::array<Observation, 2> observation;  // indexed by Side
    std::array<double, 2> reward{};          // indexed by Side
    bool done = false;
    Outcome outcome = Outcome::Ongoing;

    double reward_for(Side s) const { return reward[static_cast<std::size_t>(s)]; }
};

struct EnvConfig {
    double physics_dt = kPhysicsDt;
    double decision_dt = kDecisionDt;
    double max_time = kMaxEpisodeTime;
    MissileParams missile;
};

/// Called after every physics sub-step (and not otherwise).
using SubstepHook = std::function<void(const EngagementState&)>;

/// Seeded placement of both aircraft. Deterministic in (seed, scenario).
EngagementState reset(std::uint64_t seed, const ScenarioConfig& scenario);

Observation observe(const EngagementState& s, Side side);

// Action mapping. Raw nz and nx are overload increments on top of the trim that
// holds the current flight path and speed; the trim relaxes pitch toward level
// and speed toward cruise so that a zero action flies straight and level.
inline constexpr double kRollPerUnit = kPi / 6.0;  // rad of bank per raw unit
inline constexpr double kPitchDamping = 0.3;       // 1/s
inline constexpr double kSpeedDamping = 0.05;      // 1/s
inline constexpr double kCruiseSpeed = 325.0;      // m/s
inline constexpr double kMinLiftShare = 0.25;      // floor on cos(mu) in the bank compensation

/// Maps a raw action to clamped physical controls for the aircraft `own`.
ControlInput controls_from_action(const AircraftState& own, const ActionCommand& a);

/// True if `side` may launch now given a positive fire logit.
bool launch_allowed(const EngagementState& s, Side side);

/// Advances one decision step. A finished engagement is returned unchanged with done=true.
StepResult env_step(EngagementState& s, const ActionCommand& blue_action,
                    const ActionCommand& red_action, const EnvConfig& cfg = {},
                    const SubstepHook& hook = {});

/// +1 / -1 / 0 from `side`'s point of view; 0 while ongoing.
double outcome_value(Outcome o, Side side);

}  // namespace dogfight
