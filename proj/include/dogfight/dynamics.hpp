#pragma once

// Point-mass 3-DOF aircraft model.

#include "dogfight/common.hpp"

namespace dogfight {

inline constexpr double kPhysicsDt = 0.02;
inline constexpr double kMinAircraftSpeed = 100.0;
inline constexpr double kPitchLimit = kPi / 2.0 - 1e-6;

struct AircraftState {
    double x = 0.0;      // m
    double y = 0.0;      // m
    double z = 0.0;      // m, altitude
    double v = 0.0;      // m/s
    double gamma = 0.0;  // rad, flight-path angle
    double phi = 0.0;    // rad, heading

    friend bool operator==(const AircraftState&, const AircraftState&) = default;

    Vec3 position() const { return {x, y, z}; }
    Vec3 velocity() const;
};

/// Per-second rates of the six AircraftState fields.
struct AircraftRates {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double v = 0.0;
    double gamma = 0.0;
    double phi = 0.0;
};

struct ControlInput {
    double nx = 0.0;  // tangential overload
    double nz = 1.0;  // normal overload
    double mu = 0.0;  // roll, rad

    friend bool operator==(const ControlInput&, const ControlInput&) = default;
};

struct ControlBounds {
    static constexpr double nx_min = -2.0, nx_max = 2.0;
    static constexpr double nz_min = 0.0, nz_max = 8.0;
    static constexpr double mu_min = -kPi, mu_max = kPi;
};

/// Right-hand side of the aircraft equations of motion. Throws
/// DegenerateStateError when |cos gamma| < 1e-9 or v < 1e-6.
AircraftRates aircraft_derivatives(const AircraftState& s, const ControlInput& c);

/// Clamps (nx, nz, mu) into ControlBounds. Throws ConfigError on non-finite input.
ControlInput clamp_controls(double nx, double nz, double mu);

/// One classic RK4 step with controls held over the step. Re-applies the speed
/// floor, the pitch clip and heading wrap on the result.
AircraftState rk4_step(const AircraftState& s, const ControlInput& c, double dt);

/// Applies the state invariants (speed floor, pitch clip, heading wrap).
AircraftState enforce_invariants(AircraftState s);

}  // namespace dogfight
