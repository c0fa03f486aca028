#include "dogfight/dynamics.hpp"

#include <algorithm>

namespace dogfight {

Vec3 AircraftState::velocity() const {
    const double cg = std::cos(gamma);
    return {v * cg * std::cos(phi), v * cg * std::sin(phi), v * std::sin(gamma)};
}

AircraftRates aircraft_derivatives(const AircraftState& s, const ControlInput& c) {
    const double cg = std::cos(s.gamma);
    if (std::abs(cg) < 1e-9) throw DegenerateStateError("aircraft pitch at +/-pi/2");
    if (s.v < 1e-6) throw DegenerateStateError("aircraft speed near zero");

    const double sg = std::sin(s.gamma);
    AircraftRates d;
    d.x = s.v * cg * std::cos(s.phi);
    d.y = s.v * cg * std::sin(s.phi);
    d.z = s.v * sg;
    d.v = kGravity * (c.nx - sg);
    d.gamma = kGravity / s.v * (c.nz * std::cos(c.mu) - cg);
    d.phi = kGravity / (s.v * cg) * c.nz * std::sin(c.mu);
    return d;
}

ControlInput clamp_controls(double nx, double nz, double mu) {
    if (!std::isfinite(nx) || !std::isfinite(nz) || !std::isfinite(mu))
        throw ConfigError("non-finite control input");
    using B = ControlBounds;
    return {std::clamp(nx, B::nx_min, B::nx_max), std::clamp(nz, B::nz_min, B::nz_max),
            std::clamp(mu, B::mu_min, B::mu_max)};
}

AircraftState enforce_invariants(AircraftState s) {
    s.v = std::max(s.v, kMinAircraftSpeed);
    s.gamma = std::clamp(s.gamma, -kPitchLimit, kPitchLimit);
    s.phi = wrap_angle(s.phi);
    return s;
}

namespace {

AircraftState advance(const AircraftState& s, const AircraftRates& d, double h) {
    return {s.x + h * d.x, s.y + h * d.y, s.z + h * d.z,
            s.v + h * d.v, std::clamp(s.gamma + h * d.gamma, -kPitchLimit, kPitchLimit), s.phi + h * d.phi};
}

}  // namespace

AircraftState rk4_step(const AircraftState& s, const ControlInput& c, double dt) {
    if (!(dt > 0.0)) throw ConfigError("rk4_step: dt must be positive");
    const AircraftRates k1 = aircraft_derivatives(s, c);
    const AircraftRates k2 = aircraft_derivatives(advance(s, k1, 0.5 * dt), c);
    const AircraftRates k3 = aircraft_derivatives(advance(s, k2, 0.5 * dt), c);
    const AircraftRates k4 = aircraft_derivatives(advance(s, k3, dt), c);

    const double w = dt / 6.0;
    AircraftState out;
    out.x = s.x + w * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    out.y = s.y + w * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    out.z = s.z + w * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
    out.v = s.v + w * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    out.gamma = s.gamma + w * (k1.gamma + 2.0 * k2.gamma + 2.0 * k3.gamma + k4.gamma);
    out.phi = s.phi + w * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi);
    return enforce_invariants(out);
}

}  // namespace dogfight
