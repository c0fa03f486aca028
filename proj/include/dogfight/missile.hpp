#pragma once

// Powered missile with burn-time thrust, quadratic drag and fuel depletion,
// steered by proportional navigation.

#include <limits>
#include <optional>
#include <utility>

#include "dogfight/common.hpp"
#include "dogfight/dynamics.hpp"

namespace dogfight {

struct MissileParams {
    double p0 = 2000.0;   // average thrust, same units as drag
    double g0 = 170.0;    // initial mass, kg
    double gt = 7.0;      // fuel flow, kg/s
    double tw = 12.0;     // burn time, s
    double rho = 0.607;
    double sm = 0.0324;
    double cdm = 0.9;
    double k_pn = 4.0;
    double max_flight_time = 60.0;
    double hit_radius = 30.0;
    double min_speed = 200.0;
    double command_limit = 40.0;

    /// Throws ConfigError if any field is non-positive.
    void validate() const;
};

enum class MissileStatus : std::uint8_t { InFlight, Hit, Expired };

struct MissileState {
    double xm = 0.0, ym = 0.0, zm = 0.0;
    double vm = 0.0;
    double gamma_m = 0.0;
    double phi_m = 0.0;
    double t_since_launch = 0.0;
    Side shooter = Side::Blue;
    Side target = Side::Red;
    MissileStatus status = MissileStatus::InFlight;
    // Guidance command applied on the last step; held through singular geometry.
    double last_nmc = 0.0;
    double last_nmh = 0.0;
    // Smallest missile-target separation seen so far.
    double miss_distance = std::numeric_limits<double>::infinity();

    friend bool operator==(const MissileState&, const MissileState&) = default;

    Vec3 position() const { return {xm, ym, zm}; }
    Vec3 velocity() const;
    bool in_flight() const { return status == MissileStatus::InFlight; }
};

struct RelativeGeometry {
    Vec3 r;      // target minus missile
    Vec3 r_dot;  // relative velocity
    double range = 0.0;
    double beta = 0.0;     // line-of-sight azimuth
    double epsilon = 0.0;  // line-of-sight elevation
    double beta_dot = 0.0;
    double epsilon_dot = 0.0;
};

class GuidanceError : public Error {
public:
    enum class Kind { ZeroRange, Singular };
    GuidanceError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

double mass_at(const MissileParams& p, double t);
double thrust_at(const MissileParams& p, double t);
double drag_of(const MissileParams& p, double vm);

/// Line-of-sight angles and rates. Throws GuidanceError(ZeroRange) when the
/// target sits on the missile or directly above/below it.
RelativeGeometry relative_geometry(const Vec3& missile_pos, const Vec3& missile_vel,
                                   const Vec3& target_pos, const Vec3& target_vel);

/// Proportional-navigation commands (n_mc, n_mh) before clamping.
std::pair<double, double> pn_command_unclamped(const RelativeGeometry& geom, double vm,
                                               double gamma_t, double k_pn);

/// Proportional-navigation commands, each clamped to +/-p.command_limit.
/// Throws GuidanceError(Singular) when |cos(epsilon + beta)| <= 1e-9.
std::pair<double, double> pn_command(const RelativeGeometry& geom, double vm, double gamma_t,
                                     const MissileParams& p);

/// Rates of (x, y, z, v, gamma, phi) for the missile at time t since launch
/// under fixed commands.
AircraftRates missile_derivatives(const MissileState& m, const MissileParams& p, double t,
                                  double n_mc, double n_mh);

/// Rail launch: the missile takes the shooter's position, speed and attitude.
MissileState launch_missile(const AircraftState& shooter, Side shooter_side);

/// One RK4 step of the missile under PN guidance against a target at
/// target_pos moving with target_vel. Updates status (Hit on closest approach
/// inside hit_radius, Expired on timeout or low speed). A step on a missile that
/// is no longer in flight returns it unchanged.
MissileState missile_step(const MissileState& m, const MissileParams& p, const Vec3& target_pos,
                          const Vec3& target_vel, double dt);

/// Minimum distance between two points moving linearly over one step.
double closest_approach(const Vec3& a0, const Vec3& a1, const Vec3& b0, const Vec3& b1);

}  // namespace dogfight
