#include "dogfight/environment.hpp"

#include <algorithm>

namespace dogfight {

namespace {

struct Bounds {
    double lo;
    double hi;
};

constexpr Bounds kAngle{-kPi, kPi};
constexpr Bounds kPitch{-kPi / 2.0, kPi / 2.0};
constexpr Bounds kSpeed{250.0, 400.0};
constexpr Bounds kAltitude{0.0, 10000.0};
constexpr Bounds kDistance{0.0, 20000.0};
constexpr Bounds kFlag{0.0, 1.0};

double normalize(double x, Bounds b) { return std::clamp((x - b.lo) / (b.hi - b.lo), 0.0, 1.0); }

Outcome win_for(Side s) { return s == Side::Blue ? Outcome::BlueWin : Outcome::RedWin; }

// Angle between the aircraft's velocity and the line of sight to `target`.
double off_boresight(const AircraftState& own, const Vec3& target) {
    const Vec3 los = target - own.position();
    const double range = los.norm();
    if (range == 0.0) return 0.0;
    const double c = own.velocity().dot(los) / (own.v * range);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::Ongoing: return "Ongoing";
        case Outcome::BlueWin: return "BlueWin";
        case Outcome::RedWin: return "RedWin";
        case Outcome::Draw: return "Draw";
    }
    return "?";
}

void ScenarioConfig::validate() const {
    for (const Interval* i : {&speed, &altitude, &separation}) {
        if (!std::isfinite(i->lo) || !std::isfinite(i->hi) || i->lo > i->hi)
            throw ConfigError("scenario interval must be finite with lo <= hi");
    }
    if (speed.lo < kMinAircraftSpeed) throw ConfigError("scenario speed below the aircraft speed floor");
    if (altitude.lo <= kGroundFloor) throw ConfigError("scenario altitude at or below the ground floor");
    if (separation.lo <= 0.0) throw ConfigError("scenario separation must be positive");
}

EngagementState EngagementState::swapped() const {
    EngagementState o = *this;
    std::swap(o.blue, o.red);
    std::swap(o.blue_missile, o.red_missile);
    std::swap(o.blue_fired, o.red_fired);
    for (auto* m : {&o.blue_missile, &o.red_missile}) {
        if (*m) {
            (*m)->shooter = opponent_of((*m)->shooter);
            (*m)->target = opponent_of((*m)->target);
        }
    }
    if (outcome == Outcome::BlueWin) o.outcome = Outcome::RedWin;
    else if (outcome == Outcome::RedWin) o.outcome = Outcome::BlueWin;
    return o;
}

EngagementState reset(std::uint64_t seed, const ScenarioConfig& scenario) {
    scenario.validate();
    Rng rng(derive_seed(seed, 0x5e5e7));
    const double sep = rng.uniform(scenario.separation.lo, scenario.separation.hi);
    const double bearing = rng.uniform(-kPi, kPi);
    const double ux = std::cos(bearing);
    const double uy = std::sin(bearing);

    EngagementState s;
    s.blue.x = -0.5 * sep * ux;
    s.blue.y = -0.5 * sep * uy;
    s.red.x = 0.5 * sep * ux;
    s.red.y = 0.5 * sep * uy;
    for (AircraftState* a : {&s.blue, &s.red}) {
        a->z = rng.uniform(scenario.altitude.lo, scenario.altitude.hi);
        a->v = rng.uniform(scenario.speed.lo, scenario.speed.hi);
        a->gamma = 0.0;
        a->phi = wrap_angle(rng.uniform(-kPi, kPi));
    }
    return s;
}

Observation observe(const EngagementState& s, Side side) {
    const AircraftState& own = s.aircraft(side);
    const AircraftState& other = s.aircraft(opponent_of(side));
    const Vec3 los = other.position() - own.position();
    const double horiz = std::hypot(los.x, los.y);
    const double los_azimuth = std::atan2(los.y, los.x);
    const double los_elevation = std::atan2(los.z, horiz);

    const auto& own_missile = s.missile(side);
    const auto& incoming = s.missile(opponent_of(side));
    const bool own_in_flight = own_missile && own_missile->in_flight();
    const bool incoming_in_flight = incoming && incoming->in_flight();
    const double incoming_range =
        incoming_in_flight ? (incoming->position() - own.position()).norm() : kDistance.hi;

    return {
        normalize(own.phi, kAngle),
        normalize(own.gamma, kPitch),
        normalize(own.v, kSpeed),
        normalize(own.z, kAltitude),
        normalize(los.norm(), kDistance),
        normalize(own_in_flight ? 1.0 : 0.0, kFlag),
        normalize(wrap_angle(los_azimuth - own.phi), kAngle),
        normalize(los_elevation - own.gamma, kPitch),
        normalize(other.phi, kAngle),
        normalize(other.gamma, kPitch),
        normalize(incoming_range, kDistance),
        normalize(los_azimuth, kAngle),
        normalize(incoming_in_flight ? 1.0 : 0.0, kFlag),
    };
}

ControlInput controls_from_action(const AircraftState& own, const ActionCommand& a) {
    if (!std::isfinite(a[0]) || !std::isfinite(a[1]) || !std::isfinite(a[2]))
        throw ConfigError("non-finite action");
    const double mu = std::clamp(kRollPerUnit * a[2], -kPi, kPi);
    const double lift_share = std::max(std::cos(mu), kMinLiftShare);
    const double nz = (std::cos(own.gamma) - kPitchDamping * own.gamma * own.v / kGravity + a[0]) / lift_share;
    const double nx = std::sin(own.gamma) - kSpeedDamping * (own.v - kCruiseSpeed) / kGravity + a[1];
    return clamp_controls(nx, nz, mu);
}

bool launch_allowed(const EngagementState& s, Side side) {
    if (s.done() || s.fired(side)) return false;
    const AircraftState& own = s.aircraft(side);
    const Vec3 target = s.aircraft(opponent_of(side)).position();
    return (target - own.position()).norm() < kLaunchRange &&
           off_boresight(own, target) < kLaunchBearing;
}

double outcome_value(Outcome o, Side side) {
    if (o == Outcome::BlueWin) return side == Side::Blue ? 1.0 : -1.0;
    if (o == Outcome::RedWin) return side == Side::Red ? 1.0 : -1.0;
    return 0.0;
}

StepResult env_step(EngagementState& s, const ActionCommand& blue_action,
                    const ActionCommand& red_action, const EnvConfig& cfg,
                    const SubstepHook& hook) {
    const double ratio = cfg.decision_dt / cfg.physics_dt;
    const auto substeps = static_cast<std::int64_t>(std::llround(ratio));
    if (!(cfg.physics_dt > 0.0) || substeps < 1 || std::abs(ratio - static_cast<double>(substeps)) > 1e-9)
        throw ConfigError("decision_dt must be a positive multiple of physics_dt");
    const auto max_steps = static_cast<std::int64_t>(std::llround(cfg.max_time / cfg.physics_dt));

    auto finish = [&s]() {
        StepResult r;
        r.observation = {observe(s, Side::Blue), observe(s, Side::Red)};
        r.done = s.done();
        r.outcome = s.outcome;
        r.reward = {outcome_value(s.outcome, Side::Blue), outcome_value(s.outcome, Side::Red)};
        return r;
    };
    if (s.done()) return finish();

    const ControlInput blue_ctl = controls_from_action(s.blue, blue_action);
    const ControlInput red_ctl = controls_from_action(s.red, red_action);
    if (!std::isfinite(blue_action[3]) || !std::isfinite(red_action[3]))
        throw ConfigError("non-finite fire logit");

    const bool blue_launch = blue_action[3] > 0.0 && launch_allowed(s, Side::Blue);
    const bool red_launch = red_action[3] > 0.0 && launch_allowed(s, Side::Red);
    if (blue_launch) {
        s.blue_missile = launch_missile(s.blue, Side::Blue);
        s.blue_fired = true;
    }
    if (red_launch) {
        s.red_missile = launch_missile(s.red, Side::Red);
        s.red_fired = true;
    }

    for (std::int64_t k = 0; k < substeps && !s.done(); ++k) {
        const AircraftState blue0 = s.blue;
        const AircraftState red0 = s.red;
        s.blue = rk4_step(blue0, blue_ctl, cfg.physics_dt);
        s.red = rk4_step(red0, red_ctl, cfg.physics_dt);
        if (s.blue_missile)
            s.blue_missile = missile_step(*s.blue_missile, cfg.missile, red0.position(), red0.velocity(), cfg.physics_dt);
        if (s.red_missile)
            s.red_missile = missile_step(*s.red_missile, cfg.missile, blue0.position(), blue0.velocity(), cfg.physics_dt);

        ++s.physics_steps;
        s.t = static_cast<double>(s.physics_steps) * cfg.physics_dt;

        const bool blue_lost = (s.red_missile && s.red_missile->status == MissileStatus::Hit) ||
                               s.blue.z < kGroundFloor;
        const bool red_lost = (s.blue_missile && s.blue_missile->status == MissileStatus::Hit) ||
                              s.red.z < kGroundFloor;
        const bool missiles_spent = s.blue_fired && s.red_fired && !s.blue_missile->in_flight() &&
                                    !s.red_missile->in_flight();
        if (blue_lost && red_lost) s.outcome = Outcome::Draw;
        else if (blue_lost) s.outcome = win_for(Side::Red);
        else if (red_lost) s.outcome = win_for(Side::Blue);
        else if (s.physics_steps >= max_steps || missiles_spent) s.outcome = Outcome::Draw;

        if (hook) hook(s);
    }
    return finish();
}

}  // namespace dogfight
