#include "dogfight/missile.hpp"

#include <algorithm>
#include <limits>

namespace dogfight {

void MissileParams::validate() const {
    const double fields[] = {p0, g0, gt, tw, rho, sm, cdm, k_pn,
                             max_flight_time, hit_radius, min_speed, command_limit};
    for (double f : fields)
        if (!(f > 0.0) || !std::isfinite(f)) throw ConfigError("missile parameters must be positive");
    if (g0 - gt * tw <= 0.0) throw ConfigError("missile burns more fuel than its initial mass");
}

Vec3 MissileState::velocity() const {
    const double cg = std::cos(gamma_m);
    return {vm * cg * std::cos(phi_m), vm * cg * std::sin(phi_m), vm * std::sin(gamma_m)};
}

double mass_at(const MissileParams& p, double t) {
    if (t < 0.0) throw ConfigError("mass_at: negative time");
    const double m = t <= p.tw ? p.g0 - p.gt * t : p.g0 - p.gt * p.tw;
    if (m <= 0.0) throw ConfigError("mass_at: non-positive missile mass");
    return m;
}

double thrust_at(const MissileParams& p, double t) {
    if (t < 0.0) throw ConfigError("thrust_at: negative time");
    return t <= p.tw ? p.p0 : 0.0;
}

double drag_of(const MissileParams& p, double vm) {
    return 0.5 * p.rho * vm * vm * p.sm * p.cdm;
}

RelativeGeometry relative_geometry(const Vec3& missile_pos, const Vec3& missile_vel,
                                   const Vec3& target_pos, const Vec3& target_vel) {
    RelativeGeometry g;
    g.r = target_pos - missile_pos;
    g.r_dot = target_vel - missile_vel;
    g.range = g.r.norm();
    const double rxy2 = g.r.x * g.r.x + g.r.y * g.r.y;
    if (!(g.range > 0.0) || !(rxy2 > 0.0))
        throw GuidanceError(GuidanceError::Kind::ZeroRange, "line of sight undefined");
    const double rxy = std::sqrt(rxy2);
    g.beta = std::atan2(g.r.y, g.r.x);
    g.epsilon = std::atan(g.r.z / rxy);
    g.beta_dot = (g.r_dot.y * g.r.x - g.r_dot.x * g.r.y) / rxy2;
    g.epsilon_dot = (rxy2 * g.r_dot.z - g.r.z * (g.r_dot.x * g.r.x + g.r_dot.y * g.r.y)) /
                    (g.range * g.range * rxy);
    return g;
}

std::pair<double, double> pn_command_unclamped(const RelativeGeometry& geom, double vm,
                                               double gamma_t, double k_pn) {
    const double c = std::cos(geom.epsilon + geom.beta);
    if (std::abs(c) <= 1e-9)
        throw GuidanceError(GuidanceError::Kind::Singular, "cos(epsilon + beta) vanishes");
    const double n_mc = k_pn * vm * std::cos(gamma_t) / kGravity *
                        (geom.beta_dot + std::tan(geom.epsilon) *
                                             std::tan(geom.epsilon + geom.beta) * geom.epsilon_dot);
    const double n_mh = vm * k_pn * geom.epsilon_dot / (kGravity * c);
    return {n_mc, n_mh};
}

std::pair<double, double> pn_command(const RelativeGeometry& geom, double vm, double gamma_t,
                                     const MissileParams& p) {
    auto [n_mc, n_mh] = pn_command_unclamped(geom, vm, gamma_t, p.k_pn);
    return {std::clamp(n_mc, -p.command_limit, p.command_limit),
            std::clamp(n_mh, -p.command_limit, p.command_limit)};
}

AircraftRates missile_derivatives(const MissileState& m, const MissileParams& p, double t,
                                  double n_mc, double n_mh) {
    const double cg = std::cos(m.gamma_m);
    if (std::abs(cg) < 1e-9) throw DegenerateStateError("missile pitch at +/-pi/2");
    if (m.vm < 1e-6) throw DegenerateStateError("missile speed near zero");
    const double sg = std::sin(m.gamma_m);
    AircraftRates d;
    d.x = m.vm * cg * std::cos(m.phi_m);
    d.y = m.vm * cg * std::sin(m.phi_m);
    d.z = m.vm * sg;
    d.v = (thrust_at(p, t) - drag_of(p, m.vm)) * kGravity / mass_at(p, t) - kGravity * sg;
    d.phi = n_mc * kGravity / (m.vm * cg);
    d.gamma = (n_mh - cg) * kGravity / m.vm;
    return d;
}

MissileState launch_missile(const AircraftState& shooter, Side shooter_side) {
    MissileState m;
    m.xm = shooter.x;
    m.ym = shooter.y;
    m.zm = shooter.z;
    m.vm = shooter.v;
    m.gamma_m = shooter.gamma;
    m.phi_m = shooter.phi;
    m.shooter = shooter_side;
    m.target = opponent_of(shooter_side);
    return m;
}

double closest_approach(const Vec3& a0, const Vec3& a1, const Vec3& b0, const Vec3& b1) {
    const Vec3 d0 = a0 - b0;
    const Vec3 dd = (a1 - b1) - d0;
    const double len2 = dd.dot(dd);
    double s = 0.0;
    if (len2 > 0.0) s = std::clamp(-d0.dot(dd) / len2, 0.0, 1.0);
    return (d0 + s * dd).norm();
}

namespace {

MissileState advance(const MissileState& m, const AircraftRates& d, double h) {
    MissileState o = m;
    o.xm += h * d.x;
    o.ym += h * d.y;
    o.zm += h * d.z;
    o.vm += h * d.v;
    o.gamma_m = std::clamp(o.gamma_m + h * d.gamma, -kPitchLimit, kPitchLimit);
    o.phi_m += h * d.phi;
    return o;
}

}  // namespace

MissileState missile_step(const MissileState& m, const MissileParams& p, const Vec3& target_pos,
                          const Vec3& target_vel, double dt) {
    if (!m.in_flight()) return m;
    if (!(dt > 0.0)) throw ConfigError("missile_step: dt must be positive");

    MissileState out = m;
    const Vec3 pos0 = m.position();
    const Vec3 vel0 = m.velocity();
    if ((target_pos - pos0).norm() < p.hit_radius) {
        out.miss_distance = std::min(out.miss_distance, (target_pos - pos0).norm());
        out.status = MissileStatus::Hit;
        return out;
    }

    double n_mc = m.last_nmc;
    double n_mh = m.last_nmh;
    try {
        const RelativeGeometry geom = relative_geometry(pos0, vel0, target_pos, target_vel);
        const double gamma_t = std::atan2(target_vel.z, std::hypot(target_vel.x, target_vel.y));
        std::tie(n_mc, n_mh) = pn_command(geom, m.vm, gamma_t, p);
    } catch (const GuidanceError&) {
        // hold the previous command through the singular geometry
    }
    out.last_nmc = n_mc;
    out.last_nmh = n_mh;

    const double t = m.t_since_launch;
    const AircraftRates k1 = missile_derivatives(m, p, t, n_mc, n_mh);
    const AircraftRates k2 = missile_derivatives(advance(m, k1, 0.5 * dt), p, t + 0.5 * dt, n_mc, n_mh);
    const AircraftRates k3 = missile_derivatives(advance(m, k2, 0.5 * dt), p, t + 0.5 * dt, n_mc, n_mh);
    const AircraftRates k4 = missile_derivatives(advance(m, k3, dt), p, t + dt, n_mc, n_mh);
    const double w = dt / 6.0;
    out.xm += w * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    out.ym += w * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    out.zm += w * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
    out.vm += w * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    out.gamma_m = std::clamp(out.gamma_m + w * (k1.gamma + 2.0 * k2.gamma + 2.0 * k3.gamma + k4.gamma),
                             -kPitchLimit, kPitchLimit);
    out.phi_m = wrap_angle(out.phi_m + w * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi));
    out.t_since_launch = t + dt;

    const double miss = closest_approach(pos0, out.position(), target_pos, target_pos + dt * target_vel);
    out.miss_distance = std::min(out.miss_distance, miss);
    if (miss < p.hit_radius)
        out.status = MissileStatus::Hit;
    else if (out.t_since_launch > p.max_flight_time || out.vm < p.min_speed)
        out.status = MissileStatus::Expired;
    return out;
}

}  // namespace dogfight
