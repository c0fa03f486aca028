#include "dogfight/selfcheck.hpp"

#include <cmath>
#include <cstdio>

#include "dogfight/checkpoint.hpp"
#include "dogfight/config.hpp"
#include "dogfight/kernels.hpp"

namespace dogfight {

namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// Largest |analytic - numeric| / max(1, |numeric|) over every parameter.
double gradient_error(MlpParams p, std::span<const double> inputs, std::size_t rows, const LossFn& loss) {
    const auto analytic = backprop(p, inputs, rows, loss).grad;
    const auto a_tensors = analytic.tensors();
    auto tensors = p.tensors();
    double worst = 0.0;
    constexpr double h = 1e-5;
    for (std::size_t t = 0; t < tensors.size(); ++t) {
        for (std::size_t i = 0; i < tensors[t].size(); ++i) {
            const double saved = tensors[t][i];
            tensors[t][i] = saved + h;
            const double up = backprop(p, inputs, rows, loss).loss;
            tensors[t][i] = saved - h;
            const double down = backprop(p, inputs, rows, loss).loss;
            tensors[t][i] = saved;
            const double numeric = (up - down) / (2 * h);
            worst = std::max(worst, std::abs(a_tensors[t][i] - numeric) / std::max(1.0, std::abs(numeric)));
        }
    }
    return worst;
}

Minibatch small_batch(const MlpParams& actor, Rng& rng, std::size_t rows) {
    Minibatch b;
    b.rows = rows;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t k = 0; k < kObservationSize; ++k) b.obs.push_back(rng.uniform(-1.0, 1.0));
    const auto mean = forward(actor, b.obs, rows);
    // Offsets keep every ratio well away from the clip edges at 0.8 and 1.2.
    const double offsets[] = {-0.5, 0.0, 0.05, 0.5};
    for (std::size_t r = 0; r < rows; ++r) {
        std::array<double, kActionSize> a{};
        for (std::size_t k = 0; k < kActionSize; ++k) {
            a[k] = mean[r * kActionSize + k] + rng.normal();
            b.actions.push_back(a[k]);
        }
        const double lp = gaussian_log_prob(std::span(mean).subspan(r * kActionSize, kActionSize),
                                            actor.log_std, a);
        b.old_log_prob.push_back(lp + offsets[r % 4]);
        b.advantages.push_back(r % 3 == 0 ? -1.0 : 0.7);
        b.value_targets.push_back(rng.uniform(-1.0, 1.0));
    }
    return b;
}

CheckResult gradient_checks() {
    Rng rng(11);
    const std::vector<std::size_t> actor_sizes{kObservationSize, 8, 8, kActionSize};
    const std::vector<std::size_t> critic_sizes{kObservationSize, 8, 8, 1};
    MlpParams actor = init_params(5, actor_sizes, true);
    for (std::size_t i = 0; i < actor.log_std.size(); ++i) actor.log_std[i] = -0.3 + 0.2 * double(i);
    const MlpParams critic = init_params(6, critic_sizes, false);
    const Minibatch batch = small_batch(actor, rng, 12);

    const double e_surr = gradient_error(actor, batch.obs, batch.rows, surrogate_loss(batch, 0.2));
    const double e_ent = gradient_error(actor, batch.obs, batch.rows, entropy_loss(0.01));
    const double e_val = gradient_error(critic, batch.obs, batch.rows, value_loss(batch));
    const double worst = std::max({e_surr, e_ent, e_val});
    return {"gradient check (surrogate, entropy, value)", worst < 1e-4,
            fmt("worst relative error %.3g", worst)};
}

CheckResult trim_check() {
    AircraftState s{0, 0, 5000, 300, 0, 0};
    const ControlInput trim{0.0, 1.0, 0.0};
    for (int i = 0; i < 500; ++i) s = rk4_step(s, trim, kPhysicsDt);
    const double dz = std::abs(s.z - 5000.0);
    const double dx = std::abs(s.x - 3000.0);
    return {"level trim holds altitude and speed", dz < 1e-6 && std::abs(s.v - 300.0) < 1e-9 && dx < 1e-6,
            fmt("altitude drift %.3g m, range error %.3g m", dz, dx)};
}

CheckResult missile_check() {
    const AircraftState shooter{0, 0, 5000, 300, 0, 0};
    AircraftState target{5000, 0, 5000, 300, 0, kPi};
    MissileParams p;
    MissileState m = launch_missile(shooter, Side::Blue);
    const ControlInput trim{0.0, 1.0, 0.0};
    while (m.in_flight()) {
        m = missile_step(m, p, target.position(), target.velocity(), kPhysicsDt);
        target = rk4_step(target, trim, kPhysicsDt);
    }
    return {"head-on missile hits within 8 s", m.status == MissileStatus::Hit && m.t_since_launch <= 8.0,
            fmt("time %.3f s, miss distance %.3f m", m.t_since_launch, m.miss_distance)};
}

CheckResult kernel_check() {
    Rng rng(3);
    const std::size_t rows = 64, in = 256, out = 256;
    std::vector<double> x(rows * in), w(in * out), b(out);
    for (auto& v : x) v = rng.normal();
    for (auto& v : w) v = rng.normal();
    for (auto& v : b) v = rng.normal();
    std::vector<double> y_serial(rows * out), y_omp(rows * out);
    kernels::serial::dense_forward(x, rows, in, w, b, out, y_serial);
    kernels::omp::dense_forward(x, rows, in, w, b, out, y_omp);
    return {"serial and parallel kernels agree", y_serial == y_omp, ""};
}

CheckResult format_check() {
    AgentCheckpoint c;
    c.iteration = 3;
    c.seed = 99;
    c.agent = Agent::random(4);
    c.config_hash = config_hash(RunConfig{});
    c.seal();
    const AgentCheckpoint back = decode_checkpoint(encode_checkpoint(c));
    const RunConfig cfg = RunConfig::smoke();
    const bool config_ok = parse_config(serialize_config(cfg)) == cfg;
    const bool ckpt_ok = back.agent == c.agent && back.iteration == 3 && back.seed == 99 &&
                         back.config_hash == c.config_hash;
    return {"checkpoint and config round trips", config_ok && ckpt_ok, ""};
}

}  // namespace

std::vector<CheckResult> run_selfcheck() {
    std::vector<CheckResult> out;
    for (auto* check : {&gradient_checks, &trim_check, &missile_check, &kernel_check, &format_check}) {
        try {
            out.push_back(check());
        } catch (const std::exception& e) {
            out.push_back({"check threw", false, e.what()});
        }
    }
    return out;
}

}  // namespace dogfight
