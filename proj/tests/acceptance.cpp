// Acceptance checks, one PASS/FAIL line per numbered criterion.
//
//   acceptance --cli <path to dogfight> --workdir <dir>            smoke profile for the learning trend
//   acceptance --cli <path> --workdir <dir> --full                 runs the reduced protocol (hours)
//   acceptance --cli <path> --workdir <dir> --trend-runs <dir>     judges existing reduced-protocol runs
//
// Exit status is 0 only if every criterion passed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include <sys/wait.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "dogfight/mcts.hpp"
#include "dogfight/ppo.hpp"
#include "dogfight/selfplay.hpp"

using namespace dogfight;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ---------------------------------------------------------------- 1. dynamics

Verdict dynamics_invariants() {
    const auto t0 = Clock::now();
    AircraftState s{0, 0, 1000, 300, 0, 0};
    for (int i = 0; i < 5000; ++i) s = rk4_step(s, {0, 1, 0}, 0.02);
    const double dz = std::abs(s.z - 1000.0), dv = std::abs(s.v - 300.0);

    // Single-step error against 16 substeps, for dt and dt/2 in a climbing turn.
    // Steps are long and z starts at 0 so truncation error stays above round-off.
    const AircraftState s0{0, 0, 0, 300, 0.1, 0.3};
    const ControlInput c{0.3, 3, 0.8};
    auto run = [&](double dt, int n) {
        AircraftState a = s0;
        for (int i = 0; i < n; ++i) a = rk4_step(a, c, dt);
        return a;
    };
    auto err = [](const AircraftState& a, const AircraftState& b) {
        return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z), std::abs(a.v - b.v),
                         std::abs(a.gamma - b.gamma), std::abs(a.phi - b.phi)});
    };
    const double dt = 0.5;
    const double factor = err(run(dt, 1), run(dt / 16, 16)) / err(run(dt / 2, 1), run(dt / 32, 16));
    const double secs = seconds_since(t0);
    return {dz < 1e-6 && dv < 1e-6 && factor >= 8.0 && secs < 1.0,
            fmt("|dz|=%.2e |dv|=%.2e over 100 s, halving factor %.2f, %.3f s", dz, dv, factor, secs)};
}

// ------------------------------------------------------- 2. missile constants

Verdict missile_constants() {
    const MissileParams p;
    const double hand = 0.5 * 0.607 * 900.0 * 900.0 * 0.0324 * 0.9;  // 7168.5486
    const double rel = std::abs(drag_of(p, 900.0) - hand) / hand;
    const bool thrust_ok = thrust_at(p, 12.0) == p.p0 && thrust_at(p, std::nextafter(12.0, 13.0)) == 0.0 &&
                           thrust_at(p, 11.999) == p.p0;
    const bool mass_ok = mass_at(p, 0.0) == 170.0 && mass_at(p, 6.0) == 128.0 && mass_at(p, 20.0) == 86.0;
    return {rel < 1e-9 && thrust_ok && mass_ok,
            fmt("Qm(900)=%.6f vs %.6f (rel %.1e), thrust cutoff at 12.0 s %s", drag_of(p, 900.0), hand, rel,
                thrust_ok ? "exact" : "wrong")};
}

// ------------------------------------------------------------ 3. guidance

struct Shot {
    MissileStatus status;
    double miss;
    double time;
    double secs;
};

Shot shoot(AircraftState shooter, AircraftState target) {
    const auto t0 = Clock::now();
    const MissileParams p;
    MissileState m = launch_missile(shooter, Side::Blue);
    while (m.in_flight()) {
        m = missile_step(m, p, target.position(), target.velocity(), kPhysicsDt);
        target = rk4_step(target, {0, 1, 0}, kPhysicsDt);
    }
    return {m.status, m.miss_distance, m.t_since_launch, seconds_since(t0)};
}

Verdict guidance_closes() {
    const Shot head = shoot({0, 0, 5000, 300, 0, 0}, {5000, 0, 5000, 300, 0, kPi});
    const Shot cross = shoot({0, 0, 5000, 300, 0, 0}, {4000, 0, 5000, 300, 0, kPi / 2});
    const bool ok = head.status == MissileStatus::Hit && head.miss < 30.0 && head.secs < 1.0 &&
                    cross.status == MissileStatus::Hit && cross.secs < 1.0;
    return {ok, fmt("head-on miss %.2f m at %.2f s; crossing miss %.2f m at %.2f s", head.miss, head.time,
                    cross.miss, cross.time)};
}

// ------------------------------------------------------------ 4. gradients

double loss_value(const MlpParams& p, const Minibatch& b, const LossFn& f) {
    const auto out = forward(p, b.obs, b.rows);
    std::vector<double> d(out.size()), dl(p.log_std.size());
    return f(out, b.rows, p.log_std, d, dl);
}

double worst_fd_error(MlpParams p, const Minibatch& b, const LossFn& f) {
    const auto g = backprop(p, b.obs, b.rows, f).grad;
    const auto gt = g.tensors();
    auto pt = p.tensors();
    double worst = 0.0;
    for (std::size_t t = 0; t < pt.size(); ++t)
        for (std::size_t i = 0; i < pt[t].size(); ++i) {
            const double keep = pt[t][i], h = 1e-5;
            pt[t][i] = keep + h;
            const double up = loss_value(p, b, f);
            pt[t][i] = keep - h;
            const double down = loss_value(p, b, f);
            pt[t][i] = keep;
            const double num = (up - down) / (2 * h);
            worst = std::max(worst, std::abs(gt[t][i] - num) / std::max(1.0, std::abs(num)));
        }
    return worst;
}

Verdict gradient_correctness() {
    const std::vector<std::size_t> actor_sizes{kObservationSize, 8, 8, kActionSize};
    const std::vector<std::size_t> critic_sizes{kObservationSize, 8, 8, 1};
    auto actor = init_params(101, actor_sizes, true);
    actor.log_std = {-0.6, 0.2, -0.1, 0.4};
    const auto critic = init_params(102, critic_sizes, false);
    Rng rng(103);
    Minibatch b;
    b.rows = 24;
    for (std::size_t i = 0; i < b.rows * kObservationSize; ++i) b.obs.push_back(rng.uniform(0, 1));
    const auto mean = forward(actor, b.obs, b.rows);
    for (std::size_t r = 0; r < b.rows; ++r) {
        std::vector<double> a(kActionSize);
        for (std::size_t k = 0; k < kActionSize; ++k) a[k] = mean[r * kActionSize + k] + rng.normal();
        b.actions.insert(b.actions.end(), a.begin(), a.end());
        const double lp =
            gaussian_log_prob(std::span(mean).subspan(r * kActionSize, kActionSize), actor.log_std, a);
        const double shifts[] = {-0.45, -0.05, 0.0, 0.08, 0.45};  // ratios in and out of [0.8, 1.2]
        b.old_log_prob.push_back(lp + shifts[r % 5]);
        b.advantages.push_back(rng.normal());
        b.value_targets.push_back(rng.uniform(-1, 1));
    }
    const double e_s = worst_fd_error(actor, b, surrogate_loss(b, 0.2));
    const double e_v = worst_fd_error(critic, b, value_loss(b));
    const double e_e = worst_fd_error(actor, b, entropy_loss(0.01));
    const double worst = std::max({e_s, e_v, e_e});
    return {worst < 1e-4, fmt("worst relative error: surrogate %.1e, value %.1e, entropy %.1e", e_s, e_v, e_e)};
}

// ------------------------------------------------------------- 5. PPO sanity

double bandit_mean(std::uint64_t seed) {
    TrainConfig cfg;
    cfg.batch_size = 128;
    Learner actor(init_params(seed * 7 + 1, actor_layer_sizes(), true));
    Learner critic(init_params(seed * 7 + 2, critic_layer_sizes(), false));
    Rng rng(seed);
    Observation obs{};
    obs.fill(0.5);
    for (int it = 0; it < 50; ++it) {
        RolloutBuffer buf;
        const double v = critic_value(critic.params, obs);
        for (std::size_t i = 0; i < cfg.batch_size; ++i) {
            const auto s = sample_and_logprob(actor.params, obs, rng);
            const double r = s.action[0] > 0.0 ? 1.0 : 0.0;
            Transition t;
            t.obs = obs;
            t.action = s.action;
            t.log_prob = s.log_prob;
            t.reward = r;
            t.value = v;
            t.done = true;
            buf.append_episode({t}, r);
        }
        compute_advantages(buf, cfg);
        train_iteration(actor, critic, buf, cfg, rng);
    }
    return policy_mean(actor.params, obs)[0];
}

Verdict ppo_sanity() {
    std::string detail = "bandit means";
    int converged = 0;
    for (std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
        const double m = bandit_mean(seed);
        converged += m > 0.5;
        detail += fmt(" %.3f", m);
    }

    TrainConfig cfg;
    cfg.batch_size = 64;
    cfg.entropy_coeff = 0.0;
    Learner actor(init_params(5, actor_layer_sizes(), true));
    Learner critic(init_params(6, critic_layer_sizes(), false));
    const MlpParams before = actor.params;
    Rng rng(7);
    RolloutBuffer buf;
    for (int i = 0; i < 256; ++i) {
        Transition t;
        for (auto& o : t.obs) o = rng.uniform(0, 1);
        const auto s = sample_and_logprob(actor.params, t.obs, rng);
        t.action = s.action;
        t.log_prob = s.log_prob;
        t.done = true;
        t.advantage = 0.0;
        buf.append_episode({t}, 0.0);
    }
    train_iteration(actor, critic, buf, cfg, rng);
    const bool unchanged = actor.params == before;
    detail += unchanged ? "; zero-advantage actor bit-unchanged" : "; zero-advantage actor CHANGED";
    return {converged == 3 && unchanged, detail};
}

// ------------------------------------------------------------------ 6. MCTS

Verdict mcts_properties() {
    const auto actor = init_params(21, actor_layer_sizes(), true);
    const auto opponent = init_params(22, actor_layer_sizes(), true);
    const auto critic = init_params(23, critic_layer_sizes(), false);
    const SearchModel model{Side::Blue, &actor, &opponent, critic_value_fn(critic), {}};

    bool sums_ok = true;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const auto r = run_search(reset(seed, {}), model, SearchConfig{}, rng);
        sums_ok = sums_ok && std::accumulate(r.visits.begin(), r.visits.end(), std::int64_t{0}) == 20 &&
                  std::abs(std::accumulate(r.priors.begin(), r.priors.end(), 0.0) - 1.0) < 1e-12;
    }

    int dominant = 0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        const auto a = init_params(500 + trial, actor_layer_sizes(), true);
        const auto o = init_params(900 + trial, actor_layer_sizes(), true);
        const auto s = reset(trial + 77, {});
        Rng rng(trial * 13 + 5);
        Rng probe = rng;
        const auto mean = policy_mean(a, observe(s, Side::Blue));
        std::vector<ActionCommand> cands;
        for (int i = 0; i < 9; ++i) cands.push_back(sample_from_mean(mean, a.log_std, probe).action);
        const std::size_t k = trial % 9;
        EngagementState target = s;
        env_step(target, cands[k], policy_mean(o, observe(s, Side::Red)));
        const SearchModel rigged{Side::Blue, &a, &o,
                                 [&target](const EngagementState& st, Side) { return st == target ? 1.0 : 0.0; },
                                 {}};
        SearchConfig cfg;
        cfg.max_depth = 1;
        dominant += run_search(s, rigged, cfg, rng).chosen == k;
    }

    bool degenerate_ok = true;
    SearchConfig one;
    one.num_actions = 1;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto s = reset(seed + 300, {});
        Rng a(seed), b(seed);
        const auto r = run_search(s, model, one, a);
        const auto raw = sample_and_logprob(actor, observe(s, Side::Blue), b);
        degenerate_ok = degenerate_ok && r.action == raw.action;
    }
    return {sums_ok && dominant == 100 && degenerate_ok,
            fmt("sum N = 20 and sum P = 1: %s; rigged dominance %d/100; num_actions=1 equals raw sampling: %s",
                sums_ok ? "yes" : "no", dominant, degenerate_ok ? "yes" : "no")};
}

// --------------------------------------------------- 7 and 8. training runs

struct RunOutput {
    int exit_code = -1;
    double seconds = 0.0;
    fs::path dir;
};

RunOutput train_run(const std::string& cli, const fs::path& dir, const std::string& flags) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cmd = "\"" + cli + "\" train " + flags + " --out \"" + dir.string() + "\" > \"" +
                            (dir / "stdout.txt").string() + "\" 2>&1";
    const auto t0 = Clock::now();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, seconds_since(t0), dir};
}

std::vector<nlohmann::json> read_metrics(const fs::path& dir) {
    std::ifstream f(dir / "metrics.jsonl");
    std::vector<nlohmann::json> rows;
    for (std::string line; std::getline(f, line);)
        if (!line.empty()) rows.push_back(nlohmann::json::parse(line));
    return rows;
}

int wins_between(const std::vector<nlohmann::json>& rows, int first, int last) {
    int w = 0;
    for (const auto& r : rows) {
        const int it = r["iter"].get<int>();
        if (it >= first && it <= last) w += r["wins"].get<int>();
    }
    return w;
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Verdict learning_trend(const fs::path& runs) {
    int mcts_early = 0, mcts_late = 0;
    bool ablation_ok = true;
    std::string detail;
    for (int seed : {1, 2, 3}) {
        const auto m = read_metrics(runs / ("mcts_seed" + std::to_string(seed)));
        const auto r = read_metrics(runs / ("nomcts_seed" + std::to_string(seed)));
        if (m.size() < 50 || r.size() < 50)
            return {false, fmt("seed %d: incomplete runs in %s", seed, runs.string().c_str())};
        const int me = wins_between(m, 1, 10), ml = wins_between(m, 41, 50);
        const int re = wins_between(r, 1, 10), rl = wins_between(r, 41, 50);
        mcts_early += me;
        mcts_late += ml;
        ablation_ok = ablation_ok && rl <= re + 2;
        detail += fmt("seed %d: mcts %d->%d, no-mcts %d->%d; ", seed, me, ml, re, rl);
    }
    // (a) is judged on totals across seeds, (b) per seed.
    const bool a = mcts_late > mcts_early;
    detail += fmt("(a) total %d->%d %s, (b) %s", mcts_early, mcts_late, a ? "ok" : "FAILED",
                  ablation_ok ? "ok" : "FAILED");
    return {a && ablation_ok, detail};
}

Verdict random_agents_draw() {
    int draws = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto r = play_match(Agent::random(10000 + seed), Agent::random(20000 + seed), MatchOptions{}, seed);
        draws += r.record.outcome == MatchOutcome::Draw;
    }
    return {draws > 90, fmt("%d/100 draws", draws)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::string cli_path;
    std::string workdir = "acceptance_runs";
    std::string trend_runs;
    bool full = false;
    app.add_option("--cli", cli_path, "dogfight executable")->required();
    app.add_option("--workdir", workdir, "scratch directory for training runs");
    app.add_option("--trend-runs", trend_runs, "directory with mcts_seedN / nomcts_seedN reduced runs");
    app.add_flag("--full", full, "run the reduced protocol for the learning trend (hours)");
    CLI11_PARSE(app, argc, argv);
    const fs::path work(workdir);

    int failures = 0;
    auto report = [&failures](int n, const std::string& name, const std::function<Verdict()>& check) {
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        std::printf("[%s] %d. %s: %s\n", v.pass ? "PASS" : "FAIL", n, name.c_str(), v.detail.c_str());
        std::fflush(stdout);
        failures += !v.pass;
    };

    report(1, "dynamics invariants", dynamics_invariants);
    report(2, "missile drag/mass/thrust constants", missile_constants);
    report(3, "PN guidance closes", guidance_closes);
    report(4, "gradient correctness", gradient_correctness);
    report(5, "PPO sanity", ppo_sanity);
    report(6, "MCTS properties", mcts_properties);

    // Criterion 8 needs two smoke runs; the first doubles as the smoke gate of criterion 7.
    RunOutput first, second;
    auto smoke_pair = [&]() {
        first = train_run(cli_path, work / "smoke_a", "--smoke --seed 7");
        second = train_run(cli_path, work / "smoke_b", "--smoke --seed 7");
    };
    smoke_pair();

    if (full) {
        report(7, "learning trend, reduced protocol", [&]() {
            const fs::path runs = work / "reduced";
            for (int seed : {1, 2, 3}) {
                const auto s = std::to_string(seed);
                const auto m = train_run(cli_path, runs / ("mcts_seed" + s), "--reduced --seed " + s);
                const auto r = train_run(cli_path, runs / ("nomcts_seed" + s), "--reduced --no-mcts --seed " + s);
                if (m.exit_code != 0 || r.exit_code != 0) return Verdict{false, "a training run failed"};
            }
            return learning_trend(runs);
        });
    } else if (!trend_runs.empty()) {
        report(7, "learning trend, reduced protocol", [&]() { return learning_trend(trend_runs); });
    } else {
        report(7, "learning pipeline, smoke profile", [&]() {
            const auto rows = read_metrics(first.dir);
            bool finite = true;
            for (const auto& r : rows)
                for (const char* k : {"surrogate", "value_loss", "entropy", "clip_fraction"})
                    finite = finite && r[k].is_number() && std::isfinite(r[k].get<double>());
            const bool ok = first.exit_code == 0 && rows.size() == 10 && finite && first.seconds < 900.0;
            return Verdict{ok, fmt("10-iteration smoke run exit %d, %zu metrics rows, %.0f s (< 900 s); "
                                   "the trend itself needs --full or --trend-runs",
                                   first.exit_code, rows.size(), first.seconds)};
        });
    }

    report(8, "determinism of train --seed 7 --smoke", [&]() {
        const std::string a = read_file(first.dir / "metrics.jsonl");
        const std::string b = read_file(second.dir / "metrics.jsonl");
        const bool ok = first.exit_code == 0 && second.exit_code == 0 && !a.empty() && a == b;
        return Verdict{ok, fmt("metrics.jsonl %zu and %zu bytes, %s", a.size(), b.size(),
                               a == b ? "byte-identical" : "DIFFERENT")};
    });
    report(9, "untrained agents draw", random_agents_draw);

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
