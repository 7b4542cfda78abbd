#include "ruin/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace ruin {

namespace {

struct Xoshiro256p {
    std::uint64_t s[4];

    static std::uint64_t splitmix(std::uint64_t& x) {
        x += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    explicit Xoshiro256p(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : s) w = splitmix(x);
        if (!(s[0] | s[1] | s[2] | s[3])) s[0] = 0x1ULL;
    }

    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::uint64_t next() {
        const std::uint64_t out = s[0] + s[3];
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return out;
    }

    double uniform01() { return double(next() >> 11) * 0x1.0p-53; }          // [0, 1)
    double uniform_pos() { return (double(next() >> 11) + 1.0) * 0x1.0p-53; } // (0, 1]
};

// Marsaglia-Tsang ziggurat, 128 layers; one generator draw per sample away
// from the tail. Tables are built once at startup from the layer recursion.
struct ZigguratTables {
    std::uint32_t kn[128];
    double wn[128], fn[128];

    ZigguratTables() {
        const double m1 = 2147483648.0;
        double dn = 3.442619855899, tn = dn;
        const double vn = 9.91256303526217e-3;
        const double q = vn / std::exp(-0.5 * dn * dn);
        kn[0] = std::uint32_t((dn / q) * m1);
        kn[1] = 0;
        wn[0] = q / m1;
        wn[127] = dn / m1;
        fn[0] = 1.0;
        fn[127] = std::exp(-0.5 * dn * dn);
        for (int i = 126; i >= 1; --i) {
            dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
            kn[i + 1] = std::uint32_t((dn / tn) * m1);
            tn = dn;
            fn[i] = std::exp(-0.5 * dn * dn);
            wn[i] = dn / m1;
        }
    }
};

const ZigguratTables g_zig;

struct NormalSampler {
    Xoshiro256p& gen;

    double operator()() {
        for (;;) {
            const std::int32_t hz = std::int32_t(gen.next() >> 32);
            const std::uint32_t iz = std::uint32_t(hz) & 127u;
            const std::uint32_t az =
                hz >= 0 ? std::uint32_t(hz) : std::uint32_t(-(std::int64_t)hz);
            if (az < g_zig.kn[iz]) return hz * g_zig.wn[iz];

            if (iz == 0) {
                // tail beyond R = 3.442619855899
                constexpr double r_inv = 0.29047645161474317;
                constexpr double r = 3.442619855899;
                double x, y;
                do {
                    x = -std::log(gen.uniform_pos()) * r_inv;
                    y = -std::log(gen.uniform_pos());
                } while (y + y < x * x);
                return hz > 0 ? r + x : -r - x;
            }
            const double x = hz * g_zig.wn[iz];
            if (g_zig.fn[iz] + gen.uniform01() * (g_zig.fn[iz - 1] - g_zig.fn[iz]) <
                std::exp(-0.5 * x * x))
                return x;
            // otherwise resample from scratch
        }
    }
};

// per-path stream derived from (seed, path index): results are independent
// of how paths are divided among threads
Xoshiro256p path_stream(std::uint64_t seed, long long path) {
    return Xoshiro256p(seed + 0x9E3779B97F4A7C15ULL * (std::uint64_t(path) + 1ULL));
}

double regime_drift(Regime regime, const MarketParams& p, double w, double pi) {
    switch (regime) {
        case Regime::Borrow: {
            const double lend = std::max(w - pi, 0.0);
            const double borrow = std::max(pi - w, 0.0);
            return p.r * lend - p.b * borrow + p.mu * pi;
        }
        default:
            return p.r * (w - pi) + p.mu * pi;
    }
}

struct ChunkTally {
    long long ruined = 0, died = 0, censored = 0, censored_safe = 0;
    double time_sum = 0.0;
};

// pi = fraction * w makes both step coefficients affine in wealth
struct AffineStepper {
    double drift_w_dt, drift_0_dt, vol_w_sqdt;
    double advance(double w, double z, double& vol_sqdt) const {
        vol_sqdt = vol_w_sqdt * w;
        return w + drift_w_dt * w + drift_0_dt + vol_sqdt * z;
    }
};

// tabulated allocation: one-step drift and diffusion interpolated from a
// uniform wealth grid; flat below the front node, the last segment extends
// linearly (matching Strategy::at)
struct TableStepper {
    double lo, inv_dx;
    std::size_t last;
    const double* drift_dt;
    const double* vol_sqdt_tab;

    double advance(double w, double z, double& vol_sqdt) const {
        double u = (w - lo) * inv_dx;
        std::size_t i;
        if (u <= 0.0) {
            i = 0;
            u = 0.0;
        } else if (u >= double(last)) {
            i = last - 1;
        } else {
            i = std::size_t(u);
        }
        const double t = u - double(i);
        const double d = drift_dt[i] + t * (drift_dt[i + 1] - drift_dt[i]);
        vol_sqdt = vol_sqdt_tab[i] + t * (vol_sqdt_tab[i + 1] - vol_sqdt_tab[i]);
        return w + d + vol_sqdt * z;
    }
};

// binary-search fallback for non-uniform user tables
struct IrregularTableStepper {
    const std::vector<double>* w_nodes;
    const double* drift_dt;
    const double* vol_sqdt_tab;

    double advance(double w, double z, double& vol_sqdt) const {
        const auto& ws = *w_nodes;
        std::size_t i;
        double t;
        if (w <= ws.front()) {
            i = 0;
            t = 0.0; // flat below the front node
        } else {
            if (w >= ws.back())
                i = ws.size() - 2; // extend the last segment linearly
            else
                i = std::size_t(std::upper_bound(ws.begin(), ws.end(), w) - ws.begin()) - 1;
            t = (w - ws[i]) / (ws[i + 1] - ws[i]);
        }
        const double d = drift_dt[i] + t * (drift_dt[i + 1] - drift_dt[i]);
        vol_sqdt = vol_sqdt_tab[i] + t * (vol_sqdt_tab[i + 1] - vol_sqdt_tab[i]);
        return w + d + vol_sqdt * z;
    }
};

struct SimPlan {
    double dt;
    double horizon;
    double w_start;
    double ruin_level;
    bool has_safe;
    double safe;
    std::uint64_t seed;
    long long n_paths;
    int threads;
    double lambda_inverse;
};

constexpr long long kChunk = 16384;

struct Lane {
    Xoshiro256p gen{0};
    double W = 0;
    double taud = 0;
    long long k = 0;
    long long k_stop = 0;
    bool dies = false;
    bool active = false;
};

template <typename Stepper>
void run_paths(const SimPlan& plan, const Stepper& stepper, std::vector<ChunkTally>& tallies) {
    const long long n_chunks = (plan.n_paths + kChunk - 1) / kChunk;
    const double dt = plan.dt;
    const double ruin_level = plan.ruin_level;
    const double safe = plan.safe;
    const bool has_safe = plan.has_safe;

    const auto run_chunk = [&](long long chunk) {
        ChunkTally tally;
        const long long first = chunk * kChunk;
        const long long last = std::min(first + kChunk, plan.n_paths);

        // returns false when the path absorbs before taking any step
        const auto start_path = [&](Lane& ln, long long path) -> bool {
            ln.gen = path_stream(plan.seed, path);
            const double u = ln.gen.uniform_pos();
            ln.W = plan.w_start;
            if (ln.W <= ruin_level) {
                ++tally.ruined;
                return false;
            }
            if (has_safe && ln.W >= safe) {
                ++tally.censored;
                ++tally.censored_safe;
                return false;
            }
            ln.taud = -std::log(u) * plan.lambda_inverse;
            ln.dies = ln.taud <= plan.horizon;
            const double t_stop = ln.dies ? ln.taud : plan.horizon;
            ln.k_stop = (long long)(t_stop / dt) + 1;
            ln.k = 0;
            return true;
        };

        long long next_path = first;
        const auto pull = [&](Lane& ln) {
            while (next_path < last) {
                if (start_path(ln, next_path++)) {
                    ln.active = true;
                    return;
                }
            }
            ln.active = false;
        };

        // one Euler step plus absorption checks; true once the path is done
        const auto advance_one = [&](Lane& ln) -> bool {
            if (ln.k + 1 >= ln.k_stop) {
                if (ln.dies) {
                    ++tally.died;
                    tally.time_sum += ln.taud;
                } else {
                    ++tally.censored;
                    tally.time_sum += plan.horizon;
                }
                return true;
            }
            ++ln.k;
            double vol_sqdt = 0.0;
            const double W_prev = ln.W;
            NormalSampler normal{ln.gen};
            ln.W = stepper.advance(W_prev, normal(), vol_sqdt);
            if (ln.W <= ruin_level) {
                ++tally.ruined;
                tally.time_sum += double(ln.k) * dt;
                return true;
            }
            // Brownian-bridge test for a ruin crossing inside the step;
            // without it the heavily leveraged regimes keep an O(sqrt(dt))
            // downward bias at the boundary
            const double a = (W_prev - ruin_level) * (ln.W - ruin_level);
            const double var_dt = vol_sqdt * vol_sqdt;
            if (a < 20.0 * var_dt) {
                if (ln.gen.uniform01() < std::exp(-2.0 * a / var_dt)) {
                    ++tally.ruined;
                    tally.time_sum += double(ln.k) * dt;
                    return true;
                }
            }
            if (has_safe && ln.W >= safe) {
                // the allocation (hence the diffusion) vanishes at the safe
                // level, so no bridge test is needed on this side
                ++tally.censored;
                ++tally.censored_safe;
                tally.time_sum += double(ln.k) * dt;
                return true;
            }
            return false;
        };

        // two interleaved paths per iteration keep both dependency chains in
        // flight; per-path streams make the pairing invisible in the results
        Lane lanes[2];
        pull(lanes[0]);
        pull(lanes[1]);
        while (lanes[0].active && lanes[1].active) {
            const bool done0 = advance_one(lanes[0]);
            const bool done1 = advance_one(lanes[1]);
            if (done0) pull(lanes[0]);
            if (done1) pull(lanes[1]);
        }
        for (auto& ln : lanes)
            while (ln.active) {
                if (advance_one(ln)) pull(ln);
            }

        tallies[std::size_t(chunk)] = tally;
    };

    if (plan.threads == 1) {
        for (long long chunkIdx = 0; chunkIdx < n_chunks; ++chunkIdx) run_chunk(chunkIdx);
        return;
    }
    std::atomic<long long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(plan.threads));
    for (int tIdx = 0; tIdx < plan.threads; ++tIdx)
        pool.emplace_back([&] {
            for (;;) {
                const long long chunkIdx = next.fetch_add(1);
                if (chunkIdx >= n_chunks) return;
                run_chunk(chunkIdx);
            }
        });
    for (auto& th : pool) th.join();
}

} // namespace

Strategy Strategy::fraction_of_wealth(double fraction) {
    Strategy s;
    s.kind_ = Kind::Fraction;
    s.fraction_ = fraction;
    return s;
}

Strategy Strategy::from_table(std::vector<double> wealth, std::vector<double> allocation) {
    if (wealth.size() < 2 || wealth.size() != allocation.size())
        throw StrategyError("strategy table needs at least two matched points");
    for (std::size_t i = 1; i < wealth.size(); ++i)
        if (!(wealth[i] > wealth[i - 1]))
            throw StrategyError("strategy table wealth grid must be increasing");
    Strategy s;
    s.kind_ = Kind::Table;
    s.w_ = std::move(wealth);
    s.pi_ = std::move(allocation);
    const double dx = s.w_[1] - s.w_[0];
    s.uniform_ = true;
    for (std::size_t i = 1; i + 1 < s.w_.size(); ++i)
        if (std::abs((s.w_[i + 1] - s.w_[i]) - dx) > 1e-9 * std::max(1.0, dx)) {
            s.uniform_ = false;
            break;
        }
    s.lo_ = s.w_.front();
    s.inv_dx_ = 1.0 / dx;
    return s;
}

Strategy Strategy::from_solution(const RuinSolution& solution, int points) {
    if (points < 2) throw StrategyError("strategy table needs at least two points");
    const double hi = solution.safe_level();
    std::vector<double> w(points), pi(points);
    for (int i = 0; i < points; ++i) {
        w[i] = hi * double(i) / double(points - 1);
        pi[i] = solution.pistar(w[i]);
    }
    return from_table(std::move(w), std::move(pi));
}

Strategy Strategy::from_power(const PowerSolution& solution) {
    return fraction_of_wealth(solution.investment_fraction);
}

double Strategy::at(double w) const {
    if (kind_ == Kind::Fraction) return fraction_ * w;
    if (w <= w_.front()) return pi_.front();
    if (w >= w_.back()) {
        // continue the last segment; a proportional rule extends exactly
        const std::size_t n = w_.size();
        const double slope = (pi_[n - 1] - pi_[n - 2]) / (w_[n - 1] - w_[n - 2]);
        return pi_.back() + slope * (w - w_.back());
    }
    std::size_t i;
    if (uniform_) {
        i = std::min(std::size_t((w - lo_) * inv_dx_), w_.size() - 2);
    } else {
        i = std::size_t(std::upper_bound(w_.begin(), w_.end(), w) - w_.begin()) - 1;
    }
    const double t = (w - w_[i]) / (w_[i + 1] - w_[i]);
    return pi_[i] + t * (pi_[i + 1] - pi_[i]);
}

SimResult simulate(const MarketParams& params, const ConsumptionSpec& consumption,
                   Regime regime, const SimConfig& config, const Strategy& strategy) {
    validate(params, consumption, regime);
    if (config.n_paths < 1) throw ConfigError("n_paths must be at least 1");
    if (!(config.dt > 0.0 && config.dt <= 0.1)) throw ConfigError("dt must lie in (0, 0.1]");
    const double horizon = config.max_horizon > 0.0 ? config.max_horizon : 60.0 / params.lambda;
    if (!(horizon >= 10.0 / params.lambda))
        throw ConfigError("max_horizon must be at least 10/lambda");
    if (!(config.w_start >= 0.0)) throw ConfigError("w_start must be non-negative");

    const bool constant = std::holds_alternative<ConstantConsumption>(consumption);
    const double c_rate = constant ? std::get<ConstantConsumption>(consumption).c : 0.0;
    const double p_rate = constant ? 0.0 : std::get<ProportionalConsumption>(consumption).p;
    const double ruin_level = constant ? 0.0 : std::get<ProportionalConsumption>(consumption).w0;

    if (regime == Regime::NoBorrow) {
        if (strategy.is_fraction()) {
            if (strategy.fraction() < 0.0 || strategy.fraction() > 1.0)
                throw StrategyError("no-borrow regime needs allocation fraction in [0, 1]");
        } else {
            const auto ws = strategy.table_wealth();
            const auto ps = strategy.table_allocation();
            for (std::size_t i = 0; i < ws.size(); ++i) {
                if (ps[i] < -1e-12)
                    throw StrategyError("no-borrow regime: negative allocation in table");
                if (ps[i] > ws[i] + 1e-7 * std::max(1.0, ws[i]))
                    throw StrategyError("no-borrow regime: allocation exceeds wealth in table");
            }
        }
    }

    SimPlan plan{};
    plan.dt = config.dt;
    plan.horizon = horizon;
    plan.w_start = config.w_start;
    plan.ruin_level = ruin_level;
    plan.has_safe = constant;
    plan.safe = constant ? c_rate / params.r : 0.0;
    plan.seed = config.seed;
    plan.n_paths = config.n_paths;
    plan.lambda_inverse = 1.0 / params.lambda;
    {
        long long threads = config.n_threads > 0
                                ? config.n_threads
                                : (long long)std::max(1u, std::thread::hardware_concurrency());
        const long long n_chunks = (plan.n_paths + kChunk - 1) / kChunk;
        plan.threads = int(std::max<long long>(1, std::min(threads, n_chunks)));
    }

    const double sqdt = std::sqrt(plan.dt);
    const long long n_chunks = (plan.n_paths + kChunk - 1) / kChunk;
    std::vector<ChunkTally> tallies(static_cast<std::size_t>(n_chunks));

    if (strategy.is_fraction()) {
        const double f = strategy.fraction();
        double growth;
        if (regime == Regime::Borrow && f > 1.0)
            growth = params.mu * f - params.b * (f - 1.0);
        else
            growth = params.r * (1.0 - f) + params.mu * f;
        AffineStepper st{};
        st.drift_w_dt = (growth - p_rate) * plan.dt;
        st.drift_0_dt = constant ? -c_rate * plan.dt : 0.0;
        st.vol_w_sqdt = params.sigma * f * sqdt;
        run_paths(plan, st, tallies);
    } else {
        const auto ws = strategy.table_wealth();
        const auto ps = strategy.table_allocation();
        const std::size_t nt = ws.size();
        std::vector<double> node_w(ws.begin(), ws.end());
        std::vector<double> drift_dt(nt), vol_sqdt(nt);
        for (std::size_t i = 0; i < nt; ++i) {
            const double cons = constant ? c_rate : p_rate * ws[i];
            drift_dt[i] = (regime_drift(regime, params, ws[i], ps[i]) - cons) * plan.dt;
            vol_sqdt[i] = params.sigma * ps[i] * sqdt;
        }
        if (strategy.uniform_) {
            TableStepper st{};
            st.lo = node_w.front();
            st.inv_dx = 1.0 / (node_w[1] - node_w[0]);
            st.last = nt - 1;
            st.drift_dt = drift_dt.data();
            st.vol_sqdt_tab = vol_sqdt.data();
            run_paths(plan, st, tallies);
        } else {
            IrregularTableStepper st{};
            st.w_nodes = &node_w;
            st.drift_dt = drift_dt.data();
            st.vol_sqdt_tab = vol_sqdt.data();
            run_paths(plan, st, tallies);
        }
    }

    // reduce in fixed chunk order so totals never depend on thread scheduling
    ChunkTally total;
    for (const auto& tally : tallies) {
        total.ruined += tally.ruined;
        total.died += tally.died;
        total.censored += tally.censored;
        total.censored_safe += tally.censored_safe;
        total.time_sum += tally.time_sum;
    }

    SimResult res{};
    res.n_ruined = total.ruined;
    res.n_died = total.died;
    res.n_censored = total.censored;
    res.n_censored_safe = total.censored_safe;
    res.ruin_probability = double(total.ruined) / double(plan.n_paths);
    res.std_error =
        std::sqrt(res.ruin_probability * (1.0 - res.ruin_probability) / double(plan.n_paths));
    res.mean_time_to_absorption = total.time_sum / double(plan.n_paths);
    return res;
}

SimResult simulate_optimal(const MarketParams& params, const ConsumptionSpec& consumption,
                           Regime regime, const SimConfig& config) {
    if (std::holds_alternative<ConstantConsumption>(consumption)) {
        const double c = std::get<ConstantConsumption>(consumption).c;
        const RuinSolution sol = solve(params, c, regime);
        return simulate(params, consumption, regime, config,
                        Strategy::from_solution(sol, config.strategy_table_points));
    }
    const auto& pc = std::get<ProportionalConsumption>(consumption);
    const PowerSolution pow = solve_proportional(params, pc.p, pc.w0, regime);
    return simulate(params, consumption, regime, config, Strategy::from_power(pow));
}

std::vector<ConvergenceRow> convergence_study(const MarketParams& params,
                                              const ConsumptionSpec& consumption, Regime regime,
                                              std::span<const double> w_probes,
                                              std::span<const double> dt_ladder,
                                              const SimConfig& base_config) {
    validate(params, consumption, regime);

    std::vector<double> analytic(w_probes.size());
    if (std::holds_alternative<ConstantConsumption>(consumption)) {
        const double c = std::get<ConstantConsumption>(consumption).c;
        const RuinSolution sol = solve(params, c, regime);
        for (std::size_t i = 0; i < w_probes.size(); ++i) analytic[i] = sol.psi(w_probes[i]);
    } else {
        const auto& pc = std::get<ProportionalConsumption>(consumption);
        const PowerSolution pow = solve_proportional(params, pc.p, pc.w0, regime);
        for (std::size_t i = 0; i < w_probes.size(); ++i)
            analytic[i] = proportional_psi(pow, w_probes[i]);
    }

    std::vector<ConvergenceRow> rows;
    for (double dt : dt_ladder) {
        for (std::size_t i = 0; i < w_probes.size(); ++i) {
            SimConfig cfg = base_config;
            cfg.dt = dt;
            cfg.w_start = w_probes[i];
            const SimResult res = simulate_optimal(params, consumption, regime, cfg);
            const double se = std::max(res.std_error, 1e-300);
            rows.push_back({dt, w_probes[i], res, analytic[i],
                            (res.ruin_probability - analytic[i]) / se});
        }
    }
    return rows;
}

} // namespace ruin
