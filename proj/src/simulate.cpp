#include "stopline/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace stopline {

bool StoppingRule::contains(double x, Regime f) const {
    const auto& set = f == Regime::Positive ? pos : neg;
    for (const Interval& iv : set) {
        if (iv.contains(x)) return true;
    }
    return false;
}

StoppingRule StoppingRule::seller(double B, double m) {
    StoppingRule rule;
    rule.pos.push_back({B, std::numeric_limits<double>::infinity()});
    rule.neg.push_back({0.0, m});
    return rule;
}

StoppingRule StoppingRule::buyer(double a, double b) {
    StoppingRule rule;
    rule.pos.push_back({a, b});
    rule.neg.push_back({0.0, 0.0});
    return rule;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
}

} // namespace

NormalStream::NormalStream(std::uint64_t master_seed, std::uint64_t path_index) {
    // Feed both inputs through splitmix64 so adjacent path indices decorrelate.
    std::uint64_t x = master_seed ^ (0x632be59bd9b4e019ULL * (path_index + 1));
    for (auto& si : s_) si = splitmix64(x);
}

std::uint64_t NormalStream::next_u64() {
    // xoshiro256++
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double NormalStream::next_unit() {
    // 53-bit mantissa uniform in [0,1), mapped to (-1,1).
    const double u = (next_u64() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

double NormalStream::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Marsaglia polar method.
    double u, v, s;
    do {
        u = next_unit();
        v = next_unit();
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

namespace {

// CIR volatility guard: evaluate sigma at the regime's domain floor when a
// step overshoots it (full truncation).
double guarded_vol(const ModelSpec& model, double S, Regime f) {
    const RegimeDynamics& dyn = model.dyn(f);
    if (dyn.kind() == DynKind::Cir) {
        const double floor = f == Regime::Positive ? model.L : 0.0;
        return dyn.vol(std::max(S, floor));
    }
    return dyn.vol(S);
}

double guarded_drift(const ModelSpec& model, double S, Regime f) {
    const RegimeDynamics& dyn = model.dyn(f);
    if (dyn.kind() == DynKind::Cir) {
        const double floor = f == Regime::Positive ? model.L : 0.0;
        return dyn.drift(std::max(S, floor));
    }
    return dyn.drift(S);
}

} // namespace

PathState step_euler(const PathState& state, double dt, const ModelSpec& model,
                     double z) {
    if (state.absorbed) {
        throw ParameterError("step_euler called on an absorbed path");
    }
    if (!(dt > 0.0)) throw ParameterError("step_euler needs dt > 0");
    PathState out = state;
    const double mu = guarded_drift(model, state.S, state.F);
    const double sig = guarded_vol(model, state.S, state.F);
    out.S = state.S + mu * dt + sig * std::sqrt(dt) * z;
    out.t = state.t + dt;
    if (!std::isfinite(out.S)) {
        throw NumericalError("simulated price became non-finite");
    }
    if (state.F == Regime::Positive) {
        if (out.S <= model.L) out.F = Regime::Negative;
    } else {
        if (out.S >= model.H) {
            out.F = Regime::Positive;
        } else if (out.S <= 0.0) {
            out.S = 0.0;
            out.absorbed = true;
        }
    }
    return out;
}

StopResult simulate_until_stop(const ModelSpec& model, PathState start,
                               const StoppingRule& rule, double dt,
                               double t_max, std::uint64_t seed,
                               std::uint64_t path_index) {
    if (rule.contains(start.S, start.F) || start.absorbed) {
        return {0.0, start.S, start.F, false};
    }
    NormalStream rng(seed, path_index);
    PathState s = start;
    s.t = 0.0;
    while (s.t < t_max) {
        s = step_euler(s, dt, model, rng.next());
        if (s.absorbed || rule.contains(s.S, s.F)) {
            return {s.t, s.S, s.F, false};
        }
    }
    return {t_max, s.S, s.F, true};
}

int thread_budget() {
    if (const char* env = std::getenv("STOPLINE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

// Runs fn(path_index) for indices [0, n) over the worker pool.
void parallel_paths(long n, const std::function<void(long)>& fn) {
    const int workers = std::min<long>(thread_budget(), std::max<long>(n, 1));
    if (workers <= 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (long i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

// Pairwise summation: order-independent given a fixed index layout.
double pairwise_sum(const std::vector<double>& v, std::size_t lo,
                    std::size_t hi) {
    if (hi - lo <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

McEstimate summarize(const std::vector<double>& rewards, long truncated) {
    const long n = static_cast<long>(rewards.size());
    McEstimate est;
    est.n_paths = n;
    est.mean = pairwise_sum(rewards, 0, rewards.size()) / n;
    std::vector<double> sq(rewards.size());
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        const double d = rewards[i] - est.mean;
        sq[i] = d * d;
    }
    const double var = n > 1 ? pairwise_sum(sq, 0, sq.size()) / (n - 1) : 0.0;
    est.std_error = std::sqrt(var / n);
    est.truncated_fraction = static_cast<double>(truncated) / n;
    est.truncation_warning = est.truncated_fraction > 0.05;
    return est;
}

} // namespace

McEstimate mc_value(const ModelSpec& model, const RewardFn& reward,
                    const StoppingRule& rule, PathState start,
                    const McParams& params) {
    if (params.n_paths < 100) {
        throw ParameterError("mc_value needs at least 100 paths");
    }
    std::vector<double> rewards(params.n_paths);
    std::vector<unsigned char> trunc(params.n_paths, 0);
    parallel_paths(params.n_paths, [&](long i) {
        const StopResult res =
            simulate_until_stop(model, start, rule, params.dt, params.t_max,
                                params.seed, static_cast<std::uint64_t>(i));
        rewards[i] = std::exp(-model.r * res.tau) * reward(res.S_tau, res.F_tau);
        trunc[i] = res.truncated ? 1 : 0;
    });
    long truncated = 0;
    for (unsigned char t : trunc) truncated += t;
    return summarize(rewards, truncated);
}

McEstimate mc_value(const ModelSpec& model, const PowerUtility& util,
                    const StoppingRule& rule, PathState start,
                    const McParams& params) {
    return mc_value(
        model, [&util](double x, Regime) { return util.value(x); }, rule,
        start, params);
}

PerturbationReport perturbation_test(
    const ModelSpec& model, const RewardFn& reward,
    const StoppingRule& base_rule,
    const std::vector<std::pair<std::string, StoppingRule>>& perturbed,
    PathState start, const McParams& params) {
    const long n = params.n_paths;
    const std::size_t n_rules = perturbed.size() + 1;
    std::vector<std::vector<double>> rewards(n_rules,
                                             std::vector<double>(n, 0.0));
    std::vector<long> truncated(n_rules, 0);
    std::vector<const StoppingRule*> rules;
    rules.push_back(&base_rule);
    for (const auto& p : perturbed) rules.push_back(&p.second);

    std::vector<std::vector<unsigned char>> trunc(
        n_rules, std::vector<unsigned char>(n, 0));

    // Common random numbers: rule k replays path i with the identical
    // normal stream (seed, i).
    parallel_paths(n, [&](long i) {
        for (std::size_t k = 0; k < n_rules; ++k) {
            const StopResult res =
                simulate_until_stop(model, start, *rules[k], params.dt,
                                    params.t_max, params.seed,
                                    static_cast<std::uint64_t>(i));
            rewards[k][i] =
                std::exp(-model.r * res.tau) * reward(res.S_tau, res.F_tau);
            trunc[k][i] = res.truncated ? 1 : 0;
        }
    });
    for (std::size_t k = 0; k < n_rules; ++k) {
        truncated[k] = 0;
        for (unsigned char t : trunc[k]) truncated[k] += t;
    }

    PerturbationReport report;
    report.base = summarize(rewards[0], truncated[0]);
    for (std::size_t k = 1; k < n_rules; ++k) {
        std::vector<double> diff(n);
        for (long i = 0; i < n; ++i) diff[i] = rewards[0][i] - rewards[k][i];
        McEstimate dstat = summarize(diff, 0);
        PerturbationRow row;
        row.label = perturbed[k - 1].first;
        row.estimate = summarize(rewards[k], truncated[k]);
        row.mean_diff = dstat.mean;
        row.stderr_diff = dstat.std_error;
        report.rows.push_back(std::move(row));
    }
    return report;
}

} // namespace stopline
