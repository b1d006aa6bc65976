#ifndef STOPLINE_SIMULATE_HPP
#define STOPLINE_SIMULATE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stopline/model.hpp"

namespace stopline {

/// One point of a simulated path of the regime-flagged process.
struct PathState {
    double t = 0.0;
    double S = 0.0;
    Regime F = Regime::Positive;
    bool absorbed = false;  // (0,-) reached; frozen thereafter
};

struct Interval {
    double lo;
    double hi;  // may be +infinity
    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Per-regime stopping intervals. The seller rule is {[B, inf)} / {[0, m]};
/// the buyer rule is {[a, b]} / {[0, 0]} (the absorbing point).
struct StoppingRule {
    std::vector<Interval> pos;
    std::vector<Interval> neg;

    bool contains(double x, Regime f) const;
    static StoppingRule seller(double B, double m);
    static StoppingRule buyer(double a, double b);
};

/// Monte Carlo estimate: sample mean, standard error, and how many paths
/// were cut at t_max (their discounted terminal reward is still counted).
struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n_paths = 0;
    double truncated_fraction = 0.0;
    bool truncation_warning = false;  // truncated_fraction > 0.05
};

struct McParams {
    long n_paths = 20000;
    double dt = 1e-3;
    double t_max = 200.0;
    std::uint64_t seed = 12345;
};

/// Deterministic normal generator: a splitmix64-seeded xoshiro256++ stream
/// with polar-method Gaussians, reproducible across platforms for a given
/// (master seed, path index).
class NormalStream {
public:
    NormalStream(std::uint64_t master_seed, std::uint64_t path_index);
    double next();

private:
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
    std::uint64_t next_u64();
    double next_unit();  // uniform in (-1, 1)
};

/// One Euler-Maruyama step with end-of-step regime/absorption handling:
/// S' = S + mu_F(S) dt + sigma_F(S) sqrt(dt) z, then the flag flips when the
/// step ends at or beyond a threshold, and (0,-) absorbs. CIR volatility is
/// evaluated at max(S, floor) where the floor is the regime's domain edge.
PathState step_euler(const PathState& state, double dt, const ModelSpec& model,
                     double z);

struct StopResult {
    double tau;
    double S_tau;
    Regime F_tau;
    bool truncated;
};

/// Steps a single path until it enters the rule's stopping set or t_max.
/// Deterministic given (seed, path_index).
StopResult simulate_until_stop(const ModelSpec& model, PathState start,
                               const StoppingRule& rule, double dt,
                               double t_max, std::uint64_t seed,
                               std::uint64_t path_index = 0);

using RewardFn = std::function<double(double x, Regime f)>;

/// Mean of e^{-r tau_i} reward(S_tau, F_tau) over independent paths with
/// per-path substreams of the master seed. Paths are distributed over
/// worker threads (STOPLINE_THREADS caps them; 0 or unset = hardware);
/// the accumulation is order-independent, so results do not depend on the
/// thread count.
McEstimate mc_value(const ModelSpec& model, const RewardFn& reward,
                    const StoppingRule& rule, PathState start,
                    const McParams& params);

/// Utility-reward convenience overload (the seller's problem).
McEstimate mc_value(const ModelSpec& model, const PowerUtility& util,
                    const StoppingRule& rule, PathState start,
                    const McParams& params);

struct PerturbationRow {
    std::string label;
    McEstimate estimate;
    double mean_diff;     // base mean - perturbed mean (paired)
    double stderr_diff;   // standard error of the paired differences
};

struct PerturbationReport {
    McEstimate base;
    std::vector<PerturbationRow> rows;
};

/// Common-random-numbers comparison: every rule sees the same per-path
/// normal stream, and the differences are paired per path.
PerturbationReport perturbation_test(
    const ModelSpec& model, const RewardFn& reward,
    const StoppingRule& base_rule,
    const std::vector<std::pair<std::string, StoppingRule>>& perturbed,
    PathState start, const McParams& params);

/// Worker-thread cap from STOPLINE_THREADS (0 or unset = hardware).
int thread_budget();

} // namespace stopline

#endif
