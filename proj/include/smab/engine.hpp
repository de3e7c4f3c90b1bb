#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smab/arms.hpp"
#include "smab/consensus.hpp"
#include "smab/player.hpp"
#include "smab/record.hpp"
#include "smab/topology.hpp"

namespace smab {

// Unilateral deviations probed by the equilibrium audit. The first four vary
// the offer rule; the last two lie on the gossip channel while keeping the
// equilibrium offers.
enum class DeviationMode {
    Equilibrium,
    AlwaysTruthful,
    Overbid,
    Underbid,
    InflateMessage,
    ZeroMessage,
};

std::string to_string(DeviationMode mode);
std::optional<DeviationMode> deviation_mode_from_string(const std::string& name);

struct SimConfig {
    int arm_count = 0;
    long long horizon = 0;
    int tau = 1;

    // Topology: an explicit graph wins; otherwise G(K, p) from graph_seed.
    std::optional<Graph> topology;
    double edge_probability = 0.6;
    std::uint64_t graph_seed = 1;

    std::vector<double> means;
    PlayerConfig player;

    std::vector<ArmStrategy> strategies;      // empty means all equilibrium
    std::vector<MessageMode> message_modes;   // empty means all honest

    std::optional<double> defection_slack_override;  // B
    std::optional<double> offer_scale_override;      // theta

    std::uint64_t master_seed = 1;
    long long record_stride = 100;  // keep every Nth RoundRecord; 0 keeps none
    bool skip_unchanged_consensus = false;

    // Test hook: bypass the player's probabilities with a fixed simplex
    // vector (selection still draws from the player stream).
    std::optional<std::vector<double>> forced_probabilities;

    double balance_tolerance = 0.10;
    double trace_quantile = 0.99;

    double defection_slack() const;
    double offer_scale() const;
    ArmStrategy strategy_of(int k) const;
    MessageMode message_mode_of(int k) const;

    void validate() const;

    // The analysis-side conditions (K vs T^(1/3)/ln T, rho vs 1/T^2, delta vs
    // sqrt(T ln T), mu1 - mu2 vs mu1/K). Reported, never enforced.
    std::vector<std::string> analysis_preconditions() const;
};

struct SimResult {
    // final tallies
    std::vector<long long> pull_counts;
    double revenue = 0.0;
    std::vector<double> utilities;        // sum of (r - x) per arm, pulled rounds
    std::vector<double> revenue_per_arm;  // sum of x per arm, pulled rounds
    std::vector<double> reward_sums;      // sum of r per arm, pulled rounds (integer-valued)
    std::vector<double> offer_sums;       // counterfactual offers summed over all rounds
    double regret_total = 0.0;
    double regret_half = 0.0;                  // same statistic at t = floor(T/2)
    std::vector<long long> pull_counts_half;   // N_k at t = floor(T/2)

    std::vector<std::pair<long long, int>> defections;  // (round, arm)

    // per-round traces, index t-1
    std::vector<double> trace_disagreement;  // d_tau
    std::vector<double> trace_alpha;         // initial dispersion alpha_t
    std::vector<double> trace_gap;           // max_k |p - p_hat|
    std::vector<double> trace_info_mean;     // network average of the raw infos
    std::vector<double> trace_p_max;         // max_k p_k (for the Lipschitz probe)

    DisagreementTrace consensus_trace_first;  // inner gossip trace, round 1
    DisagreementTrace consensus_trace_last;   // inner gossip trace, round T

    std::vector<RoundRecord> sampled_records;

    Graph graph;
    CombinationMatrix matrix;
    MixingReport mixing;
    double resolved_defection_slack = 0.0;
    double resolved_offer_scale = 0.0;
    std::uint64_t master_seed = 0;
    std::vector<std::string> precondition_report;
    double wall_seconds = 0.0;
};

// Runs the full per-round protocol: arm replica refresh, tau gossip
// iterations over the raw intrinsic infos (with any message corruption
// applied to outgoing values), probability estimates and sealed bids,
// player selection, reward draw and report, player update, bookkeeping.
// Deterministic given the config; RNG streams are derived per component so
// strategy changes perturb nothing else.
//
// Accounting contract: rewards are in {0,1}, so each round's report x and
// retained part (r - x) recombine to r bit-exactly; the engine verifies the
// recombination every round, which makes per-arm conservation exact in that
// per-round fold order.
SimResult simulate(const SimConfig& config);

struct DeviationOutcome {
    DeviationMode mode = DeviationMode::Equilibrium;
    double conform_utility = 0.0;
    double deviate_utility = 0.0;
    double gap = 0.0;  // deviate - conform
    SimResult conform;
    SimResult deviate;
};

// Paired-seed audit: everyone plays equilibrium vs. the probed arm switching
// to `mode`, same seeds on both sides.
DeviationOutcome run_deviation_experiment(const SimConfig& config, int deviant_arm,
                                          DeviationMode mode);

struct SweepCell {
    std::size_t config_index = 0;
    int replica = 0;
    std::uint64_t seed = 0;
    std::optional<SimResult> result;
    std::string error;  // nonempty if the cell failed
};

// Each config x replica with derived seeds (replica 0 keeps the config's own
// master seed). Cells may run on `jobs` threads; the returned order is
// configs-major, replicas-minor regardless.
std::vector<SweepCell> sweep(const std::vector<SimConfig>& configs, int replicas, int jobs = 1);

}  // namespace smab
