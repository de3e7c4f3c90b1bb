#pragma once

#include <optional>
#include <string>

#include "smab/player.hpp"

namespace smab {

// Equilibrium is the collusive market-sharing strategy; Truthful always
// reports the drawn reward; Overbid/Underbid shift the collusive offer by a
// fixed 0.1 for deviation audits.
enum class ArmStrategy { Equilibrium, Truthful, Overbid, Underbid };

// What an arm does to the consensus value it sends to its neighbors.
enum class MessageMode { Honest, Inflate, Zero };

std::string to_string(ArmStrategy s);
std::string to_string(MessageMode m);

// Per-arm constants. defection_slack is the pull-count slack B = 7 sqrt(KTd)
// below the fair share before an arm abandons the collusive offers;
// offer_scale is theta = sqrt(Kd/T), the collusive offer ceiling.
struct ArmParams {
    int index = 0;
    double mean = 0.0;
    double defection_slack = 0.0;
    double offer_scale = 0.0;

    static double default_defection_slack(int arm_count, long long horizon, double delta);
    static double default_offer_scale(int arm_count, long long horizon, double delta);

    void validate() const;
};

struct ArmState {
    int index = 0;
    ArmStrategy strategy = ArmStrategy::Equilibrium;
    MessageMode message_mode = MessageMode::Honest;
    long long pull_count = 0;
    double local_log_info = 0.0;       // the arm's replica of its own I_k, log domain
    std::optional<double> p_hat;       // consensus-derived estimate, set each round
    bool defected = false;             // latches permanently
    double utility = 0.0;              // sum of (r - x) over pulled rounds
};

// Latches (and returns) defection when pull_count < t/K - B. Called once per
// settled round; the latch realizes the "at any time in the past" clause.
bool defection_check(ArmState& arm, long long t, int arm_count, double defection_slack);

// Equilibrium offer: full value after defection, else theta * (1 - p_hat)
// clamped to [0,1]. Throws if p_hat is unset while still cooperating.
double offer(const ArmState& arm, const ArmParams& params, double reward);

// Side-observation mirror inputs for the experimental player variant.
struct SideObservationMirror {
    bool observed = false;
    double observe_probability = 0.0;
};

// Mirrors the player's estimator for this arm's own weight, with p_hat in
// place of the unobservable p.
void local_info_update(ArmState& arm, bool was_pulled, double reported, double p_hat,
                       const PlayerConfig& player,
                       std::optional<SideObservationMirror> side = std::nullopt);

// p_hat = Pr(I_k, consensus average), clamped to [gamma/K, 1]. Stores the
// estimate on the arm and returns it.
double estimate_probability(ArmState& arm, double consensus_avg, const PlayerConfig& player);

double deviant_offer(const ArmState& arm, const ArmParams& params, double reward,
                     ArmStrategy mode);

double corrupt_message(double value, MessageMode mode);

}  // namespace smab
