#include "smab/arms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smab {

std::string to_string(ArmStrategy s) {
    switch (s) {
        case ArmStrategy::Equilibrium: return "equilibrium";
        case ArmStrategy::Truthful: return "truthful";
        case ArmStrategy::Overbid: return "overbid";
        case ArmStrategy::Underbid: return "underbid";
    }
    return "?";
}

std::string to_string(MessageMode m) {
    switch (m) {
        case MessageMode::Honest: return "honest";
        case MessageMode::Inflate: return "inflate";
        case MessageMode::Zero: return "zero";
    }
    return "?";
}

double ArmParams::default_defection_slack(int arm_count, long long horizon, double delta) {
    return 7.0 * std::sqrt(static_cast<double>(arm_count) * static_cast<double>(horizon) * delta);
}

double ArmParams::default_offer_scale(int arm_count, long long horizon, double delta) {
    return std::sqrt(static_cast<double>(arm_count) * delta / static_cast<double>(horizon));
}

void ArmParams::validate() const {
    if (!(mean >= 0.0 && mean <= 1.0)) throw std::invalid_argument("arm mean must lie in [0,1]");
    if (!(defection_slack > 0.0)) throw std::invalid_argument("defection slack must be positive");
    if (!(offer_scale > 0.0 && offer_scale <= 1.0))
        throw std::invalid_argument("offer scale must lie in (0,1] to keep offers in range");
}

bool defection_check(ArmState& arm, long long t, int arm_count, double defection_slack) {
    if (t < 1) throw std::invalid_argument("defection check needs t >= 1");
    if (arm.defected) return true;
    const double fair_share = static_cast<double>(t) / static_cast<double>(arm_count);
    if (static_cast<double>(arm.pull_count) < fair_share - defection_slack) arm.defected = true;
    return arm.defected;
}

double offer(const ArmState& arm, const ArmParams& params, double reward) {
    if (arm.defected) return reward;
    if (!arm.p_hat)
        throw std::logic_error("offer before probability estimate (protocol ordering)");
    return std::clamp(params.offer_scale * (1.0 - *arm.p_hat), 0.0, 1.0);
}

void local_info_update(ArmState& arm, bool was_pulled, double reported, double p_hat,
                       const PlayerConfig& player,
                       std::optional<SideObservationMirror> side) {
    // expression shapes mirror the player's update exactly, so feeding the
    // true p reproduces the player's weight bit for bit
    if (player.side_observation && side) {
        if (side->observed) {
            if (side->observe_probability <= 0.0)
                throw std::invalid_argument("observed arm needs positive observe probability");
            arm.local_log_info +=
                player.eta * ((reported + player.beta) / side->observe_probability);
        } else if (player.beta > 0.0) {
            if (p_hat <= 0.0) throw std::invalid_argument("estimator division by p_hat <= 0");
            arm.local_log_info += player.eta * (player.beta / p_hat);
        }
        return;
    }

    switch (player.algorithm) {
        case PlayerAlgorithm::Exp3:
            if (was_pulled) {
                if (p_hat <= 0.0) throw std::invalid_argument("estimator division by p_hat <= 0");
                arm.local_log_info += player.eta * reported / p_hat;
            }
            break;
        case PlayerAlgorithm::Exp3P: {
            if (p_hat <= 0.0) throw std::invalid_argument("estimator division by p_hat <= 0");
            const double gain = (was_pulled ? reported + player.beta : player.beta) / p_hat;
            arm.local_log_info += player.eta * gain;
            break;
        }
    }
}

double estimate_probability(ArmState& arm, double consensus_avg, const PlayerConfig& player) {
    if (!(consensus_avg > 0.0))
        throw std::invalid_argument("consensus average must be positive (upstream corruption?)");
    const double k = static_cast<double>(player.arm_count);
    const double info = std::exp(arm.local_log_info);
    double p = (1.0 - player.gamma) * info / (k * consensus_avg) + player.gamma / k;
    p = std::clamp(p, player.gamma / k, 1.0);
    arm.p_hat = p;
    return p;
}

double deviant_offer(const ArmState& arm, const ArmParams& params, double reward,
                     ArmStrategy mode) {
    switch (mode) {
        case ArmStrategy::Truthful: return reward;
        case ArmStrategy::Overbid:
        case ArmStrategy::Underbid: {
            if (!arm.p_hat)
                throw std::logic_error("deviant offer before probability estimate");
            const double base = params.offer_scale * (1.0 - *arm.p_hat);
            return mode == ArmStrategy::Overbid ? std::min(1.0, base + 0.1)
                                                : std::max(0.0, base - 0.1);
        }
        case ArmStrategy::Equilibrium: return offer(arm, params, reward);
    }
    throw std::logic_error("unknown deviation mode");
}

double corrupt_message(double value, MessageMode mode) {
    switch (mode) {
        case MessageMode::Honest: return value;
        case MessageMode::Inflate: return value * 10.0;
        case MessageMode::Zero: return 0.0;
    }
    throw std::logic_error("unknown message mode");
}

}  // namespace smab
