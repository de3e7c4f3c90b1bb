#include "smab/player.hpp"

#include <cmath>
#include <stdexcept>

namespace smab {

namespace {
constexpr double kSimplexTol = 1e-12;
// Shift threshold for the log weights. Weights are scale free (see
// pull_probabilities), so subtracting the max keeps exp() in range without
// changing any probability.
constexpr double kRenormalizeAt = 350.0;
}  // namespace

PlayerConfig PlayerConfig::make(PlayerAlgorithm algorithm, int arm_count, long long horizon,
                                double rho) {
    PlayerConfig c;
    c.algorithm = algorithm;
    c.arm_count = arm_count;
    c.horizon = horizon;
    c.rho = rho;
    if (arm_count < 1) throw std::invalid_argument("player needs at least one arm");
    if (horizon < 1) throw std::invalid_argument("horizon must be positive");
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0,1)");

    const double k = static_cast<double>(arm_count);
    const double t = static_cast<double>(horizon);
    const double log_k = std::log(k);
    switch (algorithm) {
        case PlayerAlgorithm::Exp3:
            c.gamma = std::min(1.0, std::sqrt(k * log_k / ((std::exp(1.0) - 1.0) * t)));
            c.eta = c.gamma / k;
            c.beta = 0.0;
            break;
        case PlayerAlgorithm::Exp3P:
            c.gamma = std::min(1.0, 1.05 * std::sqrt(k * log_k / t));
            c.eta = 0.95 * std::sqrt(log_k / (t * k));
            c.beta = std::sqrt(std::log(k / rho) / (t * k));
            break;
    }
    c.delta = std::sqrt(t * std::log(k / rho));
    return c;
}

void PlayerConfig::validate() const {
    if (arm_count < 1) throw std::invalid_argument("player needs at least one arm");
    if (horizon < 1) throw std::invalid_argument("horizon must be positive");
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0,1)");
    // gamma = 0 is legal (pure weight sampling); the default tunings keep it
    // positive for K >= 2.
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0,1]");
    if (eta < 0.0) throw std::invalid_argument("eta must be nonnegative");
    if (beta < 0.0) throw std::invalid_argument("beta must be nonnegative");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
}

PlayerState init_player(const PlayerConfig& config, Rng rng) {
    config.validate();
    PlayerState state{Eigen::VectorXd::Zero(config.arm_count), 0, rng};
    return state;
}

Eigen::VectorXd pull_probabilities(const PlayerState& state, const PlayerConfig& config) {
    const auto k_count = state.log_weights.size();
    const double shift = state.log_weights.maxCoeff();
    Eigen::VectorXd p(k_count);
    double total = 0.0;
    for (Eigen::Index k = 0; k < k_count; ++k) {
        p[k] = std::exp(state.log_weights[k] - shift);
        total += p[k];
    }
    const double mix = config.gamma / static_cast<double>(k_count);
    for (Eigen::Index k = 0; k < k_count; ++k)
        p[k] = (1.0 - config.gamma) * (p[k] / total) + mix;
    return p;
}

int pick_from_cdf(const Eigen::VectorXd& p, double u) {
    double cum = 0.0;
    const auto k_count = p.size();
    for (Eigen::Index k = 0; k < k_count; ++k) {
        cum += p[k];
        if (u < cum) return static_cast<int>(k);
    }
    return static_cast<int>(k_count - 1);  // u landed on accumulated rounding
}

int select_arm(PlayerState& state, const Eigen::VectorXd& p) {
    if (p.size() == 0) throw std::invalid_argument("empty probability vector");
    if (p.minCoeff() < 0.0 || std::abs(p.sum() - 1.0) > kSimplexTol)
        throw std::invalid_argument("selection needs a simplex vector");
    return pick_from_cdf(p, state.rng.uniform01());
}

void observe(PlayerState& state, const PlayerConfig& config, int pulled_arm, double reported,
             const Eigen::VectorXd& p, std::span<const SideObservation> side) {
    const auto k_count = state.log_weights.size();
    if (pulled_arm < 0 || pulled_arm >= k_count) throw std::invalid_argument("bad arm index");
    if (!(reported >= 0.0 && reported <= 1.0))
        throw std::invalid_argument("reported value outside [0,1]");
    if (p[pulled_arm] <= 0.0) throw std::invalid_argument("pulled arm had zero probability");

    if (config.side_observation) {
        // Importance-weighted estimator over everything the pull revealed:
        // each revealed arm contributes its offer, every arm gets the bias,
        // both divided by the arm's probability of being revealed.
        Eigen::VectorXd gain = Eigen::VectorXd::Zero(k_count);
        for (Eigen::Index k = 0; k < k_count; ++k) gain[k] = config.beta / p[k];
        gain[pulled_arm] = (reported + config.beta) / p[pulled_arm];
        for (const SideObservation& obs : side) {
            if (obs.arm < 0 || obs.arm >= k_count) throw std::invalid_argument("bad side arm");
            if (obs.observe_probability <= 0.0)
                throw std::invalid_argument("side observation needs positive probability");
            gain[obs.arm] = (obs.value + config.beta) / obs.observe_probability;
        }
        state.log_weights += config.eta * gain;
    } else {
        switch (config.algorithm) {
            case PlayerAlgorithm::Exp3:
                state.log_weights[pulled_arm] += config.eta * reported / p[pulled_arm];
                break;
            case PlayerAlgorithm::Exp3P:
                for (Eigen::Index k = 0; k < k_count; ++k) {
                    const double gain =
                        (k == pulled_arm ? reported + config.beta : config.beta) / p[k];
                    state.log_weights[k] += config.eta * gain;
                }
                break;
        }
    }
    ++state.round;

    const double top = state.log_weights.maxCoeff();
    if (top > kRenormalizeAt) state.log_weights.array() -= top;
}

double regret(std::span<const RoundRecord> history) {
    if (history.empty()) return 0.0;
    const std::size_t k_count = history.front().offers.size();
    std::vector<double> per_arm(k_count, 0.0);
    double collected = 0.0;
    for (const RoundRecord& rec : history) {
        if (rec.offers.size() != k_count)
            throw std::invalid_argument("round record with inconsistent offer vector");
        for (std::size_t k = 0; k < k_count; ++k) {
            if (std::isnan(rec.offers[k]))
                throw std::invalid_argument("missing counterfactual offer in history");
            per_arm[k] += rec.offers[k];
        }
        collected += rec.reported;
    }
    double best = per_arm.empty() ? 0.0 : per_arm.front();
    for (double v : per_arm) best = std::max(best, v);
    return best - collected;
}

}  // namespace smab
