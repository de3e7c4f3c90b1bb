#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "smab/record.hpp"
#include "smab/rng.hpp"

namespace smab {

enum class PlayerAlgorithm { Exp3, Exp3P };

// Parameters of the player's adversarial bandit algorithm. The probability
// map shared with the arms is
//   p_k = (1 - gamma) * I_k / (K * I_mean) + gamma / K
// where I_k = exp(log_weights[k]) is arm k's intrinsic information and
// I_mean the average over arms.
struct PlayerConfig {
    PlayerAlgorithm algorithm = PlayerAlgorithm::Exp3;
    int arm_count = 0;
    long long horizon = 0;
    double rho = 0.0;    // failure probability of the regret guarantee
    double gamma = 0.0;  // exploration rate
    double eta = 0.0;    // learning rate
    double beta = 0.0;   // Exp3P bias term
    double delta = 0.0;  // regret bound handed to the arms
    bool side_observation = false;  // experimental neighbor-update variant

    // Standard tuning: Exp3 uses gamma = min(1, sqrt(K ln K / ((e-1) T))),
    // eta = gamma / K; Exp3P takes its constants from the usual
    // high-probability analysis with rho in the confidence term. delta
    // defaults to sqrt(T ln(K / rho)) unless overridden afterwards.
    static PlayerConfig make(PlayerAlgorithm algorithm, int arm_count, long long horizon,
                             double rho);

    void validate() const;
};

struct PlayerState {
    Eigen::VectorXd log_weights;  // intrinsic information, log domain
    long long round = 0;
    Rng rng;
};

PlayerState init_player(const PlayerConfig& config, Rng rng);

Eigen::VectorXd pull_probabilities(const PlayerState& state, const PlayerConfig& config);

// Inverse CDF over ascending arm indices: smallest k with u < sum_{j<=k} p_j.
int pick_from_cdf(const Eigen::VectorXd& p, double u);

// Draws from the player's stream. Throws unless p is a simplex vector.
int select_arm(PlayerState& state, const Eigen::VectorXd& p);

// Revealed neighbor offer used by the side-observation variant.
struct SideObservation {
    int arm = -1;
    double value = 0.0;
    double observe_probability = 0.0;  // prob. this arm's offer is revealed
};

void observe(PlayerState& state, const PlayerConfig& config, int pulled_arm, double reported,
             const Eigen::VectorXd& p, std::span<const SideObservation> side = {});

// max_k sum_t offers[k] - sum_t reported, over the full omniscient log.
double regret(std::span<const RoundRecord> history);

}  // namespace smab
