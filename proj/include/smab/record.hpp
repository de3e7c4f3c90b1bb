#pragma once

#include <vector>

namespace smab {

// Omniscient per-round log kept by the simulator. It is a strict superset of
// what the player observes: the player only ever sees (pulled_arm, reported).
// offers[k] holds every arm's sealed bid for the round; for reward-dependent
// strategies that were not pulled, the bid is the arm's mean report.
struct RoundRecord {
    long long t = 0;
    int pulled_arm = -1;
    double reward = 0.0;    // true draw of the pulled arm
    double reported = 0.0;  // what the pulled arm handed over
    std::vector<double> offers;
    std::vector<double> probabilities;       // player-side p
    std::vector<double> estimated_probabilities;  // arm-side p-hat
    double disagreement_tau = 0.0;
};

}  // namespace smab
