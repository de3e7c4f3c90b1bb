#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "smab/topology.hpp"

namespace smab {

// One shared scalar estimate per arm, iterated under the combination matrix.
// The arithmetic mean of the values is invariant under every step (double
// stochasticity), which is what makes the local estimates converge to the
// network average.
struct ConsensusState {
    Eigen::VectorXd values;
    int iteration = 0;
};

// Disagreement d_n = (1/K) sum_k (v_k - mean)^2, recorded per iteration,
// n = 0..tau. alpha_t is the initial dispersion d_0, and
// d_n <= alpha_t * lambda^(2n) holds pointwise on honest runs.
struct DisagreementTrace {
    std::vector<double> disagreement;  // index n
    double alpha_t = 0.0;
    double lambda = 0.0;

    double bound_at(int n) const;
};

// values_out[k] = sum_l a(l, k) * values_in[l]. Fixed summation order, no
// hidden parallelism, so runs are bit-reproducible.
void consensus_step_into(const CombinationMatrix& a, const Eigen::VectorXd& in,
                         Eigen::VectorXd& out);

ConsensusState consensus_step(const ConsensusState& state, const CombinationMatrix& a);

double disagreement(const Eigen::VectorXd& values);

// alpha * lambda^(2n); requires 0 <= lambda < 1.
double decay_bound(double alpha, double lambda, long long n);

std::pair<ConsensusState, DisagreementTrace> run_consensus(ConsensusState state,
                                                           const CombinationMatrix& a, int tau,
                                                           double lambda);

}  // namespace smab
