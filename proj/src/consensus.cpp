#include "smab/consensus.hpp"

#include <cmath>
#include <stdexcept>

namespace smab {

double DisagreementTrace::bound_at(int n) const { return decay_bound(alpha_t, lambda, n); }

void consensus_step_into(const CombinationMatrix& a, const Eigen::VectorXd& in,
                         Eigen::VectorXd& out) {
    if (a.size() != in.size())
        throw std::invalid_argument("consensus value vector does not match matrix dimension");
    out.noalias() = a.entries.transpose() * in;
}

ConsensusState consensus_step(const ConsensusState& state, const CombinationMatrix& a) {
    ConsensusState next;
    next.values.resize(state.values.size());
    consensus_step_into(a, state.values, next.values);
    next.iteration = state.iteration + 1;
    return next;
}

double disagreement(const Eigen::VectorXd& values) {
    const auto k_count = values.size();
    if (k_count == 0) throw std::invalid_argument("disagreement of an empty vector");
    bool uniform = true;
    for (Eigen::Index k = 1; k < k_count && uniform; ++k) uniform = values[k] == values[0];
    if (uniform) return 0.0;  // zero dispersion regardless of mean rounding
    const double mean = values.mean();
    double acc = 0.0;
    for (Eigen::Index k = 0; k < k_count; ++k) {
        const double d = values[k] - mean;
        acc += d * d;
    }
    return acc / static_cast<double>(k_count);
}

double decay_bound(double alpha, double lambda, long long n) {
    if (alpha < 0.0) throw std::invalid_argument("alpha must be nonnegative");
    if (lambda < 0.0 || lambda >= 1.0)
        throw std::invalid_argument("decay bound needs 0 <= lambda < 1");
    if (n < 0) throw std::invalid_argument("iteration count must be nonnegative");
    return alpha * std::pow(lambda, 2.0 * static_cast<double>(n));
}

std::pair<ConsensusState, DisagreementTrace> run_consensus(ConsensusState state,
                                                           const CombinationMatrix& a, int tau,
                                                           double lambda) {
    if (tau < 1) throw std::invalid_argument("tau must be at least 1");

    DisagreementTrace trace;
    trace.lambda = lambda;
    trace.alpha_t = disagreement(state.values);
    trace.disagreement.reserve(tau + 1);
    trace.disagreement.push_back(trace.alpha_t);

    Eigen::VectorXd next(state.values.size());
    for (int n = 1; n <= tau; ++n) {
        consensus_step_into(a, state.values, next);
        state.values.swap(next);
        ++state.iteration;
        trace.disagreement.push_back(disagreement(state.values));
    }
    return {std::move(state), std::move(trace)};
}

}  // namespace smab
