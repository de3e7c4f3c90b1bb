#include "smab/metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace smab {

namespace {

// Finite-difference slope of the probability map in its average-information
// argument, probed at the round's largest probability (where the slope is
// maximal) with relative perturbations of 1e-4.
double probability_map_slope(double p_max, double info_mean, double gamma, int arm_count) {
    if (!(info_mean > 0.0) || gamma >= 1.0) return 0.0;
    const double mix = gamma / arm_count;
    const double weight_part = p_max - mix;  // (1-gamma) I_k / (K I_mean)
    if (weight_part <= 0.0) return 0.0;
    double slope = 0.0;
    for (double rel : {1e-4, -1e-4}) {
        const double perturbed = info_mean * (1.0 + rel);
        const double p_perturbed = weight_part * info_mean / perturbed + mix;
        slope = std::max(slope, std::abs(p_perturbed - (weight_part + mix)) /
                                    std::abs(perturbed - info_mean));
    }
    return slope;
}

}  // namespace

double balance_statistic(const std::vector<long long>& pulls, long long horizon) {
    if (pulls.empty()) return 0.0;
    const double fair = static_cast<double>(horizon) / static_cast<double>(pulls.size());
    if (fair <= 0.0) return 0.0;
    double worst = 0.0;
    for (long long n : pulls)
        worst = std::max(worst, std::abs(static_cast<double>(n) - fair) / fair);
    return worst;
}

std::vector<long long> figure2_histogram(const SimResult& result) { return result.pull_counts; }

AuditReport audit(const SimResult& result, const SimConfig& config) {
    AuditReport report;
    report.revenue_bound = std::sqrt(static_cast<double>(config.arm_count) *
                                     static_cast<double>(config.horizon) * config.player.delta);
    report.observed_revenue = result.revenue;
    report.bound_satisfied = result.revenue <= report.revenue_bound;

    report.balance = balance_statistic(result.pull_counts, config.horizon);
    report.balance_tolerance = config.balance_tolerance;
    report.balance_ok = report.balance <= config.balance_tolerance;

    const std::size_t rounds = result.trace_gap.size();
    double l_hat = 0.0;
    for (std::size_t i = 0; i < rounds; ++i) {
        l_hat = std::max(l_hat,
                         probability_map_slope(result.trace_p_max[i], result.trace_info_mean[i],
                                               config.player.gamma, config.arm_count));
    }
    report.lipschitz_estimate = l_hat;

    std::size_t satisfied = 0;
    double max_gap = 0.0;
    const double lambda_tau = std::pow(result.mixing.lambda, config.tau);
    for (std::size_t i = 0; i < rounds; ++i) {
        const double gap = result.trace_gap[i];
        max_gap = std::max(max_gap, gap);
        const double bound = l_hat * std::sqrt(result.trace_alpha[i]) * lambda_tau + 1e-15;
        if (gap <= bound) ++satisfied;
    }
    report.corollary1_max_gap = max_gap;
    report.corollary1_satisfied_fraction =
        rounds == 0 ? 1.0 : static_cast<double>(satisfied) / static_cast<double>(rounds);
    report.trace_quantile = config.trace_quantile;
    report.corollary1_ok = report.corollary1_satisfied_fraction >= config.trace_quantile;
    return report;
}

std::string format_report(const AuditReport& r) {
    std::ostringstream out;
    out.precision(10);
    out << "revenue audit\n"
        << "  observed revenue   " << r.observed_revenue << "\n"
        << "  bound sqrt(KTd)    " << r.revenue_bound << "\n"
        << "  within bound       " << (r.bound_satisfied ? "yes" : "no") << "\n"
        << "pull balance\n"
        << "  max relative dev   " << r.balance << "\n"
        << "  tolerance          " << r.balance_tolerance << "\n"
        << "  balanced           " << (r.balance_ok ? "yes" : "no") << "\n"
        << "probability gap\n"
        << "  empirical L        " << r.lipschitz_estimate << "\n"
        << "  max |p - p_hat|    " << r.corollary1_max_gap << "\n"
        << "  rounds under decay bound " << r.corollary1_satisfied_fraction << " (need "
        << r.trace_quantile << ")\n";
    if (!r.nash_gaps.empty()) {
        out << "deviation gaps (deviate - conform)\n";
        for (const auto& [mode, gap] : r.nash_gaps) out << "  " << mode << "  " << gap << "\n";
    }
    return out.str();
}

std::string serialize_report(const AuditReport& r) {
    std::ostringstream out;
    out.precision(17);
    out << "audit.revenue = " << r.observed_revenue << "\n"
        << "audit.revenue_bound = " << r.revenue_bound << "\n"
        << "audit.bound_satisfied = " << (r.bound_satisfied ? 1 : 0) << "\n"
        << "audit.balance = " << r.balance << "\n"
        << "audit.balance_tolerance = " << r.balance_tolerance << "\n"
        << "audit.balance_ok = " << (r.balance_ok ? 1 : 0) << "\n"
        << "audit.lipschitz_estimate = " << r.lipschitz_estimate << "\n"
        << "audit.corollary1_satisfied_fraction = " << r.corollary1_satisfied_fraction << "\n"
        << "audit.corollary1_max_gap = " << r.corollary1_max_gap << "\n"
        << "audit.corollary1_ok = " << (r.corollary1_ok ? 1 : 0) << "\n";
    for (const auto& [mode, gap] : r.nash_gaps)
        out << "audit.nash_gap." << mode << " = " << gap << "\n";
    return out.str();
}

}  // namespace smab
