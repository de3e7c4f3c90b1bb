#pragma once

#include <map>
#include <string>
#include <vector>

#include "smab/engine.hpp"

namespace smab {

// Evaluation of one completed run against the revenue-cap, balance, and
// probability-gap claims. Pure function of (result, config).
struct AuditReport {
    double revenue_bound = 0.0;     // sqrt(K * T * delta), constant 1
    double observed_revenue = 0.0;
    bool bound_satisfied = false;

    double balance = 0.0;  // max_k |N_k - T/K| / (T/K)
    double balance_tolerance = 0.0;
    bool balance_ok = false;

    std::map<std::string, double> nash_gaps;  // per deviation mode, if audited

    double lipschitz_estimate = 0.0;             // empirical L from the probability map
    double corollary1_satisfied_fraction = 0.0;  // rounds with gap <= L sqrt(alpha) lambda^tau
    double corollary1_max_gap = 0.0;
    double trace_quantile = 0.0;
    bool corollary1_ok = false;
};

AuditReport audit(const SimResult& result, const SimConfig& config);

// Fig.-style pull-count histogram: N_k(T) per arm.
std::vector<long long> figure2_histogram(const SimResult& result);

double balance_statistic(const std::vector<long long>& pulls, long long horizon);

// Human-readable block plus "key = value" lines for machine use.
std::string format_report(const AuditReport& report);
std::string serialize_report(const AuditReport& report);

}  // namespace smab
