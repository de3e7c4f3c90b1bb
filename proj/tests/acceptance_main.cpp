// Acceptance suite: one checkable criterion per function, each printing a
// single [PASS]/[FAIL] line. Run all with no arguments or a single criterion
// by number (used by ctest). Exit code is the number of failures.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "smab/consensus.hpp"
#include "smab/engine.hpp"
#include "smab/metrics.hpp"
#include "smab/presets.hpp"
#include "smab/runner.hpp"

using namespace smab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string details;
};

std::uint64_t connected_seed(int k, double p, std::uint64_t start) {
    for (std::uint64_t seed = start;; ++seed)
        if (generate_erdos_renyi(k, p, seed).connected()) return seed;
}

// ---- shared headline runs (criteria 1 and 2) ------------------------------

SimConfig headline_config() {
    RunSpec spec = *preset_spec("table1");
    SimConfig cfg = spec.base;
    cfg.graph_seed = connected_seed(cfg.arm_count, cfg.edge_probability, cfg.graph_seed);
    cfg.record_stride = 0;  // tallies and traces only
    return cfg;
}

const std::vector<SimResult>& headline_runs() {
    static const std::vector<SimResult> runs = [] {
        std::vector<SimResult> out;
        const SimConfig base = headline_config();
        for (int rep = 0; rep < 10; ++rep) {
            SimConfig cfg = base;
            cfg.master_seed =
                rep == 0 ? base.master_seed
                         : stream_seed(base.master_seed, "replica/" + std::to_string(rep));
            out.push_back(simulate(cfg));
            std::fprintf(stderr, "  [headline %d/10] revenue %.1f\n", rep + 1,
                         out.back().revenue);
        }
        return out;
    }();
    return runs;
}

// Criterion 1: revenue at the headline configuration, 10 seeds.
Outcome criterion1() {
    const double cap = 117838.0;
    const double reference = 105169.0;

    const auto& runs = headline_runs();
    double sum = 0.0, worst = 0.0;
    bool all_capped = true;
    for (const SimResult& r : runs) {
        sum += r.revenue;
        worst = std::max(worst, r.revenue);
        if (r.revenue > cap) all_capped = false;
    }
    const double mean = sum / runs.size();
    const double rel = std::abs(mean - reference) / reference;

    Outcome out;
    out.pass = all_capped && rel <= 0.10;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "mean revenue %.1f (reference %.0f, off by %.2f%%), max %.1f vs cap %.0f",
                  mean, reference, 100.0 * rel, worst, cap);
    out.details = buf;
    return out;
}

// Criterion 2: pull balance at the headline configuration plus the truthful
// contrast run.
Outcome criterion2() {
    const auto& runs = headline_runs();
    int balanced = 0;
    double worst_balance = 0.0;
    for (const SimResult& r : runs) {
        const double b = balance_statistic(r.pull_counts, 500000);
        worst_balance = std::max(worst_balance, b);
        if (b <= 0.10) ++balanced;
    }

    // contrast: truthful arms, best arm dominates the last half
    RunSpec truthful = *preset_spec("truthful-baseline");
    SimConfig cfg = truthful.base;
    cfg.graph_seed = connected_seed(cfg.arm_count, cfg.edge_probability, cfg.graph_seed);
    cfg.record_stride = 0;
    const SimResult base = simulate(cfg);
    const long long last_half_best =
        base.pull_counts[0] - (base.pull_counts_half.empty() ? 0 : base.pull_counts_half[0]);
    const double share =
        static_cast<double>(last_half_best) / (cfg.horizon - cfg.horizon / 2);

    // independent reference player (plain high-probability exponential
    // weighting, linear domain) run on the same seed streams
    double ref_share = 0.0;
    {
        const int k_count = cfg.arm_count;
        const auto& pc = cfg.player;
        std::vector<double> w(k_count, 1.0);
        Rng player_rng = Rng::stream(cfg.master_seed, "player");
        Rng rewards_rng = Rng::stream(cfg.master_seed, "rewards");
        long long best_last_half = 0;
        for (long long t = 1; t <= cfg.horizon; ++t) {
            double total = 0.0;
            for (double v : w) total += v;
            std::vector<double> p(k_count);
            for (int k = 0; k < k_count; ++k)
                p[k] = (1.0 - pc.gamma) * w[k] / total + pc.gamma / k_count;
            double u = player_rng.uniform01(), cum = 0.0;
            int pulled = k_count - 1;
            for (int k = 0; k < k_count; ++k) {
                cum += p[k];
                if (u < cum) {
                    pulled = k;
                    break;
                }
            }
            const double x = rewards_rng.bernoulli(cfg.means[pulled]) ? 1.0 : 0.0;
            for (int k = 0; k < k_count; ++k) {
                const double gain = (k == pulled ? x + pc.beta : pc.beta) / p[k];
                w[k] *= std::exp(pc.eta * gain);
            }
            const double top = *std::max_element(w.begin(), w.end());
            if (top > 1e250)
                for (double& v : w) v /= top;
            if (t > cfg.horizon / 2 && pulled == 0) ++best_last_half;
        }
        ref_share = static_cast<double>(best_last_half) / (cfg.horizon - cfg.horizon / 2);
    }

    Outcome out;
    out.pass = balanced >= 9 && share >= 0.60 && ref_share >= 0.60;
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "%d/10 seeds balanced (worst dev %.3f); truthful best-arm last-half share "
                  "%.2f (reference impl %.2f)",
                  balanced, worst_balance, share, ref_share);
    out.details = buf;
    return out;
}

// Criterion 3: gossip/consensus properties on 100 random connected graphs.
Outcome criterion3() {
    std::mt19937_64 gen(20240901);
    const auto uniform = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };

    int graphs = 0;
    long long checks = 0;
    Outcome out;
    while (graphs < 100) {
        const int k_count = 3 + static_cast<int>(gen() % 48);
        const Graph g = generate_erdos_renyi(k_count, 0.15 + 0.8 * uniform(), gen());
        if (!g.connected()) continue;
        ++graphs;

        const CombinationMatrix a = metropolis_weights(g);
        const Eigen::MatrixXd& m = a.entries;

        // (a) double stochasticity and symmetry to 1e-12
        if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
            out.details = "symmetry violated";
            return out;
        }
        for (int i = 0; i < k_count; ++i) {
            if (std::abs(m.row(i).sum() - 1.0) > 1e-12 ||
                std::abs(m.col(i).sum() - 1.0) > 1e-12) {
                out.details = "stochasticity violated";
                return out;
            }
        }

        // (b) strict spectral contraction
        const MixingReport mix = mixing_rate(a);
        if (!(mix.lambda < 1.0) || !mix.is_valid) {
            out.details = "mixing rate not below one";
            return out;
        }

        Eigen::VectorXd v(k_count);
        for (int i = 0; i < k_count; ++i) v[i] = uniform();
        ConsensusState state{v, 0};
        const double alpha = disagreement(v);

        const int tau = 30;
        for (int n = 1; n <= tau; ++n) {
            const double before = disagreement(state.values);
            const double mean_before = state.values.mean();
            state = consensus_step(state, a);
            const double after = disagreement(state.values);
            const double mean_after = state.values.mean();
            checks += 3;

            // (c) mean preservation, relative
            if (std::abs(mean_after - mean_before) >
                1e-12 * std::max(1.0, std::abs(mean_before))) {
                out.details = "mean drifted at graph " + std::to_string(graphs);
                return out;
            }
            // (d) per-step contraction
            if (after > mix.lambda * mix.lambda * before + 1e-12) {
                out.details = "contraction violated at graph " + std::to_string(graphs);
                return out;
            }
            // (e) pointwise geometric envelope
            if (after > decay_bound(alpha, mix.lambda, n) + 1e-12) {
                out.details = "envelope violated at graph " + std::to_string(graphs);
                return out;
            }
        }
    }
    out.pass = true;
    out.details = "100 graphs, " + std::to_string(checks) + " per-step checks";
    return out;
}

// Criterion 4: the probability gap shrinks with tau and is < 1e-3 at tau=50.
Outcome criterion4() {
    RunSpec spec = *preset_spec("tau-sweep");
    SimConfig base = spec.base;
    base.graph_seed = connected_seed(base.arm_count, base.edge_probability, base.graph_seed);
    base.record_stride = 0;

    std::vector<SimConfig> configs;
    for (int tau : spec.sweep_taus) {
        SimConfig cfg = base;
        cfg.tau = tau;
        configs.push_back(cfg);
    }
    const auto cells = sweep(configs, 10, 4);

    std::vector<double> mean_max_gap(configs.size(), 0.0);
    double tau50_worst = 0.0;
    for (const SweepCell& cell : cells) {
        if (!cell.result) return {false, "cell failed: " + cell.error};
        double max_gap = 0.0;
        for (double gap : cell.result->trace_gap) max_gap = std::max(max_gap, gap);
        mean_max_gap[cell.config_index] += max_gap / 10.0;
        if (spec.sweep_taus[cell.config_index] == 50) tau50_worst = std::max(tau50_worst, max_gap);
    }

    bool monotone = true;
    for (std::size_t i = 1; i < mean_max_gap.size(); ++i)
        if (mean_max_gap[i] > mean_max_gap[i - 1] + 1e-12) monotone = false;

    Outcome out;
    out.pass = monotone && tau50_worst < 1e-3;
    std::ostringstream detail;
    detail.precision(3);
    detail << "seed-mean max gap by tau:";
    for (std::size_t i = 0; i < configs.size(); ++i)
        detail << " " << spec.sweep_taus[i] << "->" << std::scientific << mean_max_gap[i];
    detail << "; worst round gap at tau=50: " << tau50_worst;
    out.details = detail.str();
    return out;
}

// Criterion 5: paired-seed Nash audit at K=5, T=2e4.
Outcome criterion5() {
    RunSpec spec = *preset_spec("nash-audit");
    SimConfig base = spec.base;
    base.graph_seed = connected_seed(base.arm_count, base.edge_probability, base.graph_seed);
    base.record_stride = 0;
    const int probe = *spec.deviation_arm;

    const double bound = std::sqrt(static_cast<double>(base.arm_count) *
                                   static_cast<double>(base.horizon) * base.player.delta);

    double worst_gap = -1e300;
    std::string worst_mode = "-";
    double worst_conform_dev = 0.0;
    bool pass = true;

    for (int rep = 0; rep < 10; ++rep) {
        SimConfig cfg = base;
        cfg.master_seed = rep == 0
                              ? base.master_seed
                              : stream_seed(base.master_seed, "replica/" + std::to_string(rep));
        bool conform_checked = false;
        for (DeviationMode mode : spec.deviation_modes) {
            const DeviationOutcome outcome = run_deviation_experiment(cfg, probe, mode);
            if (outcome.gap > worst_gap) {
                worst_gap = outcome.gap;
                worst_mode = to_string(mode);
            }
            if (outcome.gap > bound) pass = false;
            if (!conform_checked) {
                conform_checked = true;
                // conforming utility per arm within the bound of mu_k T / K
                for (int k = 0; k < base.arm_count; ++k) {
                    const double fair = base.means[k] * base.horizon / base.arm_count;
                    const double dev = std::abs(outcome.conform.utilities[k] - fair);
                    worst_conform_dev = std::max(worst_conform_dev, dev);
                    if (dev > bound) pass = false;
                }
            }
        }
        std::fprintf(stderr, "  [nash %d/10] worst gap so far %.1f\n", rep + 1, worst_gap);
    }

    Outcome out;
    out.pass = pass;
    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "worst gap %.1f (%s) vs bound %.1f; worst |U_k - mu_k T/K| = %.1f",
                  worst_gap, worst_mode.c_str(), bound, worst_conform_dev);
    out.details = buf;
    return out;
}

// Criterion 6: exact conservation, checked by walking a full round log.
Outcome criterion6() {
    SimConfig cfg;
    cfg.arm_count = 4;
    cfg.horizon = 4000;
    cfg.tau = 5;
    cfg.edge_probability = 0.8;
    cfg.graph_seed = connected_seed(4, 0.8, 1);
    cfg.means = {0.85, 0.8, 0.55, 0.4};
    cfg.player = PlayerConfig::make(PlayerAlgorithm::Exp3P, 4, 4000, 1.0 / (4000.0 * 4000.0));
    cfg.master_seed = 77;
    cfg.record_stride = 1;
    // mixed strategies and a reachable defection slack stress the accounting
    cfg.strategies = {ArmStrategy::Overbid, ArmStrategy::Equilibrium, ArmStrategy::Equilibrium,
                      ArmStrategy::Truthful};
    cfg.defection_slack_override = 100.0;

    const SimResult r = simulate(cfg);
    if (r.sampled_records.size() != 4000) return {false, "expected a full round log"};

    std::vector<double> folded(4, 0.0), utils(4, 0.0), revs(4, 0.0);
    long long pulls = 0;
    for (const RoundRecord& rec : r.sampled_records) {
        const double retained = rec.reward - rec.reported;
        if (rec.reported + retained != rec.reward)
            return {false, "per-round recombination broke at t=" + std::to_string(rec.t)};
        folded[rec.pulled_arm] += rec.reported + retained;
        utils[rec.pulled_arm] += retained;
        revs[rec.pulled_arm] += rec.reported;
        ++pulls;
    }
    for (int k = 0; k < 4; ++k) {
        if (folded[k] != r.reward_sums[k])
            return {false, "fold mismatch on arm " + std::to_string(k)};
        if (utils[k] != r.utilities[k])
            return {false, "utility accumulator mismatch on arm " + std::to_string(k)};
        if (revs[k] != r.revenue_per_arm[k])
            return {false, "revenue accumulator mismatch on arm " + std::to_string(k)};
    }
    long long count = 0;
    for (long long n : r.pull_counts) count += n;
    if (count != cfg.horizon || pulls != cfg.horizon)
        return {false, "pull counts do not sum to T"};

    return {true, "4000 rounds, bit-exact per-round recombination and fold totals"};
}

// Criterion 7: sublinearity proxy for the truthful baseline.
Outcome criterion7() {
    RunSpec spec = *preset_spec("truthful-baseline");
    SimConfig base = spec.base;
    base.graph_seed = connected_seed(base.arm_count, base.edge_probability, base.graph_seed);
    base.record_stride = 0;

    double ratio_sum = 0.0;
    int counted = 0;
    for (int rep = 0; rep < 10; ++rep) {
        SimConfig cfg = base;
        cfg.master_seed = rep == 0
                              ? base.master_seed
                              : stream_seed(base.master_seed, "replica/" + std::to_string(rep));
        const SimResult r = simulate(cfg);
        if (r.regret_half <= 0.0) return {false, "nonpositive half-time regret"};
        ratio_sum += r.regret_total / r.regret_half;
        ++counted;
    }
    const double mean_ratio = ratio_sum / counted;
    Outcome out;
    out.pass = mean_ratio < 2.0;
    char buf[120];
    std::snprintf(buf, sizeof buf, "mean regret(T)/regret(T/2) = %.3f over %d seeds",
                  mean_ratio, counted);
    out.details = buf;
    return out;
}

// Criterion 8: byte-identical summaries on re-runs of presets.
Outcome criterion8() {
    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };

    for (const char* name : {"smoke", "stress-B"}) {
        const RunSpec spec = *preset_spec(name);
        RunOptions options;
        options.quiet = true;
        const fs::path dir1 = fs::temp_directory_path() / (std::string("smab-acc8-") + name + "-a");
        const fs::path dir2 = fs::temp_directory_path() / (std::string("smab-acc8-") + name + "-b");
        fs::remove_all(dir1);
        fs::remove_all(dir2);
        if (run_spec(spec, dir1, options) != 0) return {false, "run failed"};
        if (run_spec(spec, dir2, options) != 0) return {false, "re-run failed"};
        if (slurp(dir1 / "summary.csv") != slurp(dir2 / "summary.csv"))
            return {false, std::string("summary.csv differs for preset ") + name};
    }
    return {true, "smoke and stress-B presets re-ran byte-identically"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"headline revenue cap and reference total", criterion1},
        {"pull balance and the truthful contrast", criterion2},
        {"gossip matrix and decay properties on random graphs", criterion3},
        {"probability gap decreasing in tau, < 1e-3 at tau=50", criterion4},
        {"paired-seed deviation gaps within sqrt(KTd)", criterion5},
        {"bit-exact conservation on a full round log", criterion6},
        {"baseline regret sublinearity proxy", criterion7},
        {"byte-identical preset re-runs", criterion8},
    };

    int requested = 0;
    if (argc > 1) {
        requested = std::atoi(argv[1]);
        if (requested < 1 || requested > static_cast<int>(criteria.size())) {
            std::cerr << "criterion number must be 1.." << criteria.size() << "\n";
            return 64;
        }
    }

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (requested != 0 && static_cast<int>(i + 1) != requested) continue;
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.details = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %zu: %s — %s\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].first.c_str(), outcome.details.c_str());
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    return failures;
}
