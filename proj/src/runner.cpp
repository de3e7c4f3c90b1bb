#include "smab/runner.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <iostream>
#include <map>
#include <sstream>

#include "smab/metrics.hpp"
#include "smab/presets.hpp"
#include "smab/report.hpp"
#include "smab/version.hpp"

namespace smab {

namespace {

// Keep the configured seed when it already yields a connected graph,
// otherwise walk forward until one connects.
int resample_connected_graph(SimConfig& cfg) {
    if (cfg.topology) return 0;
    int attempts = 0;
    std::uint64_t seed = cfg.graph_seed;
    for (; attempts < 1000; ++attempts, ++seed) {
        Graph g = generate_erdos_renyi(cfg.arm_count, cfg.edge_probability, seed);
        if (g.connected()) {
            cfg.graph_seed = seed;
            return attempts;
        }
    }
    throw std::runtime_error("no connected graph found in 1000 attempts; raise graph.p");
}

std::uint64_t replica_seed(std::uint64_t master, int replica) {
    return replica == 0 ? master : stream_seed(master, "replica/" + std::to_string(replica));
}

}  // namespace

int run_spec(RunSpec spec, const std::filesystem::path& out_dir, const RunOptions& options) {
    if (options.seed) spec.base.master_seed = *options.seed;
    if (options.stride) spec.base.record_stride = *options.stride;
    spec.base.validate();

    std::filesystem::create_directories(out_dir);
    const auto wall_start = std::chrono::steady_clock::now();
    const int graph_attempts = resample_connected_graph(spec.base);

    std::vector<SummaryRow> rows;
    // deques: rows keep pointers into these, and deque growth never moves
    // existing elements
    std::deque<SimConfig> cell_configs;
    std::deque<SimResult> cell_results;

    bool audit_failed = false;
    std::ostringstream audit_text;
    const SimResult* showcase = nullptr;  // run used for rounds.csv / plots
    const SimConfig* showcase_cfg = nullptr;

    if (spec.deviation_arm) {
        // Paired-seed deviation probes, one pair per (replica, mode).
        const int probe = *spec.deviation_arm;
        std::map<std::string, double> mean_gap;
        std::map<std::string, double> max_gap;
        for (int rep = 0; rep < spec.replicas; ++rep) {
            SimConfig cfg = spec.base;
            cfg.master_seed = replica_seed(spec.base.master_seed, rep);
            for (DeviationMode mode : spec.deviation_modes) {
                DeviationOutcome outcome = run_deviation_experiment(cfg, probe, mode);
                cell_configs.push_back(cfg);
                cell_results.push_back(std::move(outcome.deviate));
                SummaryRow row;
                row.kind = "deviation";
                row.config_index = 0;
                row.replica = rep;
                row.seed = cfg.master_seed;
                row.mode = to_string(mode);
                row.config = &cell_configs.back();
                row.result = &cell_results.back();
                row.conform_utility = outcome.conform_utility;
                row.deviate_utility = outcome.deviate_utility;
                row.gap = outcome.gap;
                rows.push_back(row);
                mean_gap[row.mode] += outcome.gap / spec.replicas;
                auto it = max_gap.find(row.mode);
                if (it == max_gap.end() || outcome.gap > it->second)
                    max_gap[row.mode] = outcome.gap;
                if (!showcase) {
                    cell_configs.push_back(cfg);
                    cell_results.push_back(std::move(outcome.conform));
                    showcase = &cell_results.back();
                    showcase_cfg = &cell_configs.back();
                }
            }
        }
        AuditReport report = audit(*showcase, *showcase_cfg);
        report.nash_gaps = mean_gap;
        const double bound = report.revenue_bound;  // sqrt(KT delta)
        audit_text << format_report(report);
        audit_text << "nash audit (bound sqrt(KTd) = " << bound << ")\n";
        for (const auto& [mode, worst] : max_gap) {
            const bool ok = worst <= bound;
            audit_text << "  " << mode << "  max gap " << worst << "  "
                       << (ok ? "within bound" : "EXCEEDS bound") << "\n";
            if (!ok) audit_failed = true;
        }
        audit_text << serialize_report(report);
        if (!report.bound_satisfied || !report.balance_ok) audit_failed = true;
    } else {
        // Plain run, optionally replicated and swept over tau.
        std::vector<SimConfig> configs;
        if (spec.sweep_taus.empty()) {
            configs.push_back(spec.base);
        } else {
            for (int tau : spec.sweep_taus) {
                SimConfig cfg = spec.base;
                cfg.tau = tau;
                configs.push_back(cfg);
            }
        }
        std::vector<SweepCell> cells = sweep(configs, spec.replicas, options.jobs);
        for (SweepCell& cell : cells) {
            SummaryRow row;
            row.kind = "sim";
            row.config_index = cell.config_index;
            row.replica = cell.replica;
            row.seed = cell.seed;
            cell_configs.push_back(configs[cell.config_index]);
            cell_configs.back().master_seed = cell.seed;
            row.config = &cell_configs.back();
            if (cell.result) {
                cell_results.push_back(std::move(*cell.result));
                row.result = &cell_results.back();
                if (!showcase) {
                    showcase = row.result;
                    showcase_cfg = row.config;
                }
            } else {
                row.error = cell.error;
            }
            rows.push_back(row);
        }
        if (!showcase) throw std::runtime_error("all cells failed: " + rows.front().error);
        AuditReport report = audit(*showcase, *showcase_cfg);
        audit_text << format_report(report);
        audit_text << serialize_report(report);
        if (!report.bound_satisfied || !report.balance_ok || !report.corollary1_ok)
            audit_failed = true;
    }

    atomic_write(out_dir / "summary.csv", summary_csv(rows));
    atomic_write(out_dir / "audit.txt", audit_text.str());

    if (!spec.deviation_arm && spec.sweep_taus.empty()) {
        atomic_write(out_dir / "rounds.csv", rounds_csv(*showcase));
        const DisagreementTrace& trace = showcase->consensus_trace_last.disagreement.empty()
                                             ? showcase->consensus_trace_first
                                             : showcase->consensus_trace_last;
        atomic_write(out_dir / "decay.csv", decay_csv(trace));
        if (options.plot) {
            atomic_write(out_dir / "fig2.svg", pull_histogram_svg(*showcase));
            atomic_write(out_dir / "decay.svg", decay_svg(trace));
        }
    }

    if (options.dump_topology) {
        std::ostringstream topo;
        write_graph(topo, showcase->graph);
        write_matrix(topo, showcase->matrix);
        atomic_write(out_dir / "topology.txt", topo.str());
    }

    const auto wall_stop = std::chrono::steady_clock::now();
    std::ostringstream manifest;
    manifest << "# run manifest; feed this file back via --config to reproduce the run\n";
    manifest << serialize_run_spec(spec);
    manifest << "meta.version = " << kVersion << "\n";
    manifest << "meta.graph_attempts = " << graph_attempts << "\n";
    manifest << "meta.lambda = " << showcase->mixing.lambda << "\n";
    manifest << "meta.wall_seconds = "
             << std::chrono::duration<double>(wall_stop - wall_start).count() << "\n";
    manifest << "meta.out_dir = " << out_dir.string() << "\n";
    for (std::size_t i = 0; i < showcase->precondition_report.size(); ++i)
        manifest << "meta.precondition." << i << " = " << showcase->precondition_report[i]
                 << "\n";
    atomic_write(out_dir / "manifest.txt", manifest.str());

    if (!options.quiet) {
        std::cout << audit_text.str();
        std::cout << "wrote " << (out_dir / "summary.csv").string() << "\n";
        for (const std::string& line : showcase->precondition_report)
            std::cout << "precondition: " << line << "\n";
    }

    return options.strict && audit_failed ? 1 : 0;
}

}  // namespace smab
