#include "smab/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <stdexcept>

namespace smab {

std::string to_string(DeviationMode mode) {
    switch (mode) {
        case DeviationMode::Equilibrium: return "equilibrium";
        case DeviationMode::AlwaysTruthful: return "truthful";
        case DeviationMode::Overbid: return "overbid";
        case DeviationMode::Underbid: return "underbid";
        case DeviationMode::InflateMessage: return "inflate-message";
        case DeviationMode::ZeroMessage: return "zero-message";
    }
    return "?";
}

std::optional<DeviationMode> deviation_mode_from_string(const std::string& name) {
    if (name == "equilibrium") return DeviationMode::Equilibrium;
    if (name == "truthful") return DeviationMode::AlwaysTruthful;
    if (name == "overbid") return DeviationMode::Overbid;
    if (name == "underbid") return DeviationMode::Underbid;
    if (name == "inflate-message") return DeviationMode::InflateMessage;
    if (name == "zero-message") return DeviationMode::ZeroMessage;
    return std::nullopt;
}

double SimConfig::defection_slack() const {
    if (defection_slack_override) return *defection_slack_override;
    return ArmParams::default_defection_slack(arm_count, horizon, player.delta);
}

double SimConfig::offer_scale() const {
    if (offer_scale_override) return *offer_scale_override;
    return ArmParams::default_offer_scale(arm_count, horizon, player.delta);
}

ArmStrategy SimConfig::strategy_of(int k) const {
    return strategies.empty() ? ArmStrategy::Equilibrium : strategies.at(k);
}

MessageMode SimConfig::message_mode_of(int k) const {
    return message_modes.empty() ? MessageMode::Honest : message_modes.at(k);
}

void SimConfig::validate() const {
    if (arm_count < 2) throw std::invalid_argument("simulation needs K >= 2");
    if (horizon < 1) throw std::invalid_argument("horizon must be positive");
    if (tau < 1) throw std::invalid_argument("tau must be at least 1");
    if (static_cast<int>(means.size()) != arm_count)
        throw std::invalid_argument("means vector must have one entry per arm");
    for (double m : means)
        if (!(m >= 0.0 && m <= 1.0)) throw std::invalid_argument("arm means must lie in [0,1]");
    if (!(edge_probability >= 0.0 && edge_probability <= 1.0))
        throw std::invalid_argument("edge probability must lie in [0,1]");
    if (!strategies.empty() && static_cast<int>(strategies.size()) != arm_count)
        throw std::invalid_argument("strategy table must have one entry per arm");
    if (!message_modes.empty() && static_cast<int>(message_modes.size()) != arm_count)
        throw std::invalid_argument("message table must have one entry per arm");
    if (player.arm_count != arm_count || player.horizon != horizon)
        throw std::invalid_argument("player config disagrees with simulation dimensions");
    player.validate();
    ArmParams probe{0, means.at(0), defection_slack(), offer_scale()};
    probe.validate();
    if (record_stride < 0) throw std::invalid_argument("record stride must be nonnegative");
    if (forced_probabilities) {
        if (static_cast<int>(forced_probabilities->size()) != arm_count)
            throw std::invalid_argument("forced probabilities must have one entry per arm");
        double sum = 0.0;
        for (double v : *forced_probabilities) {
            if (v < 0.0) throw std::invalid_argument("forced probabilities must be nonnegative");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("forced probabilities must sum to one");
    }
    if (!(balance_tolerance > 0.0)) throw std::invalid_argument("balance tolerance must be > 0");
    if (!(trace_quantile > 0.0 && trace_quantile <= 1.0))
        throw std::invalid_argument("trace quantile must lie in (0,1]");
}

std::vector<std::string> SimConfig::analysis_preconditions() const {
    std::vector<std::string> out;
    const double t = static_cast<double>(horizon);
    const double k = static_cast<double>(arm_count);
    char buf[160];

    const double k_cap = std::cbrt(t) / std::log(t);
    std::snprintf(buf, sizeof buf, "K <= T^(1/3)/ln T: %s (K=%d, cap=%.3f)",
                  k <= k_cap ? "satisfied" : "violated", arm_count, k_cap);
    out.emplace_back(buf);

    const double rho_cap = 1.0 / (t * t);
    std::snprintf(buf, sizeof buf, "rho <= 1/T^2: %s (rho=%.3g, cap=%.3g)",
                  player.rho <= rho_cap ? "satisfied" : "violated", player.rho, rho_cap);
    out.emplace_back(buf);

    const double delta_floor = std::sqrt(t * std::log(t));
    std::snprintf(buf, sizeof buf, "delta >= sqrt(T ln T): %s (delta=%.6g, floor=%.6g)",
                  player.delta >= delta_floor ? "satisfied" : "violated", player.delta,
                  delta_floor);
    out.emplace_back(buf);

    std::vector<double> sorted = means;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    if (sorted.size() >= 2) {
        const double lhs = sorted[0] - sorted[1];
        const double rhs = sorted[0] / k;
        std::snprintf(buf, sizeof buf, "mu1 - mu2 <= mu1/K: %s (gap=%.6g, cap=%.6g)",
                      lhs <= rhs ? "satisfied" : "violated", lhs, rhs);
        out.emplace_back(buf);
    }
    return out;
}

namespace {

Graph resolve_graph(const SimConfig& config) {
    if (config.topology) {
        if (config.topology->node_count() != config.arm_count)
            throw std::invalid_argument("explicit topology has wrong node count");
        if (!config.topology->connected())
            throw std::invalid_argument("explicit topology is disconnected");
        return *config.topology;
    }
    Graph g = generate_erdos_renyi(config.arm_count, config.edge_probability, config.graph_seed);
    if (!g.connected())
        throw std::invalid_argument(
            "generated graph is disconnected; resample with a different graph seed");
    return g;
}

// A lying arm forges the value it injects into the round's gossip phase (its
// claimed I_k); the relaying iterations afterwards run the plain protocol.
// Forging every relay hop instead would compound Inflate to 10^tau and
// overflow at the audited scales.
void apply_message_corruption(const std::vector<MessageMode>& modes, Eigen::VectorXd& values) {
    for (Eigen::Index k = 0; k < values.size(); ++k)
        values[k] = corrupt_message(values[k], modes[static_cast<std::size_t>(k)]);
}

struct ArmRuntime {
    ArmState state;
    ArmParams params;
    ArmStrategy strategy = ArmStrategy::Equilibrium;
    MessageMode message_mode = MessageMode::Honest;
    // previous-round data consumed by the replica refresh
    double prev_own_offer = 0.0;
    bool prev_observed = false;
    double prev_observe_probability = 0.0;
};

double actual_report(const ArmRuntime& arm, double reward) {
    switch (arm.strategy) {
        case ArmStrategy::Equilibrium: return offer(arm.state, arm.params, reward);
        case ArmStrategy::Truthful: return reward;
        case ArmStrategy::Overbid:
        case ArmStrategy::Underbid:
            return deviant_offer(arm.state, arm.params, reward, arm.strategy);
    }
    throw std::logic_error("unknown strategy");
}

// Sealed bid as the omniscient log sees it before the draw: for strategies
// whose report depends on the realized reward, the stand-in is the arm's
// mean report (counterfactual rewards are never drawn, which keeps the
// reward stream aligned across paired runs).
double counterfactual_offer(const ArmRuntime& arm, double mean) {
    switch (arm.strategy) {
        case ArmStrategy::Equilibrium:
            return arm.state.defected ? mean : offer(arm.state, arm.params, 0.0);
        case ArmStrategy::Truthful: return mean;
        case ArmStrategy::Overbid:
        case ArmStrategy::Underbid:
            return deviant_offer(arm.state, arm.params, 0.0, arm.strategy);
    }
    throw std::logic_error("unknown strategy");
}

}  // namespace

SimResult simulate(const SimConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();

    const int k_count = config.arm_count;
    const long long horizon = config.horizon;

    SimResult result;
    result.graph = resolve_graph(config);
    result.matrix = metropolis_weights(result.graph);
    result.mixing = mixing_rate(result.matrix);
    if (!result.mixing.is_valid) {
        std::string why = "combination matrix failed validation:";
        for (const auto& v : result.mixing.violations) why += " " + v;
        throw std::runtime_error(why);
    }
    result.master_seed = config.master_seed;
    result.resolved_defection_slack = config.defection_slack();
    result.resolved_offer_scale = config.offer_scale();
    result.precondition_report = config.analysis_preconditions();

    std::vector<ArmRuntime> arms(k_count);
    for (int k = 0; k < k_count; ++k) {
        ArmRuntime& a = arms[k];
        a.state.index = k;
        a.strategy = config.strategy_of(k);
        a.state.strategy = a.strategy;
        a.message_mode = config.message_mode_of(k);
        a.state.message_mode = a.message_mode;
        a.params = ArmParams{k, config.means[k], result.resolved_defection_slack,
                             result.resolved_offer_scale};
        a.params.validate();
    }

    PlayerState player =
        init_player(config.player, Rng::stream(config.master_seed, "player"));
    Rng rewards_rng = Rng::stream(config.master_seed, "rewards");

    const bool any_corruption =
        std::any_of(arms.begin(), arms.end(),
                    [](const ArmRuntime& a) { return a.message_mode != MessageMode::Honest; });
    std::vector<MessageMode> modes(k_count);
    for (int k = 0; k < k_count; ++k) modes[k] = arms[k].message_mode;

    // closed neighborhoods for the side-observation variant
    std::vector<std::vector<int>> closed(k_count);
    if (config.player.side_observation) {
        for (int k = 0; k < k_count; ++k) {
            closed[k] = result.graph.neighbors(k);
            closed[k].push_back(k);
        }
    }

    result.pull_counts.assign(k_count, 0);
    result.utilities.assign(k_count, 0.0);
    result.revenue_per_arm.assign(k_count, 0.0);
    result.reward_sums.assign(k_count, 0.0);
    result.offer_sums.assign(k_count, 0.0);
    result.trace_disagreement.reserve(horizon);
    result.trace_alpha.reserve(horizon);
    result.trace_gap.reserve(horizon);
    result.trace_info_mean.reserve(horizon);
    result.trace_p_max.reserve(horizon);

    Eigen::VectorXd info(k_count), gossip(k_count), scratch(k_count);
    Eigen::VectorXd p_hat_vec(k_count);
    std::vector<double> offers(k_count, 0.0);
    Eigen::VectorXd prev_info;  // for skip_unchanged_consensus
    Eigen::VectorXd cached_gossip(k_count);
    double cached_alpha = 0.0, cached_d_tau = 0.0;
    bool cache_valid = false;

    int prev_pulled = -1;
    const long long half_point = horizon / 2;

    for (long long t = 1; t <= horizon; ++t) {
        try {
            // (1) each arm refreshes its replica from the settled round
            if (t > 1) {
                for (int k = 0; k < k_count; ++k) {
                    ArmRuntime& a = arms[k];
                    std::optional<SideObservationMirror> mirror;
                    if (config.player.side_observation)
                        mirror = SideObservationMirror{a.prev_observed,
                                                       a.prev_observe_probability};
                    local_info_update(a.state, k == prev_pulled, a.prev_own_offer,
                                      a.state.p_hat.value(), config.player, mirror);
                }
            }

            // (2) consensus phase over the raw (linear-domain) infos
            for (int k = 0; k < k_count; ++k) {
                info[k] = std::exp(arms[k].state.local_log_info);
                if (!std::isfinite(info[k]))
                    throw std::runtime_error("intrinsic information overflowed");
            }
            const bool reuse = config.skip_unchanged_consensus && cache_valid &&
                               prev_info.size() == info.size() &&
                               (prev_info.array() == info.array()).all();
            double alpha_t, d_tau;
            if (reuse) {
                gossip = cached_gossip;
                alpha_t = cached_alpha;
                d_tau = cached_d_tau;
            } else {
                gossip = info;
                if (any_corruption) apply_message_corruption(modes, gossip);
                alpha_t = disagreement(gossip);
                std::vector<double>* inner = nullptr;
                DisagreementTrace* inner_owner = nullptr;
                if (t == 1 || t == horizon) {
                    inner_owner =
                        (t == 1) ? &result.consensus_trace_first : &result.consensus_trace_last;
                    inner_owner->alpha_t = alpha_t;
                    inner_owner->lambda = result.mixing.lambda;
                    inner_owner->disagreement.assign(1, alpha_t);
                    inner = &inner_owner->disagreement;
                }
                for (int n = 1; n <= config.tau; ++n) {
                    consensus_step_into(result.matrix, gossip, scratch);
                    gossip.swap(scratch);
                    if (inner) inner->push_back(disagreement(gossip));
                }
                d_tau = disagreement(gossip);
                if (config.skip_unchanged_consensus) {
                    prev_info = info;
                    cached_gossip = gossip;
                    cached_alpha = alpha_t;
                    cached_d_tau = d_tau;
                    cache_valid = true;
                }
            }
            result.trace_alpha.push_back(alpha_t);
            result.trace_disagreement.push_back(d_tau);
            result.trace_info_mean.push_back(info.mean());

            // (3) probability estimates and sealed bids
            for (int k = 0; k < k_count; ++k) {
                arms[k].state.p_hat.reset();
                p_hat_vec[k] = estimate_probability(arms[k].state, gossip[k], config.player);
            }
            for (int k = 0; k < k_count; ++k)
                offers[k] = counterfactual_offer(arms[k], config.means[k]);

            // (4) player probabilities, selection, reward draw, report
            Eigen::VectorXd p;
            if (config.forced_probabilities) {
                p = Eigen::Map<const Eigen::VectorXd>(config.forced_probabilities->data(),
                                                      k_count);
            } else {
                p = pull_probabilities(player, config.player);
            }
            const int pulled = select_arm(player, p);
            const double reward = rewards_rng.bernoulli(config.means[pulled]) ? 1.0 : 0.0;
            const double reported = actual_report(arms[pulled], reward);
            offers[pulled] = reported;

            // (5) player update
            if (config.player.side_observation) {
                std::vector<SideObservation> side;
                side.reserve(closed[pulled].size());
                for (int l : closed[pulled]) {
                    double reveal_p = p[l];
                    for (int j : result.graph.neighbors(l)) reveal_p += p[j];
                    side.push_back(SideObservation{l, offers[l], reveal_p});
                }
                observe(player, config.player, pulled, reported, p, side);
                for (int k = 0; k < k_count; ++k) {
                    arms[k].prev_observed = false;
                    arms[k].prev_observe_probability = 0.0;
                }
                for (int l : closed[pulled]) {
                    double reveal_p_hat = p_hat_vec[l];
                    for (int j : result.graph.neighbors(l)) reveal_p_hat += p_hat_vec[j];
                    arms[l].prev_observed = true;
                    arms[l].prev_observe_probability = reveal_p_hat;
                }
            } else {
                observe(player, config.player, pulled, reported, p);
            }

            // (6) bookkeeping
            const double retained = reward - reported;
            if (reported + retained != reward)
                throw std::runtime_error("conservation recombination broke (non-binary reward?)");
            ArmRuntime& winner = arms[pulled];
            winner.state.pull_count += 1;
            winner.state.utility += retained;
            result.pull_counts[pulled] += 1;
            result.utilities[pulled] += retained;
            result.revenue_per_arm[pulled] += reported;
            result.reward_sums[pulled] += reward;
            result.revenue += reported;
            for (int k = 0; k < k_count; ++k) result.offer_sums[k] += offers[k];

            double gap = 0.0;
            for (int k = 0; k < k_count; ++k)
                gap = std::max(gap, std::abs(p[k] - p_hat_vec[k]));
            result.trace_gap.push_back(gap);
            result.trace_p_max.push_back(p.maxCoeff());

            if (t == half_point && half_point >= 1) {
                double best = result.offer_sums[0];
                for (double v : result.offer_sums) best = std::max(best, v);
                result.regret_half = best - result.revenue;
                result.pull_counts_half = result.pull_counts;
            }

            for (int k = 0; k < k_count; ++k) {
                ArmRuntime& a = arms[k];
                if (a.strategy != ArmStrategy::Equilibrium) continue;
                const bool was = a.state.defected;
                if (defection_check(a.state, t, k_count, a.params.defection_slack) && !was)
                    result.defections.emplace_back(t, k);
            }

            if (config.record_stride > 0 && (t - 1) % config.record_stride == 0) {
                RoundRecord rec;
                rec.t = t;
                rec.pulled_arm = pulled;
                rec.reward = reward;
                rec.reported = reported;
                rec.offers = offers;
                rec.probabilities.assign(p.data(), p.data() + k_count);
                rec.estimated_probabilities.assign(p_hat_vec.data(), p_hat_vec.data() + k_count);
                rec.disagreement_tau = d_tau;
                result.sampled_records.push_back(std::move(rec));
            }

            for (int k = 0; k < k_count; ++k) arms[k].prev_own_offer = offers[k];
            prev_pulled = pulled;
        } catch (const std::exception& e) {
            throw std::runtime_error("round " + std::to_string(t) + ": " + e.what());
        }
    }

    double best_total = result.offer_sums.empty() ? 0.0 : result.offer_sums[0];
    for (double v : result.offer_sums) best_total = std::max(best_total, v);
    result.regret_total = best_total - result.revenue;

    const auto stop = std::chrono::steady_clock::now();
    result.wall_seconds = std::chrono::duration<double>(stop - start).count();
    return result;
}

DeviationOutcome run_deviation_experiment(const SimConfig& config, int deviant_arm,
                                          DeviationMode mode) {
    if (deviant_arm < 0 || deviant_arm >= config.arm_count)
        throw std::invalid_argument("deviant arm index out of range");

    SimConfig conform_cfg = config;
    conform_cfg.strategies.assign(config.arm_count, ArmStrategy::Equilibrium);
    conform_cfg.message_modes.assign(config.arm_count, MessageMode::Honest);

    SimConfig deviate_cfg = conform_cfg;
    switch (mode) {
        case DeviationMode::Equilibrium: break;
        case DeviationMode::AlwaysTruthful:
            deviate_cfg.strategies[deviant_arm] = ArmStrategy::Truthful;
            break;
        case DeviationMode::Overbid:
            deviate_cfg.strategies[deviant_arm] = ArmStrategy::Overbid;
            break;
        case DeviationMode::Underbid:
            deviate_cfg.strategies[deviant_arm] = ArmStrategy::Underbid;
            break;
        case DeviationMode::InflateMessage:
            deviate_cfg.message_modes[deviant_arm] = MessageMode::Inflate;
            break;
        case DeviationMode::ZeroMessage:
            deviate_cfg.message_modes[deviant_arm] = MessageMode::Zero;
            break;
    }

    DeviationOutcome out;
    out.mode = mode;
    out.conform = simulate(conform_cfg);
    out.deviate = simulate(deviate_cfg);
    out.conform_utility = out.conform.utilities[deviant_arm];
    out.deviate_utility = out.deviate.utilities[deviant_arm];
    out.gap = out.deviate_utility - out.conform_utility;
    return out;
}

std::vector<SweepCell> sweep(const std::vector<SimConfig>& configs, int replicas, int jobs) {
    if (configs.empty()) throw std::invalid_argument("sweep needs at least one config");
    if (replicas < 1) throw std::invalid_argument("sweep needs at least one replica");
    if (jobs < 1) jobs = 1;

    std::vector<SweepCell> cells;
    cells.reserve(configs.size() * replicas);
    for (std::size_t i = 0; i < configs.size(); ++i) {
        for (int j = 0; j < replicas; ++j) {
            SweepCell cell;
            cell.config_index = i;
            cell.replica = j;
            cell.seed = (j == 0) ? configs[i].master_seed
                                 : stream_seed(configs[i].master_seed,
                                               "replica/" + std::to_string(j));
            cells.push_back(std::move(cell));
        }
    }

    const auto run_cell = [&](SweepCell& cell) {
        try {
            SimConfig cfg = configs[cell.config_index];
            cfg.master_seed = cell.seed;
            cell.result = simulate(cfg);
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    };

    if (jobs == 1) {
        for (SweepCell& cell : cells) run_cell(cell);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::future<void>> workers;
        const int worker_count = static_cast<int>(
            std::min<std::size_t>(static_cast<std::size_t>(jobs), cells.size()));
        workers.reserve(worker_count);
        for (int w = 0; w < worker_count; ++w) {
            workers.push_back(std::async(std::launch::async, [&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= cells.size()) return;
                    run_cell(cells[i]);
                }
            }));
        }
        for (auto& f : workers) f.get();
    }
    return cells;
}

}  // namespace smab
