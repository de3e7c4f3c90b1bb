#include "smab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace smab {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& message) {
    throw std::runtime_error(source + ":" + std::to_string(line) + ": " + message);
}

std::vector<std::string> split_tokens(const std::string& value) {
    std::vector<std::string> out;
    std::istringstream in(value);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Resolver {
  public:
    explicit Resolver(const KvFile& kv) : kv_(kv) {}

    RunSpec resolve() {
        RunSpec spec;
        SimConfig& cfg = spec.base;

        cfg.arm_count = static_cast<int>(require_int("sim.arms", 2, 100000));
        cfg.horizon = require_int("sim.horizon", 1, 1LL << 40);
        cfg.tau = static_cast<int>(require_int("sim.tau", 1, 1000000));
        cfg.master_seed = get_u64("sim.master_seed").value_or(1);
        cfg.record_stride = get_int("sim.record_stride", 0, 1LL << 40).value_or(100);
        cfg.skip_unchanged_consensus = get_bool("sim.skip_unchanged_consensus").value_or(false);

        if (const KvEntry* adj = find_used("graph.adjacency")) {
            cfg.topology = parse_adjacency(*adj, cfg.arm_count);
        } else if (const KvEntry* file = find_used("graph.file")) {
            std::ifstream in(file->value);
            if (!in) fail(kv_.source, file->line, "cannot open topology file " + file->value);
            Graph g = read_graph(in);
            if (g.node_count() != cfg.arm_count)
                fail(kv_.source, file->line, "topology file node count differs from sim.arms");
            cfg.topology = std::move(g);
        }
        cfg.edge_probability = get_double("graph.p").value_or(0.6);
        cfg.graph_seed = get_u64("graph.seed").value_or(1);

        cfg.means = require_double_list("means");
        if (static_cast<int>(cfg.means.size()) != cfg.arm_count)
            fail(kv_.source, line_of("means"), "means must list one value per arm");

        const double t = static_cast<double>(cfg.horizon);
        const double rho = get_double("player.rho").value_or(std::min(0.25, 1.0 / (t * t)));
        PlayerAlgorithm algorithm = PlayerAlgorithm::Exp3P;
        if (const KvEntry* e = find_used("player.algorithm")) {
            if (e->value == "exp3") algorithm = PlayerAlgorithm::Exp3;
            else if (e->value == "exp3p") algorithm = PlayerAlgorithm::Exp3P;
            else fail(kv_.source, e->line, "player.algorithm must be exp3 or exp3p");
        }
        cfg.player = PlayerConfig::make(algorithm, cfg.arm_count, cfg.horizon, rho);
        if (auto v = get_double("player.gamma")) cfg.player.gamma = *v;
        if (auto v = get_double("player.eta")) cfg.player.eta = *v;
        if (auto v = get_double("player.beta")) cfg.player.beta = *v;
        if (auto v = get_double("player.delta")) cfg.player.delta = *v;
        cfg.player.side_observation = get_bool("player.side_observation").value_or(false);

        if (auto v = get_double("arms.defection_slack")) cfg.defection_slack_override = *v;
        if (auto v = get_double("arms.offer_scale")) cfg.offer_scale_override = *v;

        cfg.strategies.assign(cfg.arm_count, ArmStrategy::Equilibrium);
        cfg.message_modes.assign(cfg.arm_count, MessageMode::Honest);
        for (int k = 0; k < cfg.arm_count; ++k) {
            const std::string base = "arm." + std::to_string(k) + ".";
            if (const KvEntry* e = find_used(base + "strategy"))
                cfg.strategies[k] = parse_strategy(*e);
            if (const KvEntry* e = find_used(base + "message"))
                cfg.message_modes[k] = parse_message(*e);
        }
        if (const KvEntry* e = find_used("arm.*.strategy")) {
            const ArmStrategy s = parse_strategy(*e);
            cfg.strategies.assign(cfg.arm_count, s);
        }
        if (const KvEntry* e = find_used("arm.*.message")) {
            const MessageMode m = parse_message(*e);
            cfg.message_modes.assign(cfg.arm_count, m);
        }

        cfg.balance_tolerance = get_double("audit.balance_tolerance").value_or(0.10);
        cfg.trace_quantile = get_double("audit.trace_quantile").value_or(0.99);

        spec.replicas = static_cast<int>(get_int("run.replicas", 1, 100000).value_or(1));

        if (const KvEntry* e = find_used("sweep.tau")) {
            for (const std::string& tok : split_tokens(e->value)) {
                int v = 0;
                try {
                    v = std::stoi(tok);
                } catch (...) {
                    fail(kv_.source, e->line, "sweep.tau entries must be integers");
                }
                if (v < 1) fail(kv_.source, e->line, "sweep.tau entries must be >= 1");
                spec.sweep_taus.push_back(v);
            }
            if (spec.sweep_taus.empty())
                fail(kv_.source, e->line, "sweep.tau must list at least one value");
        }

        if (const KvEntry* e = find_used("deviation.arm")) {
            long long v = parse_int(*e, 0, cfg.arm_count - 1);
            spec.deviation_arm = static_cast<int>(v);
        }
        if (const KvEntry* e = find_used("deviation.modes")) {
            for (const std::string& tok : split_tokens(e->value)) {
                auto mode = deviation_mode_from_string(tok);
                if (!mode) fail(kv_.source, e->line, "unknown deviation mode '" + tok + "'");
                spec.deviation_modes.push_back(*mode);
            }
        }
        if (spec.deviation_arm && spec.deviation_modes.empty())
            fail(kv_.source, line_of("deviation.arm"),
                 "deviation.arm needs deviation.modes to probe");
        if (!spec.deviation_arm && !spec.deviation_modes.empty())
            fail(kv_.source, line_of("deviation.modes"), "deviation.modes needs deviation.arm");

        check_unknown_keys();

        try {
            cfg.validate();
        } catch (const std::exception& e) {
            throw std::runtime_error(kv_.source + ": " + e.what());
        }
        return spec;
    }

  private:
    const KvEntry* find_used(const std::string& key) {
        used_.insert(key);
        return kv_.find(key);
    }

    int line_of(const std::string& key) {
        const KvEntry* e = kv_.find(key);
        return e ? e->line : 0;
    }

    long long parse_int(const KvEntry& e, long long lo, long long hi) {
        long long v = 0;
        try {
            std::size_t pos = 0;
            v = std::stoll(e.value, &pos);
            if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
        } catch (...) {
            fail(kv_.source, e.line, "'" + e.key + "' needs an integer, got '" + e.value + "'");
        }
        if (v < lo || v > hi)
            fail(kv_.source, e.line, "'" + e.key + "' out of range [" + std::to_string(lo) +
                                         ", " + std::to_string(hi) + "]");
        return v;
    }

    long long require_int(const std::string& key, long long lo, long long hi) {
        const KvEntry* e = find_used(key);
        if (!e) throw std::runtime_error(kv_.source + ": missing required key '" + key + "'");
        return parse_int(*e, lo, hi);
    }

    std::optional<long long> get_int(const std::string& key, long long lo, long long hi) {
        const KvEntry* e = find_used(key);
        if (!e) return std::nullopt;
        return parse_int(*e, lo, hi);
    }

    std::optional<std::uint64_t> get_u64(const std::string& key) {
        const KvEntry* e = find_used(key);
        if (!e) return std::nullopt;
        try {
            // stoull silently wraps negatives, so screen the sign ourselves
            if (e->value.find('-') != std::string::npos) throw std::invalid_argument("negative");
            std::size_t pos = 0;
            const std::uint64_t v = std::stoull(e->value, &pos);
            if (pos != e->value.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (...) {
            fail(kv_.source, e->line, "'" + key + "' needs an unsigned integer");
        }
    }

    std::optional<double> get_double(const std::string& key) {
        const KvEntry* e = find_used(key);
        if (!e) return std::nullopt;
        try {
            std::size_t pos = 0;
            const double v = std::stod(e->value, &pos);
            if (pos != e->value.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (...) {
            fail(kv_.source, e->line, "'" + key + "' needs a number, got '" + e->value + "'");
        }
    }

    std::optional<bool> get_bool(const std::string& key) {
        const KvEntry* e = find_used(key);
        if (!e) return std::nullopt;
        if (e->value == "1" || e->value == "true") return true;
        if (e->value == "0" || e->value == "false") return false;
        fail(kv_.source, e->line, "'" + key + "' needs 0/1/true/false");
    }

    std::vector<double> require_double_list(const std::string& key) {
        const KvEntry* e = find_used(key);
        if (!e) throw std::runtime_error(kv_.source + ": missing required key '" + key + "'");
        std::vector<double> out;
        for (const std::string& tok : split_tokens(e->value)) {
            try {
                out.push_back(std::stod(tok));
            } catch (...) {
                fail(kv_.source, e->line, "'" + key + "' has a non-numeric entry '" + tok + "'");
            }
        }
        if (out.empty()) fail(kv_.source, e->line, "'" + key + "' must list values");
        return out;
    }

    Graph parse_adjacency(const KvEntry& e, int arm_count) {
        const auto toks = split_tokens(e.value);
        if (static_cast<int>(toks.size()) != arm_count * arm_count)
            fail(kv_.source, e.line, "graph.adjacency needs K*K 0/1 tokens");
        Graph g(arm_count);
        for (int a = 0; a < arm_count; ++a) {
            for (int b = 0; b < arm_count; ++b) {
                const std::string& tok = toks[a * arm_count + b];
                if (tok != "0" && tok != "1")
                    fail(kv_.source, e.line, "graph.adjacency tokens must be 0 or 1");
                const bool bit = tok == "1";
                if (a == b && bit) fail(kv_.source, e.line, "graph.adjacency has a self loop");
                if (a < b && bit) g.set_edge(a, b, true);
                if (a > b && bit != g.edge(a, b))
                    fail(kv_.source, e.line, "graph.adjacency is not symmetric");
            }
        }
        return g;
    }

    ArmStrategy parse_strategy(const KvEntry& e) {
        if (e.value == "equilibrium") return ArmStrategy::Equilibrium;
        if (e.value == "truthful") return ArmStrategy::Truthful;
        if (e.value == "overbid") return ArmStrategy::Overbid;
        if (e.value == "underbid") return ArmStrategy::Underbid;
        fail(kv_.source, e.line, "unknown strategy '" + e.value + "'");
    }

    MessageMode parse_message(const KvEntry& e) {
        if (e.value == "honest") return MessageMode::Honest;
        if (e.value == "inflate") return MessageMode::Inflate;
        if (e.value == "zero") return MessageMode::Zero;
        fail(kv_.source, e.line, "unknown message mode '" + e.value + "'");
    }

    void check_unknown_keys() {
        for (const KvEntry& e : kv_.entries) {
            if (e.key.rfind("meta.", 0) == 0) continue;  // manifest metadata
            if (!used_.count(e.key))
                fail(kv_.source, e.line, "unknown key '" + e.key + "'");
        }
    }

    const KvFile& kv_;
    std::set<std::string> used_;
};

}  // namespace

const KvEntry* KvFile::find(const std::string& key) const {
    for (const KvEntry& e : entries)
        if (e.key == key) return &e;
    return nullptr;
}

void KvFile::set(const std::string& key, const std::string& value) {
    for (KvEntry& e : entries) {
        if (e.key == key) {
            e.value = value;
            return;
        }
    }
    entries.push_back(KvEntry{key, value, 0});
}

KvFile parse_kv(std::istream& in, const std::string& source) {
    KvFile kv;
    kv.source = source;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(source, line, "expected 'key = value'");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail(source, line, "empty key");
        if (kv.find(key)) fail(source, line, "duplicate key '" + key + "'");
        kv.entries.push_back(KvEntry{key, value, line});
    }
    return kv;
}

KvFile parse_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    return parse_kv(in, path);
}

RunSpec resolve_run_spec(const KvFile& kv) { return Resolver(kv).resolve(); }

std::string serialize_run_spec(const RunSpec& spec) {
    const SimConfig& cfg = spec.base;
    std::ostringstream out;
    out << "sim.arms = " << cfg.arm_count << "\n";
    out << "sim.horizon = " << cfg.horizon << "\n";
    out << "sim.tau = " << cfg.tau << "\n";
    out << "sim.master_seed = " << cfg.master_seed << "\n";
    out << "sim.record_stride = " << cfg.record_stride << "\n";
    out << "sim.skip_unchanged_consensus = " << (cfg.skip_unchanged_consensus ? 1 : 0) << "\n";
    if (cfg.topology) {
        out << "graph.adjacency =";
        const int k_count = cfg.topology->node_count();
        for (int a = 0; a < k_count; ++a)
            for (int b = 0; b < k_count; ++b)
                out << ' ' << ((a != b && cfg.topology->edge(a, b)) ? 1 : 0);
        out << "\n";
    } else {
        out << "graph.p = " << format_double(cfg.edge_probability) << "\n";
        out << "graph.seed = " << cfg.graph_seed << "\n";
    }
    out << "means =";
    for (double m : cfg.means) out << ' ' << format_double(m);
    out << "\n";
    out << "player.algorithm = "
        << (cfg.player.algorithm == PlayerAlgorithm::Exp3 ? "exp3" : "exp3p") << "\n";
    out << "player.rho = " << format_double(cfg.player.rho) << "\n";
    out << "player.gamma = " << format_double(cfg.player.gamma) << "\n";
    out << "player.eta = " << format_double(cfg.player.eta) << "\n";
    out << "player.beta = " << format_double(cfg.player.beta) << "\n";
    out << "player.delta = " << format_double(cfg.player.delta) << "\n";
    out << "player.side_observation = " << (cfg.player.side_observation ? 1 : 0) << "\n";
    out << "arms.defection_slack = " << format_double(cfg.defection_slack()) << "\n";
    out << "arms.offer_scale = " << format_double(cfg.offer_scale()) << "\n";
    for (int k = 0; k < cfg.arm_count; ++k)
        out << "arm." << k << ".strategy = " << to_string(cfg.strategy_of(k)) << "\n";
    for (int k = 0; k < cfg.arm_count; ++k)
        out << "arm." << k << ".message = " << to_string(cfg.message_mode_of(k)) << "\n";
    out << "audit.balance_tolerance = " << format_double(cfg.balance_tolerance) << "\n";
    out << "audit.trace_quantile = " << format_double(cfg.trace_quantile) << "\n";
    out << "run.replicas = " << spec.replicas << "\n";
    if (!spec.sweep_taus.empty()) {
        out << "sweep.tau =";
        for (int v : spec.sweep_taus) out << ' ' << v;
        out << "\n";
    }
    if (spec.deviation_arm) {
        out << "deviation.arm = " << *spec.deviation_arm << "\n";
        out << "deviation.modes =";
        for (DeviationMode m : spec.deviation_modes) out << ' ' << to_string(m);
        out << "\n";
    }
    return out.str();
}

}  // namespace smab
