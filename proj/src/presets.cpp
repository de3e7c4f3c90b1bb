#include "smab/presets.hpp"

namespace smab {

namespace {

SimConfig base_sim(int arm_count, long long horizon, int tau, double edge_p,
                   std::vector<double> means) {
    SimConfig cfg;
    cfg.arm_count = arm_count;
    cfg.horizon = horizon;
    cfg.tau = tau;
    cfg.edge_probability = edge_p;
    cfg.graph_seed = 1;
    cfg.means = std::move(means);
    cfg.player = PlayerConfig::make(PlayerAlgorithm::Exp3P, arm_count, horizon,
                                    1.0 / (static_cast<double>(horizon) *
                                           static_cast<double>(horizon)));
    cfg.master_seed = 1;
    cfg.record_stride = 100;
    return cfg;
}

std::vector<double> headline_means() {
    // seven plain arms at 0.4 and three strong ones, best first
    std::vector<double> m{0.9, 0.85, 0.8};
    m.insert(m.end(), 7, 0.4);
    return m;
}

std::vector<Preset> build() {
    std::vector<Preset> out;

    {
        Preset p;
        p.name = "smoke";
        p.description = "tiny end-to-end run (K=3, T=1000), finishes in well under a second";
        p.spec.base = base_sim(3, 1000, 5, 0.9, {0.8, 0.75, 0.7});
        p.spec.base.record_stride = 10;
        out.push_back(std::move(p));
    }
    {
        Preset p;
        p.name = "table1";
        p.description =
            "headline revenue run: K=10, T=500000, tau=50, delta pinned to 2778; prints the "
            "revenue/bound comparison";
        p.spec.base = base_sim(10, 500000, 50, 0.6, headline_means());
        p.spec.base.player.delta = 2778.0;
        out.push_back(std::move(p));
    }
    {
        Preset p;
        p.name = "fig2";
        p.description = "same configuration as table1; pair with --plot for the pull histogram";
        p.spec.base = base_sim(10, 500000, 50, 0.6, headline_means());
        p.spec.base.player.delta = 2778.0;
        out.push_back(std::move(p));
    }
    {
        Preset p;
        p.name = "tau-sweep";
        p.description = "probability-gap decay across tau in {1,5,10,25,50}, 10 replicas";
        p.spec.base = base_sim(10, 10000, 50, 0.6, headline_means());
        p.spec.sweep_taus = {1, 5, 10, 25, 50};
        p.spec.replicas = 10;
        out.push_back(std::move(p));
    }
    {
        Preset p;
        p.name = "nash-audit";
        p.description =
            "paired-seed deviation audit at K=5, T=20000: equilibrium everywhere except the "
            "probed arm";
        p.spec.base = base_sim(5, 20000, 20, 0.6, {0.9, 0.85, 0.7, 0.55, 0.4});
        p.spec.deviation_arm = 0;
        p.spec.deviation_modes = {DeviationMode::AlwaysTruthful, DeviationMode::Overbid,
                                  DeviationMode::Underbid, DeviationMode::InflateMessage,
                                  DeviationMode::ZeroMessage};
        p.spec.replicas = 10;
        out.push_back(std::move(p));
    }
    {
        Preset p;
        p.name = "truthful-baseline";
        p.description = "all arms report their true draws; shows the imbalance the strategy "
                        "removes and revenue far above the cap";
        p.spec.base = base_sim(10, 100000, 1, 0.6, headline_means());
        p.spec.base.strategies.assign(10, ArmStrategy::Truthful);
        out.push_back(std::move(p));
    }
    {
        Preset p;
        p.name = "stress-B";
        p.description =
            "small defection slack B = T/(4K) so the defection trigger is reachable";
        p.spec.base = base_sim(5, 20000, 10, 0.6, {0.9, 0.85, 0.7, 0.55, 0.4});
        p.spec.base.defection_slack_override =
            static_cast<double>(p.spec.base.horizon) / (4.0 * p.spec.base.arm_count);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

const std::vector<Preset>& presets() {
    static const std::vector<Preset> all = build();
    return all;
}

std::optional<RunSpec> preset_spec(const std::string& name) {
    for (const Preset& p : presets())
        if (p.name == name) return p.spec;
    return std::nullopt;
}

}  // namespace smab
