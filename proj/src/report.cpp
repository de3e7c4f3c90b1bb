#include "smab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace smab {

namespace {

std::string fd(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// short form for plot coordinates
std::string f3(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    int arm_count = 0;
    for (const SummaryRow& row : rows)
        if (row.config) arm_count = std::max(arm_count, row.config->arm_count);

    out << "kind,config_index,replica,seed,mode,k,t,tau,lambda,theta,b,revenue,regret,"
           "regret_half,balance,revenue_bound,bound_satisfied,defections,conform_utility,"
           "deviate_utility,gap,error";
    for (int k = 0; k < arm_count; ++k) out << ",pulls_" << k;
    for (int k = 0; k < arm_count; ++k) out << ",utility_" << k;
    out << "\n";

    for (const SummaryRow& row : rows) {
        out << row.kind << ',' << row.config_index << ',' << row.replica << ',' << row.seed
            << ',' << row.mode << ',';
        if (row.config) {
            out << row.config->arm_count << ',' << row.config->horizon << ','
                << row.config->tau << ',';
        } else {
            out << ",,,";
        }
        if (row.result && row.config && row.error.empty()) {
            const SimResult& r = *row.result;
            const AuditReport a = audit(r, *row.config);
            out << fd(r.mixing.lambda) << ',' << fd(r.resolved_offer_scale) << ','
                << fd(r.resolved_defection_slack) << ',' << fd(r.revenue) << ','
                << fd(r.regret_total) << ',' << fd(r.regret_half) << ',' << fd(a.balance) << ','
                << fd(a.revenue_bound) << ',' << (a.bound_satisfied ? 1 : 0) << ','
                << r.defections.size() << ',';
            if (row.kind == "deviation")
                out << fd(row.conform_utility) << ',' << fd(row.deviate_utility) << ','
                    << fd(row.gap) << ',';
            else
                out << ",,,";
            out << row.error;
            for (int k = 0; k < arm_count; ++k) {
                out << ',';
                if (k < static_cast<int>(r.pull_counts.size())) out << r.pull_counts[k];
            }
            for (int k = 0; k < arm_count; ++k) {
                out << ',';
                if (k < static_cast<int>(r.utilities.size())) out << fd(r.utilities[k]);
            }
        } else {
            out << ",,,,,,,,,,,,," << row.error;
            for (int k = 0; k < 2 * arm_count; ++k) out << ',';
        }
        out << "\n";
    }
    return out.str();
}

std::string rounds_csv(const SimResult& result) {
    std::ostringstream out;
    const int arm_count = static_cast<int>(result.pull_counts.size());
    out << "t,pulled,reward,reported,d_tau";
    for (int k = 0; k < arm_count; ++k) out << ",p_" << k;
    for (int k = 0; k < arm_count; ++k) out << ",phat_" << k;
    for (int k = 0; k < arm_count; ++k) out << ",offer_" << k;
    out << "\n";
    for (const RoundRecord& rec : result.sampled_records) {
        out << rec.t << ',' << rec.pulled_arm << ',' << fd(rec.reward) << ','
            << fd(rec.reported) << ',' << fd(rec.disagreement_tau);
        for (double v : rec.probabilities) out << ',' << fd(v);
        for (double v : rec.estimated_probabilities) out << ',' << fd(v);
        for (double v : rec.offers) out << ',' << fd(v);
        out << "\n";
    }
    return out.str();
}

std::string decay_csv(const DisagreementTrace& trace) {
    std::ostringstream out;
    out << "iteration,disagreement,bound\n";
    for (std::size_t n = 0; n < trace.disagreement.size(); ++n)
        out << n << ',' << fd(trace.disagreement[n]) << ','
            << fd(trace.bound_at(static_cast<int>(n))) << "\n";
    return out.str();
}

std::string pull_histogram_svg(const SimResult& result) {
    const int arm_count = static_cast<int>(result.pull_counts.size());
    const double width = 640.0, height = 400.0, margin = 50.0;
    long long max_count = 1;
    long long total = 0;
    for (long long n : result.pull_counts) {
        max_count = std::max(max_count, n);
        total += n;
    }
    const double fair = arm_count > 0 ? static_cast<double>(total) / arm_count : 0.0;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << "rounds pulled per arm</text>\n";

    const double plot_w = width - 2 * margin;
    const double plot_h = height - 2 * margin;
    const double bar_w = plot_w / std::max(1, arm_count);
    for (int k = 0; k < arm_count; ++k) {
        const double h = plot_h * static_cast<double>(result.pull_counts[k]) /
                         static_cast<double>(max_count);
        const double x = margin + k * bar_w + 0.1 * bar_w;
        const double y = height - margin - h;
        out << "<rect x=\"" << f3(x) << "\" y=\"" << f3(y) << "\" width=\"" << f3(0.8 * bar_w)
            << "\" height=\"" << f3(h) << "\" fill=\"#4878a8\"/>\n";
        out << "<text x=\"" << f3(x + 0.4 * bar_w) << "\" y=\"" << f3(height - margin + 16)
            << "\" text-anchor=\"middle\" font-size=\"11\">" << k << "</text>\n";
        out << "<text x=\"" << f3(x + 0.4 * bar_w) << "\" y=\"" << f3(y - 4)
            << "\" text-anchor=\"middle\" font-size=\"10\">" << result.pull_counts[k]
            << "</text>\n";
    }
    if (fair > 0.0) {
        const double y = height - margin - plot_h * fair / static_cast<double>(max_count);
        out << "<line x1=\"" << f3(margin) << "\" y1=\"" << f3(y) << "\" x2=\""
            << f3(width - margin) << "\" y2=\"" << f3(y)
            << "\" stroke=\"#b04030\" stroke-dasharray=\"6 3\"/>\n";
        out << "<text x=\"" << f3(width - margin) << "\" y=\"" << f3(y - 5)
            << "\" text-anchor=\"end\" font-size=\"11\" fill=\"#b04030\">T/K</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string decay_svg(const DisagreementTrace& trace) {
    const double width = 640.0, height = 400.0, margin = 55.0;
    const std::size_t count = trace.disagreement.size();

    double lo = 0.0, hi = 1.0;
    bool have = false;
    for (std::size_t n = 0; n < count; ++n) {
        for (double v : {trace.disagreement[n], trace.bound_at(static_cast<int>(n))}) {
            if (v <= 0.0) continue;
            const double lg = std::log10(v);
            if (!have) {
                lo = hi = lg;
                have = true;
            } else {
                lo = std::min(lo, lg);
                hi = std::max(hi, lg);
            }
        }
    }
    if (!have) {
        lo = -1;
        hi = 1;
    }
    if (hi - lo < 1.0) hi = lo + 1.0;
    lo = std::max(lo, hi - 18.0);  // clip machine-noise floor out of the scale

    const double plot_w = width - 2 * margin;
    const double plot_h = height - 2 * margin;
    const auto x_of = [&](std::size_t n) {
        return margin + plot_w * static_cast<double>(n) /
                            static_cast<double>(std::max<std::size_t>(1, count - 1));
    };
    const auto y_of = [&](double v) {
        const double lg = v > 0.0 ? std::log10(v) : lo;
        const double clipped = std::min(std::max(lg, lo), hi);
        return height - margin - plot_h * (clipped - lo) / (hi - lo);
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << "network disagreement per gossip iteration (log10)</text>\n";

    for (int series = 0; series < 2; ++series) {
        out << "<polyline fill=\"none\" stroke=\"" << (series == 0 ? "#4878a8" : "#b04030")
            << "\"" << (series == 1 ? " stroke-dasharray=\"6 3\"" : "") << " points=\"";
        for (std::size_t n = 0; n < count; ++n) {
            const double v =
                series == 0 ? trace.disagreement[n] : trace.bound_at(static_cast<int>(n));
            out << f3(x_of(n)) << ',' << f3(y_of(v)) << ' ';
        }
        out << "\"/>\n";
    }
    out << "<text x=\"" << f3(width - margin) << "\" y=\"" << f3(height - margin + 18)
        << "\" text-anchor=\"end\" font-size=\"11\">iteration n (0.." << (count ? count - 1 : 0)
        << ")</text>\n";
    out << "<text x=\"" << f3(margin) << "\" y=\"" << f3(margin - 8)
        << "\" font-size=\"11\" fill=\"#4878a8\">measured</text>\n";
    out << "<text x=\"" << f3(margin + 80) << "\" y=\"" << f3(margin - 8)
        << "\" font-size=\"11\" fill=\"#b04030\">alpha*lambda^(2n)</text>\n";
    out << "</svg>\n";
    return out.str();
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out.good()) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace smab
