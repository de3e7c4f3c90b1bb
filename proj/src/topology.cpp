#include "smab/topology.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "smab/rng.hpp"

namespace smab {

namespace {
constexpr double kStochasticTol = 1e-12;
}

Graph::Graph(int node_count) : node_count_(node_count) {
    if (node_count < 1) throw std::invalid_argument("graph needs at least one node");
    upper_.assign(static_cast<std::size_t>(node_count) * (node_count - 1) / 2, 0);
}

int Graph::index(int a, int b) const {
    if (a > b) std::swap(a, b);
    // strict upper triangle, rows of decreasing length
    return a * node_count_ - a * (a + 1) / 2 + (b - a - 1);
}

bool Graph::edge(int a, int b) const {
    if (a < 0 || b < 0 || a >= node_count_ || b >= node_count_)
        throw std::out_of_range("node index out of range");
    if (a == b) return false;
    return upper_[index(a, b)] != 0;
}

void Graph::set_edge(int a, int b, bool present) {
    if (a < 0 || b < 0 || a >= node_count_ || b >= node_count_)
        throw std::out_of_range("node index out of range");
    if (a == b) throw std::invalid_argument("self loops are not stored");
    upper_[index(a, b)] = present ? 1 : 0;
}

int Graph::degree(int k) const {
    int d = 0;
    for (int l = 0; l < node_count_; ++l)
        if (l != k && edge(k, l)) ++d;
    return d;
}

std::vector<int> Graph::neighbors(int k) const {
    std::vector<int> out;
    for (int l = 0; l < node_count_; ++l)
        if (l != k && edge(k, l)) out.push_back(l);
    return out;
}

bool Graph::connected() const {
    if (node_count_ == 0) return false;
    std::vector<char> seen(node_count_, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int l = 0; l < node_count_; ++l) {
            if (l != v && !seen[l] && edge(v, l)) {
                seen[l] = 1;
                ++reached;
                q.push(l);
            }
        }
    }
    return reached == node_count_;
}

Graph generate_erdos_renyi(int node_count, double edge_probability, std::uint64_t seed) {
    if (node_count < 2) throw std::invalid_argument("erdos-renyi generation needs K >= 2");
    if (!(edge_probability >= 0.0 && edge_probability <= 1.0))
        throw std::invalid_argument("edge probability must lie in [0,1]");

    Graph g(node_count);
    Rng rng(seed);
    for (int a = 0; a < node_count; ++a)
        for (int b = a + 1; b < node_count; ++b)
            if (rng.uniform01() < edge_probability) g.set_edge(a, b, true);
    return g;
}

CombinationMatrix metropolis_weights(const Graph& g) {
    if (!g.connected()) throw std::invalid_argument("metropolis weights need a connected graph");

    const int k_count = g.node_count();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k_count, k_count);
    for (int k = 0; k < k_count; ++k) {
        for (int l = k + 1; l < k_count; ++l) {
            if (!g.edge(k, l)) continue;
            const int nk = g.closed_neighborhood_size(k);
            const int nl = g.closed_neighborhood_size(l);
            const double w = 1.0 / static_cast<double>(std::max(nk, nl));
            a(k, l) = w;
            a(l, k) = w;  // mirrored, symmetry is exact
        }
    }
    for (int k = 0; k < k_count; ++k) {
        double off = 0.0;
        for (int l = 0; l < k_count; ++l)
            if (l != k) off += a(l, k);
        a(k, k) = 1.0 - off;
    }
    return CombinationMatrix{std::move(a)};
}

MixingReport mixing_rate(const CombinationMatrix& a) {
    const int k_count = a.size();
    if (k_count == 0) throw std::invalid_argument("empty combination matrix");
    if (a.entries.rows() != a.entries.cols())
        throw std::invalid_argument("combination matrix must be square");

    const Eigen::MatrixXd& m = a.entries;
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > kStochasticTol)
        throw std::invalid_argument("mixing_rate requires a symmetric matrix");

    MixingReport report;

    if (m.minCoeff() < 0.0) report.violations.push_back("negative entry");
    for (int k = 0; k < k_count; ++k) {
        if (std::abs(m.row(k).sum() - 1.0) > kStochasticTol) {
            report.violations.push_back("row sum off unity at row " + std::to_string(k));
            break;
        }
    }
    for (int k = 0; k < k_count; ++k) {
        if (std::abs(m.col(k).sum() - 1.0) > kStochasticTol) {
            report.violations.push_back("column sum off unity at column " + std::to_string(k));
            break;
        }
    }

    // Primitivity: the positive pattern must be connected and some self
    // weight positive.
    Graph pattern(k_count);
    for (int k = 0; k < k_count; ++k)
        for (int l = k + 1; l < k_count; ++l)
            if (m(k, l) > 0.0) pattern.set_edge(k, l, true);
    if (!pattern.connected()) report.violations.push_back("positive pattern disconnected");
    bool self_loop = false;
    for (int k = 0; k < k_count; ++k)
        if (m(k, k) > 0.0) self_loop = true;
    if (!self_loop) report.violations.push_back("no positive self weight");

    const Eigen::MatrixXd centered =
        m - Eigen::MatrixXd::Constant(k_count, k_count, 1.0 / k_count);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(centered, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigen decomposition failed");
    report.lambda = solver.eigenvalues().cwiseAbs().maxCoeff();

    if (!(report.lambda < 1.0)) report.violations.push_back("mixing rate not below one");
    report.is_valid = report.violations.empty();
    return report;
}

void write_graph(std::ostream& out, const Graph& g) {
    const int k_count = g.node_count();
    out << k_count << "\n";
    for (int k = 0; k < k_count; ++k) {
        for (int l = 0; l < k_count; ++l) {
            if (l) out << ' ';
            out << (k != l && g.edge(k, l) ? 1 : 0);
        }
        out << "\n";
    }
}

Graph read_graph(std::istream& in) {
    int k_count = 0;
    if (!(in >> k_count) || k_count < 1) throw std::runtime_error("topology: bad node count");
    Graph g(k_count);
    for (int k = 0; k < k_count; ++k) {
        for (int l = 0; l < k_count; ++l) {
            int bit = 0;
            if (!(in >> bit)) throw std::runtime_error("topology: truncated adjacency row");
            if (bit != 0 && bit != 1) throw std::runtime_error("topology: adjacency must be 0/1");
            if (bit && k < l) g.set_edge(k, l, true);
            if (k > l && (bit != 0) != g.edge(k, l))
                throw std::runtime_error("topology: adjacency not symmetric");
            if (bit && k == l) throw std::runtime_error("topology: self loop in adjacency");
        }
    }
    return g;
}

void write_matrix(std::ostream& out, const CombinationMatrix& a) {
    const int k_count = a.size();
    char buf[32];
    for (int k = 0; k < k_count; ++k) {
        for (int l = 0; l < k_count; ++l) {
            if (l) out << ' ';
            std::snprintf(buf, sizeof buf, "%.17g", a.entries(k, l));
            out << buf;
        }
        out << "\n";
    }
}

}  // namespace smab
