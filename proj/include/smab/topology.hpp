#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace smab {

// Undirected simple graph over K arm nodes. Adjacency is stored without the
// diagonal; the neighborhood of k used by the gossip weights always counts k
// itself (closed neighborhood).
class Graph {
  public:
    Graph() = default;
    explicit Graph(int node_count);

    int node_count() const { return node_count_; }
    bool edge(int a, int b) const;
    void set_edge(int a, int b, bool present);

    int degree(int k) const;
    // |N_k| with the self node included.
    int closed_neighborhood_size(int k) const { return degree(k) + 1; }
    std::vector<int> neighbors(int k) const;

    bool connected() const;

    bool operator==(const Graph&) const = default;

  private:
    int index(int a, int b) const;

    int node_count_ = 0;
    std::vector<std::uint8_t> upper_;  // strict upper triangle, row-major
};

// Gossip combination weights a[l][k]; arm k scales what it hears from arm l
// by a(l, k). Valid matrices are symmetric, doubly stochastic, and match the
// graph's sparsity pattern.
struct CombinationMatrix {
    Eigen::MatrixXd entries;

    int size() const { return static_cast<int>(entries.rows()); }
    double operator()(int l, int k) const { return entries(l, k); }
};

struct MixingReport {
    double lambda = 0.0;  // spectral radius of A - (1/K) * ones
    bool is_valid = false;
    std::vector<std::string> violations;
};

// G(K, p): each unordered pair {k, l}, enumerated lexicographically
// (0,1), (0,2), ..., (K-2, K-1), is an edge iff the next canonical uniform
// draw from mt19937_64(seed) is < p. Connectivity is reported by
// Graph::connected(), not enforced; callers resample if they need it.
Graph generate_erdos_renyi(int node_count, double edge_probability, std::uint64_t seed);

// Metropolis rule with self-counting degrees: for l != k adjacent,
// a(l, k) = 1 / max(n_k, n_l) with n_k = degree + 1, and the diagonal takes
// the leftover mass. Throws if the graph is disconnected.
CombinationMatrix metropolis_weights(const Graph& g);

// lambda = largest |eigenvalue| of A - (1/K) * ones. Also re-checks the
// combination-matrix invariants and reports any violation. Throws if the
// input is not symmetric (the eigensolver contract).
MixingReport mixing_rate(const CombinationMatrix& a);

// Plain-text serialization: first line K, then K adjacency rows of 0/1;
// matrices as K rows of decimal floats.
void write_graph(std::ostream& out, const Graph& g);
Graph read_graph(std::istream& in);
void write_matrix(std::ostream& out, const CombinationMatrix& a);

}  // namespace smab
