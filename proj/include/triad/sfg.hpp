#pragma once

// Signal-flow graphs with frequency-dependent complex edge gains, and two
// independent ways of evaluating node-to-node transmittances:
//   * Mason's gain formula (forward paths, loops, non-touching loop sets);
//   * direct inversion of (I - A).
// The two agree whenever (I - A) is invertible; the second one exists mainly
// as a cross-check of the first.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "triad/errors.hpp"

namespace triad::sfg {

using cplx = std::complex<double>;
using GainFn = std::function<cplx(double omega)>;
using NodeMask = std::uint64_t;

enum class NodeRole { Source, Internal, Sink };

struct Node {
  std::string name;
  NodeRole role = NodeRole::Internal;
};

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  GainFn gain;
  std::string label;
};

inline constexpr std::size_t kMaxNodes = 64;
inline constexpr double kSingularThreshold = 1e-14;

class FlowGraph {
 public:
  std::size_t add_node(const std::string& name, NodeRole role = NodeRole::Internal) {
    if (index_.count(name)) throw InvalidParameter("duplicate flow-graph node: " + name);
    if (nodes_.size() == kMaxNodes) throw InvalidParameter("flow graph limited to 64 nodes");
    index_[name] = nodes_.size();
    nodes_.push_back({name, role});
    return nodes_.size() - 1;
  }

  // Parallel edges are merged: the stored gain is the sum.
  void add_edge(const std::string& from, const std::string& to, GainFn gain,
                std::string label = {}) {
    add_edge(node(from), node(to), std::move(gain), std::move(label));
  }

  void add_edge(std::size_t from, std::size_t to, GainFn gain, std::string label = {}) {
    if (from >= nodes_.size() || to >= nodes_.size())
      throw InvalidParameter("flow-graph edge references unknown node");
    for (auto& e : edges_) {
      if (e.from == from && e.to == to) {
        GainFn prev = std::move(e.gain);
        e.gain = [prev, gain](double w) { return prev(w) + gain(w); };
        e.label = e.label + " + " + label;
        return;
      }
    }
    edges_.push_back({from, to, std::move(gain), std::move(label)});
  }

  void add_edge(std::size_t from, std::size_t to, cplx constant) {
    add_edge(from, to, [constant](double) { return constant; }, to_label(constant));
  }

  std::size_t node(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw InvalidParameter("unknown flow-graph node: " + name);
    return it->second;
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t size() const { return nodes_.size(); }

  // Dense transmittance matrix, A(to, from) = gain of edge from -> to.
  Eigen::MatrixXcd adjacency(double omega) const {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(size(), size());
    for (const auto& e : edges_) a(e.to, e.from) += e.gain(omega);
    return a;
  }

 private:
  static std::string to_label(cplx c) {
    std::ostringstream os;
    os << c;
    return os.str();
  }

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::map<std::string, std::size_t> index_;
};

struct GainResult {
  cplx value{};
  cplx determinant{};
  std::size_t n_paths = 0;
  std::size_t n_loops = 0;
};

/// Topology half of Mason's rule: simple paths and simple cycles, found once
/// per (graph, src, dst) and re-weighted at every evaluation frequency.
class MasonPlan {
 public:
  MasonPlan(const FlowGraph& g, std::size_t src, std::size_t dst) : graph_(&g) {
    if (src >= g.size() || dst >= g.size()) throw InvalidParameter("Mason: node out of range");
    build_adjacency();
    enumerate_cycles();
    enumerate_paths(src, dst);
  }

  std::size_t n_paths() const { return paths_.size(); }
  std::size_t n_loops() const { return loops_.size(); }

  GainResult evaluate(double omega) const {
    const Eigen::MatrixXcd a = graph_->adjacency(omega);
    std::vector<cplx> loop_gain(loops_.size());
    for (std::size_t i = 0; i < loops_.size(); ++i) loop_gain[i] = product(a, loops_[i].nodes, true);

    GainResult r;
    r.n_paths = paths_.size();
    r.n_loops = loops_.size();
    r.determinant = cofactor(loop_gain, 0);
    if (std::abs(r.determinant) < kSingularThreshold)
      throw SingularGraph("Mason determinant vanishes at this frequency");
    cplx num{};
    for (const auto& p : paths_) num += product(a, p.nodes, false) * cofactor(loop_gain, p.mask);
    r.value = num / r.determinant;
    return r;
  }

  // 1 - sum L_i + sum L_i L_j - ... over loops disjoint from `excluded`.
  cplx cofactor(const std::vector<cplx>& loop_gain, NodeMask excluded) const {
    return signed_sum(loop_gain, 0, excluded);
  }

  std::vector<cplx> loop_gains(double omega) const {
    const Eigen::MatrixXcd a = graph_->adjacency(omega);
    std::vector<cplx> out;
    for (const auto& l : loops_) out.push_back(product(a, l.nodes, true));
    return out;
  }

 private:
  struct Walk {
    std::vector<std::size_t> nodes;
    NodeMask mask = 0;
  };

  void build_adjacency() {
    succ_.assign(graph_->size(), {});
    for (const auto& e : graph_->edges()) succ_[e.from].push_back(e.to);
  }

  // Each simple cycle is reported once, rooted at its smallest node index.
  void enumerate_cycles() {
    const std::size_t n = graph_->size();
    std::vector<std::size_t> stack;
    for (std::size_t root = 0; root < n; ++root) {
      stack.assign(1, root);
      cycle_dfs(root, root, NodeMask{1} << root, stack);
    }
  }

  void cycle_dfs(std::size_t root, std::size_t at, NodeMask mask, std::vector<std::size_t>& stack) {
    for (std::size_t next : succ_[at]) {
      if (next == root) {
        loops_.push_back({stack, mask});
      } else if (next > root && !(mask & (NodeMask{1} << next))) {
        stack.push_back(next);
        cycle_dfs(root, next, mask | (NodeMask{1} << next), stack);
        stack.pop_back();
      }
    }
  }

  void enumerate_paths(std::size_t src, std::size_t dst) {
    if (src == dst) {
      // Trivial path of unit gain; its cofactor removes every loop through src.
      paths_.push_back({{src}, NodeMask{1} << src});
      return;
    }
    std::vector<std::size_t> stack{src};
    path_dfs(src, dst, NodeMask{1} << src, stack);
  }

  void path_dfs(std::size_t at, std::size_t dst, NodeMask mask, std::vector<std::size_t>& stack) {
    for (std::size_t next : succ_[at]) {
      if (mask & (NodeMask{1} << next)) continue;
      stack.push_back(next);
      if (next == dst)
        paths_.push_back({stack, mask | (NodeMask{1} << next)});
      else
        path_dfs(next, dst, mask | (NodeMask{1} << next), stack);
      stack.pop_back();
    }
  }

  static cplx product(const Eigen::MatrixXcd& a, const std::vector<std::size_t>& nodes,
                      bool closed) {
    cplx p{1.0, 0.0};
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) p *= a(nodes[i + 1], nodes[i]);
    if (closed) p *= a(nodes.front(), nodes.back());
    return p;
  }

  // Inclusion over pairwise non-touching loop sets, loops taken in index
  // order to visit each set once.
  cplx signed_sum(const std::vector<cplx>& gain, std::size_t first, NodeMask used) const {
    cplx total{1.0, 0.0};
    for (std::size_t i = first; i < loops_.size(); ++i) {
      if (loops_[i].mask & used) continue;
      total -= gain[i] * signed_sum(gain, i + 1, used | loops_[i].mask);
    }
    return total;
  }

  const FlowGraph* graph_;
  std::vector<std::vector<std::size_t>> succ_;
  std::vector<Walk> loops_;
  std::vector<Walk> paths_;
};

/// Transmittance src -> dst at `omega` by Mason's gain formula.
inline GainResult mason_gain(const FlowGraph& g, const std::string& src, const std::string& dst,
                             double omega) {
  return MasonPlan(g, g.node(src), g.node(dst)).evaluate(omega);
}

/// det(I - A) of the whole graph; sources and sinks carry no loops so this
/// equals the determinant over internal nodes.
inline cplx graph_determinant(const FlowGraph& g, double omega) {
  const Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(g.size(), g.size()) - g.adjacency(omega);
  return m.determinant();
}

/// Transmittance src -> dst by solving x = A x + e_src.
inline cplx solve_gain(const FlowGraph& g, std::size_t src, std::size_t dst, double omega) {
  const std::size_t n = g.size();
  const Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n) - g.adjacency(omega);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  if (std::abs(lu.determinant()) < kSingularThreshold)
    throw SingularGraph("(I - A) is singular at this frequency");
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
  e(src) = 1.0;
  const Eigen::VectorXcd x = lu.solve(e);
  return x(dst);
}

inline cplx solve_gain(const FlowGraph& g, const std::string& src, const std::string& dst,
                       double omega) {
  return solve_gain(g, g.node(src), g.node(dst), omega);
}

/// Graphviz rendering with symbolic edge labels.
inline std::string to_dot(const FlowGraph& g, const std::string& name = "sfg") {
  std::ostringstream os;
  os << "digraph " << name << " {\n  rankdir=LR;\n";
  for (const auto& n : g.nodes()) {
    const char* shape = n.role == NodeRole::Internal ? "circle" : "box";
    os << "  \"" << n.name << "\" [shape=" << shape << "];\n";
  }
  for (const auto& e : g.edges())
    os << "  \"" << g.nodes()[e.from].name << "\" -> \"" << g.nodes()[e.to].name
       << "\" [label=\"" << e.label << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace triad::sfg
