// Copyright 2026 The rbmkit Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <rbmkit/rbm.hpp>
#include <rbmkit/samplers.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace rbmkit {

class Rng;

/// Position of a qubit inside an m x m Chimera lattice. `side` 0 holds the
/// vertical qubits (coupled to the same position in the cells above and
/// below), side 1 the horizontal ones (coupled left and right).
struct ChimeraCoord {
  int row = 0;
  int col = 0;
  int side = 0;
  int k = 0;
};

/// m x m grid of K_{4,4} unit cells. Qubit id = 8 (m row + col) + 4 side + k.
class ChimeraGraph {
 public:
  explicit ChimeraGraph(int m, std::set<int> dead_qubits = {});

  int m() const { return m_; }
  int num_qubits() const { return 8 * m_ * m_; }
  int num_active() const { return num_qubits() - static_cast<int>(dead_.size()); }
  bool is_active(int q) const;
  const std::set<int>& dead_qubits() const { return dead_; }

  /// Active couplers, each as (a, b) with a < b, sorted.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  bool has_edge(int a, int b) const;
  const std::vector<int>& neighbors(int q) const { return adjacency_.at(q); }

  int index(const ChimeraCoord& at) const;
  ChimeraCoord coord(int q) const;
  /// Two-coloring of the (bipartite) lattice.
  int color(int q) const;

  std::size_t intra_cell_edge_count() const;
  std::size_t inter_cell_edge_count() const;

  /// "a b" per line; intended for external plotting.
  void write_edge_list(std::ostream& out) const;

 private:
  int m_;
  std::set<int> dead_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;
};

ChimeraGraph build_chimera(int m, const std::set<int>& dead_qubits = {});

/// Logical variable -> chain of physical qubits. Logical ids 0..n_visible-1
/// are the visible units, n_visible..n_visible+n_hidden-1 the hidden ones.
struct Embedding {
  int n_visible = 0;
  int n_hidden = 0;
  std::vector<std::vector<int>> chains;
  double chain_strength = 0.0;  // <= 0 means "use the default for the model"

  const std::vector<int>& visible_chain(int i) const { return chains.at(i); }
  const std::vector<int>& hidden_chain(int j) const { return chains.at(n_visible + j); }
  std::size_t max_chain_length() const;
};

struct EmbeddingCheck {
  bool valid = true;
  std::vector<std::string> problems;
};

/// Checks disjointness, chain connectivity, active qubits, and a coupler
/// between every visible/hidden chain pair.
EmbeddingCheck verify_embedding(const Embedding& embedding, const ChimeraGraph& graph);

/// Standard complete-bipartite layout: visible unit i takes horizontal qubit
/// k = i % 4 across row i / 4 for ceil(n_h/4) cells; hidden unit j takes
/// vertical qubit k = j % 4 down column j / 4 for ceil(n_v/4) cells.
/// Throws EmbeddingError when the lattice is too small or a chain qubit is dead.
Embedding embed_bipartite(int n_visible, int n_hidden, const ChimeraGraph& graph);

/// "# rbmkit-embedding <n_visible> <n_hidden> <chain_strength>" header, then
/// one "logical_id: q,q,..." line per logical variable.
void write_embedding(const Embedding& embedding, std::ostream& out);
Embedding read_embedding(std::istream& in);

/// Spin (±1) form of the RBM energy: with s = 2x - 1,
///   E_rbm(v, h) = Σ hv_i s_i + Σ hh_j t_j + Σ J_ij s_i t_j + offset.
struct LogicalIsing {
  Eigen::VectorXd h_visible;
  Eigen::VectorXd h_hidden;
  Eigen::MatrixXd J;
  double offset = 0.0;

  double energy(const BitVector& v, const BitVector& h) const;
};

LogicalIsing to_ising(const RbmParams& params);

/// 1.5 x the largest |J_ij| of the logical Ising form (at least 1e-3).
double default_chain_strength(const RbmParams& params);

/// Hardware-style coupling limits. With auto_scale, the whole problem is
/// divided by the smallest factor that brings every field and coupling in
/// range; whatever remains outside is clipped.
struct CouplingRange {
  bool auto_scale = true;
  double j_min = -2.0;
  double j_max = 2.0;
  double h_min = -1.0;
  double h_max = 1.0;
};

struct IsingProblem {
  std::map<int, double> hfield;                 // every embedded qubit appears
  std::map<std::pair<int, int>, double> J;      // keys (a, b) with a < b
  double offset = 0.0;                          // logical Ising offset (unscaled)
  double scale = 1.0;                           // divisor applied by auto_scale
  double chain_strength = 0.0;                  // before scaling

  std::vector<int> nodes() const;
  /// Σ h s + Σ J s s with spins given in nodes() order.
  double energy(const std::vector<std::int8_t>& spins) const;
};

/// Distributes the logical Ising problem over the embedding: fields split
/// equally across a chain, couplings split equally across the available
/// chain-to-chain couplers, and -chain_strength on every coupler inside a
/// chain. Throws std::invalid_argument when chain_strength <= 0.
IsingProblem embed_problem(const RbmParams& params, const Embedding& embedding,
                           const ChimeraGraph& graph, double chain_strength,
                           const CouplingRange& range = {});

/// Block heat-bath annealing on a bipartite Ising problem. Each sweep
/// updates the two colour classes, then offers every listed chain of two or
/// more qubits a heat-bath flip as a unit. Returns one spin vector (nodes()
/// order) per run; run r uses stream (seed, r).
std::vector<std::vector<std::int8_t>> anneal_ising(const IsingProblem& problem,
                                                   const AnnealSchedule& schedule,
                                                   int n_runs, std::uint64_t seed,
                                                   const std::vector<std::vector<int>>& chains = {});

/// Majority vote per chain; ties take a random bit from `rng`.
/// `broken` (optional) receives the number of chains with disagreeing qubits.
ChainState decode_chains(const Embedding& embedding, const std::vector<int>& nodes,
                         const std::vector<std::int8_t>& spins, Rng& rng, int* broken = nullptr);

struct ChimeraOptions {
  int m = 0;  // lattice size; 0 picks the smallest that fits
  std::set<int> dead_qubits;
  double chain_strength = 0.0;  // <= 0 selects default_chain_strength
  CouplingRange range;
  /// Whole-chain flip moves. Without them strong chains freeze early and
  /// the logical problem is never annealed.
  bool chain_flips = true;
};

/// Anneals the embedded problem, decodes chains, then applies
/// config.gibbs_postprocess_sweeps sweeps on the logical RBM at beta = 1.
SampleSet chimera_sample(const RbmParams& params, const ChimeraGraph& graph,
                         const Embedding& embedding, const SamplerConfig& config,
                         const ChimeraOptions& options = {});

class ChimeraSampler : public Sampler {
 public:
  ChimeraSampler(int n_visible, int n_hidden, SamplerConfig config, ChimeraOptions options = {});
  SampleSet sample(const RbmParams& params, std::uint64_t seed) const override;
  std::string name() const override { return "chimera"; }

  const ChimeraGraph& graph() const { return graph_; }
  const Embedding& embedding() const { return embedding_; }

 private:
  SamplerConfig config_;
  ChimeraOptions options_;
  ChimeraGraph graph_;
  Embedding embedding_;
};

/// Any sampler kind, including chimera (which needs the model shape).
std::unique_ptr<Sampler> make_sampler(const SamplerConfig& config, int n_visible, int n_hidden,
                                      const ChimeraOptions& options = {});

}  // namespace rbmkit
