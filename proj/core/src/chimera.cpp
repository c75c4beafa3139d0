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

#include <rbmkit/chimera.hpp>

#include <rbmkit/error.hpp>
#include <rbmkit/random.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rbmkit {

// ---------------------------------------------------------------------------
// Lattice

ChimeraGraph::ChimeraGraph(int m, std::set<int> dead_qubits) : m_(m), dead_(std::move(dead_qubits)) {
  if (m < 1) throw std::invalid_argument("ChimeraGraph: m must be >= 1");
  for (int q : dead_) {
    if (q < 0 || q >= num_qubits()) {
      throw std::invalid_argument("ChimeraGraph: dead qubit " + std::to_string(q) + " out of range");
    }
  }
  adjacency_.assign(num_qubits(), {});
  auto add = [this](int a, int b) {
    if (!is_active(a) || !is_active(b)) return;
    if (a > b) std::swap(a, b);
    edges_.emplace_back(a, b);
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  };
  for (int row = 0; row < m_; ++row) {
    for (int col = 0; col < m_; ++col) {
      for (int kv = 0; kv < 4; ++kv) {
        for (int kh = 0; kh < 4; ++kh) {
          add(index({row, col, 0, kv}), index({row, col, 1, kh}));
        }
      }
      for (int k = 0; k < 4; ++k) {
        if (row + 1 < m_) add(index({row, col, 0, k}), index({row + 1, col, 0, k}));
        if (col + 1 < m_) add(index({row, col, 1, k}), index({row, col + 1, 1, k}));
      }
    }
  }
  std::sort(edges_.begin(), edges_.end());
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

bool ChimeraGraph::is_active(int q) const {
  return q >= 0 && q < num_qubits() && !dead_.contains(q);
}

bool ChimeraGraph::has_edge(int a, int b) const {
  if (!is_active(a) || !is_active(b)) return false;
  const auto& nbrs = adjacency_[a];
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

int ChimeraGraph::index(const ChimeraCoord& at) const {
  return 8 * (m_ * at.row + at.col) + 4 * at.side + at.k;
}

ChimeraCoord ChimeraGraph::coord(int q) const {
  const int cell = q / 8;
  return {cell / m_, cell % m_, (q % 8) / 4, q % 4};
}

int ChimeraGraph::color(int q) const {
  const ChimeraCoord at = coord(q);
  return at.side ^ ((at.row + at.col) & 1);
}

std::size_t ChimeraGraph::intra_cell_edge_count() const {
  return static_cast<std::size_t>(std::count_if(edges_.begin(), edges_.end(), [](const auto& e) {
    return e.first / 8 == e.second / 8;
  }));
}

std::size_t ChimeraGraph::inter_cell_edge_count() const {
  return edges_.size() - intra_cell_edge_count();
}

void ChimeraGraph::write_edge_list(std::ostream& out) const {
  for (const auto& [a, b] : edges_) out << a << ' ' << b << '\n';
}

ChimeraGraph build_chimera(int m, const std::set<int>& dead_qubits) {
  return ChimeraGraph(m, dead_qubits);
}

// ---------------------------------------------------------------------------
// Embedding

std::size_t Embedding::max_chain_length() const {
  std::size_t longest = 0;
  for (const auto& chain : chains) longest = std::max(longest, chain.size());
  return longest;
}

EmbeddingCheck verify_embedding(const Embedding& embedding, const ChimeraGraph& graph) {
  EmbeddingCheck check;
  auto fail = [&check](std::string why) {
    check.valid = false;
    check.problems.push_back(std::move(why));
  };
  const int n_logical = embedding.n_visible + embedding.n_hidden;
  if (static_cast<int>(embedding.chains.size()) != n_logical) {
    fail("chain count does not match n_visible + n_hidden");
    return check;
  }
  std::map<int, int> owner;
  for (int id = 0; id < n_logical; ++id) {
    const auto& chain = embedding.chains[id];
    if (chain.empty()) fail("logical " + std::to_string(id) + " has an empty chain");
    for (int q : chain) {
      if (!graph.is_active(q)) {
        fail("logical " + std::to_string(id) + " uses inactive qubit " + std::to_string(q));
      }
      auto [it, inserted] = owner.emplace(q, id);
      if (!inserted) {
        fail("qubit " + std::to_string(q) + " shared by logical " + std::to_string(it->second) +
             " and " + std::to_string(id));
      }
    }
    if (chain.empty()) continue;
    // Connectivity: flood fill restricted to the chain.
    std::set<int> members(chain.begin(), chain.end());
    std::set<int> seen{chain.front()};
    std::deque<int> queue{chain.front()};
    while (!queue.empty()) {
      const int q = queue.front();
      queue.pop_front();
      if (!graph.is_active(q)) continue;
      for (int nb : graph.neighbors(q)) {
        if (members.contains(nb) && seen.insert(nb).second) queue.push_back(nb);
      }
    }
    if (seen.size() != members.size()) {
      fail("chain of logical " + std::to_string(id) + " is not connected");
    }
  }
  for (int i = 0; i < embedding.n_visible; ++i) {
    for (int j = 0; j < embedding.n_hidden; ++j) {
      bool linked = false;
      for (int a : embedding.visible_chain(i)) {
        for (int b : embedding.hidden_chain(j)) {
          if (graph.has_edge(a, b)) {
            linked = true;
            break;
          }
        }
        if (linked) break;
      }
      if (!linked) {
        fail("no coupler between visible " + std::to_string(i) + " and hidden " +
             std::to_string(j));
      }
    }
  }
  return check;
}

Embedding embed_bipartite(int n_visible, int n_hidden, const ChimeraGraph& graph) {
  if (n_visible < 1 || n_hidden < 1) {
    throw std::invalid_argument("embed_bipartite: layer sizes must be positive");
  }
  const int rows_needed = (n_visible + 3) / 4;
  const int cols_needed = (n_hidden + 3) / 4;
  if (rows_needed > graph.m() || cols_needed > graph.m()) {
    std::ostringstream msg;
    msg << "embed_bipartite: K_" << n_visible << "," << n_hidden << " needs a " << rows_needed
        << "x" << cols_needed << " block of cells but the lattice is " << graph.m() << "x"
        << graph.m();
    throw EmbeddingError(msg.str());
  }
  Embedding emb;
  emb.n_visible = n_visible;
  emb.n_hidden = n_hidden;
  emb.chains.resize(n_visible + n_hidden);
  for (int i = 0; i < n_visible; ++i) {
    for (int col = 0; col < cols_needed; ++col) {
      emb.chains[i].push_back(graph.index({i / 4, col, 1, i % 4}));
    }
  }
  for (int j = 0; j < n_hidden; ++j) {
    for (int row = 0; row < rows_needed; ++row) {
      emb.chains[n_visible + j].push_back(graph.index({row, j / 4, 0, j % 4}));
    }
  }
  for (int id = 0; id < n_visible + n_hidden; ++id) {
    for (int q : emb.chains[id]) {
      if (!graph.is_active(q)) {
        throw EmbeddingError("embed_bipartite: dead qubit " + std::to_string(q) +
                             " breaks the chain of logical " + std::to_string(id));
      }
    }
  }
  return emb;
}

void write_embedding(const Embedding& embedding, std::ostream& out) {
  const auto old = out.precision(17);
  out << "# rbmkit-embedding " << embedding.n_visible << ' ' << embedding.n_hidden << ' '
      << embedding.chain_strength << '\n';
  out.precision(old);
  for (std::size_t id = 0; id < embedding.chains.size(); ++id) {
    out << id << ':';
    for (std::size_t k = 0; k < embedding.chains[id].size(); ++k) {
      out << (k ? "," : " ") << embedding.chains[id][k];
    }
    out << '\n';
  }
}

Embedding read_embedding(std::istream& in) {
  Embedding emb;
  std::string line;
  if (!std::getline(in, line)) throw FormatError("read_embedding: empty input");
  {
    std::istringstream header(line);
    std::string hash, tag;
    if (!(header >> hash >> tag >> emb.n_visible >> emb.n_hidden >> emb.chain_strength) ||
        hash != "#" || tag != "rbmkit-embedding") {
      throw FormatError("read_embedding: bad header");
    }
  }
  emb.chains.resize(emb.n_visible + emb.n_hidden);
  std::vector<bool> seen(emb.chains.size(), false);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw FormatError("read_embedding: missing ':'");
    const int id = std::stoi(line.substr(0, colon));
    if (id < 0 || id >= static_cast<int>(emb.chains.size())) {
      throw FormatError("read_embedding: logical id out of range");
    }
    std::istringstream qubits(line.substr(colon + 1));
    std::string token;
    while (std::getline(qubits, token, ',')) emb.chains[id].push_back(std::stoi(token));
    seen[id] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw FormatError("read_embedding: missing chains");
  }
  return emb;
}

// ---------------------------------------------------------------------------
// Problem mapping

double LogicalIsing::energy(const BitVector& v, const BitVector& h) const {
  double e = offset;
  for (Eigen::Index i = 0; i < h_visible.size(); ++i) {
    const double s = v[i] ? 1.0 : -1.0;
    e += h_visible(i) * s;
    for (Eigen::Index j = 0; j < h_hidden.size(); ++j) {
      e += J(i, j) * s * (h[j] ? 1.0 : -1.0);
    }
  }
  for (Eigen::Index j = 0; j < h_hidden.size(); ++j) e += h_hidden(j) * (h[j] ? 1.0 : -1.0);
  return e;
}

LogicalIsing to_ising(const RbmParams& params) {
  LogicalIsing out;
  out.J = -0.25 * params.W;
  out.h_visible = -0.5 * params.b - 0.25 * params.W.rowwise().sum();
  out.h_hidden = -0.5 * params.c - 0.25 * params.W.colwise().sum().transpose();
  out.offset = -0.25 * params.W.sum() - 0.5 * params.b.sum() - 0.5 * params.c.sum();
  return out;
}

double default_chain_strength(const RbmParams& params) {
  const double max_j = 0.25 * params.W.cwiseAbs().maxCoeff();
  return std::max(1.5 * max_j, 1e-3);
}

std::vector<int> IsingProblem::nodes() const {
  std::vector<int> out;
  out.reserve(hfield.size());
  for (const auto& [q, value] : hfield) out.push_back(q);
  return out;
}

double IsingProblem::energy(const std::vector<std::int8_t>& spins) const {
  std::map<int, std::size_t> pos;
  std::size_t k = 0;
  for (const auto& [q, value] : hfield) pos[q] = k++;
  if (spins.size() != hfield.size()) throw DimensionError("IsingProblem::energy: spin count");
  double e = 0.0;
  k = 0;
  for (const auto& [q, value] : hfield) e += value * spins[k++];
  for (const auto& [edge, value] : J) e += value * spins[pos.at(edge.first)] * spins[pos.at(edge.second)];
  return e;
}

namespace {

double range_factor(double x, double lo, double hi) {
  if (x > 0) return x / hi;
  if (x < 0) return x / lo;
  return 0.0;
}

}  // namespace

IsingProblem embed_problem(const RbmParams& params, const Embedding& embedding,
                           const ChimeraGraph& graph, double chain_strength,
                           const CouplingRange& range) {
  params.validate();
  if (!(chain_strength > 0.0)) throw std::invalid_argument("embed_problem: chain_strength must be positive");
  if (embedding.n_visible != params.n_visible() || embedding.n_hidden != params.n_hidden()) {
    throw DimensionError("embed_problem: embedding does not match the model shape");
  }
  const LogicalIsing logical = to_ising(params);
  IsingProblem problem;
  problem.offset = logical.offset;
  problem.chain_strength = chain_strength;

  auto add_field = [&](const std::vector<int>& chain, double value) {
    const double share = value / static_cast<double>(chain.size());
    for (int q : chain) problem.hfield[q] += share;
  };
  for (int i = 0; i < params.n_visible(); ++i) add_field(embedding.visible_chain(i), logical.h_visible(i));
  for (int j = 0; j < params.n_hidden(); ++j) add_field(embedding.hidden_chain(j), logical.h_hidden(j));

  for (int i = 0; i < params.n_visible(); ++i) {
    for (int j = 0; j < params.n_hidden(); ++j) {
      std::vector<std::pair<int, int>> couplers;
      for (int a : embedding.visible_chain(i)) {
        for (int b : embedding.hidden_chain(j)) {
          if (graph.has_edge(a, b)) couplers.emplace_back(std::min(a, b), std::max(a, b));
        }
      }
      if (couplers.empty()) {
        throw EmbeddingError("embed_problem: no coupler for visible " + std::to_string(i) +
                             " / hidden " + std::to_string(j));
      }
      const double share = logical.J(i, j) / static_cast<double>(couplers.size());
      for (const auto& edge : couplers) problem.J[edge] += share;
    }
  }
  for (const auto& chain : embedding.chains) {
    for (std::size_t a = 0; a < chain.size(); ++a) {
      for (std::size_t b = a + 1; b < chain.size(); ++b) {
        if (graph.has_edge(chain[a], chain[b])) {
          problem.J[{std::min(chain[a], chain[b]), std::max(chain[a], chain[b])}] = -chain_strength;
        }
      }
    }
  }

  if (range.auto_scale) {
    double factor = 1.0;
    for (const auto& [q, value] : problem.hfield) {
      factor = std::max(factor, range_factor(value, range.h_min, range.h_max));
    }
    for (const auto& [edge, value] : problem.J) {
      factor = std::max(factor, range_factor(value, range.j_min, range.j_max));
    }
    problem.scale = factor;
    for (auto& [q, value] : problem.hfield) value /= factor;
    for (auto& [edge, value] : problem.J) value /= factor;
  }
  for (auto& [q, value] : problem.hfield) value = std::clamp(value, range.h_min, range.h_max);
  for (auto& [edge, value] : problem.J) value = std::clamp(value, range.j_min, range.j_max);
  return problem;
}

// ---------------------------------------------------------------------------
// Annealing

namespace {

struct CompiledIsing {
  std::vector<int> nodes;
  std::vector<double> field;
  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency;
  std::vector<std::size_t> color0;
  std::vector<std::size_t> color1;
  std::vector<std::vector<std::size_t>> clusters;  // chains of length >= 2, as positions
};

void add_clusters(CompiledIsing& c, const std::vector<std::vector<int>>& chains) {
  std::map<int, std::size_t> pos;
  for (std::size_t k = 0; k < c.nodes.size(); ++k) pos[c.nodes[k]] = k;
  for (const auto& chain : chains) {
    if (chain.size() < 2) continue;
    std::vector<std::size_t> members;
    for (int q : chain) members.push_back(pos.at(q));
    c.clusters.push_back(std::move(members));
  }
}

CompiledIsing compile(const IsingProblem& problem) {
  CompiledIsing c;
  c.nodes = problem.nodes();
  std::map<int, std::size_t> pos;
  for (std::size_t k = 0; k < c.nodes.size(); ++k) pos[c.nodes[k]] = k;
  c.field.reserve(c.nodes.size());
  for (const auto& [q, value] : problem.hfield) c.field.push_back(value);
  c.adjacency.resize(c.nodes.size());
  for (const auto& [edge, value] : problem.J) {
    const auto a = pos.find(edge.first);
    const auto b = pos.find(edge.second);
    if (a == pos.end() || b == pos.end()) {
      throw std::invalid_argument("anneal_ising: coupler touches a qubit without a field entry");
    }
    c.adjacency[a->second].emplace_back(b->second, value);
    c.adjacency[b->second].emplace_back(a->second, value);
  }
  // BFS two-coloring; the smallest qubit of each component gets color 0.
  std::vector<int> color(c.nodes.size(), -1);
  for (std::size_t start = 0; start < c.nodes.size(); ++start) {
    if (color[start] >= 0) continue;
    color[start] = 0;
    std::deque<std::size_t> queue{start};
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (const auto& [w, value] : c.adjacency[u]) {
        if (color[w] < 0) {
          color[w] = 1 - color[u];
          queue.push_back(w);
        } else if (color[w] == color[u]) {
          throw std::invalid_argument("anneal_ising: coupling graph is not bipartite");
        }
      }
    }
  }
  for (std::size_t k = 0; k < c.nodes.size(); ++k) (color[k] == 0 ? c.color0 : c.color1).push_back(k);
  return c;
}

void heat_bath(const CompiledIsing& c, const std::vector<std::size_t>& block,
               std::vector<std::int8_t>& spins, double beta, Rng& rng) {
  for (std::size_t u : block) {
    double f = c.field[u];
    for (const auto& [w, value] : c.adjacency[u]) f += value * spins[w];
    // E(s_u) = s_u f, so p(+1) = exp(-beta f) / (exp(-beta f) + exp(beta f)).
    spins[u] = rng.bernoulli(logistic(-2.0 * beta * f)) ? 1 : -1;
  }
}

// Heat-bath flip of a whole chain. Couplers inside the chain keep their
// sign, so only the boundary and the fields enter the energy change.
void flip_clusters(const CompiledIsing& c, std::vector<std::int8_t>& spins, double beta, Rng& rng,
                   std::vector<char>& inside) {
  for (const auto& cluster : c.clusters) {
    for (std::size_t u : cluster) inside[u] = 1;
    double delta = 0.0;
    for (std::size_t u : cluster) {
      double f = c.field[u];
      for (const auto& [w, value] : c.adjacency[u]) {
        if (!inside[w]) f += value * spins[w];
      }
      delta -= 2.0 * spins[u] * f;
    }
    if (rng.bernoulli(logistic(-beta * delta))) {
      for (std::size_t u : cluster) spins[u] = static_cast<std::int8_t>(-spins[u]);
    }
    for (std::size_t u : cluster) inside[u] = 0;
  }
}

std::vector<std::int8_t> anneal_once(const CompiledIsing& c, const AnnealSchedule& schedule,
                                     Rng& rng) {
  std::vector<std::int8_t> spins(c.nodes.size());
  std::vector<char> inside(c.nodes.size(), 0);
  for (auto& s : spins) s = rng.bernoulli(0.5) ? 1 : -1;
  for (int sweep = 0; sweep < schedule.n_sweeps; ++sweep) {
    const double beta = schedule.beta_at(sweep);
    heat_bath(c, c.color0, spins, beta, rng);
    heat_bath(c, c.color1, spins, beta, rng);
    flip_clusters(c, spins, beta, rng, inside);
  }
  return spins;
}

}  // namespace

std::vector<std::vector<std::int8_t>> anneal_ising(const IsingProblem& problem,
                                                   const AnnealSchedule& schedule, int n_runs,
                                                   std::uint64_t seed,
                                                   const std::vector<std::vector<int>>& chains) {
  if (n_runs < 1) throw std::invalid_argument("anneal_ising: n_runs must be >= 1");
  CompiledIsing c = compile(problem);
  add_clusters(c, chains);
  std::vector<std::vector<std::int8_t>> out;
  out.reserve(n_runs);
  for (int r = 0; r < n_runs; ++r) {
    Rng rng(seed, static_cast<std::uint64_t>(r));
    out.push_back(anneal_once(c, schedule, rng));
  }
  return out;
}

ChainState decode_chains(const Embedding& embedding, const std::vector<int>& nodes,
                         const std::vector<std::int8_t>& spins, Rng& rng, int* broken) {
  if (spins.size() != nodes.size()) throw DimensionError("decode_chains: spin count");
  std::map<int, std::int8_t> value;
  for (std::size_t k = 0; k < nodes.size(); ++k) value[nodes[k]] = spins[k];
  int n_broken = 0;
  auto vote = [&](const std::vector<int>& chain) -> std::uint8_t {
    int sum = 0;
    for (int q : chain) sum += value.at(q);
    if (sum != static_cast<int>(chain.size()) && sum != -static_cast<int>(chain.size())) ++n_broken;
    if (sum > 0) return 1;
    if (sum < 0) return 0;
    return rng.bernoulli(0.5) ? 1 : 0;
  };
  ChainState state{BitVector(embedding.n_visible), BitVector(embedding.n_hidden)};
  for (int i = 0; i < embedding.n_visible; ++i) state.v[i] = vote(embedding.visible_chain(i));
  for (int j = 0; j < embedding.n_hidden; ++j) state.h[j] = vote(embedding.hidden_chain(j));
  if (broken) *broken = n_broken;
  return state;
}

SampleSet chimera_sample(const RbmParams& params, const ChimeraGraph& graph,
                         const Embedding& embedding, const SamplerConfig& config,
                         const ChimeraOptions& options) {
  config.validate();
  const EmbeddingCheck check = verify_embedding(embedding, graph);
  if (!check.valid) throw EmbeddingError("chimera_sample: invalid embedding: " + check.problems.front());
  double strength = options.chain_strength;
  if (!(strength > 0.0)) strength = embedding.chain_strength;
  if (!(strength > 0.0)) strength = default_chain_strength(params);
  const IsingProblem problem = embed_problem(params, embedding, graph, strength, options.range);
  CompiledIsing compiled = compile(problem);
  if (options.chain_flips) add_clusters(compiled, embedding.chains);

  SampleSet out;
  out.source = "chimera";
  out.states.reserve(config.n_samples);
  long broken_total = 0;
  for (int r = 0; r < config.n_samples; ++r) {
    Rng rng(config.rng_seed, static_cast<std::uint64_t>(r));
    const auto spins = anneal_once(compiled, config.sa, rng);
    int broken = 0;
    ChainState state = decode_chains(embedding, compiled.nodes, spins, rng, &broken);
    broken_total += broken;
    for (int s = 0; s < config.gibbs_postprocess_sweeps; ++s) gibbs_sweep_inplace(params, state, rng);
    out.push_back(std::move(state), params);
  }
  out.broken_chain_fraction = static_cast<double>(broken_total) /
                              (static_cast<double>(config.n_samples) * embedding.chains.size());
  return out;
}

ChimeraSampler::ChimeraSampler(int n_visible, int n_hidden, SamplerConfig config,
                               ChimeraOptions options)
    : config_(std::move(config)),
      options_(std::move(options)),
      graph_(options_.m > 0 ? options_.m : std::max((n_visible + 3) / 4, (n_hidden + 3) / 4),
             options_.dead_qubits),
      embedding_(embed_bipartite(n_visible, n_hidden, graph_)) {
  config_.validate();
  embedding_.chain_strength = options_.chain_strength;
}

SampleSet ChimeraSampler::sample(const RbmParams& params, std::uint64_t seed) const {
  SamplerConfig cfg = config_;
  cfg.rng_seed = seed;
  return chimera_sample(params, graph_, embedding_, cfg, options_);
}

std::unique_ptr<Sampler> make_sampler(const SamplerConfig& config, int n_visible, int n_hidden,
                                      const ChimeraOptions& options) {
  if (config.kind == SamplerKind::chimera) {
    return std::make_unique<ChimeraSampler>(n_visible, n_hidden, config, options);
  }
  return make_sampler(config);
}

}  // namespace rbmkit
