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
#include <rbmkit/exact.hpp>
#include <rbmkit/random.hpp>
#include <rbmkit/thermometry.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "support/oracle.hpp"

namespace rbmkit {
namespace {

RbmParams random_params(int nv, int nh, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  return RbmParams::random_normal(nv, nh, scale, rng);
}

CouplingRange unbounded() {
  CouplingRange r;
  r.auto_scale = false;
  r.j_min = r.h_min = -1e300;
  r.j_max = r.h_max = 1e300;
  return r;
}

// The first n_visible and n_hidden chains of the K_{8,8} layout on C_2: every
// chain has two qubits and each visible/hidden pair meets in cell (0, 0).
Embedding two_qubit_chains(int nv, int nh, const ChimeraGraph& c2) {
  const Embedding full = embed_bipartite(8, 8, c2);
  Embedding e;
  e.n_visible = nv;
  e.n_hidden = nh;
  for (int i = 0; i < nv; ++i) e.chains.push_back(full.visible_chain(i));
  for (int j = 0; j < nh; ++j) e.chains.push_back(full.hidden_chain(j));
  return e;
}

TEST(Chimera, SingleCell) {
  const ChimeraGraph g = build_chimera(1);
  EXPECT_EQ(g.num_qubits(), 8);
  EXPECT_EQ(g.edges().size(), 16u);
}

TEST(Chimera, EdgeCountsFollowFormula) {
  for (int m : {1, 2, 3, 16}) {
    const ChimeraGraph g = build_chimera(m);
    EXPECT_EQ(g.num_qubits(), 8 * m * m);
    EXPECT_EQ(g.intra_cell_edge_count(), static_cast<std::size_t>(16 * m * m));
    EXPECT_EQ(g.inter_cell_edge_count(), static_cast<std::size_t>(8 * m * (m - 1)));
    EXPECT_EQ(g.edges().size(), g.intra_cell_edge_count() + g.inter_cell_edge_count());
  }
  EXPECT_EQ(build_chimera(2).edges().size(), 80u);
  EXPECT_EQ(build_chimera(16).num_qubits(), 2048);
}

TEST(Chimera, ExplicitAdjacency) {
  const ChimeraGraph g = build_chimera(2);
  // Inside a cell every vertical qubit meets every horizontal one.
  for (int k = 0; k < 4; ++k) {
    for (int l = 0; l < 4; ++l) EXPECT_TRUE(g.has_edge(g.index({1, 0, 0, k}), g.index({1, 0, 1, l})));
  }
  EXPECT_FALSE(g.has_edge(g.index({0, 0, 0, 0}), g.index({0, 0, 0, 1})));
  // Vertical qubits couple to the cell below, horizontal ones to the right.
  EXPECT_TRUE(g.has_edge(g.index({0, 1, 0, 2}), g.index({1, 1, 0, 2})));
  EXPECT_TRUE(g.has_edge(g.index({1, 0, 1, 3}), g.index({1, 1, 1, 3})));
  EXPECT_FALSE(g.has_edge(g.index({0, 0, 0, 2}), g.index({0, 1, 0, 2})));
  EXPECT_FALSE(g.has_edge(g.index({0, 0, 1, 2}), g.index({1, 0, 1, 2})));
}

TEST(Chimera, ColoringIsProper) {
  const ChimeraGraph g = build_chimera(3);
  for (const auto& [a, b] : g.edges()) EXPECT_NE(g.color(a), g.color(b));
}

TEST(Chimera, CoordinatesRoundTrip) {
  const ChimeraGraph g = build_chimera(3);
  for (int q = 0; q < g.num_qubits(); ++q) EXPECT_EQ(g.index(g.coord(q)), q);
}

TEST(Chimera, DeadQubitsRemoveCouplers) {
  const ChimeraGraph g = build_chimera(1, {0});
  EXPECT_EQ(g.num_active(), 7);
  EXPECT_EQ(g.edges().size(), 12u);
  EXPECT_FALSE(g.is_active(0));
  EXPECT_THROW(build_chimera(1, {8}), std::invalid_argument);
  EXPECT_THROW(build_chimera(0), std::invalid_argument);
}

TEST(Embedding, K44IntoOneCellUsesSingleQubits) {
  const ChimeraGraph g = build_chimera(1);
  const Embedding e = embed_bipartite(4, 4, g);
  EXPECT_EQ(e.max_chain_length(), 1u);
  EXPECT_TRUE(verify_embedding(e, g).valid);
}

TEST(Embedding, K88IntoC2) {
  const ChimeraGraph g = build_chimera(2);
  const Embedding e = embed_bipartite(8, 8, g);
  ASSERT_EQ(e.chains.size(), 16u);
  for (const auto& chain : e.chains) EXPECT_EQ(chain.size(), 2u);
  const EmbeddingCheck check = verify_embedding(e, g);
  EXPECT_TRUE(check.valid) << (check.problems.empty() ? "" : check.problems.front());
}

TEST(Embedding, RectangularLayouts) {
  const ChimeraGraph g = build_chimera(4);
  for (auto [nv, nh] : {std::pair{13, 5}, std::pair{3, 16}, std::pair{16, 16}, std::pair{9, 12}}) {
    const Embedding e = embed_bipartite(nv, nh, g);
    EXPECT_EQ(e.visible_chain(0).size(), static_cast<std::size_t>((nh + 3) / 4));
    EXPECT_EQ(e.hidden_chain(0).size(), static_cast<std::size_t>((nv + 3) / 4));
    EXPECT_TRUE(verify_embedding(e, g).valid);
  }
}

TEST(Embedding, CapacityAndDeadQubitErrors) {
  EXPECT_THROW(embed_bipartite(5, 4, build_chimera(1)), EmbeddingError);
  const ChimeraGraph g = build_chimera(1);
  const int used = g.index({0, 0, 1, 0});
  EXPECT_THROW(embed_bipartite(4, 4, build_chimera(1, {used})), EmbeddingError);
  EXPECT_NO_THROW(embed_bipartite(3, 4, build_chimera(1, {g.index({0, 0, 1, 3})})));
}

TEST(Embedding, VerifierRejectsBrokenEmbeddings) {
  const ChimeraGraph g = build_chimera(2);
  Embedding e = embed_bipartite(8, 8, g);

  Embedding overlap = e;
  overlap.chains[1].push_back(overlap.chains[0][0]);
  EXPECT_FALSE(verify_embedding(overlap, g).valid);

  Embedding disconnected = e;
  disconnected.chains[0] = {g.index({0, 0, 1, 0}), g.index({1, 1, 1, 0})};
  EXPECT_FALSE(verify_embedding(disconnected, g).valid);

  Embedding uncovered = two_qubit_chains(4, 4, g);
  uncovered.chains[4] = {g.index({1, 1, 0, 0})};  // hidden 0 moved away from row 0
  EXPECT_FALSE(verify_embedding(uncovered, g).valid);

  EXPECT_FALSE(verify_embedding(e, build_chimera(2, {e.chains[3][1]})).valid);
}

TEST(Embedding, TextRoundTrip) {
  const ChimeraGraph g = build_chimera(2);
  Embedding e = embed_bipartite(6, 7, g);
  e.chain_strength = 1.25;
  std::stringstream s;
  write_embedding(e, s);
  const Embedding back = read_embedding(s);
  EXPECT_EQ(back.chains, e.chains);
  EXPECT_EQ(back.chain_strength, 1.25);
  std::istringstream bad("# rbmkit-embedding 1 1 1\n0: 4\n");
  EXPECT_THROW(read_embedding(bad), FormatError);
}

TEST(IsingForm, EnergiesMatchExactly) {
  const RbmParams p = random_params(3, 3, 80);
  const LogicalIsing ising = to_ising(p);
  const auto joint = oracle::enumerate(p);
  for (std::size_t k = 0; k < joint.v.size(); ++k) {
    EXPECT_NEAR(ising.energy(joint.v[k], joint.h[k]), joint.energy[k], 1e-12);
    // Differences are preserved with the constant removed.
    const double a = ising.energy(joint.v[k], joint.h[k]) - ising.offset;
    const double b = ising.energy(joint.v[0], joint.h[0]) - ising.offset;
    EXPECT_NEAR(a - b, joint.energy[k] - joint.energy[0], 1e-12);
  }
}

std::vector<std::int8_t> spins_for(const IsingProblem& problem, const Embedding& e, const BitVector& v,
                                   const BitVector& h) {
  std::map<int, std::int8_t> at;
  for (int i = 0; i < e.n_visible; ++i) {
    for (int q : e.visible_chain(i)) at[q] = v[i] ? 1 : -1;
  }
  for (int j = 0; j < e.n_hidden; ++j) {
    for (int q : e.hidden_chain(j)) at[q] = h[j] ? 1 : -1;
  }
  std::vector<std::int8_t> spins;
  for (int q : problem.nodes()) spins.push_back(at.at(q));
  return spins;
}

TEST(EmbedProblem, UnitChainsReproduceLogicalProblem) {
  const RbmParams p = random_params(4, 4, 81);
  const ChimeraGraph g = build_chimera(1);
  const Embedding e = embed_bipartite(4, 4, g);
  const IsingProblem prob = embed_problem(p, e, g, 1.0, unbounded());
  const LogicalIsing logical = to_ising(p);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(prob.hfield.at(e.visible_chain(i)[0]), logical.h_visible(i));
  for (int j = 0; j < 4; ++j) EXPECT_EQ(prob.hfield.at(e.hidden_chain(j)[0]), logical.h_hidden(j));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const int a = e.visible_chain(i)[0], b = e.hidden_chain(j)[0];
      EXPECT_EQ(prob.J.at({std::min(a, b), std::max(a, b)}), logical.J(i, j));
    }
  }
  EXPECT_EQ(prob.J.size(), 16u);
  const auto joint = oracle::enumerate(p);
  for (std::size_t k = 0; k < joint.v.size(); k += 3) {
    EXPECT_NEAR(prob.energy(spins_for(prob, e, joint.v[k], joint.h[k])) + prob.offset, joint.energy[k], 1e-12);
  }
}

TEST(EmbedProblem, FieldSplitsOverChain) {
  RbmParams p(1, 1);
  p.b(0) = 0.8;
  const ChimeraGraph g = build_chimera(2);
  const Embedding e = two_qubit_chains(1, 1, g);
  const IsingProblem prob = embed_problem(p, e, g, 0.7, unbounded());
  const double hv = to_ising(p).h_visible(0);
  ASSERT_NE(hv, 0.0);
  for (int q : e.visible_chain(0)) EXPECT_DOUBLE_EQ(prob.hfield.at(q), hv / 2.0);
  const auto& chain = e.visible_chain(0);
  EXPECT_EQ(prob.J.at({std::min(chain[0], chain[1]), std::max(chain[0], chain[1])}), -0.7);
}

TEST(EmbedProblem, CouplingSplitsOverAvailableCouplers) {
  // Each chain holds one vertical and one horizontal qubit of cell (0, 0),
  // so the two chains meet through two couplers.
  const ChimeraGraph g = build_chimera(1);
  Embedding e;
  e.n_visible = 1;
  e.n_hidden = 1;
  e.chains = {{g.index({0, 0, 0, 0}), g.index({0, 0, 1, 0})}, {g.index({0, 0, 0, 1}), g.index({0, 0, 1, 1})}};
  ASSERT_TRUE(verify_embedding(e, g).valid);
  RbmParams p(1, 1);
  p.W(0, 0) = 1.2;
  const IsingProblem prob = embed_problem(p, e, g, 1.0, unbounded());
  const double j = to_ising(p).J(0, 0);
  int couplers = 0;
  for (int a : e.visible_chain(0)) {
    for (int b : e.hidden_chain(0)) {
      if (g.has_edge(a, b)) {
        ++couplers;
        EXPECT_DOUBLE_EQ(prob.J.at({std::min(a, b), std::max(a, b)}), j / 2.0);
      }
    }
  }
  EXPECT_EQ(couplers, 2);
}

TEST(EmbedProblem, RejectsNonPositiveStrength) {
  const ChimeraGraph g = build_chimera(1);
  const Embedding e = embed_bipartite(2, 2, g);
  EXPECT_THROW(embed_problem(RbmParams(2, 2), e, g, 0.0), std::invalid_argument);
  EXPECT_THROW(embed_problem(RbmParams(2, 2), e, g, -1.0), std::invalid_argument);
}

TEST(EmbedProblem, AutoScaleAndClip) {
  const RbmParams p = random_params(4, 4, 82, 10.0);
  const ChimeraGraph g = build_chimera(2);
  const Embedding e = two_qubit_chains(4, 4, g);
  const IsingProblem scaled = embed_problem(p, e, g, 5.0);
  EXPECT_GT(scaled.scale, 1.0);
  for (const auto& [q, h] : scaled.hfield) {
    EXPECT_GE(h, -1.0);
    EXPECT_LE(h, 1.0);
  }
  for (const auto& [edge, j] : scaled.J) {
    EXPECT_GE(j, -2.0);
    EXPECT_LE(j, 2.0);
  }
  CouplingRange clip_only;
  clip_only.auto_scale = false;
  const IsingProblem clipped = embed_problem(p, e, g, 5.0, clip_only);
  EXPECT_EQ(clipped.scale, 1.0);
  double largest = 0.0;
  for (const auto& [edge, j] : clipped.J) largest = std::max(largest, std::abs(j));
  EXPECT_EQ(largest, 2.0);
}

// Physical ground state by enumerating one colour class and setting each
// spin of the other against its local field.
std::vector<std::int8_t> physical_ground_state(const IsingProblem& prob, const ChimeraGraph& g) {
  const std::vector<int> nodes = prob.nodes();
  std::vector<std::size_t> free, fixed;
  for (std::size_t k = 0; k < nodes.size(); ++k) (g.color(nodes[k]) == 0 ? free : fixed).push_back(k);
  std::map<int, std::size_t> pos;
  for (std::size_t k = 0; k < nodes.size(); ++k) pos[nodes[k]] = k;
  std::vector<std::int8_t> best;
  double best_e = std::numeric_limits<double>::infinity();
  std::vector<std::int8_t> s(nodes.size(), 1);
  for (std::uint64_t mask = 0; mask < (1ULL << free.size()); ++mask) {
    for (std::size_t k = 0; k < free.size(); ++k) s[free[k]] = (mask >> k) & 1 ? 1 : -1;
    for (std::size_t u : fixed) {
      double f = prob.hfield.at(nodes[u]);
      for (const auto& [edge, j] : prob.J) {
        if (edge.first == nodes[u]) f += j * s[pos[edge.second]];
        if (edge.second == nodes[u]) f += j * s[pos[edge.first]];
      }
      s[u] = f > 0 ? -1 : 1;
    }
    const double e = prob.energy(s);
    if (e < best_e) {
      best_e = e;
      best = s;
    }
  }
  return best;
}

TEST(EmbedProblem, StrongChainsPreserveGroundState) {
  const ChimeraGraph g = build_chimera(2);
  const Embedding e = two_qubit_chains(4, 4, g);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const RbmParams p = random_params(4, 4, 83 + seed);
    const double strength = 10.0 * 0.25 * p.W.cwiseAbs().maxCoeff();
    const IsingProblem prob = embed_problem(p, e, g, strength, unbounded());
    const auto spins = physical_ground_state(prob, g);
    Rng rng(1);
    int broken = -1;
    const ChainState decoded = decode_chains(e, prob.nodes(), spins, rng, &broken);
    const GroundState truth = ExactModel(p).ground_state();
    EXPECT_EQ(broken, 0);
    EXPECT_EQ(decoded.v, truth.v);
    EXPECT_EQ(decoded.h, truth.h);
  }
}

TEST(DecodeChains, MajorityAndTies) {
  Embedding e;
  e.n_visible = 1;
  e.n_hidden = 1;
  e.chains = {{0, 1, 2}, {3, 4}};
  const std::vector<int> nodes{0, 1, 2, 3, 4};
  Rng rng(2);
  int broken = 0;
  ChainState s = decode_chains(e, nodes, {1, 1, -1, 1, 1}, rng, &broken);
  EXPECT_EQ(s.v[0], 1);
  EXPECT_EQ(s.h[0], 1);
  EXPECT_EQ(broken, 1);
  int ones = 0;
  for (int t = 0; t < 2000; ++t) ones += decode_chains(e, nodes, {-1, -1, -1, 1, -1}, rng, &broken).h[0];
  EXPECT_EQ(broken, 1);
  EXPECT_NEAR(ones, 1000, 150);
}

SamplerConfig anneal_config(int n, AnnealSchedule schedule, std::uint64_t seed) {
  SamplerConfig cfg;
  cfg.kind = SamplerKind::chimera;
  cfg.n_samples = n;
  cfg.sa = schedule;
  cfg.gibbs_postprocess_sweeps = 0;
  cfg.rng_seed = seed;
  return cfg;
}

TEST(ChimeraSample, UnitChainsMatchLogicalAnnealing) {
  const RbmParams p = random_params(3, 3, 84);
  const ChimeraGraph g = build_chimera(1);
  const Embedding e = embed_bipartite(3, 3, g);
  ChimeraOptions opts;
  opts.range = unbounded();
  const SamplerConfig cfg = anneal_config(4000, {0.2, 1.5, 20}, 85);
  const SampleSet phys = chimera_sample(p, g, e, cfg, opts);
  SamplerConfig logical = cfg;
  logical.kind = SamplerKind::simulated_annealing;
  logical.rng_seed = 86;
  const SampleSet ref = simulated_anneal(p, logical);
  EXPECT_GT(ks_two_sample(phys.energies, ref.energies).p_value, 0.01);
  EXPECT_EQ(*phys.broken_chain_fraction, 0.0);
  EXPECT_LT(max_energy_error(p, phys), 1e-12);
}

TEST(ChimeraSample, EquilibriumAtUnitTemperature) {
  const RbmParams p = random_params(3, 3, 87);
  const ChimeraGraph g = build_chimera(1);
  ChimeraOptions opts;
  opts.range = unbounded();
  const SampleSet s = chimera_sample(p, g, embed_bipartite(3, 3, g), anneal_config(3000, {1.0, 1.0, 100}, 88), opts);
  EXPECT_GT(ks_two_sample(s.energies, exact_sample(p, 3000, 89).energies).p_value, 0.01);
}

TEST(ChimeraSample, StrongChainsRarelyBreak) {
  const RbmParams p = random_params(4, 4, 90);
  const ChimeraGraph g = build_chimera(2);
  ChimeraOptions opts;
  opts.chain_strength = 10.0 * 0.25 * p.W.cwiseAbs().maxCoeff();
  const SampleSet s = chimera_sample(p, g, two_qubit_chains(4, 4, g), anneal_config(1000, {0.1, 3.0, 100}, 91), opts);
  EXPECT_LE(*s.broken_chain_fraction, 0.01);
}

TEST(ChimeraSample, WeakChainsBreakOnFrustratedProblem) {
  RbmParams p(2, 2);
  p.W << 2.0, -2.0, 2.0, 2.0;  // odd number of antiferromagnetic bonds
  const ChimeraGraph g = build_chimera(2);
  ChimeraOptions opts;
  opts.chain_strength = 1e-3;
  const SampleSet s = chimera_sample(p, g, two_qubit_chains(2, 2, g), anneal_config(1000, {0.1, 3.0, 100}, 92), opts);
  EXPECT_GT(*s.broken_chain_fraction, 0.0);
}

TEST(ChimeraSample, ReproducibleAndPostProcessed) {
  const RbmParams p = random_params(5, 6, 93);
  SamplerConfig cfg = anneal_config(20, {0.1, 2.0, 30}, 94);
  cfg.gibbs_postprocess_sweeps = 2;
  const ChimeraSampler sampler(5, 6, cfg);
  EXPECT_EQ(sampler.graph().m(), 2);
  EXPECT_TRUE(verify_embedding(sampler.embedding(), sampler.graph()).valid);
  const SampleSet a = sampler.sample(p, 95);
  const SampleSet b = sampler.sample(p, 95);
  EXPECT_EQ(a.states, b.states);
  EXPECT_LT(max_energy_error(p, a), 1e-12);
  EXPECT_EQ(make_sampler(cfg, 5, 6)->name(), "chimera");
}

TEST(ChimeraSample, RejectsInvalidEmbedding) {
  const ChimeraGraph g = build_chimera(2);
  Embedding e = two_qubit_chains(2, 2, g);
  e.chains[1] = e.chains[0];
  EXPECT_THROW(chimera_sample(RbmParams(2, 2), g, e, anneal_config(2, {}, 0)), EmbeddingError);
}

}  // namespace
}  // namespace rbmkit
