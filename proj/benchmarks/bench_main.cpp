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
#include <rbmkit/exact.hpp>
#include <rbmkit/random.hpp>
#include <rbmkit/rbm.hpp>
#include <rbmkit/samplers.hpp>
#include <rbmkit/training.hpp>

#include <benchmark/benchmark.h>

using namespace rbmkit;

static RbmParams model(int nv, int nh) {
  Rng rng(11);
  return RbmParams::random_normal(nv, nh, 0.1, rng);
}

static std::vector<BitVector> rows(int n, int nv) {
  Rng rng(12);
  std::vector<BitVector> out(n, BitVector(nv));
  for (auto& r : out) {
    for (auto& x : r) x = rng.uniform() < 0.5;
  }
  return out;
}

static void BM_GibbsSweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const RbmParams p = model(n, n);
  Rng rng(1);
  ChainState s{BitVector(n, 0), BitVector(n, 0)};
  for (auto _ : state) {
    gibbs_sweep_inplace(p, s, rng);
    benchmark::DoNotOptimize(s.v.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_GibbsSweep)->Arg(12)->Arg(65)->Arg(256);

static void BM_ExactEnumeration(benchmark::State& state) {
  const int nh = static_cast<int>(state.range(0));
  const RbmParams p = model(26 - nh, nh);
  for (auto _ : state) {
    ExactModel m(p);
    benchmark::DoNotOptimize(m.log_partition());
  }
}
BENCHMARK(BM_ExactEnumeration)->DenseRange(6, 13, 7)->Unit(benchmark::kMillisecond);

static void BM_SimulatedAnneal(benchmark::State& state) {
  const RbmParams p = model(65, 12);
  SamplerConfig cfg;
  cfg.kind = SamplerKind::simulated_annealing;
  cfg.n_samples = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulated_anneal(p, cfg).size());
    ++cfg.rng_seed;
  }
}
BENCHMARK(BM_SimulatedAnneal)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_ChimeraAnneal(benchmark::State& state) {
  const RbmParams p = model(8, 8);
  SamplerConfig cfg;
  cfg.kind = SamplerKind::chimera;
  cfg.n_samples = 100;
  const ChimeraSampler sampler(8, 8, cfg);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(p, seed++).size());
}
BENCHMARK(BM_ChimeraAnneal)->Unit(benchmark::kMillisecond);

static void BM_DiscriminativeGradient(benchmark::State& state) {
  const RbmParams p = model(65, static_cast<int>(state.range(0)));
  const auto batch = rows(128, 65);
  for (auto _ : state) {
    const auto g = discriminative_gradient(p, batch);
    benchmark::DoNotOptimize(g.dW.data());
  }
}
BENCHMARK(BM_DiscriminativeGradient)->Arg(12)->Arg(64);

BENCHMARK_MAIN();
