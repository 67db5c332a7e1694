#include <benchmark/benchmark.h>

#include <vector>

#include "lart/imaging/components.hpp"
#include "lart/imaging/filters.hpp"
#include "lart/imaging/watershed.hpp"
#include "lart/metrics/metrics.hpp"
#include "lart/patchsim/ground_truth.hpp"
#include "lart/patchsim/train.hpp"
#include "lart/pipeline.hpp"
#include "lart/regionize/regionize.hpp"
#include "lart/regionmatch/match.hpp"
#include "lart/rng.hpp"
#include "lart/synthgen/synthgen.hpp"

using namespace lart;

namespace {

const synthgen::ScenePair& scene() {
  static const auto pair = synthgen::generate_pair(synthgen::random_scene(42));
  return pair;
}

void BM_Encode(benchmark::State& state) {
  patchsim::PatchSimModel<float> model(patchsim::ModelConfig{}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(patchsim::infer_similarity(model, scene().lineart_a, scene().lineart_b));
}
BENCHMARK(BM_Encode)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  const patchsim::ModelConfig cfg;
  const auto& p = scene();
  std::vector<patchsim::TrainingExample> data(static_cast<std::size_t>(state.range(0)),
                                              patchsim::make_example(p.lineart_a, p.lineart_b, p.regions_a,
                                                                     p.regions_b, p.corr, cfg));
  patchsim::PatchSimModel<float> model(cfg, 1);
  patchsim::TrainOptions opt;
  opt.steps = 1;
  opt.batch = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(patchsim::train(model, data, opt));
}
BENCHMARK(BM_TrainStep)->Arg(1)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_PredictFromSimilarity(benchmark::State& state) {
  patchsim::PatchSimModel<float> model(patchsim::ModelConfig{}, 1);
  const auto sim = patchsim::infer_similarity(model, scene().lineart_a, scene().lineart_b);
  const io::PipelineConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(predict_from_similarity(sim, scene().lineart_a, scene().lineart_b, cfg));
}
BENCHMARK(BM_PredictFromSimilarity)->Unit(benchmark::kMillisecond);

void BM_Watershed(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  Rng rng(3);
  imaging::RealImage mag(side, side);
  for (auto& v : mag.data()) v = rng.uniform(0.0, 100.0);
  imaging::LabelImage seeds(side, side);
  for (int k = 0; k < 32; ++k) seeds.at(rng.range(0, side - 1), rng.range(0, side - 1)) = static_cast<Label>(k + 1);
  const imaging::EdgeMap edges(mag);
  for (auto _ : state) benchmark::DoNotOptimize(imaging::watershed(edges, seeds));
}
BENCHMARK(BM_Watershed)->Arg(128)->Arg(512)->Unit(benchmark::kMicrosecond);

void BM_ConnectedComponents(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(imaging::connected_components(scene().regions_a.labels(), imaging::Connectivity::Eight));
  }
}
BENCHMARK(BM_ConnectedComponents)->Unit(benchmark::kMicrosecond);

void BM_RankedPr(benchmark::State& state) {
  Rng rng(4);
  const auto m = static_cast<std::size_t>(state.range(0));
  std::vector<double> scores(m);
  std::vector<std::uint8_t> labels(m);
  for (std::size_t i = 0; i < m; ++i) {
    scores[i] = rng.uniform();
    labels[i] = rng.bernoulli(0.2);
  }
  labels[0] = 1;
  for (auto _ : state) benchmark::DoNotOptimize(metrics::ranked_pr(scores, labels));
}
BENCHMARK(BM_RankedPr)->Arg(1 << 12)->Arg(1 << 16)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
