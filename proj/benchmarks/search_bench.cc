#include <benchmark/benchmark.h>

#include "builders.h"
#include "ersearch/baselines.h"
#include "ersearch/er_index.h"
#include "ersearch/late_fusion.h"
#include "ersearch/retrieval.h"

namespace ersearch {
namespace {

const ERIndex &Index() {
  static const ERIndex index = [] {
    testing::RandomCorpusOptions opts;
    opts.docs = 5000;
    opts.entities = 300;
    opts.vocabulary = 400;
    opts.max_sentences = 6;
    opts.max_words = 20;
    return ERIndex::Build(testing::RandomCorpus(2, opts));
  }();
  return index;
}

ERQuery BenchQuery(std::size_t size) {
  std::vector<SubQuery> sq;
  for (std::size_t i = 0; i < size; ++i) {
    const std::string a = "w" + std::to_string(3 * i), b = "w" + std::to_string(3 * i + 1);
    sq.push_back(i % 2 ? SubQuery::Relationship(a) : SubQuery::Entity(a + " " + b));
  }
  return ERQuery("bench", sq);
}

void BM_Search(benchmark::State &state) {
  const auto model = static_cast<RankingModel>(state.range(0));
  const ERQuery q = BenchQuery(static_cast<std::size_t>(state.range(1)));
  const ERIndex &index = Index();
  for (auto _ : state) benchmark::DoNotOptimize(Search(q, index, model, {}));
  state.SetLabel(std::string(ModelName(model)));
}
BENCHMARK(BM_Search)
    ->Args({static_cast<int>(RankingModel::kEarlyFusion), 3})
    ->Args({static_cast<int>(RankingModel::kERDM), 3})
    ->Args({static_cast<int>(RankingModel::kERDM), 5})
    ->Args({static_cast<int>(RankingModel::kLateFusion), 3})
    ->Args({static_cast<int>(RankingModel::kBaseEE), 3})
    ->Args({static_cast<int>(RankingModel::kBaseR), 3})
    ->Unit(benchmark::kMillisecond);

void BM_FirstPass(benchmark::State &state) {
  const ERIndex &index = Index();
  const std::vector<std::string> terms = {"w1", "w2", "w3"};
  for (auto _ : state) {
    benchmark::DoNotOptimize(RankDocuments(index.relationships(), terms, {}, 20000));
  }
}
BENCHMARK(BM_FirstPass)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace ersearch
