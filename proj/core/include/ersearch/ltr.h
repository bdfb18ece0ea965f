#ifndef ERSEARCH_LTR_H_
#define ERSEARCH_LTR_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ersearch/eval.h"
#include "ersearch/retrieval.h"

namespace ersearch {

enum class TrainMetric { kMAP, kNDCG20 };

std::string_view TrainMetricName(TrainMetric metric);  // "map", "ndcg@20"
// Throws ValidationError.
TrainMetric ParseTrainMetric(std::string_view name);

struct TrainConfig {
  TrainMetric metric = TrainMetric::kMAP;
  int restarts = 3;
  int max_sweeps = 25;
  double epsilon = 1e-4;
  std::size_t fold_count = 5;
  std::uint64_t seed = 42;
  int probes = 20;        // uniform probes per coordinate
  int refine_steps = 12;  // golden-section steps around the best probe
  unsigned threads = 1;   // restarts run in parallel; 0 = hardware concurrency

  void Validate() const;
};

// One query's candidate tuples reduced to what the objective needs.
struct TrainingQuery {
  std::string id;
  std::vector<FeatureVector> features;   // one per candidate
  std::vector<std::uint32_t> key_rank;   // tuple key order, breaks score ties
  std::vector<std::uint32_t> group;      // canonical tuple id per candidate
  std::vector<int> group_grade;          // judged grade per canonical tuple
  std::size_t relevant = 0;              // relevant tuples in the judgments
  std::vector<int> ideal;                // grades of the relevant tuples

  // Relevant canonical tuples among the candidates.
  std::size_t reachable() const;
};

TrainingQuery MakeTrainingQuery(std::string id, std::span<const CandidateTuple> candidates,
                                const Qrels &qrels);
// Joins the query's candidates with ERDM features.
TrainingQuery BuildTrainingQuery(const ERQuery &query, const ERIndex &index,
                                 const Qrels &qrels, const RetrievalParams &params);

// Metric of the ERDM ranking under weights, cut at depth. Equal to running
// the search and evaluating its run.
double QueryObjective(const TrainingQuery &query, const FeatureWeights &weights,
                      TrainMetric metric, std::size_t depth = 100);
// Mean over queries; 0 for an empty set.
double Objective(std::span<const TrainingQuery> queries, const FeatureWeights &weights,
                 TrainMetric metric, std::size_t depth = 100);

struct TrainStep {
  int restart;
  int sweep;
  std::size_t feature;
  double objective;  // after the step
};

struct TrainResult {
  FeatureWeights weights;
  double objective = 0.0;
  int best_restart = 0;
  std::vector<double> restart_objectives;
  std::vector<TrainStep> steps;  // accepted steps, restart by restart
};

// Coordinate ascent on the simplex. Restart 0 starts from the Early Fusion
// point; the others from seeded random simplex points. Throws
// ValidationError when no training query has a reachable relevant tuple.
TrainResult CoordinateAscent(std::span<const TrainingQuery> queries, const TrainConfig &config);

struct FoldPlan {
  std::vector<std::vector<std::string>> folds;  // test ids per fold, sorted

  std::vector<std::string> train_ids(std::size_t fold) const;
};

// Sorts the ids, shuffles them with the seed and deals them round-robin.
// Throws ValidationError when fold_count is 0 or exceeds the query count,
// or ids repeat.
FoldPlan MakeFolds(std::vector<std::string> ids, std::size_t fold_count, std::uint64_t seed);

struct FoldResult {
  TrainResult train;
  std::vector<std::string> test_ids;
};

// Trains one weight vector per fold on the remaining folds.
std::vector<FoldResult> CrossValidate(std::span<const TrainingQuery> queries,
                                      const FoldPlan &plan, const TrainConfig &config);

// Weights file written by training and read by ERDM search:
// {"lambda": {name: value}, "metric": str, "objective": num, "seed": int,
//  "folds": [{"test": [ids], "lambda": {...}, "objective": num}]}.
struct FoldWeights {
  std::vector<std::string> test_ids;
  FeatureWeights weights;
  double objective = 0.0;
};

struct WeightsFile {
  FeatureWeights weights;
  TrainMetric metric = TrainMetric::kMAP;
  double objective = 0.0;
  std::uint64_t seed = 0;
  std::vector<FoldWeights> folds;

  // The weights of the fold holding query_id as a test query, or the
  // overall weights.
  const FeatureWeights &ForQuery(std::string_view query_id) const;
};

void WriteWeightsFile(std::ostream &out, const WeightsFile &file);
WeightsFile ReadWeightsFile(std::istream &in, const std::string &source = "<stream>");
WeightsFile LoadWeightsFile(const std::string &path);

}  // namespace ersearch

#endif  // ERSEARCH_LTR_H_
