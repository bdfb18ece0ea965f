#include "ersearch/ltr.h"

#include <algorithm>
#include <fstream>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <thread>
#include <unordered_map>

#include "ersearch/error.h"
#include "json.hpp"

namespace ersearch {

namespace {

constexpr double kInvPhi = 0.6180339887498949;

// Moves coordinate i to v and rescales the others to keep the sum at one.
FeatureWeights WithCoordinate(const FeatureVector &w, std::size_t i, double v) {
  FeatureVector out{};
  const double rest = 1.0 - w[i];
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    if (j == i) {
      out[j] = v;
    } else if (rest > 1e-12) {
      out[j] = w[j] * (1.0 - v) / rest;
    } else {
      out[j] = (1.0 - v) / (kFeatureCount - 1);
    }
  }
  return FeatureWeights(out);
}

FeatureWeights RandomStart(std::uint64_t seed, int restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  FeatureVector v{};
  // Exponential draws normalize to a uniform point on the simplex.
  for (auto &x : v) x = -std::log1p(-unit(rng)) + 1e-12;
  return FeatureWeights(v);
}

struct RestartOutcome {
  FeatureWeights weights;
  double objective = 0;
  std::vector<TrainStep> steps;
};

RestartOutcome RunRestart(std::span<const TrainingQuery> queries, const TrainConfig &config,
                          int restart) {
  RestartOutcome out;
  out.weights = restart == 0 ? FeatureWeights::UnigramOnly() : RandomStart(config.seed, restart);
  auto eval = [&](const FeatureWeights &w) { return Objective(queries, w, config.metric); };
  out.objective = eval(out.weights);

  for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
    const double start = out.objective;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      const FeatureVector w = out.weights.values();
      FeatureWeights best_w = out.weights;
      double best = out.objective;
      auto probe = [&](double v) {
        FeatureWeights cand = WithCoordinate(w, i, v);
        const double obj = eval(cand);
        if (obj > best) {
          best = obj;
          best_w = cand;
        }
        return obj;
      };

      const int n = config.probes;
      int best_probe = 0;
      double best_probe_obj = -1;
      for (int p = 0; p < n; ++p) {
        const double obj = probe(static_cast<double>(p) / (n - 1));
        if (obj > best_probe_obj) {
          best_probe_obj = obj;
          best_probe = p;
        }
      }
      double lo = std::max(0, best_probe - 1) / static_cast<double>(n - 1);
      double hi = std::min(n - 1, best_probe + 1) / static_cast<double>(n - 1);
      double a = hi - kInvPhi * (hi - lo), b = lo + kInvPhi * (hi - lo);
      double fa = probe(a), fb = probe(b);
      for (int s = 0; s < config.refine_steps; ++s) {
        if (fa >= fb) {
          hi = b;
          b = a;
          fb = fa;
          a = hi - kInvPhi * (hi - lo);
          fa = probe(a);
        } else {
          lo = a;
          a = b;
          fa = fb;
          b = lo + kInvPhi * (hi - lo);
          fb = probe(b);
        }
      }

      if (best > out.objective) {
        out.weights = best_w;
        out.objective = best;
        out.steps.push_back({restart, sweep, i, best});
      }
    }
    if (out.objective - start < config.epsilon) break;
  }
  return out;
}

}  // namespace

std::string_view TrainMetricName(TrainMetric metric) {
  return metric == TrainMetric::kMAP ? "map" : "ndcg@20";
}

TrainMetric ParseTrainMetric(std::string_view name) {
  if (name == "map") return TrainMetric::kMAP;
  if (name == "ndcg@20" || name == "ndcg20" || name == "ndcg") return TrainMetric::kNDCG20;
  throw ValidationError("unknown metric '" + std::string(name) + "' (expected map or ndcg@20)");
}

void TrainConfig::Validate() const {
  if (restarts < 1) throw ValidationError("restarts must be >= 1");
  if (!(epsilon > 0)) throw ValidationError("epsilon must be > 0");
  if (max_sweeps < 1) throw ValidationError("max sweeps must be >= 1");
  if (probes < 2) throw ValidationError("probes must be >= 2");
  if (refine_steps < 0) throw ValidationError("refine steps must be >= 0");
  if (fold_count < 1) throw ValidationError("fold count must be >= 1");
}

std::size_t TrainingQuery::reachable() const {
  std::set<std::uint32_t> hit;
  for (auto g : group) {
    if (group_grade[g] > 0) hit.insert(g);
  }
  return hit.size();
}

TrainingQuery MakeTrainingQuery(std::string id, std::span<const CandidateTuple> candidates,
                                const Qrels &qrels) {
  TrainingQuery q;
  q.id = std::move(id);
  std::vector<std::string> keys;
  keys.reserve(candidates.size());
  std::unordered_map<std::string, std::uint32_t> groups;
  for (const auto &c : candidates) {
    q.features.push_back(c.features);
    keys.push_back(c.key());
    auto [it, fresh] = groups.emplace(c.canonical_key(), q.group_grade.size());
    if (fresh) q.group_grade.push_back(qrels.grade(q.id, it->first));
    q.group.push_back(it->second);
  }
  std::vector<std::uint32_t> order(keys.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return keys[a] < keys[b]; });
  q.key_rank.resize(keys.size());
  for (std::uint32_t r = 0; r < order.size(); ++r) q.key_rank[order[r]] = r;

  q.relevant = qrels.relevant_count(q.id);
  if (const auto *j = qrels.judgments(q.id)) {
    for (const auto &[_, g] : *j) {
      if (g > 0) q.ideal.push_back(g);
    }
  }
  return q;
}

TrainingQuery BuildTrainingQuery(const ERQuery &query, const ERIndex &index,
                                 const Qrels &qrels, const RetrievalParams &params) {
  const auto lists = GenerateCandidates(query, index, params);
  const auto tuples = JoinCandidates(query, index, lists, params, true);
  return MakeTrainingQuery(query.id(), tuples, qrels);
}

double QueryObjective(const TrainingQuery &query, const FeatureWeights &weights,
                      TrainMetric metric, std::size_t depth) {
  if (query.relevant == 0) return 0.0;
  const std::size_t groups = query.group_grade.size();
  constexpr std::uint32_t kNone = UINT32_MAX;
  std::vector<double> score(groups, 0.0);
  std::vector<std::uint32_t> tie(groups, kNone);
  for (std::size_t c = 0; c < query.features.size(); ++c) {
    const double s = weights.Score(query.features[c]);
    const auto g = query.group[c];
    if (tie[g] == kNone || s > score[g] || (s == score[g] && query.key_rank[c] < tie[g])) {
      score[g] = s;
      tie[g] = query.key_rank[c];
    }
  }
  std::vector<std::uint32_t> order(groups);
  std::iota(order.begin(), order.end(), 0u);
  const std::size_t keep = std::min(depth, groups);
  std::partial_sort(order.begin(), order.begin() + keep, order.end(), [&](auto a, auto b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return tie[a] < tie[b];
  });
  std::vector<int> grades(keep);
  for (std::size_t i = 0; i < keep; ++i) grades[i] = query.group_grade[order[i]];
  if (metric == TrainMetric::kMAP) return AveragePrecision(grades, query.relevant, depth);
  return Ndcg(grades, query.ideal, 20);
}

double Objective(std::span<const TrainingQuery> queries, const FeatureWeights &weights,
                 TrainMetric metric, std::size_t depth) {
  if (queries.empty()) return 0.0;
  double sum = 0.0;
  for (const auto &q : queries) sum += QueryObjective(q, weights, metric, depth);
  return sum / static_cast<double>(queries.size());
}

TrainResult CoordinateAscent(std::span<const TrainingQuery> queries, const TrainConfig &config) {
  config.Validate();
  const bool reachable = std::any_of(queries.begin(), queries.end(),
                                     [](const auto &q) { return q.reachable() > 0; });
  if (!reachable) {
    throw ValidationError(
        "no relevant tuple is reachable by candidate generation; increase k (first-pass cut)");
  }

  std::vector<RestartOutcome> outcomes(config.restarts);
  const unsigned threads =
      config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  if (threads <= 1) {
    for (int r = 0; r < config.restarts; ++r) outcomes[r] = RunRestart(queries, config, r);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < std::min<unsigned>(threads, config.restarts); ++t) {
      pool.emplace_back([&, t] {
        for (int r = t; r < config.restarts; r += threads) {
          outcomes[r] = RunRestart(queries, config, r);
        }
      });
    }
  }

  TrainResult result;
  for (int r = 0; r < config.restarts; ++r) {
    result.restart_objectives.push_back(outcomes[r].objective);
    result.steps.insert(result.steps.end(), outcomes[r].steps.begin(), outcomes[r].steps.end());
    if (r == 0 || outcomes[r].objective > result.objective) {
      result.objective = outcomes[r].objective;
      result.weights = outcomes[r].weights;
      result.best_restart = r;
    }
  }
  return result;
}

std::vector<std::string> FoldPlan::train_ids(std::size_t fold) const {
  std::vector<std::string> ids;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (f != fold) ids.insert(ids.end(), folds[f].begin(), folds[f].end());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

FoldPlan MakeFolds(std::vector<std::string> ids, std::size_t fold_count, std::uint64_t seed) {
  if (fold_count == 0) throw ValidationError("fold count must be >= 1");
  if (fold_count > ids.size()) {
    throw ValidationError("fold count " + std::to_string(fold_count) + " exceeds the " +
                          std::to_string(ids.size()) + " queries");
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw ValidationError("query ids repeat");
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = ids.size() - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(ids[i], ids[pick(rng)]);
  }
  FoldPlan plan;
  plan.folds.resize(fold_count);
  for (std::size_t i = 0; i < ids.size(); ++i) plan.folds[i % fold_count].push_back(ids[i]);
  for (auto &f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

std::vector<FoldResult> CrossValidate(std::span<const TrainingQuery> queries,
                                      const FoldPlan &plan, const TrainConfig &config) {
  std::vector<FoldResult> out;
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    // A single fold has nothing held out; it trains on everything.
    const auto train = plan.folds.size() == 1 ? plan.folds[0] : plan.train_ids(f);
    std::vector<TrainingQuery> subset;
    for (const auto &q : queries) {
      if (std::binary_search(train.begin(), train.end(), q.id)) subset.push_back(q);
    }
    out.push_back({CoordinateAscent(subset, config), plan.folds[f]});
  }
  return out;
}

namespace {

nlohmann::ordered_json LambdaJson(const FeatureWeights &w) {
  nlohmann::ordered_json j;
  for (std::size_t i = 0; i < kFeatureCount; ++i) j[std::string(FeatureName(i))] = w[i];
  return j;
}

FeatureWeights LambdaFromJson(const nlohmann::json &j) {
  FeatureVector v{};
  for (const auto &[name, value] : j.items()) v[ParseFeatureName(name)] = value.get<double>();
  return FeatureWeights(v);
}

}  // namespace

const FeatureWeights &WeightsFile::ForQuery(std::string_view query_id) const {
  for (const auto &f : folds) {
    if (std::find(f.test_ids.begin(), f.test_ids.end(), query_id) != f.test_ids.end()) {
      return f.weights;
    }
  }
  return weights;
}

void WriteWeightsFile(std::ostream &out, const WeightsFile &file) {
  nlohmann::ordered_json j;
  j["lambda"] = LambdaJson(file.weights);
  j["metric"] = TrainMetricName(file.metric);
  j["objective"] = file.objective;
  j["seed"] = file.seed;
  auto &folds = j["folds"] = nlohmann::ordered_json::array();
  for (const auto &f : file.folds) {
    nlohmann::ordered_json fj;
    fj["test"] = f.test_ids;
    fj["lambda"] = LambdaJson(f.weights);
    fj["objective"] = f.objective;
    folds.push_back(std::move(fj));
  }
  out << j.dump(2) << '\n';
}

WeightsFile ReadWeightsFile(std::istream &in, const std::string &source) {
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError(source, 0, "malformed weights JSON");
  try {
    WeightsFile file;
    file.weights = LambdaFromJson(j.at("lambda"));
    if (j.contains("metric")) file.metric = ParseTrainMetric(j["metric"].get<std::string>());
    file.objective = j.value("objective", 0.0);
    file.seed = j.value("seed", std::uint64_t{0});
    for (const auto &f : j.value("folds", nlohmann::json::array())) {
      file.folds.push_back({f.at("test").get<std::vector<std::string>>(),
                            LambdaFromJson(f.at("lambda")), f.value("objective", 0.0)});
    }
    return file;
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(source, 0, std::string("malformed weights file: ") + e.what());
  } catch (const ValidationError &e) {
    throw ParseError(source, 0, e.what());
  }
}

WeightsFile LoadWeightsFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open weights file " + path);
  return ReadWeightsFile(in, path);
}

}  // namespace ersearch
