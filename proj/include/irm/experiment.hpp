#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "irm/data_io.hpp"
#include "irm/engine.hpp"

namespace irm {

struct ExperimentConfig {
  std::vector<Strategy> algorithms{Strategy::sorting_simplex(), Strategy::sorting_random(), Strategy::uh_simplex(),
                                   Strategy::uh_random()};
  std::vector<std::size_t> s_values{4};
  std::vector<double> epsilons{0.0};
  std::size_t trials = 1;
  std::uint64_t base_seed = 1;
  std::vector<std::uint64_t> seeds;  // overrides trials/base_seed when nonempty
  /// Hidden user weights on normalized coordinates; a fresh Dirichlet draw per seed when absent.
  std::optional<std::vector<double>> user_weights;
  /// Hidden user weights on the original attribute values (file datasets).
  std::optional<std::vector<double>> user_original_weights;
  std::size_t max_rounds = 1000;
  bool keep_documents = false;  // fill TrialRecord::document

  /// The seed list actually used. Throws InvalidArgument for an invalid grid.
  std::vector<std::uint64_t> resolved_seeds() const;
  void validate() const;
};

struct TrialRecord {
  std::string algorithm;
  std::size_t s = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::size_t rounds = 0;
  std::size_t total_displayed = 0;
  double final_regret = 0.0;
  PointId recommendation = 0;
  std::string status;
  std::vector<std::size_t> candidate_sizes;  // after each round
  std::vector<double> wall_time_ms;          // per round
  std::string error;                         // empty on success
  nlohmann::json document;                   // session document when requested
};

/// One trial: a fresh simulated user answers truthfully until the session ends.
TrialRecord run_trial(std::shared_ptr<const Dataset> dataset, Strategy strategy, std::size_t s, double epsilon,
                      std::uint64_t seed, const ExperimentConfig& config);

/// Every (algorithm, s, epsilon, seed) combination, ordered by that key.
/// Failures are recorded in TrialRecord::error and do not stop the batch.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& config, std::shared_ptr<const Dataset> dataset);

void write_csv(const std::vector<TrialRecord>& records, std::ostream& out);
nlohmann::json to_json(const TrialRecord& record);
nlohmann::json to_json(const std::vector<TrialRecord>& records);

}  // namespace irm
