#pragma once

#include "graspqd/archive.hpp"
#include "graspqd/evaluator.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace graspqd {

enum class Algorithm { kRandom, kMeRand, kMeScs, kCmaMae };
enum class FitnessMode { kShake, kMdr };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);
std::string to_string(FitnessMode m);
FitnessMode fitness_mode_from_string(const std::string& name);

struct QDConfig {
  int population = 500;
  int offspring = 500;
  int novelty_neighbors = 15;
  std::int64_t budget = 100000;
  double gene_mutation_probability = 0.3;
  double mutation_sigma = 0.1;
  int emitter_batch = 36;
  int emitters = 15;
  double threshold_min = -1.0;
  double archive_learning_rate = 0.01;
  double cma_sigma0 = 0.3;
  double cell_size = 0.01;
  std::uint64_t seed = 0;
  int workers = 1;

  void validate() const;
};

/// Everything an evaluation needs; references must outlive the run.
struct SearchProblem {
  const TriangleMesh& mesh;
  const SurfaceSampleSet& samples;
  const GripperSpec& spec;
  PhysicsParams physics;
  Prior prior = Prior::kContact;
  FitnessMode fitness = FitnessMode::kShake;
  MdrParams mdr;
};

struct EvalRecord {
  std::int64_t eval_index = 0;
  Genome genome;
  bool valid = false;
  bool rejected = false;
  double fitness = 0.0;
  Vec3 behavior = Vec3::Zero();
};

struct RunResult {
  Algorithm algorithm = Algorithm::kRandom;
  BehaviorGrid grid;
  OutcomeArchive outcome;
  std::vector<EvalRecord> log;
  int restarts = 0;
};

struct Evaluated {
  Projection projection;
  EvaluationResult result;
};

/// Projects and evaluates one genome. In MDR mode the trial seed is derived
/// from (seed, eval_index).
Evaluated evaluate_genome(const SearchProblem& problem, const Evaluator& evaluator,
                          const Genome& genome, std::uint64_t seed, std::int64_t eval_index);

Genome random_genome(Prior prior, const GripperSpec& spec, std::mt19937_64& rng);
/// Adds N(0, sigma) to each gene with probability p, clamped to [-1, 1].
Genome mutate(const Genome& parent, double p, double sigma, std::mt19937_64& rng);

/// Mean distance to the k nearest other behaviors, per entry.
std::vector<double> novelty_scores(const std::vector<Vec3>& behaviors, int k);

RunResult run_random(const SearchProblem& problem, const QDConfig& config);
RunResult run_map_elites(Algorithm variant, const SearchProblem& problem, const QDConfig& config);
RunResult run_cma_mae(const SearchProblem& problem, const QDConfig& config);
RunResult run_search(Algorithm algorithm, const SearchProblem& problem, const QDConfig& config);

}  // namespace graspqd
