#include "graspqd/qd.hpp"

#include "graspqd/cma_es.hpp"
#include "graspqd/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace graspqd {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kRandom: return "random";
    case Algorithm::kMeRand: return "ME_rand";
    case Algorithm::kMeScs: return "ME_scs";
    case Algorithm::kCmaMae: return "CMA_MAE";
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "random" || name == "rand") return Algorithm::kRandom;
  if (name == "ME_rand") return Algorithm::kMeRand;
  if (name == "ME_scs") return Algorithm::kMeScs;
  if (name == "CMA_MAE") return Algorithm::kCmaMae;
  throw std::invalid_argument("unknown algorithm: " + name);
}

std::string to_string(FitnessMode m) { return m == FitnessMode::kShake ? "shake" : "mdr"; }

FitnessMode fitness_mode_from_string(const std::string& name) {
  if (name == "shake") return FitnessMode::kShake;
  if (name == "mdr") return FitnessMode::kMdr;
  throw std::invalid_argument("unknown fitness mode: " + name);
}

void QDConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (population < 1) fail("qd.population must be >= 1");
  if (offspring < 1) fail("qd.offspring must be >= 1");
  if (novelty_neighbors < 1) fail("qd.novelty_neighbors must be >= 1");
  if (budget < 0) fail("qd.budget must be >= 0");
  if (!(gene_mutation_probability >= 0.0 && gene_mutation_probability <= 1.0)) {
    fail("qd.gene_mutation_probability must be in [0, 1]");
  }
  if (!(mutation_sigma >= 0.0)) fail("qd.mutation_sigma must be >= 0");
  if (emitter_batch < 4) fail("qd.emitter_batch must be >= 4");
  if (emitters < 1) fail("qd.emitters must be >= 1");
  if (!(archive_learning_rate >= 0.0 && archive_learning_rate <= 1.0)) {
    fail("qd.archive_learning_rate must be in [0, 1]");
  }
  if (!(cma_sigma0 > 0.0)) fail("qd.cma_sigma0 must be > 0");
  if (!(cell_size > 0.0)) fail("qd.cell_size must be > 0");
  if (workers < 1) fail("qd.workers must be >= 1");
}

Evaluated evaluate_genome(const SearchProblem& problem, const Evaluator& evaluator,
                          const Genome& genome, std::uint64_t seed, std::int64_t eval_index) {
  Evaluated out{project(genome, problem.mesh, problem.samples, problem.spec), {}};
  if (!out.projection.pose) {
    out.result.rejected = true;
    return out;
  }
  if (problem.fitness == FitnessMode::kMdr) {
    out.result = evaluator.evaluate_mdr(*out.projection.pose, problem.mdr,
                                        derive_seed(seed, static_cast<std::uint64_t>(eval_index)));
  } else {
    out.result = evaluator.evaluate(*out.projection.pose);
  }
  out.result.nu = out.projection.nu;
  return out;
}

Genome random_genome(Prior prior, const GripperSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Genome g;
  g.prior = prior;
  g.values.resize(genome_length(prior, spec));
  for (auto& v : g.values) v = unit(rng);
  return g;
}

Genome mutate(const Genome& parent, double p, double sigma, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, sigma > 0.0 ? sigma : 1.0);
  Genome child = parent;
  for (auto& v : child.values) {
    if (unit(rng) < p && sigma > 0.0) v = std::clamp(v + normal(rng), -1.0, 1.0);
  }
  return child;
}

std::vector<double> novelty_scores(const std::vector<Vec3>& behaviors, int k) {
  const std::size_t n = behaviors.size();
  std::vector<double> scores(n, 0.0);
  if (n < 2) return scores;
  const std::size_t kk = std::min<std::size_t>(k, n - 1);
  std::vector<double> d;
  for (std::size_t i = 0; i < n; ++i) {
    d.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) d.push_back((behaviors[i] - behaviors[j]).norm());
    }
    std::partial_sort(d.begin(), d.begin() + kk, d.end());
    scores[i] = std::accumulate(d.begin(), d.begin() + kk, 0.0) / kk;
  }
  return scores;
}

namespace {

class Runner {
 public:
  Runner(const SearchProblem& problem, const QDConfig& config, Algorithm algorithm)
      : problem_(problem),
        config_(config),
        evaluator_(problem.mesh, problem.spec, problem.physics),
        result_{algorithm, BehaviorGrid::for_object(problem.mesh, problem.spec, config.cell_size),
                {}, {}, 0},
        rng_(config.seed) {
    config.validate();
    problem.spec.validate();
    result_.outcome.prior = problem.prior;
  }

  std::int64_t remaining() const { return config_.budget - next_index_; }

  /// Evaluates a batch concurrently and logs it in batch order.
  std::vector<Evaluated> evaluate(const std::vector<Genome>& genomes) {
    std::vector<Evaluated> out(genomes.size());
    const std::int64_t first = next_index_;
    parallel_for(genomes.size(), config_.workers, [&](std::size_t i) {
      out[i] = evaluate_genome(problem_, evaluator_, genomes[i], config_.seed,
                               first + static_cast<std::int64_t>(i));
    });
    for (std::size_t i = 0; i < genomes.size(); ++i) record(genomes[i], out[i], first + i);
    next_index_ += static_cast<std::int64_t>(genomes.size());
    result_.outcome.total_evaluations = next_index_;
    return out;
  }

  std::vector<Genome> random_batch(std::int64_t n) {
    std::vector<Genome> g;
    for (std::int64_t i = 0; i < n; ++i) g.push_back(random_genome(problem_.prior, problem_.spec, rng_));
    return g;
  }

  std::vector<InsertOutcome> insert_all(const std::vector<Genome>& genomes,
                                        const std::vector<Evaluated>& evals, std::int64_t first) {
    std::vector<InsertOutcome> out(genomes.size(), InsertOutcome::kRejected);
    for (std::size_t i = 0; i < genomes.size(); ++i) {
      const auto& r = evals[i].result;
      if (r.valid) {
        out[i] = result_.grid.insert(
            {genomes[i], r.fitness, r.behavior, first + static_cast<std::int64_t>(i)});
      }
    }
    return out;
  }

  std::int64_t next_index() const { return next_index_; }
  RunResult& result() { return result_; }
  std::mt19937_64& rng() { return rng_; }
  const SearchProblem& problem() const { return problem_; }
  const QDConfig& config() const { return config_; }

 private:
  void record(const Genome& g, const Evaluated& e, std::int64_t idx) {
    const auto& r = e.result;
    result_.log.push_back({idx, g, r.valid, r.rejected, r.fitness, r.behavior});
    if (r.valid && r.fitness > 0.0) {
      result_.outcome.records.push_back({idx, *e.projection.pose, r.fitness, r.behavior, g, r.nu});
    }
  }

  const SearchProblem& problem_;
  const QDConfig& config_;
  Evaluator evaluator_;
  RunResult result_;
  std::mt19937_64 rng_;
  std::int64_t next_index_ = 0;
};

}  // namespace

RunResult run_random(const SearchProblem& problem, const QDConfig& config) {
  Runner runner(problem, config, Algorithm::kRandom);
  const std::int64_t chunk = std::max(1, config.offspring);
  while (runner.remaining() > 0) {
    const std::int64_t first = runner.next_index();
    auto genomes = runner.random_batch(std::min(chunk, runner.remaining()));
    auto evals = runner.evaluate(genomes);
    runner.insert_all(genomes, evals, first);
  }
  return std::move(runner.result());
}

RunResult run_map_elites(Algorithm variant, const SearchProblem& problem, const QDConfig& config) {
  if (variant != Algorithm::kMeRand && variant != Algorithm::kMeScs) {
    throw std::invalid_argument("run_map_elites expects ME_rand or ME_scs");
  }
  Runner runner(problem, config, variant);
  auto& rng = runner.rng();
  {
    const std::int64_t first = runner.next_index();
    auto genomes = runner.random_batch(std::min<std::int64_t>(config.population, runner.remaining()));
    auto evals = runner.evaluate(genomes);
    runner.insert_all(genomes, evals, first);
  }
  while (runner.remaining() > 0) {
    const auto& elites = runner.result().grid.elites();
    std::vector<const Elite*> pool;
    for (const auto& [cell, e] : elites) {
      if (variant == Algorithm::kMeRand || e.fitness > 0.0) pool.push_back(&e);
    }
    std::vector<double> novelty;
    std::vector<const Elite*> all;
    if (pool.empty() && !elites.empty()) {
      // Bootstrap before the first success: binary tournaments on novelty.
      std::vector<Vec3> behaviors;
      for (const auto& [cell, e] : elites) {
        all.push_back(&e);
        behaviors.push_back(e.behavior);
      }
      novelty = novelty_scores(behaviors, config.novelty_neighbors);
    }

    const std::int64_t n = std::min<std::int64_t>(config.offspring, runner.remaining());
    std::vector<Genome> children;
    children.reserve(n);
    for (std::int64_t i = 0; i < n; ++i) {
      if (!pool.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        children.push_back(mutate(pool[pick(rng)]->genome, config.gene_mutation_probability,
                                  config.mutation_sigma, rng));
      } else if (!all.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
        const std::size_t a = pick(rng);
        const std::size_t b = pick(rng);
        const std::size_t w = novelty[b] > novelty[a] ? b : a;
        children.push_back(mutate(all[w]->genome, config.gene_mutation_probability,
                                  config.mutation_sigma, rng));
      } else {
        children.push_back(random_genome(problem.prior, problem.spec, rng));
      }
    }
    const std::int64_t first = runner.next_index();
    auto evals = runner.evaluate(children);
    runner.insert_all(children, evals, first);
  }
  return std::move(runner.result());
}

RunResult run_cma_mae(const SearchProblem& problem, const QDConfig& config) {
  Runner runner(problem, config, Algorithm::kCmaMae);
  auto& rng = runner.rng();
  auto& grid = runner.result().grid;
  ThresholdMap thresholds(config.threshold_min, config.archive_learning_rate);
  const int dim = genome_length(problem.prior, problem.spec);

  auto restart_point = [&]() -> Eigen::VectorXd {
    Genome g;
    if (grid.size() > 0) {
      std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
      auto it = grid.elites().begin();
      std::advance(it, pick(rng));
      g = it->second.genome;
    } else {
      g = random_genome(problem.prior, problem.spec, rng);
    }
    return Eigen::Map<const Eigen::VectorXd>(g.values.data(), dim);
  };

  std::vector<CmaEs> emitters;
  for (int e = 0; e < config.emitters; ++e) {
    emitters.emplace_back(restart_point(), config.cma_sigma0, config.emitter_batch);
  }

  while (runner.remaining() > 0) {
    std::vector<Genome> batch;
    std::vector<std::size_t> owner;
    for (int e = 0; e < config.emitters && runner.remaining() > static_cast<std::int64_t>(batch.size()); ++e) {
      for (auto& x : emitters[e].ask(rng)) {
        if (static_cast<std::int64_t>(batch.size()) >= runner.remaining()) break;
        Genome g;
        g.prior = problem.prior;
        g.values.resize(dim);
        for (int i = 0; i < dim; ++i) g.values[i] = std::clamp(x[i], -1.0, 1.0);
        batch.push_back(std::move(g));
        owner.push_back(e);
      }
    }
    const std::int64_t first = runner.next_index();
    const auto evals = runner.evaluate(batch);

    std::size_t i = 0;
    for (int e = 0; e < config.emitters && i < batch.size(); ++e) {
      std::vector<std::pair<double, std::size_t>> ranked;
      bool improved = false;
      while (i < batch.size() && owner[i] == static_cast<std::size_t>(e)) {
        const auto& r = evals[i].result;
        double delta = -std::numeric_limits<double>::infinity();
        if (r.valid) {
          if (const auto cell = grid.cell_of(r.behavior)) {
            delta = thresholds.offer(*cell, r.fitness);
            improved = improved || delta > 0.0;
            grid.insert({batch[i], r.fitness, r.behavior, first + static_cast<std::int64_t>(i)});
          }
        }
        ranked.emplace_back(delta, i);
        ++i;
      }
      CmaEs& cma = emitters[e];
      if (static_cast<int>(ranked.size()) < cma.lambda()) break;  // budget exhausted mid-batch
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      std::vector<Eigen::VectorXd> points;
      for (const auto& [delta, idx] : ranked) {
        points.push_back(Eigen::Map<const Eigen::VectorXd>(batch[idx].values.data(), dim));
      }
      cma.tell(points);
      if (!improved || cma.converged()) {
        cma.reset(restart_point(), config.cma_sigma0);
        ++runner.result().restarts;
      }
    }
  }
  return std::move(runner.result());
}

RunResult run_search(Algorithm algorithm, const SearchProblem& problem, const QDConfig& config) {
  switch (algorithm) {
    case Algorithm::kRandom: return run_random(problem, config);
    case Algorithm::kMeRand:
    case Algorithm::kMeScs: return run_map_elites(algorithm, problem, config);
    case Algorithm::kCmaMae: return run_cma_mae(problem, config);
  }
  throw std::invalid_argument("unknown algorithm");
}

}  // namespace graspqd
