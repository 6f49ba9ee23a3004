#include <map>
#include <random>
#include <set>

#include <boost/math/distributions/binomial.hpp>

#include "doctest.h"
#include "graspqd/cma_es.hpp"
#include "graspqd/qd.hpp"
#include "test_support.hpp"

using namespace graspqd;

namespace {

struct Fixture {
  TriangleMesh mesh;
  SurfaceSampleSet samples;
  GripperSpec spec;

  Fixture(const std::string& mesh_name, const std::string& gripper)
      : mesh(load_mesh_source("builtin:" + mesh_name)),
        samples(sample_surface(mesh, 2048, 1)),
        spec(gripper_preset(gripper)) {}

  SearchProblem problem(Prior prior, FitnessMode fitness = FitnessMode::kShake) const {
    SearchProblem p{mesh, samples, spec};
    p.prior = prior;
    p.fitness = fitness;
    return p;
  }
};

QDConfig small_config(std::int64_t budget, std::uint64_t seed = 1) {
  QDConfig c;
  c.population = 100;
  c.offspring = 100;
  c.budget = budget;
  c.emitters = 3;
  c.emitter_batch = 12;
  c.seed = seed;
  return c;
}

// Cell index with boundary values going to the lower cell, written without
// ceil so it does not mirror the production arithmetic.
std::optional<std::int64_t> oracle_cell(const BehaviorGrid& grid, const Vec3& b) {
  const Aabb& box = grid.bounds();
  std::int64_t idx[3];
  for (int i = 0; i < 3; ++i) {
    if (b[i] < box.lo[i] || b[i] > box.hi[i]) return std::nullopt;
    const double u = (b[i] - box.lo[i]) / grid.cell_size();
    std::int64_t k = static_cast<std::int64_t>(std::floor(u));
    if (k > 0 && static_cast<double>(k) == u) --k;
    idx[i] = std::min<std::int64_t>(k, grid.dims()[i] - 1);
  }
  return (idx[2] * grid.dims()[1] + idx[1]) * grid.dims()[0] + idx[0];
}

void check_log_consistency(const RunResult& r, std::int64_t budget) {
  REQUIRE(static_cast<std::int64_t>(r.log.size()) == budget);
  CHECK(r.outcome.total_evaluations == budget);
  for (std::size_t i = 0; i < r.log.size(); ++i) CHECK(r.log[i].eval_index == static_cast<std::int64_t>(i));

  // The outcome archive is exactly the successful log entries, in order.
  std::vector<std::int64_t> successes;
  for (const auto& e : r.log) {
    if (e.valid && e.fitness > 0.0) successes.push_back(e.eval_index);
    if (!e.valid) CHECK(e.fitness == 0.0);
  }
  REQUIRE(r.outcome.records.size() == successes.size());
  for (std::size_t i = 0; i < successes.size(); ++i) {
    const OutcomeRecord& rec = r.outcome.records[i];
    CHECK(rec.eval_index == successes[i]);
    CHECK(rec.fitness == r.log[rec.eval_index].fitness);
    CHECK(rec.behavior == r.log[rec.eval_index].behavior);
    CHECK(rec.genome.values == r.log[rec.eval_index].genome.values);
  }

  // Replaying the log into a first-strictly-better map reproduces the grid.
  std::map<std::int64_t, const EvalRecord*> best;
  for (const auto& e : r.log) {
    if (!e.valid) continue;
    const auto cell = oracle_cell(r.grid, e.behavior);
    if (!cell) continue;
    auto [it, fresh] = best.try_emplace(*cell, &e);
    if (!fresh && e.fitness > it->second->fitness) it->second = &e;
  }
  REQUIRE(best.size() == r.grid.size());
  std::set<std::int64_t> outcome_ids;
  for (const auto& rec : r.outcome.records) outcome_ids.insert(rec.eval_index);
  for (const auto& [cell, elite] : r.grid.elites()) {
    REQUIRE(best.count(cell) == 1);
    CHECK(best[cell]->eval_index == elite.eval_index);
    CHECK(best[cell]->fitness == elite.fitness);
    CHECK(r.grid.cell_bounds(cell).contains(elite.behavior, 1e-12));
    // Every successful elite is also in the grow-only archive.
    if (elite.fitness > 0.0) CHECK(outcome_ids.count(elite.eval_index) == 1);
  }
}

}  // namespace

TEST_CASE("grid keeps the strictly better elite") {
  BehaviorGrid grid(Aabb{Vec3::Zero(), Vec3::Ones()}, 0.25);
  CHECK(grid.dims() == Eigen::Matrix<std::int64_t, 3, 1>(4, 4, 4));
  Elite e;
  e.behavior = Vec3(0.1, 0.1, 0.1);
  e.fitness = 1.0;
  e.eval_index = 0;
  CHECK(grid.insert(e) == InsertOutcome::kInserted);
  e.eval_index = 1;
  CHECK(grid.insert(e) == InsertOutcome::kRejected);  // equal fitness keeps the incumbent
  e.fitness = 0.5;
  CHECK(grid.insert(e) == InsertOutcome::kRejected);
  e.fitness = 2.0;
  e.behavior = Vec3(0.2, 0.05, 0.2);
  CHECK(grid.insert(e) == InsertOutcome::kReplaced);
  REQUIRE(grid.size() == 1);
  CHECK(grid.elites().begin()->second.eval_index == 1);

  e.behavior = Vec3(1.5, 0.5, 0.5);
  CHECK(grid.insert(e) == InsertOutcome::kRejected);
  CHECK_FALSE(grid.cell_of(Vec3(-1e-9, 0.5, 0.5)));
  CHECK_FALSE(grid.cell_of(Vec3(0.5, std::nan(""), 0.5)));
}

TEST_CASE("grid boundaries go to the lower cell") {
  BehaviorGrid grid(Aabb{Vec3::Zero(), Vec3::Ones()}, 0.25);
  CHECK(*grid.cell_of(Vec3(0.25, 0.0, 0.0)) == 0);
  CHECK(*grid.cell_of(Vec3(std::nextafter(0.25, 1.0), 0.0, 0.0)) == 1);
  CHECK(*grid.cell_of(Vec3(0.0, 0.0, 0.0)) == 0);
  CHECK(*grid.cell_of(Vec3(1.0, 1.0, 1.0)) == 63);
  CHECK(*grid.cell_of(Vec3(0.5, 0.5, 0.5)) == (1 * 4 + 1) * 4 + 1);

  std::mt19937_64 rng(1);
  for (int i = 0; i < 10000; ++i) {
    const Vec3 b = test::random_in_box(rng, Vec3::Constant(-0.1), Vec3::Constant(1.1));
    CHECK(grid.cell_of(b) == oracle_cell(grid, b));
    if (const auto c = grid.cell_of(b)) CHECK(grid.cell_bounds(*c).contains(b, 1e-15));
  }
}

TEST_CASE("object grid spans the approach range around the object") {
  const Fixture f("box", "panda");
  const BehaviorGrid grid = BehaviorGrid::for_object(f.mesh, f.spec);
  const Aabb expect = f.mesh.bounding_box().inflated(f.spec.max_approach_distance());
  CHECK((grid.bounds().lo - expect.lo).norm() < 1e-15);
  CHECK((grid.bounds().hi - expect.hi).norm() < 1e-15);
  for (int i = 0; i < 3; ++i) CHECK(grid.dims()[i] * 0.01 >= expect.extent()[i] - 1e-12);
}

TEST_CASE("threshold map anneals toward accepted fitness") {
  ThresholdMap greedy(-1.0, 1.0);
  CHECK(greedy.threshold(5) == -1.0);
  CHECK(greedy.offer(5, 1.0) == 2.0);
  CHECK(greedy.threshold(5) == 1.0);
  CHECK(greedy.offer(5, 1.0) == 0.0);  // ties do not move the threshold
  CHECK(greedy.offer(5, 0.0) == -1.0);
  CHECK(greedy.threshold(5) == 1.0);

  ThresholdMap frozen(-1.0, 0.0);
  frozen.offer(2, 5.0);
  CHECK(frozen.threshold(2) == -1.0);

  ThresholdMap slow(0.0, 0.1);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> f(0.0, 2.0);
  double prev = slow.threshold(0);
  double best = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = f(rng);
    const double t_before = slow.threshold(0);
    const double delta = slow.offer(0, x);
    CHECK(delta == doctest::Approx(x - t_before));
    best = std::max(best, x);
    CHECK(slow.threshold(0) >= prev);
    CHECK(slow.threshold(0) <= best);
    prev = slow.threshold(0);
  }
}

TEST_CASE("mutation") {
  std::mt19937_64 rng(3);
  Genome g{{-1.0, -0.5, 0.0, 0.5, 1.0}, Prior::kContact};
  CHECK(mutate(g, 0.0, 0.1, rng).values == g.values);
  CHECK(mutate(g, 1.0, 0.0, rng).values == g.values);
  for (int i = 0; i < 500; ++i) {
    for (double v : mutate(g, 1.0, 10.0, rng).values) {
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
    }
  }
  // Each gene changes independently with probability p.
  Genome mid{std::vector<double>(10, 0.0), Prior::kContact};
  int changed = 0;
  const int trials = 2000;
  for (int i = 0; i < trials; ++i) {
    for (double v : mutate(mid, 0.3, 0.1, rng).values) changed += v != 0.0;
  }
  const boost::math::binomial_distribution<double> dist(10.0 * trials, 0.3);
  const double cdf = boost::math::cdf(dist, static_cast<double>(changed));
  CHECK(cdf > 0.0005);
  CHECK(cdf < 0.9995);
}

TEST_CASE("novelty matches a brute-force mean of nearest distances") {
  std::mt19937_64 rng(4);
  std::vector<Vec3> pts;
  for (int i = 0; i < 60; ++i) pts.push_back(test::random_in_box(rng, Vec3::Zero(), Vec3::Ones()));
  for (int k : {1, 5, 15, 100}) {
    const auto scores = novelty_scores(pts, k);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::vector<double> d;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (j != i) d.push_back((pts[i] - pts[j]).norm());
      }
      std::sort(d.begin(), d.end());
      const std::size_t kk = std::min<std::size_t>(k, d.size());
      double sum = 0.0;
      for (std::size_t j = 0; j < kk; ++j) sum += d[j];
      CHECK(scores[i] == doctest::Approx(sum / kk));
    }
  }
  CHECK(novelty_scores({Vec3::Zero()}, 3) == std::vector<double>{0.0});
}

TEST_CASE("cma-es minimizes a shifted quadratic") {
  std::mt19937_64 rng(5);
  const Eigen::VectorXd target = Eigen::VectorXd::LinSpaced(5, -0.5, 0.5);
  CmaEs cma(Eigen::VectorXd::Zero(5), 0.3, 12);
  for (int gen = 0; gen < 200; ++gen) {
    auto xs = cma.ask(rng);
    std::sort(xs.begin(), xs.end(), [&](const auto& a, const auto& b) {
      return (a - target).squaredNorm() < (b - target).squaredNorm();
    });
    cma.tell(xs);
  }
  CHECK((cma.mean() - target).norm() < 1e-4);
}

TEST_CASE("every algorithm spends exactly the budget and keeps consistent archives") {
  const Fixture f("mug", "panda");
  for (Algorithm a : {Algorithm::kRandom, Algorithm::kMeRand, Algorithm::kMeScs, Algorithm::kCmaMae}) {
    for (Prior p : {Prior::kContact, Prior::kAntipodal}) {
      CAPTURE(to_string(a));
      const std::int64_t budget = 1237;
      const RunResult r = run_search(a, f.problem(p), small_config(budget));
      CHECK(r.algorithm == a);
      CHECK(r.outcome.prior == p);
      check_log_consistency(r, budget);
    }
  }
  const RunResult none = run_random(f.problem(Prior::kContact), small_config(0));
  CHECK(none.log.empty());
  CHECK(none.outcome.records.empty());
  CHECK(none.grid.size() == 0);
}

TEST_CASE("antipodal search on the sphere finds successes") {
  const Fixture f("sphere", "panda");
  const RunResult r = run_random(f.problem(Prior::kAntipodal), small_config(500));
  int rejected = 0;
  for (const auto& e : r.log) rejected += e.rejected;
  MESSAGE("successes ", r.outcome.records.size(), " rejected ", rejected);
  CHECK(r.outcome.records.size() > 0);
  CHECK(rejected == 0);
}

TEST_CASE("map-elites offspring descend from the selection pool") {
  // With no mutation a child is a copy of its parent, so parents are visible.
  const Fixture f("sphere", "panda");
  for (Algorithm a : {Algorithm::kMeRand, Algorithm::kMeScs}) {
    QDConfig c = small_config(600);
    c.gene_mutation_probability = 0.0;
    const RunResult r = run_map_elites(a, f.problem(Prior::kAntipodal), c);
    std::map<std::vector<double>, double> seen;  // genome -> best fitness so far
    for (std::size_t i = 0; i < r.log.size(); ++i) {
      const auto& e = r.log[i];
      if (i >= static_cast<std::size_t>(c.population)) {
        const auto it = seen.find(e.genome.values);
        REQUIRE(it != seen.end());
        if (a == Algorithm::kMeScs) CHECK(it->second > 0.0);
      }
      // Batch boundaries: only earlier generations can be parents.
      if ((i + 1 - c.population) % c.offspring == 0 || i + 1 == static_cast<std::size_t>(c.population)) {
        for (std::size_t j = (i + 1 == static_cast<std::size_t>(c.population)) ? 0 : i + 1 - c.offspring; j <= i; ++j) {
          if (!r.log[j].valid) continue;
          auto [s, fresh] = seen.try_emplace(r.log[j].genome.values, r.log[j].fitness);
          if (!fresh) s->second = std::max(s->second, r.log[j].fitness);
        }
      }
    }
  }
}

TEST_CASE("cma-mae restarts emitters that stop improving") {
  const Fixture f("sphere", "panda");
  GripperSpec tiny = f.spec;
  tiny.max_aperture = 0.002;
  SearchProblem p{f.mesh, f.samples, tiny};
  p.prior = Prior::kContact;
  QDConfig c = small_config(720);
  const RunResult r = run_cma_mae(p, c);
  CHECK(r.outcome.records.empty());
  CHECK(r.restarts > 0);
  check_log_consistency(r, 720);
}

TEST_CASE("runs are reproducible and independent of the worker count") {
  const Fixture f("box", "allegro4");
  for (Algorithm a : {Algorithm::kRandom, Algorithm::kMeScs, Algorithm::kCmaMae}) {
    for (FitnessMode mode : {FitnessMode::kShake, FitnessMode::kMdr}) {
      CAPTURE(to_string(a));
      SearchProblem p = f.problem(Prior::kApproach, mode);
      p.mdr.trials = 3;
      QDConfig one = small_config(mode == FitnessMode::kMdr ? 300 : 900, 42);
      QDConfig four = one;
      four.workers = 4;
      const RunResult x = run_search(a, p, one);
      const RunResult y = run_search(a, p, four);
      REQUIRE(x.log.size() == y.log.size());
      for (std::size_t i = 0; i < x.log.size(); ++i) {
        CHECK(x.log[i].genome.values == y.log[i].genome.values);
        CHECK(x.log[i].fitness == y.log[i].fitness);
        CHECK(x.log[i].behavior == y.log[i].behavior);
      }
      CHECK(x.grid.size() == y.grid.size());
      CHECK(x.restarts == y.restarts);

      QDConfig other = one;
      other.seed = 43;
      CHECK(run_search(a, p, other).log[0].genome.values != x.log[0].genome.values);
    }
  }
}

TEST_CASE("search configuration is validated") {
  QDConfig c;
  c.workers = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.gene_mutation_probability = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK(algorithm_from_string("ME_scs") == Algorithm::kMeScs);
  CHECK(to_string(Algorithm::kCmaMae) == "CMA_MAE");
  CHECK_THROWS_AS(algorithm_from_string("NSGA"), std::invalid_argument);
  CHECK_THROWS_AS(fitness_mode_from_string("bogus"), std::invalid_argument);
}
