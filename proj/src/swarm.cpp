#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>

#include "cdmamud/detectors.hpp"

namespace cdmamud {

InitialVelocity initial_velocity_from_name(std::string_view name) {
  if (name == "zero") return InitialVelocity::zero;
  if (name == "random") return InitialVelocity::random;
  if (name == "seed") return InitialVelocity::seed;
  throw std::invalid_argument("unknown initial velocity mode '" + std::string(name) + "'");
}

std::string_view initial_velocity_name(InitialVelocity v) {
  switch (v) {
    case InitialVelocity::zero: return "zero";
    case InitialVelocity::random: return "random";
    case InitialVelocity::seed: return "seed";
  }
  return "?";
}

void SwarmConfig::validate() const {
  if (population < 0) throw std::invalid_argument("swarm population must be >= 1 (or 0 for automatic)");
  if (iterations < 0) throw std::invalid_argument("swarm iterations must be >= 0");
  if (!(vmax > 0.0)) throw std::invalid_argument("swarm vmax must be > 0");
  if (!std::isfinite(inertia) || !std::isfinite(cognitive) || !std::isfinite(social))
    throw std::invalid_argument("swarm coefficients must be finite");
}

int population_size(int bits_per_symbol, int users, int symbols) {
  const long dim = static_cast<long>(bits_per_symbol) * users * symbols;
  if (dim < 1) throw std::invalid_argument("population_size: mKI must be >= 1");
  const double raw = 0.3454 * (std::sqrt(std::numbers::pi * static_cast<double>(dim - 1)) + 2.0);
  return 10 * static_cast<int>(std::ceil(raw));
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

void velocity_update(Particle& p, std::span<const std::uint8_t> global_best, const SwarmConfig& cfg,
                     std::span<const double> u1, std::span<const double> u2) {
  const std::size_t n = p.position.size();
  if (p.velocity.size() != n || p.best_position.size() != n || global_best.size() != n || u1.size() != n ||
      u2.size() != n)
    throw std::invalid_argument("velocity_update: length mismatch");
  for (std::size_t j = 0; j < n; ++j) {
    const double b = p.position[j];
    double v = cfg.inertia * p.velocity[j] + cfg.cognitive * u1[j] * (p.best_position[j] - b) +
               cfg.social * u2[j] * (global_best[j] - b);
    p.velocity[j] = std::clamp(v, -cfg.vmax, cfg.vmax);
  }
}

void velocity_update(Particle& p, std::span<const std::uint8_t> global_best, const SwarmConfig& cfg, Rng& rng) {
  const std::size_t n = p.position.size();
  std::vector<double> u1(n), u2(n);
  for (std::size_t j = 0; j < n; ++j) {
    u1[j] = uniform01(rng);
    u2[j] = uniform01(rng);
  }
  velocity_update(p, global_best, cfg, u1, u2);
}

void position_update(Particle& p, Rng& rng) {
  for (std::size_t j = 0; j < p.position.size(); ++j)
    p.position[j] = uniform01(rng) < sigmoid(p.velocity[j]) ? 1 : 0;
}

namespace {

class FitnessCache {
 public:
  FitnessCache(const LikelihoodModel& model, bool enabled) : model_(model), enabled_(enabled) {}

  double operator()(const Bits& bits) {
    if (!enabled_) {
      ++evaluations_;
      return model_.fitness(bits);
    }
    std::string key(reinterpret_cast<const char*>(bits.data()), bits.size());
    if (auto it = table_.find(key); it != table_.end()) return it->second;
    ++evaluations_;
    const double f = model_.fitness(bits);
    table_.emplace(std::move(key), f);
    return f;
  }

  long evaluations() const { return evaluations_; }

 private:
  const LikelihoodModel& model_;
  bool enabled_;
  long evaluations_ = 0;
  std::unordered_map<std::string, double> table_;
};

TraceRecord make_record(int iteration, double fitness, const Bits& gbest, const TraceOptions& opts) {
  TraceRecord rec{iteration, fitness, -1, 0};
  if (opts.truth.empty()) return rec;
  rec.bit_errors = 0;
  for (std::size_t j = 0; j < gbest.size(); ++j) {
    if (!opts.mask.empty() && !opts.mask[j]) continue;
    ++rec.counted_bits;
    if (gbest[j] != opts.truth[j]) ++rec.bit_errors;
  }
  return rec;
}

}  // namespace

SwarmResult pso_detect(const LikelihoodModel& model, std::span<const std::uint8_t> seed, const SwarmConfig& cfg,
                       Rng& rng, const TraceOptions& trace) {
  cfg.validate();
  const int n = model.bit_count();
  if (static_cast<int>(seed.size()) != n)
    throw std::invalid_argument("pso_detect: seed has " + std::to_string(seed.size()) + " bits, expected " +
                                std::to_string(n));
  if (!trace.truth.empty() && static_cast<int>(trace.truth.size()) != n)
    throw std::invalid_argument("pso_detect: truth length mismatch");
  if (!trace.mask.empty() && static_cast<int>(trace.mask.size()) != n)
    throw std::invalid_argument("pso_detect: mask length mismatch");

  const int P = cfg.population > 0
                    ? cfg.population
                    : population_size(model.constellation().bits_per_symbol(), model.users(), model.symbols());
  FitnessCache fitness(model, cfg.cache_fitness);

  std::vector<Particle> swarm(P);
  swarm[0].position.assign(seed.begin(), seed.end());
  std::bernoulli_distribution coin(0.5);
  for (int p = 1; p < P; ++p) {
    swarm[p].position.resize(n);
    for (auto& b : swarm[p].position) b = coin(rng) ? 1 : 0;
  }
  for (auto& particle : swarm) {
    particle.velocity.assign(n, 0.0);
    if (cfg.initial_velocity == InitialVelocity::random) {
      std::uniform_real_distribution<double> dist(-cfg.vmax, cfg.vmax);
      for (auto& v : particle.velocity) v = dist(rng);
    } else if (cfg.initial_velocity == InitialVelocity::seed) {
      for (int j = 0; j < n; ++j) particle.velocity[j] = seed[j] ? cfg.vmax : -cfg.vmax;
    }
    particle.best_position = particle.position;
    particle.best_fitness = fitness(particle.position);
  }

  Bits gbest(seed.begin(), seed.end());
  double gbest_fitness = swarm[0].best_fitness;

  SwarmResult result;
  result.population = P;
  result.trace.reserve(cfg.iterations + 1);
  result.trace.push_back(make_record(0, gbest_fitness, gbest, trace));

  std::vector<double> current(P);
  for (int t = 1; t <= cfg.iterations; ++t) {
    for (int p = 0; p < P; ++p) current[p] = fitness(swarm[p].position);

    for (auto& particle : swarm) velocity_update(particle, gbest, cfg, rng);

    int leader = 0;
    for (int p = 0; p < P; ++p) {
      if (current[p] > swarm[p].best_fitness) {
        swarm[p].best_fitness = current[p];
        swarm[p].best_position = swarm[p].position;
      }
      if (current[p] > current[leader]) leader = p;
    }
    if (current[leader] > gbest_fitness) {
      gbest_fitness = current[leader];
      gbest = swarm[leader].position;
    }

    for (auto& particle : swarm) position_update(particle, rng);

    result.trace.push_back(make_record(t, gbest_fitness, gbest, trace));
  }

  result.detection.symbols =
      bits_to_grid_symbols(gbest, model.constellation(), model.users(), model.symbols());
  result.detection.bits = std::move(gbest);
  result.detection.fitness = gbest_fitness;
  result.evaluations = fitness.evaluations();
  return result;
}

}  // namespace cdmamud
