#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hml/common.hpp"
#include "hml/rng.hpp"

namespace hml {

/// Forward Gaussian noising schedule. eta_t in (0, 1] is the configured
/// per-step variation; the chain itself uses delta_t = 1 - eta_t as the
/// mean-preservation coefficient, so delta_bar_t = prod_{s<=t} delta_s is
/// the fraction of the original signal surviving after t steps.
class NoiseSchedule {
 public:
  static NoiseSchedule from_eta(std::vector<double> eta);

  /// Linear ramp of eta from `eta_start` to `eta_end` over `steps` steps.
  static NoiseSchedule linear(double eta_start, double eta_end, int steps);

  int steps() const { return static_cast<int>(eta_.size()); }
  const std::vector<double>& eta() const { return eta_; }
  double delta(int t) const { return 1.0 - eta_.at(t - 1); }  // t in [1, T]
  double delta_bar(int t) const;                              // t in [0, T]

  std::string to_json() const;
  static NoiseSchedule parse_json(const std::string& text);

 private:
  explicit NoiseSchedule(std::vector<double> eta);
  std::vector<double> eta_;
  std::vector<double> delta_bar_;  // delta_bar_[t] for t in [0, T]
};

/// Runs the Markov chain step by step:
///   x^s = sqrt(delta_s) x^{s-1} + sqrt(1 - delta_s) eps_s.
std::vector<double> noise_iterative(std::span<const double> x0, int t,
                                    const NoiseSchedule& schedule, Rng& rng);

/// Single-draw equivalent of t chain steps:
///   x^t = sqrt(delta_bar_t) x0 + sqrt(1 - delta_bar_t) eps.
std::vector<double> noise_closed_form(std::span<const double> x0, int t,
                                      const NoiseSchedule& schedule, Rng& rng);

enum class SimilarityMap { ExpNegDistance, InverseDistance };

struct SimilarityConfig {
  double order = 2.0;  // Minkowski order p >= 1
  SimilarityMap map = SimilarityMap::ExpNegDistance;
};

double minkowski_distance(std::span<const double> a, std::span<const double> b,
                          double order);

/// Distance mapped into (0, 1]: exp(-d) by default, 1/(1+d) as the
/// alternative. Equals 1 iff a == b.
double similarity(std::span<const double> a, std::span<const double> b,
                  const SimilarityConfig& config = {});

/// Correlation coupling in [-tanh(1), tanh(1)]: tanh(2*sim - 1).
double prop(std::span<const double> a_noised, std::span<const double> b,
            const SimilarityConfig& config = {});

}  // namespace hml
