#include "hml/forgetting.hpp"

#include <cmath>

#include <json.hpp>

namespace hml {

using nlohmann::json;

NoiseSchedule::NoiseSchedule(std::vector<double> eta) : eta_(std::move(eta)) {
  delta_bar_.resize(eta_.size() + 1);
  delta_bar_[0] = 1.0;
  for (std::size_t t = 0; t < eta_.size(); ++t) {
    require(std::isfinite(eta_[t]) && eta_[t] > 0.0 && eta_[t] <= 1.0,
            "noise schedule: eta_" + std::to_string(t + 1) +
                " must be in (0, 1]");
    delta_bar_[t + 1] = delta_bar_[t] * (1.0 - eta_[t]);
  }
}

NoiseSchedule NoiseSchedule::from_eta(std::vector<double> eta) {
  return NoiseSchedule(std::move(eta));
}

NoiseSchedule NoiseSchedule::linear(double eta_start, double eta_end,
                                    int steps) {
  require(steps >= 0, "noise schedule: steps must be >= 0");
  std::vector<double> eta(static_cast<std::size_t>(steps));
  for (int t = 0; t < steps; ++t) {
    double frac = steps > 1 ? static_cast<double>(t) / (steps - 1) : 0.0;
    eta[t] = eta_start + (eta_end - eta_start) * frac;
  }
  return NoiseSchedule(std::move(eta));
}

double NoiseSchedule::delta_bar(int t) const {
  require(t >= 0 && t <= steps(), "noise schedule: step out of range");
  return delta_bar_[static_cast<std::size_t>(t)];
}

std::string NoiseSchedule::to_json() const {
  json j;
  j["eta"] = eta_;
  return j.dump();
}

NoiseSchedule NoiseSchedule::parse_json(const std::string& text) {
  json j = json::parse(text);
  require(j.contains("eta") && j["eta"].is_array(),
          "noise schedule: expected {\"eta\": [...]}");
  return NoiseSchedule(j["eta"].get<std::vector<double>>());
}

std::vector<double> noise_iterative(std::span<const double> x0, int t,
                                    const NoiseSchedule& schedule, Rng& rng) {
  require(t >= 0 && t <= schedule.steps(),
          "noise step count exceeds schedule length");
  std::vector<double> x(x0.begin(), x0.end());
  for (int s = 1; s <= t; ++s) {
    double d = schedule.delta(s);
    double keep = std::sqrt(d);
    double mix = std::sqrt(1.0 - d);
    for (double& v : x) v = keep * v + mix * rng.normal();
  }
  return x;
}

std::vector<double> noise_closed_form(std::span<const double> x0, int t,
                                      const NoiseSchedule& schedule,
                                      Rng& rng) {
  require(t >= 0 && t <= schedule.steps(),
          "noise step count exceeds schedule length");
  double db = schedule.delta_bar(t);
  double keep = std::sqrt(db);
  double mix = std::sqrt(1.0 - db);
  std::vector<double> x(x0.size());
  for (std::size_t k = 0; k < x.size(); ++k)
    x[k] = keep * x0[k] + mix * rng.normal();
  return x;
}

double minkowski_distance(std::span<const double> a, std::span<const double> b,
                          double order) {
  require(a.size() == b.size(), "similarity: dimension mismatch");
  require(order >= 1.0, "similarity: Minkowski order must be >= 1");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    sum += std::pow(std::abs(a[k] - b[k]), order);
  return std::pow(sum, 1.0 / order);
}

double similarity(std::span<const double> a, std::span<const double> b,
                  const SimilarityConfig& config) {
  double d = minkowski_distance(a, b, config.order);
  switch (config.map) {
    case SimilarityMap::InverseDistance:
      return 1.0 / (1.0 + d);
    default:
      return std::exp(-d);
  }
}

double prop(std::span<const double> a_noised, std::span<const double> b,
            const SimilarityConfig& config) {
  return std::tanh(2.0 * similarity(a_noised, b, config) - 1.0);
}

}  // namespace hml
