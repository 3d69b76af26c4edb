#include "hml/pointproc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <thread>

#include <json.hpp>

namespace hml {

using nlohmann::json;

void HawkesParams::check() const {
  require_finite(lambda0, "lambda0");
  require_finite(alpha, "alpha");
  require_finite(beta, "beta");
  require_finite(gamma, "gamma");
  require(lambda0 > 0.0, "lambda0 must be > 0");
  require(beta > 0.0, "beta must be > 0");
  require(alpha >= 0.0, "alpha must be >= 0");
  require(gamma >= 0.0, "gamma must be >= 0");
}

void CascadeView::check() const {
  for (std::size_t i = 1; i < same_event_times.size(); ++i)
    require(same_event_times[i - 1] <= same_event_times[i],
            "cascade times must be ascending");
  for (const auto& [t, p] : cross_event) {
    require_finite(t, "cross-event time");
    require(p >= -1.0 && p <= 1.0, "prop value must be in [-1, 1]");
  }
}

double intensity(const HawkesParams& params, const CascadeView& view,
                 double t) {
  require_finite(t, "time");
  double sum = params.lambda0;
  for (double ti : view.same_event_times) {
    if (ti >= t) break;
    sum += params.alpha * std::exp(-params.beta * (t - ti));
  }
  for (const auto& [ti, p] : view.cross_event) {
    if (ti < t) sum += params.gamma * std::exp(-params.beta * (t - ti)) * p;
  }
  return std::max(sum, kIntensityFloor);
}

namespace {

struct Arrival {
  double t;
  double w;  // excitation weight: alpha, or gamma * prop
};

// Exponential-kernel sweep: lambda at many query points in one ascending
// pass, O(queries + arrivals) instead of O(queries * arrivals).
class DecayingSum {
 public:
  explicit DecayingSum(double beta) : beta_(beta) {}
  void advance(double t) {
    if (t > t_) {
      sum_ *= std::exp(-beta_ * (t - t_));
      t_ = t;
    }
  }
  void add(double w) { sum_ += w; }
  double value() const { return sum_; }

 private:
  double beta_;
  double t_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

double view_log_likelihood(const HawkesParams& params, const CascadeView& view,
                           int grid_points) {
  view.check();
  require(view.horizon > 0.0, "view horizon must be > 0");
  for (double t : view.same_event_times) {
    require(t <= view.horizon, "event time beyond horizon");
    require(t >= 0.0, "event time before observation start");
  }

  std::vector<Arrival> arrivals;
  arrivals.reserve(view.same_event_times.size() + view.cross_event.size());
  for (double t : view.same_event_times) arrivals.push_back({t, params.alpha});
  for (const auto& [t, p] : view.cross_event)
    arrivals.push_back({t, params.gamma * p});
  std::sort(arrivals.begin(), arrivals.end(),
            [](const Arrival& a, const Arrival& b) { return a.t < b.t; });

  // Queries: the integration grid plus the arrival times themselves.
  const int g = grid_points;
  const double h = view.horizon / (g - 1);
  std::vector<std::pair<double, int>> queries;  // (time, slot)
  queries.reserve(static_cast<std::size_t>(g) +
                  view.same_event_times.size());
  for (int j = 0; j < g; ++j) queries.emplace_back(j * h, j);
  for (std::size_t i = 0; i < view.same_event_times.size(); ++i)
    queries.emplace_back(view.same_event_times[i], g + static_cast<int>(i));
  std::sort(queries.begin(), queries.end());

  std::vector<double> grid_lambda(static_cast<std::size_t>(g));
  std::vector<double> event_lambda(view.same_event_times.size());
  DecayingSum excitation(params.beta);
  std::size_t ai = 0;
  for (const auto& [tq, slot] : queries) {
    while (ai < arrivals.size() && arrivals[ai].t < tq) {
      excitation.advance(arrivals[ai].t);
      excitation.add(arrivals[ai].w);
      ++ai;
    }
    excitation.advance(tq);
    double lam = std::max(params.lambda0 + excitation.value(), kIntensityFloor);
    if (slot < g)
      grid_lambda[static_cast<std::size_t>(slot)] = lam;
    else
      event_lambda[static_cast<std::size_t>(slot - g)] = lam;
  }

  double integral = 0.5 * (grid_lambda.front() + grid_lambda.back());
  for (int j = 1; j + 1 < g; ++j) integral += grid_lambda[j];
  integral *= h;

  double ll = -integral;
  for (double lam : event_lambda) ll += std::log(lam);
  return ll;
}

double tree_sum(std::span<const double> v) {
  if (v.empty()) return 0.0;
  if (v.size() == 1) return v[0];
  std::size_t mid = v.size() / 2;
  return tree_sum(v.subspan(0, mid)) + tree_sum(v.subspan(mid));
}

}  // namespace

double log_likelihood(const HawkesParams& params,
                      std::span<const CascadeView> views, int grid_points,
                      int workers) {
  params.check();
  require(grid_points >= 2, "grid_points must be >= 2");
  require(!views.empty(), "empty views");

  std::vector<double> per_view(views.size());
  auto run = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      per_view[i] = view_log_likelihood(params, views[i], grid_points);
  };
  int n_workers = std::max(1, std::min<int>(workers, views.size()));
  if (n_workers == 1) {
    run(0, views.size());
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (views.size() + n_workers - 1) / n_workers;
    for (int w = 0; w < n_workers; ++w) {
      std::size_t lo = w * chunk;
      std::size_t hi = std::min(views.size(), lo + chunk);
      if (lo < hi) pool.emplace_back(run, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  return tree_sum(per_view);
}

namespace {

constexpr int kNumParams = 4;

std::array<double, kNumParams> to_vec(const HawkesParams& p) {
  return {p.lambda0, p.alpha, p.beta, p.gamma};
}

HawkesParams from_vec(const std::array<double, kNumParams>& v) {
  return {v[0], v[1], v[2], v[3]};
}

std::array<double, kNumParams> project(std::array<double, kNumParams> v) {
  v[0] = std::max(v[0], 1e-8);  // lambda0 > 0
  v[1] = std::max(v[1], 0.0);   // alpha >= 0
  v[2] = std::max(v[2], 1e-8);  // beta > 0
  v[3] = std::max(v[3], 0.0);   // gamma >= 0
  return v;
}

}  // namespace

FitResult fit(std::span<const CascadeView> views, const HawkesParams& init,
              const FitConfig& config) {
  require(!views.empty(), "empty views");
  std::size_t arrivals = 0;
  for (const auto& v : views) arrivals += v.same_event_times.size();
  require(arrivals >= 1, "fit requires at least one arrival");
  init.check();

  const std::array<bool, kNumParams> free_param = {
      config.fit_lambda0, config.fit_alpha, config.fit_beta, config.fit_gamma};

  auto objective = [&](const std::array<double, kNumParams>& v) {
    return log_likelihood(from_vec(v), views, config.grid_points,
                          config.workers);
  };

  auto theta = project(to_vec(init));
  double f = objective(theta);
  double step = 1.0;
  bool converged = false;
  int iter = 0;

  for (; iter < config.max_iters; ++iter) {
    // Central-difference gradient on the free coordinates; the lower
    // point is clamped to the feasible region near the boundary.
    static constexpr std::array<double, kNumParams> kLowerBound = {1e-8, 0.0,
                                                                   1e-8, 0.0};
    std::array<double, kNumParams> grad{};
    double gnorm = 0.0;
    for (int k = 0; k < kNumParams; ++k) {
      if (!free_param[k]) continue;
      double h = config.rel_step * std::max(std::abs(theta[k]), 1.0);
      auto lo = theta, hi = theta;
      hi[k] = theta[k] + h;
      lo[k] = std::max(theta[k] - h, kLowerBound[k]);
      double denom = hi[k] - lo[k];
      grad[k] = (objective(hi) - objective(lo)) / denom;
      gnorm = std::max(gnorm, std::abs(grad[k]));
    }
    if (gnorm < 1e-9 * (1.0 + std::abs(f))) {
      converged = true;
      break;
    }

    // Backtracking line search along the projected gradient direction.
    double s = std::min(step * 2.0, 1e3);
    bool accepted = false;
    while (s >= 1e-14) {
      auto cand = theta;
      for (int k = 0; k < kNumParams; ++k)
        if (free_param[k]) cand[k] += s * grad[k];
      cand = project(cand);
      double directional = 0.0;
      for (int k = 0; k < kNumParams; ++k)
        directional += grad[k] * (cand[k] - theta[k]);
      if (directional > 0.0) {
        double fc = objective(cand);
        if (fc >= f + 1e-4 * directional) {
          double gain = fc - f;
          theta = cand;
          f = fc;
          step = s;
          accepted = true;
          if (gain <= config.tol_objective * (1.0 + std::abs(f)))
            converged = true;
          break;
        }
      }
      s *= 0.5;
    }
    if (!accepted) {
      // No ascent step representable: stationary within numerics.
      converged = true;
      break;
    }
    if (converged) {
      ++iter;
      break;
    }
  }

  FitResult result;
  result.params = from_vec(theta);
  result.log_likelihood = f;
  result.converged = converged;
  result.iterations = iter;
  return result;
}

double influence(const HawkesParams& params, double t_i, double t,
                 const CascadeView& view) {
  require_finite(t, "time");
  require(t > t_i, "influence requires t > t_i");
  double value = params.alpha * std::exp(-params.beta * (t - t_i));
  for (const auto& [tk, p] : view.cross_event) {
    if (tk < t) value += params.gamma * std::exp(-params.beta * (t - tk)) * p;
  }
  return value;
}

std::string EventAdjacency::to_json() const {
  json j;
  j["event_id"] = event_id;
  j["member_ids"] = member_ids;
  j["matrix"] = matrix;
  return j.dump();
}

EventAdjacency EventAdjacency::parse_json(const std::string& text) {
  json j = json::parse(text);
  EventAdjacency a;
  a.event_id = j.at("event_id").get<std::string>();
  a.member_ids = j.at("member_ids").get<std::vector<std::string>>();
  a.matrix = j.at("matrix").get<std::vector<double>>();
  a.size = a.member_ids.size();
  require(a.matrix.size() == a.size * a.size,
          "event adjacency: matrix size mismatch");
  return a;
}

EventAdjacency event_adjacency(const HawkesParams& params, const Event& event,
                               const Corpus& corpus, const PropFn& prop_fn,
                               const AdjacencyConfig& config) {
  params.check();
  const std::size_t r = event.member_ids.size();
  require(r >= 1, "event has no members");

  EventAdjacency adj;
  adj.event_id = event.id;
  adj.member_ids = event.member_ids;
  adj.size = r;
  adj.matrix.assign(r * r, 0.0);

  std::vector<double> times(r);
  std::vector<std::size_t> member_index(r);
  for (std::size_t i = 0; i < r; ++i) {
    member_index[i] = corpus.index_of(event.member_ids[i]);
    times[i] = corpus.items()[member_index[i]].timestamp;
  }

  if (config.normalization == AdjacencyNormalization::Decay) {
    double scale = std::log(2.0) / config.decay_horizon_efolds;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j)
        if (times[i] < times[j])
          adj.matrix[i * r + j] =
              std::exp(-scale * params.beta * (times[j] - times[i]));
    return adj;
  }

  // Cross-event contribution per target member (shared by all sources).
  std::vector<double> cross_term(r, 0.0);
  if (params.gamma > 0.0) {
    for (std::size_t k = 0; k < corpus.size(); ++k) {
      const NewsItem& other = corpus.items()[k];
      if (other.event_id == event.id) continue;
      for (std::size_t j = 0; j < r; ++j) {
        if (other.timestamp < times[j]) {
          double p = prop_fn(k, member_index[j]);
          cross_term[j] += params.gamma *
                           std::exp(-params.beta * (times[j] - other.timestamp)) *
                           p;
        }
      }
    }
  }

  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      if (times[i] < times[j])
        adj.matrix[i * r + j] =
            params.alpha * std::exp(-params.beta * (times[j] - times[i])) +
            cross_term[j];

  double lo = 0.0, hi = 0.0;
  for (double v : adj.matrix) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi > lo) {
    for (double& v : adj.matrix) v = (v - lo) / (hi - lo);
  }
  // Causality and the diagonal survive normalization untouched.
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      if (!(times[i] < times[j])) adj.matrix[i * r + j] = 0.0;
  return adj;
}

}  // namespace hml
