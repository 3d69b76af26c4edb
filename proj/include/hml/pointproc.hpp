#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hml/common.hpp"
#include "hml/corpus.hpp"

namespace hml {

/// Intensity is clamped from below so its log stays defined: the
/// cross-event term can carry negative couplings that would otherwise
/// drive the raw intensity below zero.
inline constexpr double kIntensityFloor = 1e-8;

struct HawkesParams {
  double lambda0 = 0.1;  // baseline intensity, > 0
  double alpha = 0.0;    // same-event excitation magnitude, >= 0
  double beta = 1.0;     // decay rate, > 0
  double gamma = 0.0;    // cross-event coupling magnitude, >= 0

  void check() const;
};

/// One event's cascade as seen by the point process: arrival times within
/// the event plus (time, coupling) pairs for news of other events.
struct CascadeView {
  std::vector<double> same_event_times;                 // ascending
  std::vector<std::pair<double, double>> cross_event;   // (time, prop in [-1,1])
  double horizon = 0.0;                                 // observation end T

  void check() const;
};

/// lambda*(t) = max(lambda0 + kappa+(t) + kappa-(t), floor), where only
/// strictly earlier arrivals contribute.
double intensity(const HawkesParams& params, const CascadeView& view, double t);

/// Discretized log-likelihood: sum over views of
///   sum_i log lambda*(t_i) - integral_0^T lambda*(t) dt,
/// the integral taken as a trapezoid over `grid_points` uniform samples of
/// the floored intensity. Per-view terms are combined with a fixed
/// pairwise tree so the result is bit-stable for any worker count.
double log_likelihood(const HawkesParams& params,
                      std::span<const CascadeView> views, int grid_points,
                      int workers = 1);

struct FitConfig {
  int max_iters = 400;
  int grid_points = 4096;
  int workers = 1;
  double rel_step = 1e-6;        // central-difference step, relative
  double tol_objective = 1e-10;  // relative improvement stop
  bool fit_lambda0 = true;
  bool fit_alpha = true;
  bool fit_beta = true;
  bool fit_gamma = true;
};

struct FitResult {
  HawkesParams params;
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Maximum-likelihood estimation by projected gradient ascent with
/// backtracking line search; gradients are central finite differences of
/// the discretized objective. Monotone in the objective, deterministic,
/// and never leaves the feasible region (lambda0, beta > 0; alpha,
/// gamma >= 0).
FitResult fit(std::span<const CascadeView> views, const HawkesParams& init,
              const FitConfig& config = {});

/// Influence of a news item published at t_i on the focal item at time t:
/// alpha e^{-beta (t - t_i)} plus the view's cross-event term at t.
double influence(const HawkesParams& params, double t_i, double t,
                 const CascadeView& view);

/// Per-event influence matrix, entries in [0, 1] with zero diagonal.
/// Entry (i, j) is nonzero only when member i was published strictly
/// before member j.
struct EventAdjacency {
  std::string event_id;
  std::vector<std::string> member_ids;  // ascending (timestamp, id)
  std::size_t size = 0;
  std::vector<double> matrix;  // row-major size x size

  double at(std::size_t i, std::size_t j) const { return matrix[i * size + j]; }
  std::string to_json() const;
  static EventAdjacency parse_json(const std::string& text);
};

enum class AdjacencyNormalization {
  /// Min-max over the raw influence matrix (zeros included); an all-zero
  /// matrix stays all-zero and non-causal entries are forced back to 0.
  MinMax,
  /// Kernel-decay score 2^{-beta*dt/horizon_efolds}: calibrated so a gap
  /// of horizon_efolds/beta maps to 0.5. Ignores the cross-event term.
  Decay,
};

struct AdjacencyConfig {
  AdjacencyNormalization normalization = AdjacencyNormalization::MinMax;
  double decay_horizon_efolds = 3.0;
};

/// Pairwise coupling provider: prop of corpus item `source` (noised by its
/// age) against corpus item `target`. Indices are corpus item indices.
using PropFn =
    std::function<double(std::size_t source, std::size_t target)>;

EventAdjacency event_adjacency(const HawkesParams& params, const Event& event,
                               const Corpus& corpus, const PropFn& prop_fn,
                               const AdjacencyConfig& config = {});

}  // namespace hml
