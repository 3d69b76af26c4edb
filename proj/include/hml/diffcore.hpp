#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hml/common.hpp"
#include "hml/rng.hpp"

namespace hml::diff {

namespace detail {

struct Node {
  std::size_t rows = 0, cols = 0;
  std::vector<double> val;
  std::vector<double> grad;  // allocated lazily, same shape as val
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backfn;  // scatters node.grad into parents

  std::size_t size() const { return rows * cols; }
  void ensure_grad() {
    if (grad.size() != val.size()) grad.assign(val.size(), 0.0);
  }
};

}  // namespace detail

/// Handle to a value in a dynamically built computation graph. Every
/// forward op allocates a fresh node, records its parents, and checks the
/// result for NaN/Inf. Tensors are dense row-major matrices; row and
/// column vectors and scalars are 1 x c, r x 1 and 1 x 1 shapes.
class Tensor {
 public:
  Tensor() = default;

  static Tensor constant(std::size_t rows, std::size_t cols,
                         std::vector<double> values);
  static Tensor zeros(std::size_t rows, std::size_t cols);
  static Tensor scalar(double v);
  static Tensor parameter(std::size_t rows, std::size_t cols,
                          std::vector<double> values);

  bool defined() const { return node_ != nullptr; }
  std::size_t rows() const { return node_->rows; }
  std::size_t cols() const { return node_->cols; }
  std::size_t size() const { return node_->size(); }
  bool requires_grad() const { return node_->requires_grad; }

  const std::vector<double>& values() const { return node_->val; }
  const std::vector<double>& grad() const;
  double value_at(std::size_t i, std::size_t j) const {
    return node_->val[i * node_->cols + j];
  }
  /// Scalar extraction; the tensor must be 1 x 1.
  double item() const;

  /// In-place update for optimizer steps; breaks no graph edges because
  /// parameters are always graph leaves.
  std::vector<double>& mutable_values() { return node_->val; }
  std::vector<double>& mutable_grad();
  void zero_grad();

  std::shared_ptr<detail::Node> node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> n) : node_(std::move(n)) {}
  std::shared_ptr<detail::Node> node_;
  friend Tensor make_op(std::size_t, std::size_t,
                        std::vector<std::shared_ptr<detail::Node>>,
                        std::vector<double>,
                        std::function<void(detail::Node&)>);
};

/// Reverse pass from a scalar root: populates grad on every reachable
/// tensor with requires_grad set, accumulating over shared subgraphs.
void backward(const Tensor& root);

// ---- forward operators -------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor add_rowvec(const Tensor& a, const Tensor& v);  // v is 1 x cols
Tensor scale(const Tensor& a, double c);
Tensor add_scalar(const Tensor& a, double c);
/// Multiply by a 1 x 1 graph scalar (gradient flows into both factors).
Tensor scale_by(const Tensor& a, const Tensor& s);

Tensor matmul(const Tensor& a, const Tensor& b);
/// a * b^T without materializing the transpose.
Tensor matmul_nt(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);  // rejects non-positive entries
Tensor tanh(const Tensor& a);
Tensor pow_const(const Tensor& a, double p);  // requires entries >= 0
Tensor clamp(const Tensor& a, double lo, double hi);

Tensor softmax_rows(const Tensor& a);
Tensor logsumexp_rows(const Tensor& a);  // n x c -> n x 1

Tensor sum_all(const Tensor& a);
Tensor mean_all(const Tensor& a);
Tensor l2_norm(const Tensor& a);  // Frobenius norm, 1 x 1
Tensor row_l2_normalize(const Tensor& a, double eps = 1e-12);

Tensor concat_rows(std::span<const Tensor> parts);
Tensor concat_cols(std::span<const Tensor> parts);
Tensor slice_rows(const Tensor& a, std::size_t start, std::size_t count);
/// Row gather; duplicate indices accumulate gradient (embedding lookup).
Tensor select_rows(const Tensor& a, const std::vector<std::size_t>& indices);
/// Entry gather into a k x 1 column.
Tensor select_entries(
    const Tensor& a,
    const std::vector<std::pair<std::size_t, std::size_t>>& entries);

Tensor layer_norm_rows(const Tensor& a, const Tensor& gain, const Tensor& bias,
                       double eps = 1e-5);

// ---- parameters and optimization ----------------------------------------

/// Named learnable parameters. Names are unique and iteration order is
/// deterministic (sorted), which keeps checkpoints and updates stable.
class ModelState {
 public:
  Tensor& add_parameter(const std::string& name, std::size_t rows,
                        std::size_t cols, std::vector<double> values);
  Tensor& add_parameter_random(const std::string& name, std::size_t rows,
                               std::size_t cols, Rng& rng, double scale = 0.0);

  bool has(const std::string& name) const { return params_.count(name) > 0; }
  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  const std::map<std::string, Tensor>& params() const { return params_; }

  void zero_grads();
  std::size_t parameter_count() const;

  void save(const std::filesystem::path& path) const;
  static ModelState load(const std::filesystem::path& path);
  /// Extra serialized fields (e.g. config echoes) preserved on round-trip.
  std::map<std::string, std::string> metadata;

 private:
  std::map<std::string, Tensor> params_;
  std::map<std::string, std::vector<double>> velocity_;
  friend void sgd_step(ModelState&, double, double, double);
};

/// p <- p - lr * (grad + weight_decay * p); grads are cleared afterwards.
/// With momentum > 0 a velocity buffer per parameter is kept inside the
/// state.
void sgd_step(ModelState& state, double lr, double weight_decay = 0.0,
              double momentum = 0.0);

}  // namespace hml::diff
