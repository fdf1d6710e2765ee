#pragma once

#include <cstdint>
#include <vector>

#include "rrlab/numcore/tensor.hpp"

namespace rrlab::numcore {

using NodeId = int32_t;

/// Define-by-run tape for reverse-mode differentiation. Values are computed
/// eagerly as ops are recorded; backward() sweeps the tape in reverse.
/// Node ids are only ordered within one Graph; a Graph is built, swept and
/// discarded per forward pass. Not safe for concurrent use.
class Graph {
public:
  // Leaves. Gradients are accumulated only for leaves created with
  // requires_grad = true (network parameters); plain inputs stay untouched.
  NodeId leaf(Tensor value, bool requires_grad = false);

  // y = x . W^T + b with W [m x n], b [m], x [n] -> [m] or x [B x n] -> [B x m].
  NodeId dense(NodeId w, NodeId b, NodeId x);
  NodeId relu(NodeId x);
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId scale(NodeId a, double c);
  // Row-wise softmax / log-softmax; rank-1 input is one row.
  NodeId softmax_rows(NodeId x);
  NodeId log_softmax_rows(NodeId x);
  NodeId reduce_sum(NodeId x);
  NodeId reduce_mean(NodeId x);
  // [B x N] -> [B], summing each row.
  NodeId row_sum(NodeId x);
  // x [B x A], index per row -> [B] with y[r] = x[r][idx[r]].
  NodeId gather_cols(NodeId x, std::vector<int32_t> idx);
  // x [B x (A*span)] -> [B x span] selecting block idx[r] per row.
  NodeId gather_span(NodeId x, std::vector<int32_t> idx, int64_t span);
  // Elementwise Huber: d^2/2 for |d| <= kappa else kappa*(|d| - kappa/2).
  NodeId huber(NodeId d, double kappa);
  // v [B x N] + centered advantages adv [B x (A*N)] -> [B x (A*N)], applied
  // per atom column (N = 1 for plain scalar heads).
  NodeId dueling_combine(NodeId v, NodeId adv, int64_t atoms);

  // Reverse sweep from a scalar loss node. Throws ContractViolation when the
  // loss is not a scalar.
  void backward(NodeId loss);

  const Tensor& value(NodeId id) const { return nodes_[static_cast<size_t>(id)].value; }
  // Valid after backward() for nodes on a requires_grad path.
  const Tensor& grad(NodeId id) const { return nodes_[static_cast<size_t>(id)].grad; }
  bool requires_grad(NodeId id) const { return nodes_[static_cast<size_t>(id)].requires_grad; }
  int64_t size() const { return static_cast<int64_t>(nodes_.size()); }
  void clear() { nodes_.clear(); }

private:
  enum class Op : uint8_t {
    kLeaf,
    kDense,
    kRelu,
    kAdd,
    kSub,
    kMul,
    kScale,
    kSoftmaxRows,
    kLogSoftmaxRows,
    kReduceSum,
    kReduceMean,
    kRowSum,
    kGatherCols,
    kGatherSpan,
    kHuber,
    kDueling,
  };

  struct Node {
    Op op;
    NodeId in[3] = {-1, -1, -1};
    Tensor value;
    Tensor grad;  // allocated during backward
    bool requires_grad = false;
    double scalar_arg = 0.0;        // kappa for huber, factor for scale
    int64_t int_arg = 0;            // span / atom count
    std::vector<int32_t> idx_arg;   // gather indices
  };

  NodeId push(Node n);
  Node& node(NodeId id) { return nodes_[static_cast<size_t>(id)]; }
  const Node& node(NodeId id) const { return nodes_[static_cast<size_t>(id)]; }
  void check_same_shape(NodeId a, NodeId b, const char* op) const;
  void backprop_into(Node& n);

  std::vector<Node> nodes_;
};

// Scalar Huber loss, the same branch rule the graph op applies elementwise.
// kappa must be positive.
double huber_loss(double delta, double kappa);

}  // namespace rrlab::numcore
