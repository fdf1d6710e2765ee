#include "rrlab/numcore/graph.hpp"

#include <cmath>

#include "rrlab/errors.hpp"

namespace rrlab::numcore {

namespace {

// Treat rank-1 [n] as a single row [1 x n].
struct RowView {
  int64_t rows;
  int64_t cols;
};

RowView rows_of(const Tensor& t) {
  if (t.rank() == 1) return {1, t.dim(0)};
  if (t.rank() == 2) return {t.dim(0), t.dim(1)};
  throw DimensionError("expected rank-1 or rank-2 tensor, got " + t.shape_str());
}

}  // namespace

double huber_loss(double delta, double kappa) {
  if (kappa <= 0.0) throw ParameterError("huber kappa must be positive");
  double a = std::abs(delta);
  if (a <= kappa) return 0.5 * delta * delta;
  return kappa * (a - 0.5 * kappa);
}

NodeId Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

void Graph::check_same_shape(NodeId a, NodeId b, const char* op) const {
  if (!node(a).value.same_shape(node(b).value))
    throw DimensionError(std::string(op) + ": shape mismatch " + node(a).value.shape_str() +
                         " vs " + node(b).value.shape_str());
}

NodeId Graph::leaf(Tensor value, bool requires_grad) {
  Node n;
  n.op = Op::kLeaf;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  return push(std::move(n));
}

NodeId Graph::dense(NodeId w, NodeId b, NodeId x) {
  const Tensor& W = node(w).value;
  const Tensor& B = node(b).value;
  const Tensor& X = node(x).value;
  if (W.rank() != 2)
    throw DimensionError("dense: weight must be rank-2, got " + W.shape_str());
  int64_t m = W.dim(0), in = W.dim(1);
  if (B.rank() != 1 || B.dim(0) != m)
    throw DimensionError("dense: bias " + B.shape_str() + " does not match weight " +
                         W.shape_str());
  RowView xv = rows_of(X);
  if (xv.cols != in)
    throw DimensionError("dense: input " + X.shape_str() + " does not match weight " +
                         W.shape_str());

  Node n;
  n.op = Op::kDense;
  n.in[0] = w;
  n.in[1] = b;
  n.in[2] = x;
  n.requires_grad = node(w).requires_grad || node(b).requires_grad || node(x).requires_grad;
  n.value = X.rank() == 1 ? Tensor({m}) : Tensor({xv.rows, m});
  const double* xd = X.data();
  const double* wd = W.data();
  double* yd = n.value.data();
  for (int64_t r = 0; r < xv.rows; ++r) {
    const double* xr = xd + r * in;
    for (int64_t i = 0; i < m; ++i) {
      const double* wr = wd + i * in;
      double acc = B[i];
      for (int64_t j = 0; j < in; ++j) acc += wr[j] * xr[j];
      yd[r * m + i] = acc;
    }
  }
  return push(std::move(n));
}

NodeId Graph::relu(NodeId x) {
  Node n;
  n.op = Op::kRelu;
  n.in[0] = x;
  n.requires_grad = node(x).requires_grad;
  n.value = node(x).value;
  for (double& v : n.value.values()) v = v > 0.0 ? v : 0.0;
  return push(std::move(n));
}

NodeId Graph::add(NodeId a, NodeId b) {
  check_same_shape(a, b, "add");
  Node n;
  n.op = Op::kAdd;
  n.in[0] = a;
  n.in[1] = b;
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  n.value = node(a).value;
  const double* bd = node(b).value.data();
  double* d = n.value.data();
  for (int64_t i = 0; i < n.value.numel(); ++i) d[i] += bd[i];
  return push(std::move(n));
}

NodeId Graph::sub(NodeId a, NodeId b) {
  check_same_shape(a, b, "sub");
  Node n;
  n.op = Op::kSub;
  n.in[0] = a;
  n.in[1] = b;
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  n.value = node(a).value;
  const double* bd = node(b).value.data();
  double* d = n.value.data();
  for (int64_t i = 0; i < n.value.numel(); ++i) d[i] -= bd[i];
  return push(std::move(n));
}

NodeId Graph::mul(NodeId a, NodeId b) {
  check_same_shape(a, b, "mul");
  Node n;
  n.op = Op::kMul;
  n.in[0] = a;
  n.in[1] = b;
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  n.value = node(a).value;
  const double* bd = node(b).value.data();
  double* d = n.value.data();
  for (int64_t i = 0; i < n.value.numel(); ++i) d[i] *= bd[i];
  return push(std::move(n));
}

NodeId Graph::scale(NodeId a, double c) {
  Node n;
  n.op = Op::kScale;
  n.in[0] = a;
  n.scalar_arg = c;
  n.requires_grad = node(a).requires_grad;
  n.value = node(a).value;
  for (double& v : n.value.values()) v *= c;
  return push(std::move(n));
}

NodeId Graph::softmax_rows(NodeId x) {
  RowView rv = rows_of(node(x).value);
  Node n;
  n.op = Op::kSoftmaxRows;
  n.in[0] = x;
  n.requires_grad = node(x).requires_grad;
  n.value = node(x).value;
  double* d = n.value.data();
  for (int64_t r = 0; r < rv.rows; ++r) {
    double* row = d + r * rv.cols;
    double mx = row[0];
    for (int64_t j = 1; j < rv.cols; ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (int64_t j = 0; j < rv.cols; ++j) {
      row[j] = std::exp(row[j] - mx);
      sum += row[j];
    }
    for (int64_t j = 0; j < rv.cols; ++j) row[j] /= sum;
  }
  return push(std::move(n));
}

NodeId Graph::log_softmax_rows(NodeId x) {
  RowView rv = rows_of(node(x).value);
  Node n;
  n.op = Op::kLogSoftmaxRows;
  n.in[0] = x;
  n.requires_grad = node(x).requires_grad;
  n.value = node(x).value;
  double* d = n.value.data();
  for (int64_t r = 0; r < rv.rows; ++r) {
    double* row = d + r * rv.cols;
    double mx = row[0];
    for (int64_t j = 1; j < rv.cols; ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (int64_t j = 0; j < rv.cols; ++j) sum += std::exp(row[j] - mx);
    double lse = mx + std::log(sum);
    for (int64_t j = 0; j < rv.cols; ++j) row[j] -= lse;
  }
  return push(std::move(n));
}

NodeId Graph::reduce_sum(NodeId x) {
  Node n;
  n.op = Op::kReduceSum;
  n.in[0] = x;
  n.requires_grad = node(x).requires_grad;
  double acc = 0.0;
  for (double v : node(x).value.values()) acc += v;
  n.value = Tensor::scalar(acc);
  return push(std::move(n));
}

NodeId Graph::reduce_mean(NodeId x) {
  Node n;
  n.op = Op::kReduceMean;
  n.in[0] = x;
  n.requires_grad = node(x).requires_grad;
  double acc = 0.0;
  for (double v : node(x).value.values()) acc += v;
  n.value = Tensor::scalar(acc / static_cast<double>(node(x).value.numel()));
  return push(std::move(n));
}

NodeId Graph::row_sum(NodeId x) {
  const Tensor& X = node(x).value;
  if (X.rank() != 2) throw DimensionError("row_sum: expected rank-2, got " + X.shape_str());
  Node n;
  n.op = Op::kRowSum;
  n.in[0] = x;
  n.requires_grad = node(x).requires_grad;
  n.value = Tensor({X.dim(0)});
  for (int64_t r = 0; r < X.dim(0); ++r) {
    double acc = 0.0;
    for (int64_t c = 0; c < X.dim(1); ++c) acc += X.at(r, c);
    n.value[r] = acc;
  }
  return push(std::move(n));
}

NodeId Graph::gather_cols(NodeId x, std::vector<int32_t> idx) {
  const Tensor& X = node(x).value;
  if (X.rank() != 2) throw DimensionError("gather_cols: expected rank-2, got " + X.shape_str());
  if (static_cast<int64_t>(idx.size()) != X.dim(0))
    throw DimensionError("gather_cols: index count does not match rows");
  for (int32_t i : idx)
    if (i < 0 || i >= X.dim(1)) throw ContractViolation("gather_cols: index out of range");
  Node n;
  n.op = Op::kGatherCols;
  n.in[0] = x;
  n.requires_grad = node(x).requires_grad;
  n.value = Tensor({X.dim(0)});
  for (int64_t r = 0; r < X.dim(0); ++r) n.value[r] = X.at(r, idx[static_cast<size_t>(r)]);
  n.idx_arg = std::move(idx);
  return push(std::move(n));
}

NodeId Graph::gather_span(NodeId x, std::vector<int32_t> idx, int64_t span) {
  const Tensor& X = node(x).value;
  if (X.rank() != 2) throw DimensionError("gather_span: expected rank-2, got " + X.shape_str());
  if (span <= 0 || X.dim(1) % span != 0)
    throw DimensionError("gather_span: span does not divide columns");
  int64_t blocks = X.dim(1) / span;
  if (static_cast<int64_t>(idx.size()) != X.dim(0))
    throw DimensionError("gather_span: index count does not match rows");
  for (int32_t i : idx)
    if (i < 0 || i >= blocks) throw ContractViolation("gather_span: index out of range");
  Node n;
  n.op = Op::kGatherSpan;
  n.in[0] = x;
  n.requires_grad = node(x).requires_grad;
  n.int_arg = span;
  n.value = Tensor({X.dim(0), span});
  for (int64_t r = 0; r < X.dim(0); ++r)
    for (int64_t j = 0; j < span; ++j)
      n.value.at(r, j) = X.at(r, idx[static_cast<size_t>(r)] * span + j);
  n.idx_arg = std::move(idx);
  return push(std::move(n));
}

NodeId Graph::huber(NodeId d, double kappa) {
  if (kappa <= 0.0) throw ParameterError("huber kappa must be positive");
  Node n;
  n.op = Op::kHuber;
  n.in[0] = d;
  n.scalar_arg = kappa;
  n.requires_grad = node(d).requires_grad;
  n.value = node(d).value;
  for (double& v : n.value.values()) v = huber_loss(v, kappa);
  return push(std::move(n));
}

NodeId Graph::dueling_combine(NodeId v, NodeId adv, int64_t atoms) {
  const Tensor& V = node(v).value;
  const Tensor& A = node(adv).value;
  if (V.rank() != 2 || A.rank() != 2 || V.dim(0) != A.dim(0))
    throw DimensionError("dueling_combine: expected [B x N] and [B x A*N]");
  if (atoms <= 0 || V.dim(1) != atoms || A.dim(1) % atoms != 0)
    throw DimensionError("dueling_combine: atom count mismatch");
  int64_t actions = A.dim(1) / atoms;
  Node n;
  n.op = Op::kDueling;
  n.in[0] = v;
  n.in[1] = adv;
  n.int_arg = atoms;
  n.requires_grad = node(v).requires_grad || node(adv).requires_grad;
  n.value = Tensor({A.dim(0), A.dim(1)});
  for (int64_t r = 0; r < A.dim(0); ++r) {
    for (int64_t j = 0; j < atoms; ++j) {
      double mean = 0.0;
      for (int64_t a = 0; a < actions; ++a) mean += A.at(r, a * atoms + j);
      mean /= static_cast<double>(actions);
      for (int64_t a = 0; a < actions; ++a)
        n.value.at(r, a * atoms + j) = V.at(r, j) + A.at(r, a * atoms + j) - mean;
    }
  }
  return push(std::move(n));
}

void Graph::backward(NodeId loss) {
  Node& top = node(loss);
  if (!top.value.is_scalar())
    throw ContractViolation("backward: loss must be scalar, got " + top.value.shape_str());

  // Gradients only flow along requires_grad paths; everything else keeps an
  // empty grad tensor, so plain inputs are never touched.
  for (Node& n : nodes_) n.grad = Tensor();
  top.grad = Tensor::full(top.value.shape(), 0.0);
  top.grad[0] = 1.0;

  for (int64_t i = loss; i >= 0; --i) {
    Node& n = nodes_[static_cast<size_t>(i)];
    if (n.op == Op::kLeaf || n.grad.numel() == 0) continue;
    backprop_into(n);
  }
}

void Graph::backprop_into(Node& n) {
  auto ensure_grad = [this](NodeId id) -> Tensor* {
    Node& in = node(id);
    if (!in.requires_grad) return nullptr;
    if (in.grad.numel() == 0) in.grad = Tensor::zeros(in.value.shape());
    return &in.grad;
  };

  switch (n.op) {
    case Op::kLeaf:
      break;
    case Op::kDense: {
      const Tensor& W = node(n.in[0]).value;
      const Tensor& X = node(n.in[2]).value;
      int64_t m = W.dim(0), in_dim = W.dim(1);
      RowView xv = rows_of(X);
      Tensor* gw = ensure_grad(n.in[0]);
      Tensor* gb = ensure_grad(n.in[1]);
      Tensor* gx = ensure_grad(n.in[2]);
      const double* gy = n.grad.data();
      const double* xd = X.data();
      const double* wd = W.data();
      for (int64_t r = 0; r < xv.rows; ++r) {
        const double* gyr = gy + r * m;
        const double* xr = xd + r * in_dim;
        for (int64_t i = 0; i < m; ++i) {
          double g = gyr[i];
          if (g == 0.0) continue;
          if (gw) {
            double* gwr = gw->data() + i * in_dim;
            for (int64_t j = 0; j < in_dim; ++j) gwr[j] += g * xr[j];
          }
          if (gb) (*gb)[i] += g;
          if (gx) {
            double* gxr = gx->data() + r * in_dim;
            const double* wr = wd + i * in_dim;
            for (int64_t j = 0; j < in_dim; ++j) gxr[j] += g * wr[j];
          }
        }
      }
      break;
    }
    case Op::kRelu: {
      if (Tensor* gx = ensure_grad(n.in[0])) {
        const Tensor& X = node(n.in[0]).value;
        // Subgradient at exactly zero is defined as zero.
        for (int64_t i = 0; i < X.numel(); ++i)
          if (X[i] > 0.0) (*gx)[i] += n.grad[i];
      }
      break;
    }
    case Op::kAdd: {
      for (int k = 0; k < 2; ++k)
        if (Tensor* g = ensure_grad(n.in[k]))
          for (int64_t i = 0; i < n.grad.numel(); ++i) (*g)[i] += n.grad[i];
      break;
    }
    case Op::kSub: {
      if (Tensor* g = ensure_grad(n.in[0]))
        for (int64_t i = 0; i < n.grad.numel(); ++i) (*g)[i] += n.grad[i];
      if (Tensor* g = ensure_grad(n.in[1]))
        for (int64_t i = 0; i < n.grad.numel(); ++i) (*g)[i] -= n.grad[i];
      break;
    }
    case Op::kMul: {
      const Tensor& A = node(n.in[0]).value;
      const Tensor& B = node(n.in[1]).value;
      if (Tensor* g = ensure_grad(n.in[0]))
        for (int64_t i = 0; i < n.grad.numel(); ++i) (*g)[i] += n.grad[i] * B[i];
      if (Tensor* g = ensure_grad(n.in[1]))
        for (int64_t i = 0; i < n.grad.numel(); ++i) (*g)[i] += n.grad[i] * A[i];
      break;
    }
    case Op::kScale: {
      if (Tensor* g = ensure_grad(n.in[0]))
        for (int64_t i = 0; i < n.grad.numel(); ++i) (*g)[i] += n.grad[i] * n.scalar_arg;
      break;
    }
    case Op::kSoftmaxRows: {
      if (Tensor* g = ensure_grad(n.in[0])) {
        RowView rv = rows_of(n.value);
        for (int64_t r = 0; r < rv.rows; ++r) {
          const double* s = n.value.data() + r * rv.cols;
          const double* gy = n.grad.data() + r * rv.cols;
          double dot = 0.0;
          for (int64_t j = 0; j < rv.cols; ++j) dot += gy[j] * s[j];
          double* gx = g->data() + r * rv.cols;
          for (int64_t j = 0; j < rv.cols; ++j) gx[j] += s[j] * (gy[j] - dot);
        }
      }
      break;
    }
    case Op::kLogSoftmaxRows: {
      if (Tensor* g = ensure_grad(n.in[0])) {
        RowView rv = rows_of(n.value);
        for (int64_t r = 0; r < rv.rows; ++r) {
          const double* ls = n.value.data() + r * rv.cols;
          const double* gy = n.grad.data() + r * rv.cols;
          double gsum = 0.0;
          for (int64_t j = 0; j < rv.cols; ++j) gsum += gy[j];
          double* gx = g->data() + r * rv.cols;
          for (int64_t j = 0; j < rv.cols; ++j) gx[j] += gy[j] - std::exp(ls[j]) * gsum;
        }
      }
      break;
    }
    case Op::kReduceSum: {
      if (Tensor* g = ensure_grad(n.in[0]))
        for (int64_t i = 0; i < g->numel(); ++i) (*g)[i] += n.grad[0];
      break;
    }
    case Op::kReduceMean: {
      if (Tensor* g = ensure_grad(n.in[0])) {
        double scale = 1.0 / static_cast<double>(g->numel());
        for (int64_t i = 0; i < g->numel(); ++i) (*g)[i] += n.grad[0] * scale;
      }
      break;
    }
    case Op::kRowSum: {
      if (Tensor* g = ensure_grad(n.in[0])) {
        int64_t cols = g->shape()[1];
        for (int64_t r = 0; r < g->shape()[0]; ++r)
          for (int64_t c = 0; c < cols; ++c) g->at(r, c) += n.grad[r];
      }
      break;
    }
    case Op::kGatherCols: {
      if (Tensor* g = ensure_grad(n.in[0]))
        for (int64_t r = 0; r < n.grad.numel(); ++r)
          g->at(r, n.idx_arg[static_cast<size_t>(r)]) += n.grad[r];
      break;
    }
    case Op::kGatherSpan: {
      if (Tensor* g = ensure_grad(n.in[0])) {
        int64_t span = n.int_arg;
        for (int64_t r = 0; r < n.value.shape()[0]; ++r)
          for (int64_t j = 0; j < span; ++j)
            g->at(r, n.idx_arg[static_cast<size_t>(r)] * span + j) += n.grad.at(r, j);
      }
      break;
    }
    case Op::kHuber: {
      if (Tensor* g = ensure_grad(n.in[0])) {
        const Tensor& D = node(n.in[0]).value;
        double k = n.scalar_arg;
        for (int64_t i = 0; i < D.numel(); ++i) {
          double d = D[i];
          double slope = d > k ? k : (d < -k ? -k : d);
          (*g)[i] += n.grad[i] * slope;
        }
      }
      break;
    }
    case Op::kDueling: {
      int64_t atoms = n.int_arg;
      int64_t actions = n.value.shape()[1] / atoms;
      Tensor* gv = ensure_grad(n.in[0]);
      Tensor* ga = ensure_grad(n.in[1]);
      for (int64_t r = 0; r < n.value.shape()[0]; ++r) {
        for (int64_t j = 0; j < atoms; ++j) {
          double gsum = 0.0;
          for (int64_t a = 0; a < actions; ++a) gsum += n.grad.at(r, a * atoms + j);
          if (gv) gv->at(r, j) += gsum;
          if (ga) {
            double mean = gsum / static_cast<double>(actions);
            for (int64_t a = 0; a < actions; ++a)
              ga->at(r, a * atoms + j) += n.grad.at(r, a * atoms + j) - mean;
          }
        }
      }
      break;
    }
  }
}

}  // namespace rrlab::numcore
