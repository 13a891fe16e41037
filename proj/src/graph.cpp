#include "sdsp/graph.hpp"

#include <algorithm>
#include <cmath>

#include "sdsp/error.hpp"
#include "sdsp/kernels.hpp"

namespace sdsp::ad {

std::span<const double> Value::data() const {
  return {g_->val(id_), g_->nodes_[id_].shape.numel()};
}

double Value::scalar() const {
  if (g_->nodes_[id_].shape.numel() != 1)
    throw ContractError("scalar() on non-scalar node");
  return *g_->val(id_);
}

std::size_t Value::numel() const { return g_->nodes_[id_].shape.numel(); }

std::size_t Value::rows() const {
  const auto& s = g_->nodes_[id_].shape;
  return s.rank == 2 ? s.d0 : 1;
}

std::size_t Value::cols() const {
  const auto& s = g_->nodes_[id_].shape;
  return s.rank == 2 ? s.d1 : s.d0;
}

const char* Graph::op_name(Op op) {
  switch (op) {
    case Op::Leaf: return "leaf";
    case Op::Constant: return "constant";
    case Op::MatMul: return "matmul";
    case Op::MatVec: return "matvec";
    case Op::VecMat: return "vecmat";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Scale: return "scale";
    case Op::Tanh: return "tanh";
    case Op::Relu: return "relu";
    case Op::Dot: return "dot";
    case Op::Sum: return "sum";
    case Op::Rsqrt: return "rsqrt";
    case Op::ScaleBy: return "scale_by";
    case Op::SliceRow: return "slice_row";
    case Op::StackRows: return "stack_rows";
    case Op::Concat: return "concat";
    case Op::CosineSim: return "cosine_sim";
    case Op::SoftmaxCE: return "softmax_cross_entropy";
    case Op::L1Distance: return "l1_distance";
  }
  return "?";
}

std::string Graph::to_string(Shape s) {
  if (s.rank == 1) return "[" + std::to_string(s.d0) + "]";
  return "[" + std::to_string(s.d0) + "x" + std::to_string(s.d1) + "]";
}

const Graph::Shape& Graph::shape_of(Value v) const {
  return nodes_[v.id_].shape;
}

Value Graph::check_owned(Value v, const char* op) const {
  if (!v.defined() || v.g_ != this)
    throw ContractError(std::string(op) + ": value is not part of this graph");
  return v;
}

void Graph::require_same_shape(Value a, Value b, const char* op) const {
  const Shape& sa = shape_of(a);
  const Shape& sb = shape_of(b);
  if (sa.rank != sb.rank || sa.d0 != sb.d0 ||
      (sa.rank == 2 && sa.d1 != sb.d1))
    throw DimensionError(std::string(op) + ": shape mismatch: " +
                         to_string(sa) + " vs " + to_string(sb));
}

int Graph::push(Op op, Shape shape, int in0, int in1) {
  Node n;
  n.op = op;
  n.shape = shape;
  n.in0 = in0;
  n.in1 = in1;
  n.off = vals_.size();
  n.needs_grad = (in0 >= 0 && nodes_[in0].needs_grad) ||
                 (in1 >= 0 && nodes_[in1].needs_grad);
  vals_.resize(vals_.size() + shape.numel());
  nodes_.push_back(n);
  return static_cast<int>(nodes_.size()) - 1;
}

std::size_t Graph::reserve_aux(std::size_t n) {
  const std::size_t off = aux_.size();
  aux_.resize(off + n);
  return off;
}

void Graph::validate_finite(int id) {
  if (!check_finite) return;
  const Node& n = nodes_[id];
  const double* v = val(id);
  for (std::size_t i = 0; i < n.shape.numel(); ++i)
    if (!std::isfinite(v[i]))
      throw NumericError(std::string("non-finite value in node #") +
                         std::to_string(id) + " (" + op_name(n.op) + ")");
}

Value Graph::leaf(Tensor& t) {
  Shape s;
  if (t.shape.size() == 1) {
    s = {1, t.shape[0], 0};
  } else if (t.shape.size() == 2) {
    s = {2, t.shape[0], t.shape[1]};
  } else {
    throw DimensionError("leaf: rank must be 1 or 2, got shape " +
                         shape_str(t.shape));
  }
  if (shape_numel(t.shape) != t.data.size())
    throw DimensionError("leaf: data does not fill shape " +
                         shape_str(t.shape));
  const int id = push(Op::Leaf, s, -1, -1);
  nodes_[id].leaf = &t;
  nodes_[id].needs_grad = t.requires_grad;
  std::copy(t.data.begin(), t.data.end(), val(id));
  validate_finite(id);
  return Value(this, id);
}

Value Graph::constant(std::span<const double> values, std::size_t rows,
                      std::size_t cols) {
  if (values.size() != rows * cols)
    throw DimensionError("constant: " + std::to_string(values.size()) +
                         " values for [" + std::to_string(rows) + "x" +
                         std::to_string(cols) + "]");
  const int id = push(Op::Constant, Shape{2, rows, cols}, -1, -1);
  std::copy(values.begin(), values.end(), val(id));
  validate_finite(id);
  return Value(this, id);
}

Value Graph::constant_vector(std::span<const double> values) {
  const int id = push(Op::Constant, Shape{1, values.size(), 0}, -1, -1);
  std::copy(values.begin(), values.end(), val(id));
  validate_finite(id);
  return Value(this, id);
}

Value Graph::constant_scalar(double v) {
  const int id = push(Op::Constant, Shape{1, 1, 0}, -1, -1);
  *val(id) = v;
  validate_finite(id);
  return Value(this, id);
}

Value Graph::matmul(Value a, Value b) {
  check_owned(a, "matmul");
  check_owned(b, "matmul");
  const Shape& sa = shape_of(a);
  const Shape& sb = shape_of(b);
  if (sa.rank != 2 || sb.rank != 2)
    throw DimensionError("matmul: needs matrices, got " + to_string(sa) +
                         " and " + to_string(sb));
  if (sa.d1 != sb.d0)
    throw DimensionError("matmul: inner extents disagree: " + to_string(sa) +
                         " vs " + to_string(sb));
  const int id = push(Op::MatMul, Shape{2, sa.d0, sb.d1}, a.id_, b.id_);
  kernels::matmul(val(a.id_), val(b.id_), val(id), sa.d0, sa.d1, sb.d1);
  validate_finite(id);
  return Value(this, id);
}

Value Graph::matvec(Value m, Value v) {
  check_owned(m, "matvec");
  check_owned(v, "matvec");
  const Shape& sm = shape_of(m);
  const Shape& sv = shape_of(v);
  if (sm.rank != 2 || sv.rank != 1)
    throw DimensionError("matvec: needs matrix and vector, got " +
                         to_string(sm) + " and " + to_string(sv));
  if (sm.d1 != sv.d0)
    throw DimensionError("matvec: extents disagree: " + to_string(sm) +
                         " vs " + to_string(sv));
  const int id = push(Op::MatVec, Shape{1, sm.d0, 0}, m.id_, v.id_);
  kernels::matmul(val(m.id_), val(v.id_), val(id), sm.d0, sm.d1, 1);
  validate_finite(id);
  return Value(this, id);
}

Value Graph::vecmat(Value v, Value m) {
  check_owned(v, "vecmat");
  check_owned(m, "vecmat");
  const Shape& sv = shape_of(v);
  const Shape& sm = shape_of(m);
  if (sv.rank != 1 || sm.rank != 2)
    throw DimensionError("vecmat: needs vector and matrix, got " +
                         to_string(sv) + " and " + to_string(sm));
  if (sv.d0 != sm.d0)
    throw DimensionError("vecmat: extents disagree: " + to_string(sv) +
                         " vs " + to_string(sm));
  const int id = push(Op::VecMat, Shape{1, sm.d1, 0}, v.id_, m.id_);
  kernels::matmul(val(v.id_), val(m.id_), val(id), 1, sv.d0, sm.d1);
  validate_finite(id);
  return Value(this, id);
}

Value Graph::add(Value a, Value b) {
  check_owned(a, "add");
  check_owned(b, "add");
  require_same_shape(a, b, "add");
  const int id = push(Op::Add, shape_of(a), a.id_, b.id_);
  kernels::add(val(a.id_), val(b.id_), val(id), nodes_[id].shape.numel());
  validate_finite(id);
  return Value(this, id);
}

Value Graph::sub(Value a, Value b) {
  check_owned(a, "sub");
  check_owned(b, "sub");
  require_same_shape(a, b, "sub");
  const int id = push(Op::Sub, shape_of(a), a.id_, b.id_);
  kernels::sub(val(a.id_), val(b.id_), val(id), nodes_[id].shape.numel());
  validate_finite(id);
  return Value(this, id);
}

Value Graph::mul(Value a, Value b) {
  check_owned(a, "mul");
  check_owned(b, "mul");
  require_same_shape(a, b, "mul");
  const int id = push(Op::Mul, shape_of(a), a.id_, b.id_);
  kernels::mul(val(a.id_), val(b.id_), val(id), nodes_[id].shape.numel());
  validate_finite(id);
  return Value(this, id);
}

Value Graph::scale(Value a, double c) {
  check_owned(a, "scale");
  const int id = push(Op::Scale, shape_of(a), a.id_, -1);
  nodes_[id].c0 = c;
  kernels::scale(val(a.id_), c, val(id), nodes_[id].shape.numel());
  validate_finite(id);
  return Value(this, id);
}

Value Graph::tanh(Value a) {
  check_owned(a, "tanh");
  const int id = push(Op::Tanh, shape_of(a), a.id_, -1);
  kernels::tanh(val(a.id_), val(id), nodes_[id].shape.numel());
  validate_finite(id);
  return Value(this, id);
}

Value Graph::relu(Value a) {
  check_owned(a, "relu");
  const int id = push(Op::Relu, shape_of(a), a.id_, -1);
  kernels::relu(val(a.id_), val(id), nodes_[id].shape.numel());
  validate_finite(id);
  return Value(this, id);
}

Value Graph::dot(Value a, Value b) {
  check_owned(a, "dot");
  check_owned(b, "dot");
  const Shape& sa = shape_of(a);
  if (sa.rank != 1 || shape_of(b).rank != 1)
    throw DimensionError("dot: needs vectors, got " + to_string(sa) + " and " +
                         to_string(shape_of(b)));
  require_same_shape(a, b, "dot");
  const int id = push(Op::Dot, Shape{1, 1, 0}, a.id_, b.id_);
  *val(id) = kernels::dot(val(a.id_), val(b.id_), sa.d0);
  validate_finite(id);
  return Value(this, id);
}

Value Graph::sum(Value a) {
  check_owned(a, "sum");
  const int id = push(Op::Sum, Shape{1, 1, 0}, a.id_, -1);
  double s = 0.0;
  const double* v = val(a.id_);
  const std::size_t n = shape_of(a).numel();
  for (std::size_t i = 0; i < n; ++i) s += v[i];
  *val(id) = s;
  validate_finite(id);
  return Value(this, id);
}

Value Graph::rsqrt(Value a) {
  check_owned(a, "rsqrt");
  if (shape_of(a).numel() != 1)
    throw DimensionError("rsqrt: needs a scalar, got " +
                         to_string(shape_of(a)));
  const double x = *val(a.id_);
  if (!(x > 0.0))
    throw NumericError("rsqrt: non-positive argument " + std::to_string(x));
  const int id = push(Op::Rsqrt, Shape{1, 1, 0}, a.id_, -1);
  *val(id) = 1.0 / std::sqrt(x);
  validate_finite(id);
  return Value(this, id);
}

Value Graph::scale_by(Value s, Value a) {
  check_owned(s, "scale_by");
  check_owned(a, "scale_by");
  if (shape_of(s).numel() != 1)
    throw DimensionError("scale_by: scale must be scalar, got " +
                         to_string(shape_of(s)));
  const int id = push(Op::ScaleBy, shape_of(a), s.id_, a.id_);
  kernels::scale(val(a.id_), *val(s.id_), val(id), nodes_[id].shape.numel());
  validate_finite(id);
  return Value(this, id);
}

Value Graph::slice_row(Value m, std::size_t row) {
  check_owned(m, "slice_row");
  const Shape& sm = shape_of(m);
  if (sm.rank != 2)
    throw DimensionError("slice_row: needs a matrix, got " + to_string(sm));
  if (row >= sm.d0)
    throw IndexError("slice_row: row " + std::to_string(row) +
                     " out of range for " + to_string(sm));
  const int id = push(Op::SliceRow, Shape{1, sm.d1, 0}, m.id_, -1);
  nodes_[id].aux = row;
  std::copy_n(val(m.id_) + row * sm.d1, sm.d1, val(id));
  return Value(this, id);
}

Value Graph::stack_rows(std::span<const Value> rows) {
  if (rows.empty()) throw ContractError("stack_rows: no rows");
  const Shape& s0 = shape_of(check_owned(rows[0], "stack_rows"));
  if (s0.rank != 1)
    throw DimensionError("stack_rows: needs vectors, got " + to_string(s0));
  for (const Value& r : rows) {
    check_owned(r, "stack_rows");
    require_same_shape(rows[0], r, "stack_rows");
  }
  const int id = push(Op::StackRows, Shape{2, rows.size(), s0.d0}, -1, -1);
  Node& n = nodes_[id];
  n.extra_begin = static_cast<std::uint32_t>(extra_inputs_.size());
  n.extra_count = static_cast<std::uint32_t>(rows.size());
  for (const Value& r : rows) {
    extra_inputs_.push_back(r.id_);
    n.needs_grad = n.needs_grad || nodes_[r.id_].needs_grad;
  }
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy_n(val(rows[i].id_), s0.d0, val(id) + i * s0.d0);
  return Value(this, id);
}

Value Graph::concat(std::span<const Value> parts) {
  if (parts.empty()) throw ContractError("concat: no parts");
  std::size_t total = 0;
  for (const Value& p : parts) {
    check_owned(p, "concat");
    if (shape_of(p).rank != 1)
      throw DimensionError("concat: needs vectors, got " +
                           to_string(shape_of(p)));
    total += shape_of(p).d0;
  }
  const int id = push(Op::Concat, Shape{1, total, 0}, -1, -1);
  Node& n = nodes_[id];
  n.extra_begin = static_cast<std::uint32_t>(extra_inputs_.size());
  n.extra_count = static_cast<std::uint32_t>(parts.size());
  std::size_t off = 0;
  for (const Value& p : parts) {
    extra_inputs_.push_back(p.id_);
    n.needs_grad = n.needs_grad || nodes_[p.id_].needs_grad;
    std::copy_n(val(p.id_), shape_of(p).d0, val(id) + off);
    off += shape_of(p).d0;
  }
  return Value(this, id);
}

Value Graph::concat(Value a, Value b) {
  const Value parts[] = {a, b};
  return concat(std::span<const Value>(parts, 2));
}

Value Graph::cosine_sim(Value u, Value v, double eps) {
  check_owned(u, "cosine_sim");
  check_owned(v, "cosine_sim");
  if (shape_of(u).rank != 1 || shape_of(v).rank != 1)
    throw DimensionError("cosine_sim: needs vectors");
  require_same_shape(u, v, "cosine_sim");
  if (!(eps > 0.0)) throw ContractError("cosine_sim: eps must be positive");
  const std::size_t n = shape_of(u).d0;
  const double s = kernels::dot(val(u.id_), val(v.id_), n);
  const double nu = std::sqrt(kernels::dot(val(u.id_), val(u.id_), n));
  const double nv = std::sqrt(kernels::dot(val(v.id_), val(v.id_), n));
  const bool clamped = !(nu * nv > eps);
  const double denom = clamped ? eps : nu * nv;
  const int id = push(Op::CosineSim, Shape{1, 1, 0}, u.id_, v.id_);
  Node& node = nodes_[id];
  node.c0 = eps;
  node.s0 = s;
  node.s1 = nu;
  node.s2 = nv;
  node.flag = clamped ? 1 : 0;
  *val(id) = s / denom;
  validate_finite(id);
  return Value(this, id);
}

Value Graph::softmax_cross_entropy(Value logits, std::size_t target) {
  check_owned(logits, "softmax_cross_entropy");
  const Shape& s = shape_of(logits);
  if (s.rank != 1)
    throw DimensionError("softmax_cross_entropy: needs a logit vector, got " +
                         to_string(s));
  if (target >= s.d0)
    throw IndexError("softmax_cross_entropy: target " +
                     std::to_string(target) + " out of range for " +
                     std::to_string(s.d0) + " classes");
  const std::size_t c = s.d0;
  const int id = push(Op::SoftmaxCE, Shape{1, 1, 0}, logits.id_, -1);
  const double* x = val(logits.id_);
  double mx = x[0];
  for (std::size_t i = 1; i < c; ++i) mx = std::max(mx, x[i]);
  double z = 0.0;
  for (std::size_t i = 0; i < c; ++i) z += std::exp(x[i] - mx);
  const double lse = mx + std::log(z);
  Node& node = nodes_[id];
  node.aux = target;
  node.aux_off = reserve_aux(c);
  for (std::size_t i = 0; i < c; ++i)
    aux_[node.aux_off + i] = std::exp(x[i] - mx) / z;
  *val(id) = lse - x[target];
  validate_finite(id);
  return Value(this, id);
}

Value Graph::l1_distance(Value a, Value b) {
  check_owned(a, "l1_distance");
  check_owned(b, "l1_distance");
  require_same_shape(a, b, "l1_distance");
  const std::size_t n = shape_of(a).numel();
  const int id = push(Op::L1Distance, Shape{1, 1, 0}, a.id_, b.id_);
  const double* x = val(a.id_);
  const double* y = val(b.id_);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::abs(x[i] - y[i]);
  *val(id) = s;
  validate_finite(id);
  return Value(this, id);
}

void Graph::backward(Value root) {
  check_owned(root, "backward");
  if (nodes_[root.id_].shape.numel() != 1)
    throw ContractError("backward: root must be scalar, got " +
                        to_string(nodes_[root.id_].shape));
  adjs_.assign(vals_.size(), 0.0);
  adjs_[nodes_[root.id_].off] = 1.0;
  for (int id = root.id_; id >= 0; --id) {
    if (!nodes_[id].needs_grad) continue;
    backward_node(id);
  }
}

void Graph::backward_node(int id) {
  Node& n = nodes_[id];
  const double* d = adj(id);
  const std::size_t numel = n.shape.numel();
  switch (n.op) {
    case Op::Constant:
      break;
    case Op::Leaf:
      if (n.leaf->requires_grad)
        kernels::axpy(1.0, d, n.leaf->grad.data(), numel);
      break;
    case Op::MatMul: {
      const Node& a = nodes_[n.in0];
      const Node& b = nodes_[n.in1];
      const std::size_t m = a.shape.d0, k = a.shape.d1, cols = b.shape.d1;
      if (a.needs_grad)
        kernels::matmul_nt(d, val(n.in1), adj(n.in0), m, cols, k, true);
      if (b.needs_grad)
        kernels::matmul_tn(val(n.in0), d, adj(n.in1), m, k, cols, true);
      break;
    }
    case Op::MatVec: {
      const Node& a = nodes_[n.in0];
      const std::size_t m = a.shape.d0, k = a.shape.d1;
      if (a.needs_grad)  // dM += dy (x) v
        kernels::matmul(d, val(n.in1), adj(n.in0), m, 1, k, true);
      if (nodes_[n.in1].needs_grad)  // dv += M^T dy
        kernels::matmul_tn(val(n.in0), d, adj(n.in1), m, k, 1, true);
      break;
    }
    case Op::VecMat: {
      const Node& m = nodes_[n.in1];
      const std::size_t k = m.shape.d0, cols = m.shape.d1;
      if (nodes_[n.in0].needs_grad)  // dv += M dy
        kernels::matmul(val(n.in1), d, adj(n.in0), k, cols, 1, true);
      if (m.needs_grad)  // dM += v (x) dy
        kernels::matmul(val(n.in0), d, adj(n.in1), k, 1, cols, true);
      break;
    }
    case Op::Add:
      if (nodes_[n.in0].needs_grad) kernels::axpy(1.0, d, adj(n.in0), numel);
      if (nodes_[n.in1].needs_grad) kernels::axpy(1.0, d, adj(n.in1), numel);
      break;
    case Op::Sub:
      if (nodes_[n.in0].needs_grad) kernels::axpy(1.0, d, adj(n.in0), numel);
      if (nodes_[n.in1].needs_grad) kernels::axpy(-1.0, d, adj(n.in1), numel);
      break;
    case Op::Mul:
      if (nodes_[n.in0].needs_grad)
        kernels::mul_acc(d, val(n.in1), adj(n.in0), numel);
      if (nodes_[n.in1].needs_grad)
        kernels::mul_acc(d, val(n.in0), adj(n.in1), numel);
      break;
    case Op::Scale:
      if (nodes_[n.in0].needs_grad)
        kernels::axpy(n.c0, d, adj(n.in0), numel);
      break;
    case Op::Tanh:
      if (nodes_[n.in0].needs_grad) {
        const double* y = val(id);
        double* da = adj(n.in0);
        for (std::size_t i = 0; i < numel; ++i)
          da[i] += d[i] * (1.0 - y[i] * y[i]);
      }
      break;
    case Op::Relu:
      if (nodes_[n.in0].needs_grad) {
        const double* x = val(n.in0);
        double* da = adj(n.in0);
        for (std::size_t i = 0; i < numel; ++i)
          if (x[i] > 0.0) da[i] += d[i];
      }
      break;
    case Op::Dot: {
      const std::size_t len = nodes_[n.in0].shape.d0;
      if (nodes_[n.in0].needs_grad)
        kernels::axpy(*d, val(n.in1), adj(n.in0), len);
      if (nodes_[n.in1].needs_grad)
        kernels::axpy(*d, val(n.in0), adj(n.in1), len);
      break;
    }
    case Op::Sum:
      if (nodes_[n.in0].needs_grad) {
        double* da = adj(n.in0);
        const std::size_t len = nodes_[n.in0].shape.numel();
        for (std::size_t i = 0; i < len; ++i) da[i] += *d;
      }
      break;
    case Op::Rsqrt:
      if (nodes_[n.in0].needs_grad) {
        const double y = *val(id);
        *adj(n.in0) += *d * (-0.5) * y * y * y;
      }
      break;
    case Op::ScaleBy: {
      const double s = *val(n.in0);
      const std::size_t len = nodes_[n.in1].shape.numel();
      if (nodes_[n.in1].needs_grad) kernels::axpy(s, d, adj(n.in1), len);
      if (nodes_[n.in0].needs_grad)
        *adj(n.in0) += kernels::dot(d, val(n.in1), len);
      break;
    }
    case Op::SliceRow:
      if (nodes_[n.in0].needs_grad) {
        const std::size_t w = nodes_[n.in0].shape.d1;
        kernels::axpy(1.0, d, adj(n.in0) + n.aux * w, w);
      }
      break;
    case Op::StackRows: {
      const std::size_t w = n.shape.d1;
      for (std::uint32_t i = 0; i < n.extra_count; ++i) {
        const int src = extra_inputs_[n.extra_begin + i];
        if (nodes_[src].needs_grad)
          kernels::axpy(1.0, d + i * w, adj(src), w);
      }
      break;
    }
    case Op::Concat: {
      std::size_t off = 0;
      for (std::uint32_t i = 0; i < n.extra_count; ++i) {
        const int src = extra_inputs_[n.extra_begin + i];
        const std::size_t w = nodes_[src].shape.d0;
        if (nodes_[src].needs_grad) kernels::axpy(1.0, d + off, adj(src), w);
        off += w;
      }
      break;
    }
    case Op::CosineSim: {
      const std::size_t len = nodes_[n.in0].shape.d0;
      const double y = *val(id);
      const double* u = val(n.in0);
      const double* v = val(n.in1);
      if (n.flag) {  // denominator clamped at eps: only the numerator varies
        if (nodes_[n.in0].needs_grad)
          kernels::axpy(*d / n.c0, v, adj(n.in0), len);
        if (nodes_[n.in1].needs_grad)
          kernels::axpy(*d / n.c0, u, adj(n.in1), len);
      } else {
        const double denom = n.s1 * n.s2;
        if (nodes_[n.in0].needs_grad) {
          double* du = adj(n.in0);
          const double a1 = *d / denom;
          const double a2 = *d * y / (n.s1 * n.s1);
          for (std::size_t i = 0; i < len; ++i)
            du[i] += a1 * v[i] - a2 * u[i];
        }
        if (nodes_[n.in1].needs_grad) {
          double* dv = adj(n.in1);
          const double a1 = *d / denom;
          const double a2 = *d * y / (n.s2 * n.s2);
          for (std::size_t i = 0; i < len; ++i)
            dv[i] += a1 * u[i] - a2 * v[i];
        }
      }
      break;
    }
    case Op::SoftmaxCE:
      if (nodes_[n.in0].needs_grad) {
        const std::size_t c = nodes_[n.in0].shape.d0;
        double* dx = adj(n.in0);
        const double* p = aux_.data() + n.aux_off;
        for (std::size_t i = 0; i < c; ++i)
          dx[i] += *d * (p[i] - (i == n.aux ? 1.0 : 0.0));
      }
      break;
    case Op::L1Distance: {
      const std::size_t len = nodes_[n.in0].shape.numel();
      const double* x = val(n.in0);
      const double* y = val(n.in1);
      // subgradient at exact ties is 0
      if (nodes_[n.in0].needs_grad) {
        double* da = adj(n.in0);
        for (std::size_t i = 0; i < len; ++i) {
          const double t = x[i] - y[i];
          if (t > 0.0)
            da[i] += *d;
          else if (t < 0.0)
            da[i] -= *d;
        }
      }
      if (nodes_[n.in1].needs_grad) {
        double* db = adj(n.in1);
        for (std::size_t i = 0; i < len; ++i) {
          const double t = x[i] - y[i];
          if (t > 0.0)
            db[i] -= *d;
          else if (t < 0.0)
            db[i] += *d;
        }
      }
      break;
    }
  }
}

void Graph::clear() {
  nodes_.clear();
  extra_inputs_.clear();
  vals_.clear();
  adjs_.clear();
  aux_.clear();
}

}  // namespace sdsp::ad
