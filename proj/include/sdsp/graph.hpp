#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sdsp/tensor.hpp"

namespace sdsp::ad {

class Graph;

// Lightweight handle to a node in a Graph's tape.
class Value {
 public:
  Value() = default;

  bool defined() const { return g_ != nullptr; }
  std::span<const double> data() const;
  double scalar() const;
  std::size_t numel() const;
  std::size_t rows() const;
  std::size_t cols() const;
  Graph& graph() const { return *g_; }
  int id() const { return id_; }

 private:
  friend class Graph;
  Value(Graph* g, int id) : g_(g), id_(id) {}
  Graph* g_ = nullptr;
  int id_ = -1;
};

// Reverse-mode tape over dense tensors. Forward values are computed eagerly
// as nodes are appended, so the node list is topologically ordered by
// construction; backward() walks it once in reverse. Node payloads live in a
// shared arena that clear() keeps allocated, so a training loop can rebuild
// the graph every step without churning the heap.
//
// Shapes are rank 1 (vectors) or rank 2 (row-major matrices); a scalar is a
// length-1 vector. Binary elementwise ops require exactly equal shapes —
// there is no broadcasting.
class Graph {
 public:
  // Leaf bound to persistent storage; backward() accumulates into t.grad
  // when t.requires_grad is set. The tensor must outlive the graph.
  Value leaf(Tensor& t);
  Value constant(std::span<const double> values, std::size_t rows,
                 std::size_t cols);
  Value constant_vector(std::span<const double> values);
  Value constant_scalar(double v);

  Value matmul(Value a, Value b);            // [m x k] * [k x n]
  Value matvec(Value m, Value v);            // [m x k] * [k]  -> [m]
  Value vecmat(Value v, Value m);            // [k] * [k x n]  -> [n]
  Value add(Value a, Value b);
  Value sub(Value a, Value b);
  Value mul(Value a, Value b);               // elementwise
  Value scale(Value a, double c);
  Value tanh(Value a);
  Value relu(Value a);
  Value dot(Value a, Value b);               // vectors -> scalar
  Value sum(Value a);                        // all entries -> scalar
  Value rsqrt(Value a);                      // scalar x -> x^{-1/2}
  Value scale_by(Value s, Value a);          // scalar node * tensor node
  Value slice_row(Value m, std::size_t row); // matrix row as a vector
  Value stack_rows(std::span<const Value> rows);   // equal-length vectors
  Value concat(std::span<const Value> parts);      // vectors end to end
  Value concat(Value a, Value b);
  Value cosine_sim(Value u, Value v, double eps);
  Value softmax_cross_entropy(Value logits, std::size_t target);
  Value l1_distance(Value a, Value b);

  // Seeds d(root)/d(root) = 1 and sweeps the tape once in reverse,
  // accumulating into every requires_grad leaf tensor. Repeated calls keep
  // accumulating; callers reset tensors via Tensor::zero_grad.
  void backward(Value root);

  // Drops all nodes but keeps arena capacity.
  void clear();

  std::size_t node_count() const { return nodes_.size(); }

  // When set, every op validates its freshly computed outputs and throws
  // NumericError naming the offending node. Used by the grad-check harness.
  bool check_finite = false;

 private:
  enum class Op : std::uint8_t {
    Leaf,
    Constant,
    MatMul,
    MatVec,
    VecMat,
    Add,
    Sub,
    Mul,
    Scale,
    Tanh,
    Relu,
    Dot,
    Sum,
    Rsqrt,
    ScaleBy,
    SliceRow,
    StackRows,
    Concat,
    CosineSim,
    SoftmaxCE,
    L1Distance,
  };

  struct Shape {
    std::uint8_t rank = 1;
    std::size_t d0 = 0, d1 = 0;
    std::size_t numel() const { return rank == 1 ? d0 : d0 * d1; }
  };

  struct Node {
    Op op;
    bool needs_grad = false;
    int in0 = -1, in1 = -1;
    std::uint32_t extra_begin = 0, extra_count = 0;
    Shape shape;
    std::size_t off = 0;      // into vals_/adjs_
    std::size_t aux = 0;      // row / target index
    std::size_t aux_off = 0;  // into aux_
    double c0 = 0.0;          // scale constant or eps
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;  // cached forward scalars
    int flag = 0;
    Tensor* leaf = nullptr;
  };

  int push(Op op, Shape shape, int in0, int in1);
  double* val(int id) { return vals_.data() + nodes_[id].off; }
  const double* val(int id) const { return vals_.data() + nodes_[id].off; }
  double* adj(int id) { return adjs_.data() + nodes_[id].off; }
  std::size_t reserve_aux(std::size_t n);
  void validate_finite(int id);
  const Shape& shape_of(Value v) const;
  void require_same_shape(Value a, Value b, const char* op) const;
  Value check_owned(Value v, const char* op) const;
  static std::string to_string(Shape s);
  static const char* op_name(Op op);
  void backward_node(int id);

  std::vector<Node> nodes_;
  std::vector<int> extra_inputs_;
  std::vector<double> vals_;
  std::vector<double> adjs_;
  std::vector<double> aux_;

  friend class Value;
};

}  // namespace sdsp::ad
