#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace compmodel {

enum class Backend { FinFn, Stoch, Quant, RealVec };

std::string_view to_string(Backend b);
Backend backend_from_string(std::string_view s);

struct ObjectSem {
  enum class Kind { FinSet, ProbSpace, Hilbert, RealSpace };

  Kind kind = Kind::FinSet;
  std::vector<std::string> elements;  // FinSet, ProbSpace
  std::size_t dim = 0;                // Hilbert, RealSpace

  static ObjectSem fin_set(std::vector<std::string> elements);
  static ObjectSem prob_space(std::vector<std::string> elements);
  static ObjectSem hilbert(std::size_t dim);
  static ObjectSem real_space(std::size_t dim);

  // Number of basis states / elements / vector components.
  std::size_t size() const;
  bool finite() const { return kind == Kind::FinSet || kind == Kind::ProbSpace; }
  std::optional<std::size_t> index_of(std::string_view label) const;

  bool operator==(const ObjectSem&) const = default;
};

// Object kind each backend accepts.
ObjectSem::Kind object_kind_for(Backend b);

// Factor sizes of a tensor of objects. Flat indices are row-major over factors.
using Dims = std::vector<std::size_t>;
std::size_t product(const Dims& dims);

struct FnTable {
  Dims dom, cod;
  std::vector<std::size_t> map;  // flat dom index -> flat cod index
};

// Nonnegative matrix, rows indexed by codomain, columns by domain.
struct StochMatrix {
  Dims dom, cod;
  Eigen::MatrixXd m;
};

struct KrausMap {
  Dims dom, cod;
  std::vector<Eigen::MatrixXcd> ops;  // each product(cod) x product(dom)
};

enum class Activation { Relu, Sigmoid, Tanh, Softmax, Id };
std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view s);

enum class RealOp { Linear, BiasAdd, Activation, Add, ScalarMult, Const };
std::string_view to_string(RealOp op);
RealOp real_op_from_string(std::string_view s);

struct RealNode {
  RealOp op = RealOp::Add;
  std::vector<std::size_t> args;  // register indices
  Eigen::MatrixXd matrix;         // Linear
  Eigen::VectorXd vector;         // BiasAdd, Const
  Activation activation = Activation::Id;
  double scalar = 0.0;            // ScalarMult
  std::size_t dim = 0;            // dimension of the produced register
};

// Straight-line program over vector registers. Registers 0..dom.size()-1 hold
// the input factors; node i writes register dom.size()+i. Copy, discard and
// swap are register routing in `outputs`.
struct RealExpr {
  Dims dom, cod;
  std::vector<RealNode> nodes;
  std::vector<std::size_t> outputs;
};

using MorphSem = std::variant<FnTable, StochMatrix, KrausMap, RealExpr>;

Backend backend_of(const MorphSem& m);
const Dims& dom_of(const MorphSem& m);
const Dims& cod_of(const MorphSem& m);

// Structural morphisms.
MorphSem identity_sem(Backend b, const Dims& dims);
MorphSem copy_sem(Backend b, std::size_t size, std::size_t fanout);
MorphSem discard_sem(Backend b, const Dims& dims);
MorphSem swap_sem(Backend b, std::size_t first, std::size_t second);

// `f` then `g`.
MorphSem compose(const MorphSem& f, const MorphSem& g);
MorphSem tensor(const MorphSem& f, const MorphSem& g);
// New codomain factor i is old factor perm[i].
MorphSem permute_cod(const MorphSem& m, const std::vector<std::size_t>& perm);
// (box ⊗ id) ∘ m, where box consumes the leading codomain factors of m.
MorphSem apply_front(const MorphSem& box, const MorphSem& m);

bool is_channel(const MorphSem& m);
bool is_deterministic(const MorphSem& m);
MorphSem marginal(const MorphSem& m, const std::vector<std::size_t>& keep_outputs);

double norm_dist(const MorphSem& a, const MorphSem& b);
bool approx_equal(const MorphSem& a, const MorphSem& b, double eps);

// Tolerance used for "equal" under each backend.
double backend_tolerance(Backend b);

// Point state / sharp state at a basis index of a single factor.
MorphSem point_state(Backend b, std::size_t size, std::size_t index);
// Sharp state on several factors.
MorphSem point_state(Backend b, const Dims& dims, const std::vector<std::size_t>& indices);

// Helpers for specific backends.
Eigen::MatrixXcd choi(const KrausMap& k);
KrausMap compress(const KrausMap& k);
// Density matrix of a state (empty domain).
Eigen::MatrixXcd density(const KrausMap& state);
std::vector<Eigen::VectorXd> eval_real(const RealExpr& e, const std::vector<Eigen::VectorXd>& in);
// Throws DimensionMismatch unless registers, node dimensions and outputs agree.
void check_real_expr(const RealExpr& e);
// Converts a FnTable to its 0/1 matrix.
StochMatrix to_matrix(const FnTable& f);

// Flat index helpers (row-major).
std::vector<std::size_t> unflatten(std::size_t index, const Dims& dims);
std::size_t flatten(const std::vector<std::size_t>& digits, const Dims& dims);

}  // namespace compmodel
