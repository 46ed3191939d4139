#pragma once

#include <compare>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "compmodel/signature.hpp"

namespace compmodel {

enum class BoxKind { Gen, Copy, Discard, Swap };

std::string_view to_string(BoxKind kind);

struct Box {
  std::string id;
  BoxKind kind = BoxKind::Gen;
  std::string gen;         // Gen
  std::string var;         // Copy, Discard, Swap (first wire)
  std::string var2;        // Swap (second wire)
  std::size_t fanout = 0;  // Copy

  bool operator==(const Box&) const = default;
};

// A port on a box, or on the diagram boundary when box == kBoundary.
// As a wire source the boundary means a diagram input; as a target, an output.
struct Endpoint {
  static constexpr std::size_t kBoundary = std::numeric_limits<std::size_t>::max();
  std::size_t box = kBoundary;
  std::size_t port = 0;

  bool boundary() const { return box == kBoundary; }
  auto operator<=>(const Endpoint&) const = default;
};

struct Wire {
  Endpoint from;
  Endpoint to;
  std::string var;

  bool operator==(const Wire&) const = default;
};

class Diagram {
 public:
  Diagram() = default;
  Diagram(SignaturePtr sig, std::vector<Box> boxes, std::vector<Wire> wires,
          std::vector<std::string> inputs, std::vector<std::string> outputs);

  const SignaturePtr& signature() const { return sig_; }
  const std::vector<Box>& boxes() const { return boxes_; }
  const std::vector<Wire>& wires() const { return wires_; }
  const std::vector<std::string>& inputs() const { return inputs_; }
  const std::vector<std::string>& outputs() const { return outputs_; }

  std::optional<std::size_t> find_box(std::string_view id) const;

 private:
  SignaturePtr sig_;
  std::vector<Box> boxes_;
  std::vector<Wire> wires_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
};

struct Equation {
  Diagram lhs;
  Diagram rhs;
};

std::vector<std::string> box_inputs(const Signature& sig, const Box& box);
std::vector<std::string> box_outputs(const Signature& sig, const Box& box);

// Port-to-wire lookup tables for a diagram whose ports are each connected once.
struct Wiring {
  std::vector<std::vector<std::size_t>> in;   // in[box][port] -> wire index
  std::vector<std::vector<std::size_t>> out;  // out[box][port] -> wire index
  std::vector<std::size_t> input;             // diagram input -> wire index
  std::vector<std::size_t> output;            // diagram output -> wire index
};

// Throws InvalidDiagram if any port is dangling or multiply connected.
Wiring make_wiring(const Diagram& d);
// Box indices in a deterministic topological order; throws InvalidDiagram on a cycle.
std::vector<std::size_t> topological_order(const Diagram& d, const Wiring& w);

enum class ViolationKind {
  DanglingPort,
  MultiplyConnected,
  Cycle,
  TypeMismatch,
  LanguageViolation,
  UnknownGenerator,
  UnknownVariable,
  BadEndpoint,
  BadArity,
  DuplicateBoxId,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

std::vector<Violation> validate(const Diagram& d);
// Throws InvalidDiagram listing the first violation.
void require_valid(const Diagram& d);

Diagram from_generator(const SignaturePtr& sig, std::string_view gen);
Diagram identity(const SignaturePtr& sig, std::vector<std::string> vars);
Diagram compose_seq(const Diagram& d1, const Diagram& d2);
Diagram compose_par(const Diagram& d1, const Diagram& d2);

// Same diagram over a signature whose vocabulary includes the current one.
Diagram retarget(const Diagram& d, const SignaturePtr& sig);

// Sound rewriting to a canonical shape: copy fusion, copy/discard pruning,
// discard naturality for channel boxes, swap elimination, sharp states pushed
// through copies, dead channel subgraphs removed.
Diagram normalize(const Diagram& d);

// Port-graph isomorphism respecting ordered boundaries, without normalizing.
bool isomorphic(const Diagram& d1, const Diagram& d2);
// isomorphic(normalize(d1), normalize(d2)).
bool iso_equal(const Diagram& d1, const Diagram& d2);
// Isomorphism-invariant hash, for bucketing before isomorphic().
std::size_t structural_hash(const Diagram& d);

// True if some directed path leads from the source wire of input `in` to output `out`.
bool reaches(const Diagram& d, std::size_t in, std::size_t out);

// Incremental construction by wiring value handles. Each handle must be used
// exactly once; use copy() to fan out and discard() to drop.
class DiagramBuilder {
 public:
  struct Handle {
    Endpoint source;
    std::size_t serial = 0;
  };

  explicit DiagramBuilder(SignaturePtr sig);

  Handle input(const std::string& var);
  std::vector<Handle> add(std::string_view gen, const std::vector<Handle>& args,
                          std::string id = {});
  Handle add1(std::string_view gen, const std::vector<Handle>& args, std::string id = {});
  std::vector<Handle> copy(Handle h, std::size_t n, std::string id = {});
  void discard(Handle h, std::string id = {});
  std::pair<Handle, Handle> swap(Handle a, Handle b, std::string id = {});
  void output(Handle h);

  const std::string& var_of(Handle h) const;

  // Validates; throws InvalidDiagram if handles are left unused.
  Diagram build() const;

 private:
  std::string take_id(std::string id, const std::string& base);
  void consume(Handle h, Endpoint target);
  Handle produce(Endpoint source, const std::string& var);

  SignaturePtr sig_;
  std::vector<Box> boxes_;
  std::vector<Wire> wires_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::vector<std::string> handle_var_;
  std::vector<Endpoint> handle_source_;
  std::vector<bool> used_;
};

}  // namespace compmodel
