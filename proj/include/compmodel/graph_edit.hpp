#pragma once

#include <set>
#include <string>
#include <vector>

#include "compmodel/diagram.hpp"

namespace compmodel {

// Mutable working copy of a diagram used by rewriting passes. Removed boxes
// and wires stay in place (flagged dead) so indices remain stable until
// finish() compacts them.
class GraphEdit {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit GraphEdit(const Diagram& d);

  const Signature& sig() const { return *sig_; }
  const SignaturePtr& sig_ptr() const { return sig_; }

  std::vector<Box> boxes;
  std::vector<bool> box_alive;
  std::vector<Wire> wires;
  std::vector<bool> wire_alive;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  std::size_t add_box(Box b);
  std::size_t add_wire(Endpoint from, Endpoint to, const std::string& var);
  void kill_box(std::size_t b);
  void kill_wire(std::size_t w);

  // Live wire ending at / starting from the endpoint, or npos.
  std::size_t wire_into(Endpoint to) const;
  std::size_t wire_from(Endpoint from) const;

  std::vector<std::string> inputs_of(std::size_t b) const;
  std::vector<std::string> outputs_of(std::size_t b) const;

  // Unique id derived from `base`.
  std::string fresh_id(const std::string& base);

  // Insert a discard box consuming the value at `source`, whose wire must already be removed.
  void discard_at(Endpoint source, const std::string& var);

  // Reroutes: the wire that arrived at `to` now comes from `source`.
  void connect(Endpoint source, Endpoint to, const std::string& var) { add_wire(source, to, var); }

  // Generator boxes added later may come from a larger signature.
  void set_signature(SignaturePtr sig) { sig_ = std::move(sig); }

  // Kills box b and every wire touching it. Returns the sources that fed its
  // inputs and the targets its outputs went to, in port order.
  std::pair<std::vector<Endpoint>, std::vector<Endpoint>> cut_box(std::size_t b);

  // Inserts `piece` with its input k fed from sources[k] and its output k going
  // to targets[k]. Returns the indices of the new boxes.
  std::vector<std::size_t> insert(const Diagram& piece, const std::vector<Endpoint>& sources,
                                  const std::vector<Endpoint>& targets);

  // Diagram boundary edits; ports of later inputs are renumbered.
  Endpoint add_input(const std::string& var);
  Endpoint add_output(const std::string& var);
  void remove_input(std::size_t k);
  void remove_output(std::size_t k);

  Diagram finish() const;

 private:
  SignaturePtr sig_;
  std::set<std::string> ids_;
};

}  // namespace compmodel
