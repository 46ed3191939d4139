#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace compmodel {

class Diagram;
struct Equation;

// Which structural boxes diagrams over a signature may contain.
enum class Language { Monoidal, Discard, CD };

std::string_view to_string(Language lang);
Language language_from_string(std::string_view s);

struct Generator {
  std::string name;
  std::vector<std::string> dom;
  std::vector<std::string> cod;
  bool channel = false;
  bool deterministic = false;
  bool sharp = false;

  bool operator==(const Generator&) const = default;
};

class Signature {
 public:
  Signature();
  Signature(const Signature&);
  Signature(Signature&&) noexcept;
  Signature& operator=(const Signature&);
  Signature& operator=(Signature&&) noexcept;
  ~Signature();

  Language language() const { return language_; }
  const std::vector<std::string>& variables() const { return variables_; }
  const std::vector<Generator>& generators() const { return generators_; }
  const std::vector<Equation>& equations() const { return equations_; }

  bool has_variable(std::string_view v) const;
  const Generator* find_generator(std::string_view name) const;
  // Throws UnresolvedReference when absent.
  const Generator& generator(std::string_view name) const;

 private:
  friend std::shared_ptr<const Signature> build_signature(std::vector<std::string>,
                                                          std::vector<Generator>,
                                                          std::vector<Equation>, Language);

  Language language_ = Language::CD;
  std::vector<std::string> variables_;
  std::vector<Generator> generators_;
  std::vector<Equation> equations_;
  std::map<std::string, std::size_t, std::less<>> gen_index_;
  std::map<std::string, std::size_t, std::less<>> var_index_;
};

using SignaturePtr = std::shared_ptr<const Signature>;

// Validates and freezes a signature. Equation diagrams must be built over a
// signature whose vocabulary is contained in the new one (typically the same
// variables and generators without equations).
SignaturePtr build_signature(std::vector<std::string> variables, std::vector<Generator> generators,
                             std::vector<Equation> equations, Language language);

// Adds variables and generators; equations are carried over.
SignaturePtr extend_signature(const SignaturePtr& base, std::vector<std::string> variables,
                              std::vector<Generator> generators);

// Same vocabulary copy without equations.
SignaturePtr strip_equations(const SignaturePtr& sig);

// Same variables, generators and language (equations ignored).
bool same_vocabulary(const Signature& a, const Signature& b);
// Every variable and generator of `small` appears identically in `big`.
bool vocabulary_includes(const Signature& big, const Signature& small);

struct SignatureMap {
  SignaturePtr source;
  SignaturePtr target;
  std::map<std::string, std::string> var_map;
  std::map<std::string, std::string> gen_map;
  bool total = false;
};

// Checks the partial-map condition and pointwise typing; computes `total`.
// Equation preservation is checked semantically (see check_map_equations).
SignatureMap make_signature_map(SignaturePtr source, SignaturePtr target,
                                std::map<std::string, std::string> var_map,
                                std::map<std::string, std::string> gen_map);
SignatureMap identity_map(const SignaturePtr& sig);

Diagram apply_map(const SignatureMap& m, const Diagram& d);
SignatureMap compose_maps(const SignatureMap& first, const SignatureMap& second);

}  // namespace compmodel
