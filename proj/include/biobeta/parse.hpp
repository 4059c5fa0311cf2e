// Parser for the term language and for specification files (.biob / .biot),
// with positioned diagnostics. Comments run from '#' to end of line.
#pragma once

#include <string>
#include <vector>

#include "biobeta/ast.hpp"
#include "biobeta/solutions.hpp"
#include "biobeta/membrane.hpp"

namespace biobeta {

struct Diagnostic {
  enum class Severity : uint8_t { Error, Warning };
  Severity severity = Severity::Error;
  size_t begin = 0, end = 0;  // byte span
  int line = 1, column = 1;
  std::string message;
  std::string section;  // "signature", "rule <id>", "system <name>", "term", ...

  std::string str() const;
};

struct ParseResult {
  SystemPtr system;
  MembranePtr membrane;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

// Standalone term parsers. The signature, when given, is used for
// arity/polarity diagnostics; without it only the grammar is checked.
ParseResult parse_term(const std::string& text, const Signature* sig = nullptr);
ParseResult parse_membrane_term(const std::string& text, const Signature* sig = nullptr);

// A parsed specification file, prior to rule/config validation.
struct SpecFile {
  Signature signature;
  std::vector<ProteinRule> rules;
  std::vector<PinchConfig> pinches;
  std::vector<FuseConfig> fuses;
  std::vector<std::pair<std::string, SystemPtr>> systems;
  std::vector<Diagnostic> diagnostics;

  bool ok() const;
  const SystemPtr* find_system(const std::string& name) const;
};

// Full-file parse; collects every diagnostic instead of failing fast.
SpecFile parse_spec(const std::string& text);

}  // namespace biobeta
