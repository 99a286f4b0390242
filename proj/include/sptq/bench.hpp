// bench.hpp
// Line-oriented text description of an optical bench, parsed and compiled
// into a Pipeline. The format is part of the public contract; the grammar is
// documented in the README.

#pragma once

#include "sptq/pipeline.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sptq {

struct BenchStatement {
  std::string keyword;            // lowercased
  std::vector<std::string> args;  // raw argument tokens, photon tag excluded
  std::optional<Photon> photon;
  int line = 0;
};

struct BenchProgram {
  std::vector<BenchStatement> statements;
};

/// Parse or compile failure with the source line and the offending token.
class BenchError : public std::runtime_error {
 public:
  BenchError(int line, std::string token, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line),
        token_(std::move(token)) {}
  int line() const { return line_; }
  const std::string& token() const { return token_; }

 private:
  int line_;
  std::string token_;
};

/// Parses bench text: one statement per non-empty, non-comment line ('#'
/// starts a comment). Keywords: source, hwp, pcnot, mcnot, attenuator, block,
/// analyzer1, analyzer2. Angles require a deg or rad suffix. A trailing
/// signal|idler token selects the photon. Throws BenchError on unknown
/// keywords, wrong arity, non-numeric arguments, or missing angle units.
BenchProgram parse_bench(std::string_view text);

/// Canonical text for a program; parse(pretty_print(parse(text))) equals
/// parse(text).
std::string pretty_print(const BenchProgram& prog);

/// Compiles to a Pipeline. The source statement (first line, optional)
/// declares the input: "source pair" is the down-conversion photon-pair
/// state, "source <label>" a basis state; the default is the single-photon
/// |00>. pcnot expands to the gate with its imperfection elements. Throws
/// BenchError when an idler tag appears on a single-photon bench or an
/// analyzer is not the final statement.
Pipeline compile_bench(const BenchProgram& prog, const ImperfectionSet& imp);

/// The photon-pair source state produced by the down-conversion crystal,
/// (|0110> + |0011>) / sqrt(2) in the |P_S M_S P_I M_I> basis.
Vector pair_source_state();

}  // namespace sptq
