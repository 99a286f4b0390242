// pipeline.hpp
// Ordered element lists applied to a declared source state, with success
// probability tracked through loss and post-selection.

#pragma once

#include "sptq/elements.hpp"
#include "sptq/state.hpp"

#include <optional>
#include <vector>

namespace sptq {

struct Pipeline {
  Vector initial;                   // source state, 4- or 16-dim
  std::vector<Element> elements;    // applied in order
  Eigen::Index dimension = 4;
  ImperfectionSet imperfections;    // consulted by Detection elements at run time
  std::vector<std::string> labels;  // provenance, one entry per element

  void push(Element e);
  /// Throws when an element addresses a photon or qubit outside the declared
  /// dimension, or when a Detection/analyzer element is not last.
  void validate() const;
};

struct PipelineOutcome {
  // Product of all post-selection and loss factors; includes the detection
  // probability when the pipeline ends in a Detection element.
  double probability = 1.0;
  // Final normalized state. Empty after a terminal Detection element or when
  // post-selection annihilated the state.
  std::optional<DensityOp> state;
  bool annihilated = false;
};

/// Runs the pipeline on its declared source. phi and path_mismatch feed a
/// terminal Detection element (fringe phase, meters of path difference); both
/// are ignored otherwise. For a photon-pair state a Detection element
/// analyzes its photon's qubits with the partner photon traced out, which
/// models unconditional unit-efficiency detection of the partner.
PipelineOutcome run_pipeline(const Pipeline& p, double phi = 0.0, double path_mismatch = 0.0);

/// Same, on a caller-supplied source state of matching dimension.
PipelineOutcome run_pipeline(const Pipeline& p, const Vector& source, double phi = 0.0,
                             double path_mismatch = 0.0);

/// Composed matrix of a purely unitary pipeline (throws if any element is not
/// Unitary). Used to check compiled benches against products of gate matrices.
Matrix composed_unitary(const Pipeline& p);

}  // namespace sptq
