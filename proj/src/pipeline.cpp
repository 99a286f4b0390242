#include "sptq/pipeline.hpp"

#include <cmath>

namespace sptq {

namespace {

// Element targets are photon-local; shift them into the pair space when the
// element addresses the idler.
std::vector<int> full_targets(const Element& e, int num_qubits) {
  const int offset = (e.photon == Photon::Idler) ? 2 : 0;
  std::vector<int> t;
  t.reserve(e.targets.size());
  for (int q : e.targets) t.push_back(q + offset);
  for (int q : t)
    if (q >= num_qubits)
      throw std::invalid_argument("element '" + e.label + "' addresses qubit " +
                                  std::to_string(q) + " beyond the bench dimension");
  return t;
}

}  // namespace

void Pipeline::push(Element e) {
  labels.push_back(e.label);
  elements.push_back(std::move(e));
}

void Pipeline::validate() const {
  if (dimension != 4 && dimension != 16)
    throw std::invalid_argument("pipeline dimension must be 4 or 16");
  if (initial.size() != dimension)
    throw std::invalid_argument("source state does not match the declared dimension");
  const int n = qubit_count(dimension);
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const Element& e = elements[i];
    if (dimension == 4 && e.photon == Photon::Idler)
      throw std::invalid_argument("element '" + e.label +
                                  "' addresses the idler on a single-photon bench");
    full_targets(e, n);
    if (e.kind == ElementKind::Detection && i + 1 != elements.size())
      throw std::invalid_argument("analyzer element '" + e.label +
                                  "' must be the last element");
    switch (e.kind) {
      case ElementKind::Unitary:
        if (e.ops.size() != 1 || !is_unitary(e.ops[0]))
          throw std::invalid_argument("element '" + e.label + "' is not unitary");
        break;
      case ElementKind::Channel: {
        if (e.ops.empty())
          throw std::invalid_argument("channel '" + e.label + "' has no Kraus operators");
        Matrix sum = Matrix::Zero(e.ops[0].rows(), e.ops[0].cols());
        for (const Matrix& k : e.ops) sum += k.adjoint() * k;
        Eigen::SelfAdjointEigenSolver<Matrix> es(sum, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().maxCoeff() > 1.0 + kUnitaryTol)
          throw std::invalid_argument("channel '" + e.label + "' amplifies");
        break;
      }
      case ElementKind::PostSelect: {
        if (e.ops.size() != 1)
          throw std::invalid_argument("post-selection '" + e.label + "' needs one operator");
        Eigen::SelfAdjointEigenSolver<Matrix> es(e.ops[0].adjoint() * e.ops[0],
                                                 Eigen::EigenvaluesOnly);
        if (es.eigenvalues().maxCoeff() > 1.0 + kUnitaryTol)
          throw std::invalid_argument("post-selection '" + e.label + "' amplifies");
        break;
      }
      case ElementKind::Detection:
        break;
    }
  }
}

PipelineOutcome run_pipeline(const Pipeline& p, double phi, double path_mismatch) {
  return run_pipeline(p, p.initial, phi, path_mismatch);
}

PipelineOutcome run_pipeline(const Pipeline& p, const Vector& source, double phi,
                             double path_mismatch) {
  p.validate();
  if (source.size() != p.dimension)
    throw std::invalid_argument("source state does not match the pipeline dimension");
  const int n = qubit_count(p.dimension);

  DensityOp rho = DensityOp::pure(source);
  PipelineOutcome out;

  for (const Element& e : p.elements) {
    const std::vector<int> targets = full_targets(e, n);
    switch (e.kind) {
      case ElementKind::Unitary: {
        rho = apply_unitary(e.ops[0], rho, targets);
        break;
      }
      case ElementKind::Channel: {
        Matrix next = Matrix::Zero(p.dimension, p.dimension);
        for (const Matrix& k : e.ops) {
          const Matrix kf = embed_operator(k, targets, n);
          next += kf * rho.matrix() * kf.adjoint();
        }
        const double tr = next.trace().real();
        out.probability *= std::max(tr, 0.0);
        if (tr < kAnnihilationTol) {
          out.annihilated = true;
          out.probability = 0.0;
          return out;
        }
        rho = DensityOp(next / tr);
        break;
      }
      case ElementKind::PostSelect: {
        const Matrix mf = embed_operator(e.ops[0], targets, n);
        Postselected ps = postselect(mf, rho);
        out.probability *= ps.probability;
        if (!ps.state) {
          out.annihilated = true;
          out.probability = 0.0;
          return out;
        }
        rho = *ps.state;
        break;
      }
      case ElementKind::Detection: {
        Matrix reduced = rho.matrix();
        if (p.dimension == 16) {
          const int keep[] = {targets[0], targets[1]};
          reduced = partial_trace(reduced, keep, n);
        }
        const double det =
            analyzer_II_prob(DensityOp(std::move(reduced)), e.analysis_angle, phi,
                             p.imperfections, path_mismatch);
        out.probability *= std::max(det, 0.0);
        out.state.reset();
        return out;
      }
    }
  }
  out.state = std::move(rho);
  return out;
}

Matrix composed_unitary(const Pipeline& p) {
  p.validate();
  const int n = qubit_count(p.dimension);
  Matrix u = Matrix::Identity(p.dimension, p.dimension);
  for (const Element& e : p.elements) {
    if (e.kind != ElementKind::Unitary)
      throw std::invalid_argument("pipeline contains non-unitary element '" + e.label + "'");
    u = embed_operator(e.ops[0], full_targets(e, n), n) * u;
  }
  return u;
}

}  // namespace sptq
