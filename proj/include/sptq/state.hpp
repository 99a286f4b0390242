// state.hpp
// State-vector and density-operator algebra on the 4-dim |PM> and 16-dim
// |P_S M_S P_I M_I> spaces: kets from labels, tensor products, projections,
// post-selection, partial traces, concurrence and fidelity.

#pragma once

#include "sptq/types.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace sptq {

/// Basis ket from a label. Accepts logical bit strings ("00", "0110") and the
/// physical alphabet ("HT", "VB", "HTVB"); length 2 gives a 4-dim single-photon
/// state, length 4 the 16-dim pair state. Throws std::invalid_argument on an
/// unknown character or wrong length.
Vector ket_from_label(std::string_view label);

/// Printable label ("|01>") for basis index i of a dim-4 or dim-16 space.
std::string basis_label(Eigen::Index index, Eigen::Index dim);

/// Kronecker product of two state vectors, renormalized. Supported dimension
/// pairs: 2x2 -> 4 and 4x4 -> 16.
Vector tensor(const Vector& a, const Vector& b);

/// Inner product <a|b>. Dimensions must match.
Complex overlap(const Vector& a, const Vector& b);

/// Embed an operator acting on `targets` (qubit indices, 0 = most significant)
/// into the full 2^num_qubits space. op must be 2^targets.size() square.
Matrix embed_operator(const Matrix& op, std::span<const int> targets, int num_qubits);

/// Apply a unitary to the addressed qubits of a pure state. U is validated to
/// be unitary within 1e-10; targets must be distinct and in range.
Vector apply_unitary(const Matrix& u, const Vector& psi, std::span<const int> targets);

class DensityOp;
DensityOp apply_unitary(const Matrix& u, const DensityOp& rho, std::span<const int> targets);

/// Hermitian, unit-trace, positive operator on a 4- or 16-dim space.
class DensityOp {
 public:
  /// Validates Hermiticity (1e-12), unit trace (1e-12) and positivity
  /// (eigenvalues >= -1e-10); throws std::invalid_argument otherwise.
  explicit DensityOp(Matrix m);

  static DensityOp pure(const Vector& psi);
  static DensityOp mixture(const std::vector<std::pair<double, DensityOp>>& parts);
  static DensityOp maximally_mixed(Eigen::Index dim);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  int qubits() const { return qubit_count(m_.rows()); }

 private:
  Matrix m_;
};

struct Postselected {
  double probability = 0.0;
  // Empty when the projection annihilated the state (probability < 1e-15).
  std::optional<DensityOp> state;
};

struct PostselectedPure {
  double probability = 0.0;
  std::optional<Vector> state;
};

/// Measurement-operator update rho -> M rho M^dag / p with p = tr(M rho M^dag).
/// M must satisfy M^dag M <= 1 (+1e-10). When p < 1e-15 no renormalized state
/// is returned: post-selection annihilated the state.
Postselected postselect(const Matrix& m_op, const DensityOp& rho);
PostselectedPure postselect(const Matrix& m_op, const Vector& psi);

/// Trace out all qubits not listed in `keep` (indices into the qubit register,
/// 0 = most significant). Result is ordered by the kept indices.
Matrix partial_trace(const Matrix& rho, std::span<const int> keep, int num_qubits);

/// Wootters concurrence of a two-qubit density operator: 0 for separable
/// states, 1 for Bell states.
double concurrence(const DensityOp& rho);

/// <target|rho|target> for a pure target state of matching dimension.
double fidelity(const DensityOp& rho, const Vector& target);
double fidelity(const Vector& psi, const Vector& target);

}  // namespace sptq
