// types.hpp
// Dense complex linear-algebra types for the single-photon two-qubit simulator.
// The photon carries a polarization qubit (H/V) and a momentum qubit (T/B in,
// R/L out); states live in the 4-dim |PM> basis, photon pairs in the 16-dim
// |P_S M_S P_I M_I> basis.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <stdexcept>
#include <string>

namespace sptq {

template <typename Scalar = double>
using ComplexT = std::complex<Scalar>;

template <typename Scalar = double>
using VectorT = Eigen::Matrix<ComplexT<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar = double>
using MatrixT = Eigen::Matrix<ComplexT<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

using Complex = ComplexT<double>;
using Vector = VectorT<double>;
using Matrix = MatrixT<double>;
using RealVector = Eigen::VectorXd;

// Numerical tolerances used by the state-algebra invariants.
inline constexpr double kNormTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kEigenvalueTol = -1e-10;
inline constexpr double kAnnihilationTol = 1e-15;

/// Kronecker product of two dense expressions.
template <typename DerivedA, typename DerivedB>
MatrixT<double> kron(const Eigen::MatrixBase<DerivedA>& a,
                     const Eigen::MatrixBase<DerivedB>& b) {
  MatrixT<double> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& u, double tol = kUnitaryTol) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = kNormTol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

// Qubit label conventions. Logical 0 is identified with H, T and R; logical 1
// with V, B and L. The input (T/B) and output (R/L) momentum labels name the
// same logical qubit before and after the gate.
struct BasisConvention {
  static constexpr char polarization_label(int bit) { return bit == 0 ? 'H' : 'V'; }
  static constexpr char momentum_input_label(int bit) { return bit == 0 ? 'T' : 'B'; }
  static constexpr char momentum_output_label(int bit) { return bit == 0 ? 'R' : 'L'; }

  static int polarization_bit(char c);
  static int momentum_bit(char c);  // accepts T/B and R/L
};

/// Number of qubits for a state dimension (4 -> 2, 16 -> 4).
int qubit_count(Eigen::Index dim);

}  // namespace sptq
