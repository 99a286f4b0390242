#include "sptq/state.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <functional>

namespace sptq {

namespace {

int bit_at(Eigen::Index index, int qubit, int num_qubits) {
  return static_cast<int>((index >> (num_qubits - 1 - qubit)) & 1);
}

void check_targets(std::span<const int> targets, int num_qubits) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= num_qubits)
      throw std::invalid_argument("qubit index " + std::to_string(targets[i]) +
                                  " out of range for " + std::to_string(num_qubits) + " qubits");
    for (std::size_t j = i + 1; j < targets.size(); ++j)
      if (targets[i] == targets[j])
        throw std::invalid_argument("duplicate qubit index " + std::to_string(targets[i]));
  }
}

}  // namespace

int BasisConvention::polarization_bit(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'H': return 0;
    case 'V': return 1;
    default:
      throw std::invalid_argument(std::string("not a polarization label: '") + c + "'");
  }
}

int BasisConvention::momentum_bit(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'T':
    case 'R': return 0;
    case 'B':
    case 'L': return 1;
    default:
      throw std::invalid_argument(std::string("not a momentum label: '") + c + "'");
  }
}

int qubit_count(Eigen::Index dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0)
    throw std::invalid_argument("state dimension " + std::to_string(dim) +
                                " is not a power of two");
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  return n;
}

Vector ket_from_label(std::string_view label) {
  const auto n = label.size();
  if (n != 2 && n != 4)
    throw std::invalid_argument("basis label must have 2 or 4 characters, got \"" +
                                std::string(label) + "\"");
  Eigen::Index index = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const char c = label[k];
    int bit;
    if (c == '0' || c == '1') {
      bit = c - '0';
    } else if (k % 2 == 0) {
      bit = BasisConvention::polarization_bit(c);
    } else {
      bit = BasisConvention::momentum_bit(c);
    }
    index = (index << 1) | bit;
  }
  Vector v = Vector::Zero(Eigen::Index{1} << n);
  v(index) = Complex(1.0, 0.0);
  return v;
}

std::string basis_label(Eigen::Index index, Eigen::Index dim) {
  const int n = qubit_count(dim);
  if (index < 0 || index >= dim)
    throw std::invalid_argument("basis index " + std::to_string(index) +
                                " out of range for dimension " + std::to_string(dim));
  std::string s = "|";
  for (int q = 0; q < n; ++q) s += static_cast<char>('0' + bit_at(index, q, n));
  s += ">";
  return s;
}

Vector tensor(const Vector& a, const Vector& b) {
  Vector out = kron(a, b);
  const double nrm = out.norm();
  if (nrm < kAnnihilationTol)
    throw std::invalid_argument("tensor product of (near-)zero states");
  return out / nrm;
}

Complex overlap(const Vector& a, const Vector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("overlap of states with different dimensions");
  return a.dot(b);  // Eigen's dot conjugates the left argument
}

Matrix embed_operator(const Matrix& op, std::span<const int> targets, int num_qubits) {
  check_targets(targets, num_qubits);
  const int k = static_cast<int>(targets.size());
  const Eigen::Index sub_dim = Eigen::Index{1} << k;
  if (op.rows() != sub_dim || op.cols() != sub_dim)
    throw std::invalid_argument("operator is " + std::to_string(op.rows()) + "x" +
                                std::to_string(op.cols()) + " but addresses " +
                                std::to_string(k) + " qubit(s)");
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;

  Eigen::Index target_mask = 0;
  for (int q : targets) target_mask |= Eigen::Index{1} << (num_qubits - 1 - q);

  auto sub_index = [&](Eigen::Index full) {
    Eigen::Index s = 0;
    for (int q : targets) s = (s << 1) | bit_at(full, q, num_qubits);
    return s;
  };

  Matrix out = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      if ((i & ~target_mask) != (j & ~target_mask)) continue;
      out(i, j) = op(sub_index(i), sub_index(j));
    }
  }
  return out;
}

Vector apply_unitary(const Matrix& u, const Vector& psi, std::span<const int> targets) {
  if (!is_unitary(u))
    throw std::invalid_argument("operator is not unitary within tolerance");
  const int n = qubit_count(psi.size());
  return embed_operator(u, targets, n) * psi;
}

DensityOp apply_unitary(const Matrix& u, const DensityOp& rho, std::span<const int> targets) {
  if (!is_unitary(u))
    throw std::invalid_argument("operator is not unitary within tolerance");
  const Matrix full = embed_operator(u, targets, rho.qubits());
  return DensityOp(full * rho.matrix() * full.adjoint());
}

DensityOp::DensityOp(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols())
    throw std::invalid_argument("density operator must be square");
  qubit_count(m_.rows());  // power-of-two check
  if (!is_hermitian(m_, kNormTol))
    throw std::invalid_argument("density operator is not Hermitian within tolerance");
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > kNormTol)
    throw std::invalid_argument("density operator trace " + std::to_string(tr) +
                                " differs from 1 beyond tolerance");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < kEigenvalueTol)
    throw std::invalid_argument("density operator has a negative eigenvalue beyond tolerance");
}

DensityOp DensityOp::pure(const Vector& psi) {
  const double nrm = psi.norm();
  if (std::abs(nrm - 1.0) > 1e-9)
    throw std::invalid_argument("pure-state constructor needs a normalized state");
  Vector v = psi / nrm;
  return DensityOp(v * v.adjoint());
}

DensityOp DensityOp::mixture(const std::vector<std::pair<double, DensityOp>>& parts) {
  if (parts.empty()) throw std::invalid_argument("mixture of zero components");
  const Eigen::Index dim = parts.front().second.dim();
  Matrix sum = Matrix::Zero(dim, dim);
  double wsum = 0.0;
  for (const auto& [w, rho] : parts) {
    if (w < -kNormTol) throw std::invalid_argument("mixture weight is negative");
    if (rho.dim() != dim) throw std::invalid_argument("mixture components differ in dimension");
    sum += w * rho.matrix();
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > kNormTol)
    throw std::invalid_argument("mixture weights sum to " + std::to_string(wsum) +
                                ", expected 1");
  return DensityOp(std::move(sum));
}

DensityOp DensityOp::maximally_mixed(Eigen::Index dim) {
  qubit_count(dim);
  return DensityOp(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

Postselected postselect(const Matrix& m_op, const DensityOp& rho) {
  if (m_op.rows() != rho.dim() || m_op.cols() != rho.dim())
    throw std::invalid_argument("measurement operator dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_op.adjoint() * m_op, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().maxCoeff() > 1.0 + kUnitaryTol)
    throw std::invalid_argument("measurement operator amplifies: M^dag M exceeds identity");
  Matrix updated = m_op * rho.matrix() * m_op.adjoint();
  const double p = updated.trace().real();
  Postselected out;
  out.probability = std::max(p, 0.0);
  if (p >= kAnnihilationTol) out.state = DensityOp(updated / p);
  return out;
}

PostselectedPure postselect(const Matrix& m_op, const Vector& psi) {
  if (m_op.rows() != psi.size() || m_op.cols() != psi.size())
    throw std::invalid_argument("measurement operator dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_op.adjoint() * m_op, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().maxCoeff() > 1.0 + kUnitaryTol)
    throw std::invalid_argument("measurement operator amplifies: M^dag M exceeds identity");
  Vector phi = m_op * psi;
  const double p = phi.squaredNorm();
  PostselectedPure out;
  out.probability = p;
  if (p >= kAnnihilationTol) out.state = phi / std::sqrt(p);
  return out;
}

Matrix partial_trace(const Matrix& rho, std::span<const int> keep, int num_qubits) {
  if (rho.rows() != rho.cols() || rho.rows() != (Eigen::Index{1} << num_qubits))
    throw std::invalid_argument("operator dimension does not match qubit count");
  check_targets(keep, num_qubits);
  const Eigen::Index dim = rho.rows();
  const Eigen::Index out_dim = Eigen::Index{1} << keep.size();

  Eigen::Index keep_mask = 0;
  for (int q : keep) keep_mask |= Eigen::Index{1} << (num_qubits - 1 - q);

  auto kept_index = [&](Eigen::Index full) {
    Eigen::Index s = 0;
    for (int q : keep) s = (s << 1) | bit_at(full, q, num_qubits);
    return s;
  };

  Matrix out = Matrix::Zero(out_dim, out_dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      if ((i & ~keep_mask) != (j & ~keep_mask)) continue;  // traced bits must match
      out(kept_index(i), kept_index(j)) += rho(i, j);
    }
  }
  return out;
}

double concurrence(const DensityOp& rho) {
  if (rho.dim() != 4)
    throw std::invalid_argument("concurrence is defined for two-qubit states");
  Matrix sy(2, 2);
  sy << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  const Matrix yy = kron(sy, sy);
  const Matrix rho_tilde = yy * rho.matrix().conjugate() * yy;
  Eigen::ComplexEigenSolver<Matrix> es(rho.matrix() * rho_tilde, false);
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i) lam[i] = std::sqrt(std::max(es.eigenvalues()(i).real(), 0.0));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

double fidelity(const DensityOp& rho, const Vector& target) {
  if (target.size() != rho.dim())
    throw std::invalid_argument("fidelity target dimension mismatch");
  if (std::abs(target.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("fidelity target must be normalized");
  return (target.adjoint() * rho.matrix() * target)(0).real();
}

double fidelity(const Vector& psi, const Vector& target) {
  return std::norm(overlap(target, psi));
}

}  // namespace sptq
