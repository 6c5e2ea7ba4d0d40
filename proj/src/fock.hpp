#pragma once

// Dense linear algebra on truncated Fock spaces.
//
// Joint index convention (shared by every module): row-major over the mode
// list, i.e. for modes (m0, m1, ..., mk) with dimensions (d0, ..., dk) the
// basis state |n0, n1, ..., nk> sits at ((n0*d1 + n1)*d2 + n2)*... + nk.

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace illumina {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Eigenvalues at or below this (after trace normalisation) count as zero when
/// deciding supports for matrix powers, QFI and Chernoff traces.
inline constexpr double kEigenFloor = 1e-12;

class ModeSpace {
public:
  ModeSpace(std::vector<std::size_t> dims, std::vector<std::string> labels);

  std::size_t modes() const noexcept { return dims_.size(); }
  std::size_t total_dim() const noexcept { return total_; }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  bool has(std::string_view label) const noexcept;
  /// Position of a mode in the ordering; throws InvalidArgument for unknown labels.
  std::size_t index_of(std::string_view label) const;
  std::size_t dim(std::string_view label) const { return dims_[index_of(label)]; }
  std::size_t stride(std::size_t mode) const noexcept { return strides_[mode]; }

  /// Joint index of a per-mode occupation tuple.
  std::size_t flat_index(const std::vector<std::size_t>& occupation) const;

  bool operator==(const ModeSpace& other) const noexcept {
    return dims_ == other.dims_ && labels_ == other.labels_;
  }

private:
  std::vector<std::size_t> dims_;
  std::vector<std::string> labels_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 1;
};

class DensityOperator;

/// Normalised pure state. The constructor renormalises; `tail_mass` records
/// probability discarded by truncation before renormalisation.
class StateVector {
public:
  StateVector(ModeSpace space, Vector amp, double tail_mass = 0.0);

  const ModeSpace& space() const noexcept { return space_; }
  const Vector& amp() const noexcept { return amp_; }
  double tail_mass() const noexcept { return tail_mass_; }

  DensityOperator density() const;

private:
  ModeSpace space_;
  Vector amp_;
  double tail_mass_;
};

/// Hermitian, unit-trace operator. Construction checks hermiticity (and
/// symmetrises away round-off) and the trace.
class DensityOperator {
public:
  DensityOperator(ModeSpace space, Matrix mat, double tail_mass = 0.0);

  const ModeSpace& space() const noexcept { return space_; }
  const Matrix& mat() const noexcept { return mat_; }
  double tail_mass() const noexcept { return tail_mass_; }
  double trace() const { return mat_.trace().real(); }

private:
  ModeSpace space_;
  Matrix mat_;
  double tail_mass_;
};

struct EigenSystem {
  RealVector values; // descending
  Matrix vectors;    // columns are eigenvectors

  Matrix reconstruct() const;
};

/// Single-mode annihilation operator, A(n-1, n) = sqrt(n).
Matrix annihilation(std::size_t dim);
Matrix creation(std::size_t dim);
Matrix number_operator(std::size_t dim);

/// op acting on `mode`, identity on every other mode of `space`.
Matrix embed(const Matrix& op, std::string_view mode, const ModeSpace& space);

/// Reduced operator on the kept modes (in the space's mode order).
Matrix partial_trace(const Matrix& mat, const ModeSpace& space,
                     const std::vector<std::string>& keep, ModeSpace* reduced = nullptr);
DensityOperator partial_trace(const DensityOperator& rho, const std::vector<std::string>& keep);

/// The sub-space spanned by `keep`, preserving mode order.
ModeSpace subspace(const ModeSpace& space, const std::vector<std::string>& keep);

bool is_hermitian(const Matrix& a, double tol = 1e-10);

EigenSystem hermitian_eigen(const Matrix& a);
EigenSystem hermitian_eigen(const DensityOperator& rho);

/// rho^s with eigenvalues at or below the floor mapped to zero (0^0 := 0).
Matrix matrix_power(const EigenSystem& es, double s, double floor = kEigenFloor);
Matrix matrix_power(const DensityOperator& rho, double s);

/// Sum of absolute eigenvalues of a Hermitian matrix.
double trace_norm(const Matrix& a);

double frobenius_norm(const Matrix& a);

cplx expectation(const Matrix& op, const StateVector& psi);
double expectation(const Matrix& op, const DensityOperator& rho);

/// Tensor product of two state vectors; the spaces are concatenated.
StateVector tensor(const StateVector& a, const StateVector& b);

} // namespace illumina
