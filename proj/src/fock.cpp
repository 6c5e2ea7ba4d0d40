#include "fock.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>

#include "errors.hpp"

namespace illumina {

ModeSpace::ModeSpace(std::vector<std::size_t> dims, std::vector<std::string> labels)
    : dims_(std::move(dims)), labels_(std::move(labels)) {
  if (dims_.size() != labels_.size())
    throw InvalidArgument("ModeSpace: dims and labels differ in length");
  if (dims_.empty())
    throw InvalidArgument("ModeSpace: at least one mode is required");
  std::set<std::string> seen;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (dims_[k] == 0)
      throw DimensionError("ModeSpace: mode '" + labels_[k] + "' has dimension 0");
    if (!seen.insert(labels_[k]).second)
      throw InvalidArgument("ModeSpace: duplicate label '" + labels_[k] + "'");
  }
  strides_.assign(dims_.size(), 1);
  for (std::size_t k = dims_.size(); k-- > 1;)
    strides_[k - 1] = strides_[k] * dims_[k];
  total_ = strides_[0] * dims_[0];
}

bool ModeSpace::has(std::string_view label) const noexcept {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t ModeSpace::index_of(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end())
    throw InvalidArgument("unknown mode label '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t ModeSpace::flat_index(const std::vector<std::size_t>& occupation) const {
  if (occupation.size() != dims_.size())
    throw DimensionError("flat_index: occupation tuple has wrong length");
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (occupation[k] >= dims_[k])
      throw DimensionError("flat_index: occupation exceeds mode dimension");
    idx += occupation[k] * strides_[k];
  }
  return idx;
}

StateVector::StateVector(ModeSpace space, Vector amp, double tail_mass)
    : space_(std::move(space)), amp_(std::move(amp)), tail_mass_(tail_mass) {
  if (static_cast<std::size_t>(amp_.size()) != space_.total_dim())
    throw DimensionError("StateVector: amplitude length does not match the space");
  const double n = amp_.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw InvalidArgument("StateVector: amplitudes must have finite nonzero norm");
  amp_ /= n;
}

DensityOperator StateVector::density() const {
  return DensityOperator(space_, amp_ * amp_.adjoint(), tail_mass_);
}

DensityOperator::DensityOperator(ModeSpace space, Matrix mat, double tail_mass)
    : space_(std::move(space)), mat_(std::move(mat)), tail_mass_(tail_mass) {
  const auto d = static_cast<Eigen::Index>(space_.total_dim());
  if (mat_.rows() != d || mat_.cols() != d)
    throw DimensionError("DensityOperator: matrix size does not match the space");
  const double scale = std::max(1.0, mat_.cwiseAbs().maxCoeff());
  if ((mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw NumericalError("DensityOperator: matrix is not Hermitian");
  mat_ = 0.5 * (mat_ + mat_.adjoint()).eval();
  const double tr = mat_.trace().real();
  if (std::abs(tr - 1.0) > 1e-10 + tail_mass_)
    throw NumericalError("DensityOperator: trace " + std::to_string(tr) + " is not 1");
}

Matrix EigenSystem::reconstruct() const {
  return vectors * values.cast<cplx>().asDiagonal() * vectors.adjoint();
}

Matrix annihilation(std::size_t dim) {
  if (dim == 0) throw DimensionError("annihilation: dimension must be at least 1");
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix a = Matrix::Zero(d, d);
  for (Eigen::Index n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix creation(std::size_t dim) { return annihilation(dim).adjoint(); }

Matrix number_operator(std::size_t dim) {
  if (dim == 0) throw DimensionError("number_operator: dimension must be at least 1");
  Matrix n = Matrix::Zero(dim, dim);
  for (std::size_t k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

Matrix embed(const Matrix& op, std::string_view mode, const ModeSpace& space) {
  const std::size_t k = space.index_of(mode);
  const auto dk = static_cast<Eigen::Index>(space.dims()[k]);
  if (op.rows() != dk || op.cols() != dk)
    throw DimensionError("embed: operator size does not match mode '" + std::string(mode) + "'");
  const std::size_t stride = space.stride(k);
  const std::size_t total = space.total_dim();
  Matrix out = Matrix::Zero(total, total);
  // Index = outer*dk*stride + n*stride + inner.
  const std::size_t outer_count = total / (space.dims()[k] * stride);
  for (std::size_t outer = 0; outer < outer_count; ++outer)
    for (std::size_t inner = 0; inner < stride; ++inner) {
      const std::size_t base = outer * space.dims()[k] * stride + inner;
      for (Eigen::Index r = 0; r < dk; ++r)
        for (Eigen::Index c = 0; c < dk; ++c) {
          const cplx v = op(r, c);
          if (v != cplx(0.0)) out(base + r * stride, base + c * stride) = v;
        }
    }
  return out;
}

ModeSpace subspace(const ModeSpace& space, const std::vector<std::string>& keep) {
  if (keep.empty()) throw InvalidArgument("partial_trace: keep set is empty");
  std::vector<bool> kept(space.modes(), false);
  for (const auto& l : keep) kept[space.index_of(l)] = true;
  std::vector<std::size_t> dims;
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < space.modes(); ++k)
    if (kept[k]) {
      dims.push_back(space.dims()[k]);
      labels.push_back(space.labels()[k]);
    }
  return ModeSpace(std::move(dims), std::move(labels));
}

namespace {

// Offsets into the full index space of every joint index over a subset of modes.
std::vector<std::size_t> offsets_for(const ModeSpace& space, const std::vector<bool>& select) {
  std::vector<std::size_t> offs{0};
  for (std::size_t k = 0; k < space.modes(); ++k) {
    if (!select[k]) continue;
    std::vector<std::size_t> next;
    next.reserve(offs.size() * space.dims()[k]);
    for (std::size_t o : offs)
      for (std::size_t n = 0; n < space.dims()[k]; ++n) next.push_back(o + n * space.stride(k));
    offs = std::move(next);
  }
  return offs;
}

} // namespace

Matrix partial_trace(const Matrix& mat, const ModeSpace& space,
                     const std::vector<std::string>& keep, ModeSpace* reduced) {
  const auto d = static_cast<Eigen::Index>(space.total_dim());
  if (mat.rows() != d || mat.cols() != d)
    throw DimensionError("partial_trace: matrix size does not match the space");
  ModeSpace sub = subspace(space, keep);
  std::vector<bool> kept(space.modes(), false);
  for (const auto& l : keep) kept[space.index_of(l)] = true;
  std::vector<bool> traced(space.modes());
  for (std::size_t k = 0; k < space.modes(); ++k) traced[k] = !kept[k];

  const auto kept_off = offsets_for(space, kept);
  const auto traced_off = offsets_for(space, traced);
  const auto dk = static_cast<Eigen::Index>(kept_off.size());
  Matrix out = Matrix::Zero(dk, dk);
  for (std::size_t t : traced_off)
    for (Eigen::Index c = 0; c < dk; ++c)
      for (Eigen::Index r = 0; r < dk; ++r) out(r, c) += mat(kept_off[r] + t, kept_off[c] + t);
  if (reduced) *reduced = std::move(sub);
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho, const std::vector<std::string>& keep) {
  ModeSpace sub({1}, {"_"});
  Matrix m = partial_trace(rho.mat(), rho.space(), keep, &sub);
  return DensityOperator(std::move(sub), std::move(m), rho.tail_mass());
}

bool is_hermitian(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

EigenSystem hermitian_eigen(const Matrix& a) {
  if (!is_hermitian(a)) throw NumericalError("hermitian_eigen: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) throw NumericalError("hermitian_eigen: solver failed");
  const Eigen::Index n = a.rows();
  EigenSystem es{RealVector(n), Matrix(n, n)};
  // Eigen returns ascending order.
  for (Eigen::Index k = 0; k < n; ++k) {
    es.values(k) = solver.eigenvalues()(n - 1 - k);
    es.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return es;
}

EigenSystem hermitian_eigen(const DensityOperator& rho) { return hermitian_eigen(rho.mat()); }

Matrix matrix_power(const EigenSystem& es, double s, double floor) {
  if (!(s >= 0.0 && s <= 1.0)) throw InvalidArgument("matrix_power: exponent outside [0, 1]");
  RealVector p(es.values.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    const double l = es.values(k);
    p(k) = l > floor ? std::pow(l, s) : 0.0;
  }
  return es.vectors * p.cast<cplx>().asDiagonal() * es.vectors.adjoint();
}

Matrix matrix_power(const DensityOperator& rho, double s) {
  return matrix_power(hermitian_eigen(rho), s);
}

double trace_norm(const Matrix& a) {
  if (!is_hermitian(a)) throw NumericalError("trace_norm: input is not Hermitian");
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().sum();
}

double frobenius_norm(const Matrix& a) { return a.norm(); }

cplx expectation(const Matrix& op, const StateVector& psi) {
  if (op.rows() != psi.amp().size() || op.cols() != psi.amp().size())
    throw DimensionError("expectation: operator size does not match the state");
  return psi.amp().dot(op * psi.amp());
}

double expectation(const Matrix& op, const DensityOperator& rho) {
  if (op.rows() != rho.mat().rows() || op.cols() != rho.mat().cols())
    throw DimensionError("expectation: operator size does not match the state");
  return (op * rho.mat()).trace().real();
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  std::vector<std::size_t> dims = a.space().dims();
  std::vector<std::string> labels = a.space().labels();
  dims.insert(dims.end(), b.space().dims().begin(), b.space().dims().end());
  labels.insert(labels.end(), b.space().labels().begin(), b.space().labels().end());
  Vector amp(a.amp().size() * b.amp().size());
  for (Eigen::Index i = 0; i < a.amp().size(); ++i)
    amp.segment(i * b.amp().size(), b.amp().size()) = a.amp()(i) * b.amp();
  const double tail = 1.0 - (1.0 - a.tail_mass()) * (1.0 - b.tail_mass());
  return StateVector(ModeSpace(std::move(dims), std::move(labels)), std::move(amp), tail);
}

} // namespace illumina
