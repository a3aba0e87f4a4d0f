#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gftmark {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Graph-frequency coefficients of one frame.
struct GraphSpectrum {
  ComplexVector coefficients;

  std::size_t size() const { return coefficients.size(); }
};

/// Combined graph k-shift operator: the binary circulant matrix whose entry
/// (i, j) is 1 iff (j - i) mod N < k. It is also the adjacency (and weight)
/// matrix of the directed graph over the N samples of a frame.
class ShiftOperator {
 public:
  /// Throws DimensionError unless N >= 2 and 1 <= k <= N.
  ShiftOperator(std::size_t n, std::size_t k);

  std::size_t size() const { return n_; }
  std::size_t order() const { return k_; }

  /// Membership rule; requires i, j < N.
  bool entry(std::size_t i, std::size_t j) const { return (j + n_ - i) % n_ < k_; }

  /// Realized N x N binary matrix.
  Eigen::MatrixXd dense() const;

  /// y_i = sum_{t<k} x_{(i+t) mod N}, in O(N k).
  std::vector<double> apply(std::span<const double> frame) const;

 private:
  std::size_t n_;
  std::size_t k_;
};

ShiftOperator build_shift_operator(std::size_t n, std::size_t k);

/// Pure t-shift gamma_t: entry (i, j) is 1 iff (j - i) mod N == t.
Eigen::MatrixXd pure_shift_matrix(std::size_t n, std::size_t t);

std::vector<double> shift_apply(const ShiftOperator& op, std::span<const double> frame);

/// Eigenvalues of the operator paired with the canonical DFT eigenvectors:
/// lambda_j = sum_{t<k} exp(2 pi i t j / N). lambda_0 == k.
ComplexVector circulant_eigenvalues(const ShiftOperator& op);

/// Dense eigenbasis of a circulant operator. Q holds the eigenvectors as
/// columns, F = Q^-1 = Q^H is the graph Fourier matrix.
struct FourierBasis {
  Eigen::MatrixXcd forward;  // F
  Eigen::MatrixXcd inverse;  // Q
  ComplexVector eigenvalues;

  std::size_t size() const { return eigenvalues.size(); }
};

FourierBasis fourier_basis(const ShiftOperator& op);

/// Dense definition F * (Gamma_k * x). O(N^2); used as the reference path.
GraphSpectrum gft_dense(const FourierBasis& basis, const ShiftOperator& op,
                        std::span<const double> frame);

/// Fast graph Fourier transform for one (N, k): eigenvalue-weighted unitary
/// DFT. Immutable after construction; forward/inverse may be called from any
/// number of threads concurrently.
class GraphFourierTransform {
 public:
  explicit GraphFourierTransform(const ShiftOperator& op);
  ~GraphFourierTransform();
  GraphFourierTransform(GraphFourierTransform&&) noexcept;
  GraphFourierTransform& operator=(GraphFourierTransform&&) noexcept;

  std::size_t size() const { return op_.size(); }
  const ShiftOperator& op() const { return op_; }
  const ComplexVector& eigenvalues() const { return eigenvalues_; }

  GraphSpectrum forward(std::span<const double> frame) const;
  std::vector<double> inverse(const GraphSpectrum& spectrum) const;

  /// max_j |forward(frame)_j| without materializing the spectrum.
  double max_abs_coefficient(std::span<const double> frame) const;

 private:
  struct Plans;

  ShiftOperator op_;
  ComplexVector eigenvalues_;
  std::unique_ptr<Plans> plans_;
};

GraphSpectrum gft(std::span<const double> frame, const ShiftOperator& op);
std::vector<double> igft(const GraphSpectrum& spectrum, const ShiftOperator& op);
double max_abs_coefficient(const GraphSpectrum& spectrum);

}  // namespace gftmark
