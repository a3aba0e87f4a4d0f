#include "gftmark/graph.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <fftw3.h>

#include "gftmark/error.hpp"

namespace gftmark {

namespace {

// FFTW planning is not thread safe; execution with new-array calls is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

void require_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": length " + std::to_string(got) +
                         " does not match operator size " + std::to_string(want));
  }
}

// exp(2 pi i m / n) with the phase index reduced mod n first.
Complex unit_root(std::size_t m, std::size_t n) {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(m % n) / static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace

ShiftOperator::ShiftOperator(std::size_t n, std::size_t k) : n_(n), k_(k) {
  if (n < 2) {
    throw DimensionError("shift operator needs N >= 2, got N=" + std::to_string(n));
  }
  if (k < 1 || k > n) {
    throw DimensionError("shift order k=" + std::to_string(k) + " outside [1, N=" +
                         std::to_string(n) + "]");
  }
}

Eigen::MatrixXd ShiftOperator::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t t = 0; t < k_; ++t) {
      m(i, (i + t) % n_) = 1.0;
    }
  }
  return m;
}

std::vector<double> ShiftOperator::apply(std::span<const double> frame) const {
  require_length(frame.size(), n_, "shift_apply");
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (std::size_t t = 0; t < k_; ++t) {
      acc += frame[(i + t) % n_];
    }
    y[i] = acc;
  }
  return y;
}

ShiftOperator build_shift_operator(std::size_t n, std::size_t k) { return ShiftOperator(n, k); }

Eigen::MatrixXd pure_shift_matrix(std::size_t n, std::size_t t) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, (i + t) % n) = 1.0;
  }
  return m;
}

std::vector<double> shift_apply(const ShiftOperator& op, std::span<const double> frame) {
  return op.apply(frame);
}

ComplexVector circulant_eigenvalues(const ShiftOperator& op) {
  const std::size_t n = op.size();
  ComplexVector lambda(n);
  // Fill the lower half and mirror so that lambda_{N-j} == conj(lambda_j)
  // holds bit-exactly.
  for (std::size_t j = 0; j <= n / 2; ++j) {
    Complex acc{0.0, 0.0};
    for (std::size_t t = 0; t < op.order(); ++t) {
      acc += unit_root(t * j, n);
    }
    lambda[j] = acc;
    if (j != 0) {
      lambda[n - j] = std::conj(acc);
    }
  }
  lambda[0] = Complex(static_cast<double>(op.order()), 0.0);
  if (n % 2 == 0) {
    // sum of (-1)^t, real by construction
    lambda[n / 2] = Complex(op.order() % 2 == 0 ? 0.0 : 1.0, 0.0);
  }
  return lambda;
}

FourierBasis fourier_basis(const ShiftOperator& op) {
  const std::size_t n = op.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  FourierBasis basis;
  basis.inverse.resize(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t row = 0; row < n; ++row) {
      basis.inverse(row, col) = unit_root(row * col, n) * scale;
    }
  }
  basis.forward = basis.inverse.adjoint();
  basis.eigenvalues = circulant_eigenvalues(op);
  return basis;
}

GraphSpectrum gft_dense(const FourierBasis& basis, const ShiftOperator& op,
                        std::span<const double> frame) {
  require_length(frame.size(), op.size(), "gft_dense");
  require_length(basis.size(), op.size(), "gft_dense basis");
  const Eigen::Map<const Eigen::VectorXd> x(frame.data(), static_cast<Eigen::Index>(frame.size()));
  const Eigen::VectorXd y = op.dense() * x;
  const Eigen::VectorXcd spectrum = basis.forward * y.cast<Complex>();
  return GraphSpectrum{ComplexVector(spectrum.data(), spectrum.data() + spectrum.size())};
}

struct GraphFourierTransform::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2c_backward = nullptr;

  explicit Plans(std::size_t n) {
    const int len = static_cast<int>(n);
    std::vector<double> real_buf(n);
    std::vector<Complex> a(n), b(n);
    std::lock_guard lock(fftw_planner_mutex());
    r2c = fftw_plan_dft_r2c_1d(len, real_buf.data(), reinterpret_cast<fftw_complex*>(a.data()),
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
    c2c_backward = fftw_plan_dft_1d(len, reinterpret_cast<fftw_complex*>(a.data()),
                                    reinterpret_cast<fftw_complex*>(b.data()), FFTW_BACKWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (r2c == nullptr || c2c_backward == nullptr) {
      throw std::runtime_error("FFTW planning failed for N=" + std::to_string(n));
    }
  }

  ~Plans() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2c_backward);
  }

  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

GraphFourierTransform::GraphFourierTransform(const ShiftOperator& op)
    : op_(op), eigenvalues_(circulant_eigenvalues(op)), plans_(std::make_unique<Plans>(op.size())) {}

GraphFourierTransform::~GraphFourierTransform() = default;
GraphFourierTransform::GraphFourierTransform(GraphFourierTransform&&) noexcept = default;
GraphFourierTransform& GraphFourierTransform::operator=(GraphFourierTransform&&) noexcept = default;

GraphSpectrum GraphFourierTransform::forward(std::span<const double> frame) const {
  const std::size_t n = size();
  require_length(frame.size(), n, "gft");
  std::vector<double> in(frame.begin(), frame.end());
  ComplexVector half(n / 2 + 1);
  fftw_execute_dft_r2c(plans_->r2c, in.data(), reinterpret_cast<fftw_complex*>(half.data()));

  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  GraphSpectrum out{ComplexVector(n)};
  for (std::size_t j = 0; j < half.size(); ++j) {
    const Complex c = eigenvalues_[j] * (half[j] * scale);
    out.coefficients[j] = c;
    if (j != 0 && j != n - j) {
      out.coefficients[n - j] = std::conj(c);
    }
  }
  return out;
}

std::vector<double> GraphFourierTransform::inverse(const GraphSpectrum& spectrum) const {
  const std::size_t n = size();
  require_length(spectrum.size(), n, "igft");
  ComplexVector in = spectrum.coefficients;
  ComplexVector out(n);
  fftw_execute_dft(plans_->c2c_backward, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));

  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  double max_real = 0.0;
  double max_imag = 0.0;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex v = out[i] * scale;
    y[i] = v.real();
    max_real = std::max(max_real, std::abs(v.real()));
    max_imag = std::max(max_imag, std::abs(v.imag()));
  }
  if (max_imag > 1e-6 * std::max(1.0, max_real)) {
    throw std::domain_error("igft: imaginary residue " + std::to_string(max_imag) +
                            " indicates a spectrum that is not the transform of a real signal");
  }
  return y;
}

double GraphFourierTransform::max_abs_coefficient(std::span<const double> frame) const {
  const std::size_t n = size();
  require_length(frame.size(), n, "gft");
  std::vector<double> in(frame.begin(), frame.end());
  ComplexVector half(n / 2 + 1);
  fftw_execute_dft_r2c(plans_->r2c, in.data(), reinterpret_cast<fftw_complex*>(half.data()));

  // The upper half mirrors the lower half as conjugates, so its moduli repeat.
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  double best = 0.0;
  for (std::size_t j = 0; j < half.size(); ++j) {
    best = std::max(best, std::abs(eigenvalues_[j] * (half[j] * scale)));
  }
  return best;
}

GraphSpectrum gft(std::span<const double> frame, const ShiftOperator& op) {
  return GraphFourierTransform(op).forward(frame);
}

std::vector<double> igft(const GraphSpectrum& spectrum, const ShiftOperator& op) {
  return GraphFourierTransform(op).inverse(spectrum);
}

double max_abs_coefficient(const GraphSpectrum& spectrum) {
  if (spectrum.coefficients.empty()) {
    throw DimensionError("max_abs_coefficient: empty spectrum");
  }
  double best = 0.0;
  for (const Complex& c : spectrum.coefficients) {
    best = std::max(best, std::abs(c));
  }
  return best;
}

}  // namespace gftmark
