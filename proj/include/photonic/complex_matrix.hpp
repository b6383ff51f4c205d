#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace photonic::lincircuit {

/// Dense complex matrix used as the carrier for scattering matrices.
///
/// Row-major storage. Circuits in this library are small (a dozen modes at
/// most), so the implementation favors clarity over blocking tricks.
class ComplexMatrix {
  public:
    using value_type = std::complex<double>;

    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);

    static ComplexMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    value_type& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const value_type& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    ComplexMatrix operator*(const ComplexMatrix& rhs) const;
    std::vector<value_type> operator*(const std::vector<value_type>& v) const;

    ComplexMatrix adjoint() const;

    bool all_finite() const;

    /// Max-norm of M^dagger * M - I. Only meaningful for square matrices.
    double unitarity_defect() const;
    bool is_unitary(double tol = 1e-12) const { return unitarity_defect() <= tol; }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<value_type> a_;
};

}  // namespace photonic::lincircuit
