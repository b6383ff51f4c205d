#include "photonic/complex_matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace photonic::lincircuit {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), a_(rows * cols, value_type{0.0, 0.0}) {}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw std::invalid_argument("ComplexMatrix: dimension mismatch in product");
    ComplexMatrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = 0; k < cols_; ++k) {
            const value_type aik = (*this)(i, k);
            if (aik == value_type{}) continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j) {
                out(i, j) += aik * rhs(k, j);
            }
        }
    }
    return out;
}

std::vector<ComplexMatrix::value_type> ComplexMatrix::operator*(const std::vector<value_type>& v) const {
    if (cols_ != v.size()) throw std::invalid_argument("ComplexMatrix: dimension mismatch in matrix-vector product");
    std::vector<value_type> out(rows_, value_type{});
    for (std::size_t i = 0; i < rows_; ++i) {
        value_type acc{};
        for (std::size_t j = 0; j < cols_; ++j) acc += (*this)(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
}

bool ComplexMatrix::all_finite() const {
    for (const auto& z : a_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

double ComplexMatrix::unitarity_defect() const {
    if (rows_ != cols_) throw std::invalid_argument("ComplexMatrix: unitarity defect requires a square matrix");
    const ComplexMatrix g = adjoint() * (*this);
    double defect = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            const value_type expect = (i == j) ? value_type{1.0, 0.0} : value_type{};
            defect = std::max(defect, std::abs(g(i, j) - expect));
        }
    }
    return defect;
}

}  // namespace photonic::lincircuit
