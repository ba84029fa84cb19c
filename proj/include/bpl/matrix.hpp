#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace bpl {

// Dense real matrix in row-major order. Square nonnegative matrices are the
// permanent inputs; the small rectangular case is used by the tangent frame.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n, double fill = 0.0) : DenseMatrix(n, n, fill) {}
    DenseMatrix(std::size_t rows, std::size_t cols, double fill)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    // Dimension of a square matrix.
    std::size_t n() const { return rows_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }
    const std::vector<double>& data() const { return data_; }

    DenseMatrix transpose() const;
    DenseMatrix operator*(const DenseMatrix& o) const;
    DenseMatrix scaled(double c) const;
    double max_entry() const;
    double min_entry() const;
    double max_abs_diff(const DenseMatrix& o) const;
    double trace() const;
    std::vector<std::vector<double>> to_rows() const;

    bool operator==(const DenseMatrix& o) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Throws DimensionMismatch unless A is square.
void require_square(const DenseMatrix& A, const char* where);

// Throws DomainError unless every entry is strictly positive.
void require_positive(const DenseMatrix& A, const char* where);

}  // namespace bpl
