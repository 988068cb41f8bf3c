#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace lhsd {

// Dense row-major matrix of doubles. Rows are sample points, columns dimensions.
class matrix {
public:
    matrix() = default;
    matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::vector<double> column(std::size_t j) const {
        std::vector<double> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = data_[i * cols_ + j];
        return c;
    }
    void set_column(std::size_t j, std::span<const double> c) {
        if (c.size() != rows_) throw std::invalid_argument("matrix::set_column: length mismatch");
        for (std::size_t i = 0; i < rows_; ++i) data_[i * cols_ + j] = c[i];
    }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace lhsd
