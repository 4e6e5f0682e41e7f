#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace rollcall::nd {

// Dense row-major tensor of 64-bit floats. Zero-sized dimensions are legal
// (an empty token sequence produces a {0, d} matrix).
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape);
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    static Tensor zeros(std::vector<std::size_t> shape);
    static Tensor full(std::vector<std::size_t> shape, double value);
    static Tensor scalar(double value);
    static Tensor vec(std::vector<double> values);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t ndim() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    std::size_t dim(std::size_t i) const { return shape_.at(i); }
    std::size_t rows() const { return dim(0); }
    std::size_t cols() const { return dim(1); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    // 2-d accessors; only valid when ndim() == 2.
    double& at(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }
    double* row_ptr(std::size_t r) { return data_.data() + r * shape_[1]; }
    const double* row_ptr(std::size_t r) const { return data_.data() + r * shape_[1]; }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const;
    void fill(double value);

    std::string shape_str() const;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

// Throws std::runtime_error naming `what` if any entry is NaN or infinite.
void require_finite(const Tensor& t, const std::string& what);
void require_same_shape(const Tensor& a, const Tensor& b, const std::string& what);

}  // namespace rollcall::nd
