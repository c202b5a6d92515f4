#pragma once

#include <stdexcept>
#include <vector>

namespace bt {

// Minimal dense matrix for the filter dimensions in play (at most 8x8).
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols), d_(static_cast<std::size_t>(rows) * cols, 0.0) {}

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) { return d_[static_cast<std::size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return d_[static_cast<std::size_t>(r) * cols_ + c]; }

    Mat operator*(const Mat& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("Mat: dimension mismatch in product");
        Mat out(rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const double a = (*this)(i, k);
                if (a == 0.0) continue;
                for (int j = 0; j < o.cols_; ++j) out(i, j) += a * o(k, j);
            }
        return out;
    }

    Mat operator+(const Mat& o) const {
        check_same(o);
        Mat out = *this;
        for (std::size_t i = 0; i < d_.size(); ++i) out.d_[i] += o.d_[i];
        return out;
    }

    Mat operator-(const Mat& o) const {
        check_same(o);
        Mat out = *this;
        for (std::size_t i = 0; i < d_.size(); ++i) out.d_[i] -= o.d_[i];
        return out;
    }

    Mat transposed() const {
        Mat out(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    void symmetrize() {
        for (int i = 0; i < rows_; ++i)
            for (int j = i + 1; j < cols_; ++j) {
                const double v = 0.5 * ((*this)(i, j) + (*this)(j, i));
                (*this)(i, j) = v;
                (*this)(j, i) = v;
            }
    }

private:
    void check_same(const Mat& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("Mat: dimension mismatch");
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> d_;
};

}  // namespace bt
