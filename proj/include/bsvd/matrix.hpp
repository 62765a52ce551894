#pragma once

#include <algorithm>
#include <cassert>
#include <initializer_list>
#include <span>
#include <vector>

#include <bsvd/types.hpp>

namespace bsvd {

/// Non-owning column-major view with leading dimension `ld` (>= rows).
/// Column j occupies data[j*ld, j*ld + rows).
template <class T>
struct MatrixView {
    T *data   = nullptr;
    index_t rows = 0;
    index_t cols = 0;
    index_t ld   = 0;

    T &operator()(index_t i, index_t j) const {
        assert(i >= 0 && i < rows && j >= 0 && j < cols);
        return data[i + j * ld];
    }
    std::span<T> col(index_t j) const {
        return {data + j * ld, static_cast<std::size_t>(rows)};
    }
    /// Columns [first, first+width).
    MatrixView block_columns(index_t first, index_t width) const {
        assert(first >= 0 && width >= 0 && first + width <= cols);
        return {data + first * ld, rows, width, ld};
    }
    MatrixView block(index_t r0, index_t c0, index_t nr, index_t nc) const {
        assert(r0 >= 0 && c0 >= 0 && r0 + nr <= rows && c0 + nc <= cols);
        return {data + r0 + c0 * ld, nr, nc, ld};
    }
    operator MatrixView<const T>() const { return {data, rows, cols, ld}; }
};

template <class T>
using ConstMatrixView = MatrixView<const T>;

/// A view spanning a contiguous range of whole columns of a parent matrix.
template <class T>
using BlockColumnView = MatrixView<T>;

/// Dense column-major matrix owning its storage.
template <Scalar T>
class Matrix {
  public:
    using value_type = T;

    Matrix() = default;
    Matrix(index_t rows, index_t cols) : rows_(rows), cols_(cols) {
        if (rows < 0 || cols < 0)
            throw ShapeError("Matrix: negative dimension");
        data_.assign(static_cast<std::size_t>(rows * cols), T(0));
    }
    /// Row-major initializer, for readability in tests and small literals.
    Matrix(std::initializer_list<std::initializer_list<T>> rows_init)
        : Matrix(static_cast<index_t>(rows_init.size()),
                 rows_init.size() ? static_cast<index_t>(rows_init.begin()->size()) : 0) {
        index_t i = 0;
        for (const auto &r : rows_init) {
            if (static_cast<index_t>(r.size()) != cols_)
                throw ShapeError("Matrix: ragged initializer");
            index_t j = 0;
            for (const T &v : r)
                (*this)(i, j++) = v;
            ++i;
        }
    }

    static Matrix identity(index_t n) {
        Matrix I(n, n);
        for (index_t i = 0; i < n; ++i)
            I(i, i) = T(1);
        return I;
    }

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }
    index_t size() const { return rows_ * cols_; }
    bool empty() const { return data_.empty(); }

    T &operator()(index_t i, index_t j) {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<std::size_t>(i + j * rows_)];
    }
    const T &operator()(index_t i, index_t j) const {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<std::size_t>(i + j * rows_)];
    }

    T *data() { return data_.data(); }
    const T *data() const { return data_.data(); }
    std::span<T> elements() { return data_; }
    std::span<const T> elements() const { return data_; }

    std::span<T> col(index_t j) { return view().col(j); }
    std::span<const T> col(index_t j) const { return view().col(j); }

    MatrixView<T> view() { return {data_.data(), rows_, cols_, std::max<index_t>(rows_, 1)}; }
    ConstMatrixView<T> view() const {
        return {data_.data(), rows_, cols_, std::max<index_t>(rows_, 1)};
    }
    operator MatrixView<T>() { return view(); }
    operator ConstMatrixView<T>() const { return view(); }

    BlockColumnView<T> block_columns(index_t first, index_t width) {
        return view().block_columns(first, width);
    }
    BlockColumnView<const T> block_columns(index_t first, index_t width) const {
        return view().block_columns(first, width);
    }

    friend bool operator==(const Matrix &a, const Matrix &b) = default;

  private:
    index_t rows_ = 0;
    index_t cols_ = 0;
    std::vector<T> data_;
};

template <Scalar T>
Matrix<T> to_matrix(ConstMatrixView<T> v) {
    Matrix<T> out(v.rows, v.cols);
    for (index_t j = 0; j < v.cols; ++j)
        std::copy_n(v.col(j).data(), v.rows, out.col(j).data());
    return out;
}

/// Elementwise field conversion (e.g. widen float -> double).
template <Scalar To, Scalar From>
Matrix<To> convert(const Matrix<From> &a) {
    Matrix<To> out(a.rows(), a.cols());
    auto src = a.elements();
    auto dst = out.elements();
    for (std::size_t i = 0; i < src.size(); ++i) {
        if constexpr (is_complex_v<To> && is_complex_v<From>)
            dst[i] = To(src[i].real(), src[i].imag());
        else if constexpr (is_complex_v<To>)
            dst[i] = To(src[i], 0);
        else if constexpr (is_complex_v<From>)
            dst[i] = static_cast<To>(src[i].real());
        else
            dst[i] = static_cast<To>(src[i]);
    }
    return out;
}

/// Conjugate transpose.
template <Scalar T>
Matrix<T> adjoint(ConstMatrixView<T> a) {
    Matrix<T> out(a.cols, a.rows);
    for (index_t j = 0; j < a.cols; ++j)
        for (index_t i = 0; i < a.rows; ++i)
            out(j, i) = conj(a(i, j));
    return out;
}
template <Scalar T>
Matrix<T> adjoint(const Matrix<T> &a) {
    return adjoint<T>(a.view());
}

} // namespace bsvd
