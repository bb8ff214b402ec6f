#include "dgcd/sparse.hpp"

#include <algorithm>

#include "dgcd/common.hpp"

namespace dgcd {

SparseMatrixCSR SparseMatrixCSR::block_pattern(const std::vector<std::vector<std::size_t>>& block_neighbours,
                                               std::size_t block_size) {
  SparseMatrixCSR m;
  const std::size_t nb = block_neighbours.size();
  m.block_size_ = block_size;
  m.cols_ = nb * block_size;
  m.row_ptr_.assign(nb * block_size + 1, 0);
  std::size_t nnz = 0;
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t r = 0; r < block_size; ++r) {
      m.row_ptr_[i * block_size + r] = nnz;
      nnz += block_neighbours[i].size() * block_size;
    }
  m.row_ptr_.back() = nnz;
  m.col_idx_.resize(nnz);
  m.values_.assign(nnz, 0.0);
  for (std::size_t i = 0; i < nb; ++i) {
    const auto& nbrs = block_neighbours[i];
    if (!std::is_sorted(nbrs.begin(), nbrs.end())) throw Error("block_pattern: neighbour lists must be sorted");
    for (std::size_t r = 0; r < block_size; ++r) {
      std::size_t pos = m.row_ptr_[i * block_size + r];
      for (std::size_t j : nbrs)
        for (std::size_t c = 0; c < block_size; ++c) m.col_idx_[pos++] = static_cast<std::int32_t>(j * block_size + c);
    }
  }
  return m;
}

SparseMatrixCSR SparseMatrixCSR::from_dense(const Eigen::MatrixXd& dense) {
  SparseMatrixCSR m;
  m.cols_ = static_cast<std::size_t>(dense.cols());
  m.row_ptr_.push_back(0);
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    for (Eigen::Index j = 0; j < dense.cols(); ++j)
      if (dense(i, j) != 0.0) {
        m.col_idx_.push_back(static_cast<std::int32_t>(j));
        m.values_.push_back(dense(i, j));
      }
    m.row_ptr_.push_back(m.values_.size());
  }
  return m;
}

std::size_t SparseMatrixCSR::find(std::size_t row, std::size_t col) const {
  const auto begin = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
  const auto end = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
  const auto it = std::lower_bound(begin, end, static_cast<std::int32_t>(col));
  if (it == end || *it != static_cast<std::int32_t>(col)) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(it - col_idx_.begin());
}

void SparseMatrixCSR::add_block(std::size_t bi, std::size_t bj, const Eigen::MatrixXd& block) {
  const std::size_t b = block_size_;
  for (std::size_t r = 0; r < b; ++r) {
    const std::size_t pos = find(bi * b + r, bj * b);
    if (pos == static_cast<std::size_t>(-1)) throw Error("add_block: block outside the sparsity pattern");
    for (std::size_t c = 0; c < b; ++c)
      values_[pos + c] += block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
}

Eigen::MatrixXd SparseMatrixCSR::block(std::size_t bi, std::size_t bj) const {
  const std::size_t b = block_size_;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b));
  for (std::size_t r = 0; r < b; ++r) {
    const std::size_t pos = find(bi * b + r, bj * b);
    if (pos == static_cast<std::size_t>(-1)) continue;
    for (std::size_t c = 0; c < b; ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values_[pos + c];
  }
  return out;
}

void SparseMatrixCSR::add_scaled(double s, const SparseMatrixCSR& other) {
  if (other.rows() != rows()) throw Error("add_scaled: dimension mismatch");
  for (std::size_t i = 0; i < rows(); ++i) {
    std::size_t pos = row_ptr_[i];
    for (std::size_t k = other.row_ptr_[i]; k < other.row_ptr_[i + 1]; ++k) {
      while (pos < row_ptr_[i + 1] && col_idx_[pos] < other.col_idx_[k]) ++pos;
      if (pos == row_ptr_[i + 1] || col_idx_[pos] != other.col_idx_[k])
        throw Error("add_scaled: pattern not contained");
      values_[pos] += s * other.values_[k];
    }
  }
}

void SparseMatrixCSR::multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  const std::size_t n = rows();
  y.resize(static_cast<Eigen::Index>(n));
  const double* xv = x.data();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * xv[col_idx_[k]];
    y[static_cast<Eigen::Index>(i)] = s;
  }
}

Eigen::VectorXd SparseMatrixCSR::operator*(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y;
  multiply(x, y);
  return y;
}

double SparseMatrixCSR::entry(std::size_t i, std::size_t j) const {
  const std::size_t pos = find(i, j);
  return pos == static_cast<std::size_t>(-1) ? 0.0 : values_[pos];
}

Eigen::MatrixXd SparseMatrixCSR::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols_));
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d(static_cast<Eigen::Index>(i), col_idx_[k]) = values_[k];
  return d;
}

}  // namespace dgcd
