#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace dgcd {

/// Compressed sparse row matrix with an optional uniform block structure
/// (block_size > 1 means rows and columns group into dense cell blocks).
class SparseMatrixCSR {
 public:
  SparseMatrixCSR() = default;

  /// Pattern with dense blocks (i, j) for every j in block_neighbours[i]
  /// (each list sorted ascending, containing i itself). Values start at zero.
  static SparseMatrixCSR block_pattern(const std::vector<std::vector<std::size_t>>& block_neighbours,
                                       std::size_t block_size);

  /// General matrix from dense storage (entries with |a_ij| == 0 are dropped).
  static SparseMatrixCSR from_dense(const Eigen::MatrixXd& dense);

  std::size_t rows() const { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }
  std::size_t block_size() const { return block_size_; }

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::int32_t>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Adds a dense block at block position (bi, bj); the block must be in the pattern.
  void add_block(std::size_t bi, std::size_t bj, const Eigen::MatrixXd& block);
  Eigen::MatrixXd block(std::size_t bi, std::size_t bj) const;

  /// this += s * other; `other`'s pattern must be contained in this one.
  void add_scaled(double s, const SparseMatrixCSR& other);

  void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;

  double entry(std::size_t i, std::size_t j) const;
  Eigen::MatrixXd to_dense() const;

 private:
  std::size_t find(std::size_t row, std::size_t col) const;

  std::size_t cols_ = 0;
  std::size_t block_size_ = 1;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::int32_t> col_idx_;
  std::vector<double> values_;
};

}  // namespace dgcd
