// SPDX-License-Identifier: Apache-2.0
#include "locbeam/ofdm.hpp"

#include <cmath>

#include "locbeam/error.hpp"

namespace locbeam::ofdm {

namespace {

void check_grid(int subcarriers, int blocks, int b) {
  if (subcarriers < 1 || blocks < 1 || subcarriers % blocks != 0) {
    throw InvalidArgument("N must be a positive multiple of N_C");
  }
  if (b < 1 || b > blocks) throw InvalidArgument("block index out of range");
}

}  // namespace

int subcarrier_index(int subcarriers, int blocks, int b, int n) {
  check_grid(subcarriers, blocks, b);
  const int size = subcarriers / blocks;
  if (n < 1 || n > size) throw InvalidArgument("subcarrier index out of range");
  return size * (b - 1) - subcarriers / 2 + n;
}

Matrix subcarrier_index_diag(int subcarriers, int blocks, int b) {
  const int size = subcarriers / blocks;
  check_grid(subcarriers, blocks, b);
  Matrix k = Matrix::Zero(size, size);
  for (int n = 1; n <= size; ++n) k(n - 1, n - 1) = subcarrier_index(subcarriers, blocks, b, n);
  return k;
}

CMatrix block_dft(int subcarriers, int blocks, int b, int paths) {
  check_grid(subcarriers, blocks, b);
  if (paths < 1) throw InvalidArgument("at least one path is required");
  const int size = subcarriers / blocks;
  CMatrix f(size, paths);
  for (int n = 1; n <= size; ++n) {
    const int c = subcarrier_index(subcarriers, blocks, b, n);
    for (int l = 0; l < paths; ++l) {
      f(n - 1, l) = std::polar(1.0, -2.0 * kPi * c * l / subcarriers);
    }
  }
  return f;
}

CMatrix delay_kernel(int subcarriers, int blocks, int b, int paths) {
  const int size = subcarriers / blocks;
  if (size <= paths) {
    check_grid(subcarriers, blocks, b);
    return CMatrix::Zero(paths, paths);
  }
  const CMatrix f = block_dft(subcarriers, blocks, b, paths);
  const Vector k = subcarrier_index_diag(subcarriers, blocks, b).diagonal();
  const CMatrix kf = k.asDiagonal() * f;
  const CMatrix gram = f.adjoint() * f;
  const CMatrix cross = f.adjoint() * kf;
  const CMatrix g = kf.adjoint() * kf - cross.adjoint() * gram.ldlt().solve(cross);
  return (g + g.adjoint()) / 2.0;
}

CVector subcarrier_channel(const CMatrix& h, int subcarriers, int c) {
  CVector f = CVector::Zero(h.rows());
  for (Eigen::Index l = 0; l < h.cols(); ++l) {
    f += std::polar(1.0, 2.0 * kPi * c * static_cast<double>(l) / subcarriers) * h.col(l);
  }
  return f;
}

}  // namespace locbeam::ofdm
