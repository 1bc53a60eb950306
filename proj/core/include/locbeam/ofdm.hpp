// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "locbeam/types.hpp"

namespace locbeam::ofdm {

// c_{bn} = (N/N_C)(b-1) - N/2 + n with one-based b and n.
int subcarrier_index(int subcarriers, int blocks, int b, int n);

// diag(c_{b1}, ..., c_{b,N/N_C}) for one-based block b.
Matrix subcarrier_index_diag(int subcarriers, int blocks, int b);

// (N/N_C) x L matrix with entries exp(-i 2 pi c_{bn} l / N), l = 0..L-1.
CMatrix block_dft(int subcarriers, int blocks, int b, int paths);

// L x L delay-information kernel F^H K Pi_perp K F of one block; zero when N/N_C <= L.
CMatrix delay_kernel(int subcarriers, int blocks, int b, int paths);

// Per-subcarrier channel vector f with f^H w = sum_l exp(-i 2 pi c l / N) h_l^H w.
CVector subcarrier_channel(const CMatrix& h, int subcarriers, int c);

}  // namespace locbeam::ofdm
