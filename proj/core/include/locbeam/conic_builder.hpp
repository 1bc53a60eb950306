// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "locbeam/conic.hpp"
#include "locbeam/types.hpp"

namespace locbeam::conic {

// constant + sum coef * x[var]
struct LinExpr {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;

  LinExpr() = default;
  LinExpr(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)
  static LinExpr variable(int index, double coef = 1.0);

  LinExpr& add(int index, double coef);
  LinExpr& operator+=(const LinExpr& other);
  LinExpr& operator-=(const LinExpr& other);
  LinExpr& operator*=(double factor);
  double evaluate(const Vector& x) const;
  bool is_constant() const;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double factor, LinExpr a);

// Symmetric 2x2 matrix whose entries are affine in the decision variables.
struct SymAffine2 {
  LinExpr xx;
  LinExpr xy;
  LinExpr yy;

  SymAffine2& add(const LinExpr& scalar, const Mat2& m);
  SymAffine2& add_constant(const Mat2& m);
  Mat2 evaluate(const Vector& x) const;
};

// Accumulates variables, an objective and cone rows, then emits a ConicProblem. Rows are stored
// as expressions e(x) with the slack s = e(x) constrained to its cone.
class ProblemBuilder {
 public:
  int add_variables(int count);
  int n_variables() const { return n_; }

  void add_objective(int index, double coef);
  void set_objective_constant(double value) { objective_constant_ = value; }
  double objective_constant() const { return objective_constant_; }

  void add_zero(const LinExpr& e);
  void add_nonneg(const LinExpr& e);
  // Entries in svec order for a side x side symmetric matrix.
  void add_psd(int side, const std::vector<LinExpr>& svec_entries);
  // Symmetric matrix given entrywise; only the lower triangle is read.
  void add_psd_matrix(const std::vector<std::vector<LinExpr>>& entries);
  // (x, y, z) with y exp(x / y) <= z.
  void add_exp(const LinExpr& x, const LinExpr& y, const LinExpr& z);

  ConicProblem build() const;

 private:
  struct Row {
    ConeKind kind;
    int side;
    std::vector<LinExpr> entries;
  };
  int n_ = 0;
  std::vector<std::pair<int, double>> objective_;
  double objective_constant_ = 0.0;
  std::vector<Row> rows_;
};

// Hermitian matrix variable Sigma = X + iY stored as side^2 reals: diag(X), strict lower X, strict
// lower Y.
struct HermitianVar {
  int offset = 0;
  int side = 0;

  int x_index(int row, int col) const;
  // Index of Y(row, col) for row > col.
  int y_index(int row, int col) const;
  static int size(int side) { return side * side; }

  // Re tr(W Sigma) for Hermitian W.
  LinExpr trace_with(const CMatrix& w) const;
  LinExpr trace() const;
  CMatrix value(const Vector& x) const;
  void assign(const CMatrix& sigma, Vector& x) const;
};

HermitianVar add_hermitian(ProblemBuilder& builder, int side);
// Sigma >= 0 through the real embedding [[X, -Y], [Y, X]].
void add_hermitian_psd(ProblemBuilder& builder, const HermitianVar& var);

// Introduces a symmetric 2x2 M with [[M, I], [I, J]] >= 0 and tr M <= bound; returns the index of
// M's first entry (order xx, xy, yy).
int build_schur_crb_block(ProblemBuilder& builder, const SymAffine2& j, double bound);

}  // namespace locbeam::conic
