// SPDX-License-Identifier: Apache-2.0
#include "locbeam/conic_builder.hpp"

#include <algorithm>
#include <cmath>

#include "locbeam/error.hpp"

namespace locbeam::conic {

namespace {
constexpr double kSqrt2 = 1.41421356237309504880;
}

LinExpr LinExpr::variable(int index, double coef) {
  LinExpr e;
  e.terms.emplace_back(index, coef);
  return e;
}

LinExpr& LinExpr::add(int index, double coef) {
  if (coef != 0.0) terms.emplace_back(index, coef);
  return *this;
}

LinExpr& LinExpr::operator+=(const LinExpr& other) {
  constant += other.constant;
  terms.insert(terms.end(), other.terms.begin(), other.terms.end());
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& other) {
  constant -= other.constant;
  for (const auto& [i, c] : other.terms) terms.emplace_back(i, -c);
  return *this;
}

LinExpr& LinExpr::operator*=(double factor) {
  constant *= factor;
  for (auto& t : terms) t.second *= factor;
  return *this;
}

double LinExpr::evaluate(const Vector& x) const {
  double v = constant;
  for (const auto& [i, c] : terms) v += c * x(i);
  return v;
}

bool LinExpr::is_constant() const {
  return std::all_of(terms.begin(), terms.end(), [](const auto& t) { return t.second == 0.0; });
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator*(double factor, LinExpr a) { return a *= factor; }

SymAffine2& SymAffine2::add(const LinExpr& scalar, const Mat2& m) {
  xx += m(0, 0) * scalar;
  xy += 0.5 * (m(0, 1) + m(1, 0)) * scalar;
  yy += m(1, 1) * scalar;
  return *this;
}

SymAffine2& SymAffine2::add_constant(const Mat2& m) { return add(LinExpr(1.0), m); }

Mat2 SymAffine2::evaluate(const Vector& x) const {
  Mat2 m;
  m(0, 0) = xx.evaluate(x);
  m(0, 1) = m(1, 0) = xy.evaluate(x);
  m(1, 1) = yy.evaluate(x);
  return m;
}

int ProblemBuilder::add_variables(int count) {
  if (count < 0) throw InvalidArgument("negative variable count");
  const int first = n_;
  n_ += count;
  return first;
}

void ProblemBuilder::add_objective(int index, double coef) { objective_.emplace_back(index, coef); }

void ProblemBuilder::add_zero(const LinExpr& e) { rows_.push_back({ConeKind::kZero, 0, {e}}); }

void ProblemBuilder::add_nonneg(const LinExpr& e) { rows_.push_back({ConeKind::kNonneg, 0, {e}}); }

void ProblemBuilder::add_psd(int side, const std::vector<LinExpr>& svec_entries) {
  if (static_cast<int>(svec_entries.size()) != svec_size(side)) throw DimensionMismatch("svec entry count");
  rows_.push_back({ConeKind::kPsd, side, svec_entries});
}

void ProblemBuilder::add_psd_matrix(const std::vector<std::vector<LinExpr>>& entries) {
  const int side = static_cast<int>(entries.size());
  std::vector<LinExpr> v(svec_size(side));
  for (int c = 0; c < side; ++c) {
    for (int r = c; r < side; ++r) {
      LinExpr e = entries.at(r).at(c);
      if (r != c) e *= kSqrt2;
      v[svec_index(r, c, side)] = std::move(e);
    }
  }
  add_psd(side, v);
}

void ProblemBuilder::add_exp(const LinExpr& x, const LinExpr& y, const LinExpr& z) {
  rows_.push_back({ConeKind::kExp, 0, {x, y, z}});
}

ConicProblem ProblemBuilder::build() const {
  ConicProblem p;
  p.c = Vector::Zero(n_);
  for (const auto& [i, c] : objective_) p.c(i) += c;
  int m = 0;
  for (const Row& r : rows_) m += static_cast<int>(r.entries.size());
  p.a = Matrix::Zero(m, n_);
  p.b = Vector::Zero(m);

  // zero rows first, then the remaining cones in insertion order with adjacent merging
  std::vector<const Row*> order;
  for (const Row& r : rows_) {
    if (r.kind == ConeKind::kZero) order.push_back(&r);
  }
  for (const Row& r : rows_) {
    if (r.kind != ConeKind::kZero) order.push_back(&r);
  }
  int row = 0;
  for (const Row* r : order) {
    for (const LinExpr& e : r->entries) {
      p.b(row) = e.constant;
      for (const auto& [i, c] : e.terms) p.a(row, i) -= c;
      ++row;
    }
    auto& cones = p.cones.cones;
    const bool mergeable = r->kind != ConeKind::kPsd;
    const int count = r->kind == ConeKind::kPsd ? r->side : 1;
    if (mergeable && !cones.empty() && cones.back().kind == r->kind) {
      cones.back().size += count;
    } else {
      cones.push_back({r->kind, count});
    }
  }
  return p;
}

int HermitianVar::x_index(int row, int col) const {
  if (row < col) std::swap(row, col);
  if (row == col) return offset + row;
  // strict lower entries, column-major
  int k = 0;
  for (int c = 0; c < col; ++c) k += side - 1 - c;
  return offset + side + k + (row - col - 1);
}

int HermitianVar::y_index(int row, int col) const {
  if (row <= col) throw InvalidArgument("y_index needs row > col");
  return x_index(row, col) + side * (side - 1) / 2;
}

LinExpr HermitianVar::trace_with(const CMatrix& w) const {
  LinExpr e;
  for (int c = 0; c < side; ++c) {
    e.add(x_index(c, c), w(c, c).real());
    for (int r = c + 1; r < side; ++r) {
      e.add(x_index(r, c), 2.0 * w(r, c).real());
      e.add(y_index(r, c), 2.0 * w(r, c).imag());
    }
  }
  return e;
}

LinExpr HermitianVar::trace() const {
  LinExpr e;
  for (int c = 0; c < side; ++c) e.add(x_index(c, c), 1.0);
  return e;
}

CMatrix HermitianVar::value(const Vector& x) const {
  CMatrix s(side, side);
  for (int c = 0; c < side; ++c) {
    s(c, c) = x(x_index(c, c));
    for (int r = c + 1; r < side; ++r) {
      const Complex v(x(x_index(r, c)), x(y_index(r, c)));
      s(r, c) = v;
      s(c, r) = std::conj(v);
    }
  }
  return s;
}

void HermitianVar::assign(const CMatrix& sigma, Vector& x) const {
  for (int c = 0; c < side; ++c) {
    x(x_index(c, c)) = sigma(c, c).real();
    for (int r = c + 1; r < side; ++r) {
      const Complex v = 0.5 * (sigma(r, c) + std::conj(sigma(c, r)));
      x(x_index(r, c)) = v.real();
      x(y_index(r, c)) = v.imag();
    }
  }
}

HermitianVar add_hermitian(ProblemBuilder& builder, int side) {
  HermitianVar v;
  v.side = side;
  v.offset = builder.add_variables(HermitianVar::size(side));
  return v;
}

void add_hermitian_psd(ProblemBuilder& builder, const HermitianVar& var) {
  const int n = var.side;
  if (n == 1) {
    builder.add_nonneg(LinExpr::variable(var.x_index(0, 0)));
    return;
  }
  std::vector<std::vector<LinExpr>> e(2 * n, std::vector<LinExpr>(2 * n));
  for (int r = 0; r < 2 * n; ++r) {
    for (int c = 0; c <= r; ++c) {
      const int rr = r % n, cc = c % n;
      if ((r < n) == (c < n)) {
        e[r][c] = LinExpr::variable(var.x_index(rr, cc));
      } else if (rr > cc) {
        e[r][c] = LinExpr::variable(var.y_index(rr, cc));
      } else if (rr < cc) {
        e[r][c] = LinExpr::variable(var.y_index(cc, rr), -1.0);
      }
    }
  }
  builder.add_psd_matrix(e);
}

int build_schur_crb_block(ProblemBuilder& builder, const SymAffine2& j, double bound) {
  const int m = builder.add_variables(3);
  std::vector<std::vector<LinExpr>> e(4, std::vector<LinExpr>(4));
  e[0][0] = LinExpr::variable(m);
  e[1][0] = LinExpr::variable(m + 1);
  e[1][1] = LinExpr::variable(m + 2);
  e[2][0] = LinExpr(1.0);
  e[3][1] = LinExpr(1.0);
  e[2][2] = j.xx;
  e[3][2] = j.xy;
  e[3][3] = j.yy;
  builder.add_psd_matrix(e);
  LinExpr slack(bound);
  slack.add(m, -1.0);
  slack.add(m + 2, -1.0);
  builder.add_nonneg(slack);
  return m;
}

}  // namespace locbeam::conic
