#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace dagcast {

enum class LpStatus { Optimal, Unbounded, Infeasible };
enum class RowSense { Le, Eq };

template <typename F>
struct LpResult {
  LpStatus status = LpStatus::Optimal;
  F objective = F(0);
  std::vector<F> x;
};

template <typename F>
struct LpTolerance {
  // Exact arithmetic by default; specialized for double below.
  static F value() { return F(0); }
};

template <>
struct LpTolerance<double> {
  static double value() { return 1e-9; }
};

// Dense two-phase primal simplex, maximization over x >= 0, with Bland's
// rule for both the entering and leaving choice so it cannot cycle. Sized
// for desk-scale problems (thousands of columns), not production LPs.
template <typename F>
class LpProblem {
 public:
  explicit LpProblem(int num_vars) : n_(num_vars), c_(static_cast<std::size_t>(num_vars), F(0)) {}

  void set_objective(int var, F coeff) { c_[static_cast<std::size_t>(var)] = std::move(coeff); }

  void add_row(std::vector<std::pair<int, F>> terms, RowSense sense, F rhs) {
    rows_.push_back(Row{std::move(terms), sense, std::move(rhs)});
  }

  std::size_t row_count() const { return rows_.size(); }

  LpResult<F> solve() const;

 private:
  struct Row {
    std::vector<std::pair<int, F>> terms;
    RowSense sense;
    F rhs;
  };

  int n_;
  std::vector<F> c_;
  std::vector<Row> rows_;
};

namespace simplex_detail {

template <typename F>
struct Tableau {
  // One dense row per constraint plus a reduced-cost row; rhs kept last.
  std::vector<std::vector<F>> a;
  std::vector<F> rhs;
  std::vector<F> red;
  F obj_shift = F(0);
  std::vector<int> basis;
  std::vector<char> banned;  // artificial columns, never re-enter
  std::vector<char> active;  // redundant rows get switched off
  int width = 0;

  void pivot(int prow, int pcol) {
    const F& p = a[static_cast<std::size_t>(prow)][static_cast<std::size_t>(pcol)];
    F inv = F(1) / p;
    auto& arow = a[static_cast<std::size_t>(prow)];
    for (auto& v : arow) v = v * inv;
    rhs[static_cast<std::size_t>(prow)] = rhs[static_cast<std::size_t>(prow)] * inv;
    arow[static_cast<std::size_t>(pcol)] = F(1);
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (static_cast<int>(r) == prow || !active[r]) continue;
      F f = a[r][static_cast<std::size_t>(pcol)];
      if (f == F(0)) continue;
      for (int j = 0; j < width; ++j) {
        a[r][static_cast<std::size_t>(j)] =
            a[r][static_cast<std::size_t>(j)] - f * arow[static_cast<std::size_t>(j)];
      }
      a[r][static_cast<std::size_t>(pcol)] = F(0);
      rhs[r] = rhs[r] - f * rhs[static_cast<std::size_t>(prow)];
    }
    F f = red[static_cast<std::size_t>(pcol)];
    if (f != F(0)) {
      for (int j = 0; j < width; ++j) {
        red[static_cast<std::size_t>(j)] =
            red[static_cast<std::size_t>(j)] - f * arow[static_cast<std::size_t>(j)];
      }
      red[static_cast<std::size_t>(pcol)] = F(0);
      obj_shift = obj_shift + f * rhs[static_cast<std::size_t>(prow)];
    }
    basis[static_cast<std::size_t>(prow)] = pcol;
  }

  // Bland: smallest improving column, then smallest basis variable among the
  // tightest rows. Returns Optimal when no column improves, Unbounded when
  // the chosen column has no positive entry.
  LpStatus iterate(const F& tol, std::size_t max_iters) {
    for (std::size_t it = 0; it < max_iters; ++it) {
      int enter = -1;
      for (int j = 0; j < width; ++j) {
        if (!banned[static_cast<std::size_t>(j)] && red[static_cast<std::size_t>(j)] > tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::Optimal;
      int leave = -1;
      F best_ratio = F(0);
      for (std::size_t r = 0; r < a.size(); ++r) {
        if (!active[r]) continue;
        const F& coef = a[r][static_cast<std::size_t>(enter)];
        if (!(coef > tol)) continue;
        F ratio = rhs[r] / coef;
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis[r] < basis[static_cast<std::size_t>(leave)])) {
          leave = static_cast<int>(r);
          best_ratio = ratio;
        }
      }
      if (leave < 0) return LpStatus::Unbounded;
      pivot(leave, enter);
    }
    fail(Err::LpNumericalFailure, "simplex iteration limit exceeded");
  }
};

}  // namespace simplex_detail

template <typename F>
LpResult<F> LpProblem<F>::solve() const {
  using simplex_detail::Tableau;
  const F tol = LpTolerance<F>::value();
  const std::size_t m = rows_.size();

  // Normalize rows to nonnegative rhs; Le with negative rhs becomes Ge.
  enum class Kind { Le, Ge, Eq };
  std::vector<Kind> kind(m);
  std::vector<std::vector<F>> dense(m, std::vector<F>(static_cast<std::size_t>(n_), F(0)));
  std::vector<F> b(m, F(0));
  int nslack = 0, nart = 0;
  for (std::size_t r = 0; r < m; ++r) {
    for (const auto& [var, coef] : rows_[r].terms) {
      dense[r][static_cast<std::size_t>(var)] = dense[r][static_cast<std::size_t>(var)] + coef;
    }
    b[r] = rows_[r].rhs;
    bool neg = b[r] < F(0);
    if (neg) {
      for (auto& v : dense[r]) v = -v;
      b[r] = -b[r];
    }
    if (rows_[r].sense == RowSense::Eq) {
      kind[r] = Kind::Eq;
      ++nart;
    } else if (!neg) {
      kind[r] = Kind::Le;
      ++nslack;
    } else {
      kind[r] = Kind::Ge;
      ++nslack;
      ++nart;
    }
  }

  Tableau<F> t;
  t.width = n_ + nslack + nart;
  t.a.assign(m, std::vector<F>(static_cast<std::size_t>(t.width), F(0)));
  t.rhs = b;
  t.basis.assign(m, -1);
  t.banned.assign(static_cast<std::size_t>(t.width), 0);
  t.active.assign(m, 1);

  int next_slack = n_;
  int next_art = n_ + nslack;
  std::vector<int> art_cols;
  for (std::size_t r = 0; r < m; ++r) {
    for (int j = 0; j < n_; ++j) t.a[r][static_cast<std::size_t>(j)] = dense[r][static_cast<std::size_t>(j)];
    if (kind[r] == Kind::Le) {
      t.a[r][static_cast<std::size_t>(next_slack)] = F(1);
      t.basis[r] = next_slack++;
    } else if (kind[r] == Kind::Ge) {
      t.a[r][static_cast<std::size_t>(next_slack)] = F(-1);
      ++next_slack;
      t.a[r][static_cast<std::size_t>(next_art)] = F(1);
      t.basis[r] = next_art;
      art_cols.push_back(next_art++);
    } else {
      t.a[r][static_cast<std::size_t>(next_art)] = F(1);
      t.basis[r] = next_art;
      art_cols.push_back(next_art++);
    }
  }

  const std::size_t max_iters = 20000 + 200 * (m + static_cast<std::size_t>(t.width));

  if (nart > 0) {
    // Phase 1: maximize -sum(artificials); reduced costs priced against the
    // artificial basis are the column sums of the artificial-basic rows.
    t.red.assign(static_cast<std::size_t>(t.width), F(0));
    t.obj_shift = F(0);
    for (std::size_t r = 0; r < m; ++r) {
      if (kind[r] == Kind::Le) continue;
      for (int j = 0; j < t.width; ++j) {
        t.red[static_cast<std::size_t>(j)] = t.red[static_cast<std::size_t>(j)] + t.a[r][static_cast<std::size_t>(j)];
      }
      t.obj_shift = t.obj_shift - t.rhs[r];
    }
    for (int col : art_cols) t.red[static_cast<std::size_t>(col)] = F(0);
    if (t.iterate(tol, max_iters) != LpStatus::Optimal) {
      fail(Err::LpNumericalFailure, "phase 1 unbounded; formulation bug");
    }
    F infeas = F(0);
    for (std::size_t r = 0; r < m; ++r) {
      for (int col : art_cols) {
        if (t.basis[r] == col) infeas = infeas + t.rhs[r];
      }
    }
    if (infeas > (std::is_same_v<F, double> ? F(1e-7) : F(0))) {
      return LpResult<F>{LpStatus::Infeasible, F(0), {}};
    }
    // Pivot leftover zero-valued artificials out; rows that cannot release
    // one are redundant and go inactive.
    for (std::size_t r = 0; r < m; ++r) {
      bool is_art = t.basis[r] >= n_ + nslack;
      if (!is_art) continue;
      int piv = -1;
      for (int j = 0; j < n_ + nslack; ++j) {
        F v = t.a[r][static_cast<std::size_t>(j)];
        if (v > tol || v < -tol) {
          piv = j;
          break;
        }
      }
      if (piv >= 0) {
        t.pivot(static_cast<int>(r), piv);
      } else {
        t.active[r] = 0;
      }
    }
    for (int col : art_cols) t.banned[static_cast<std::size_t>(col)] = 1;
  }

  // Phase 2 reduced costs: c minus the priced-out basic objective rows.
  t.red.assign(static_cast<std::size_t>(t.width), F(0));
  t.obj_shift = F(0);
  for (int j = 0; j < n_; ++j) t.red[static_cast<std::size_t>(j)] = c_[static_cast<std::size_t>(j)];
  for (std::size_t r = 0; r < m; ++r) {
    if (!t.active[r]) continue;
    int bv = t.basis[r];
    if (bv < n_ && c_[static_cast<std::size_t>(bv)] != F(0)) {
      F cb = c_[static_cast<std::size_t>(bv)];
      for (int j = 0; j < t.width; ++j) {
        t.red[static_cast<std::size_t>(j)] =
            t.red[static_cast<std::size_t>(j)] - cb * t.a[r][static_cast<std::size_t>(j)];
      }
      t.obj_shift = t.obj_shift + cb * t.rhs[r];
    }
  }

  LpStatus st = t.iterate(tol, max_iters);
  if (st == LpStatus::Unbounded) return LpResult<F>{LpStatus::Unbounded, F(0), {}};

  LpResult<F> res;
  res.status = LpStatus::Optimal;
  res.x.assign(static_cast<std::size_t>(n_), F(0));
  for (std::size_t r = 0; r < m; ++r) {
    if (t.active[r] && t.basis[r] < n_) {
      res.x[static_cast<std::size_t>(t.basis[r])] = t.rhs[r];
    }
  }
  for (int j = 0; j < n_; ++j) {
    F v = res.x[static_cast<std::size_t>(j)];
    if constexpr (std::is_same_v<F, double>) {
      if (v < 0.0 && v > -1e-9) res.x[static_cast<std::size_t>(j)] = 0.0;
    }
    res.objective = res.objective + c_[static_cast<std::size_t>(j)] * res.x[static_cast<std::size_t>(j)];
  }
  return res;
}

}  // namespace dagcast
