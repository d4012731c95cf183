#include "pqkd/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "pqkd/errors.hpp"

namespace pqkd {

int LPInstance::add_variable(const std::string& name, double lo, double hi) {
  if (name.empty()) throw LpBuildError("variable name must not be empty");
  if (by_name_.count(name)) throw LpBuildError("duplicate variable '" + name + "'");
  if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
    throw LpBuildError("variable '" + name + "' has empty bounds");
  }
  const int id = static_cast<int>(vars_.size());
  vars_.push_back({name, lo, hi});
  by_name_[name] = id;
  return id;
}

int LPInstance::index(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw LpBuildError("unknown variable '" + name + "'");
  return it->second;
}

void LPInstance::check_terms(const std::vector<LpTerm>& terms, const std::string& where) const {
  for (const auto& t : terms) {
    if (t.var < 0 || t.var >= static_cast<int>(vars_.size())) {
      throw LpBuildError(where + " references an undeclared variable");
    }
    if (!std::isfinite(t.coef)) throw LpBuildError(where + " has a non-finite coefficient");
  }
}

void LPInstance::add_constraint(const std::string& name, std::vector<LpTerm> terms, Relation rel,
                                double rhs) {
  check_terms(terms, "constraint '" + name + "'");
  if (!std::isfinite(rhs)) throw LpBuildError("constraint '" + name + "' has non-finite rhs");
  cons_.push_back({name, std::move(terms), rel, rhs});
}

void LPInstance::set_objective(Sense sense, std::vector<LpTerm> terms) {
  check_terms(terms, "objective");
  sense_ = sense;
  objective_ = std::move(terms);
  has_objective_ = true;
}

void LPInstance::validate() const {
  if (!has_objective_) throw LpBuildError("LP has no objective");
  check_terms(objective_, "objective");
  for (const auto& c : cons_) check_terms(c.terms, "constraint '" + c.name + "'");
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void dump_terms(std::ostream& os, const std::vector<LpTerm>& terms,
                const std::vector<LpVariable>& vars) {
  for (const auto& t : terms) os << ' ' << num(t.coef) << ' ' << vars[t.var].name;
}

}  // namespace

void LPInstance::dump(std::ostream& os) const {
  os << "objective " << (sense_ == Sense::Minimize ? "min" : "max");
  dump_terms(os, objective_, vars_);
  os << '\n';
  for (const auto& v : vars_) os << "var " << v.name << ' ' << num(v.lo) << ' ' << num(v.hi) << '\n';
  for (const auto& c : cons_) {
    os << "con " << c.name;
    dump_terms(os, c.terms, vars_);
    os << ' ' << (c.rel == Relation::LessEqual ? "<=" : c.rel == Relation::GreaterEqual ? ">=" : "=")
       << ' ' << num(c.rhs) << '\n';
  }
}

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::NumericalFailure: return "numerical_failure";
  }
  return "?";
}

namespace {

using ld = long double;

// How an original variable maps onto non-negative tableau columns:
// x = offset + sign * col[pos] (- col[neg] for free variables).
struct VarMap {
  ld offset = 0.0L;
  ld sign = 1.0L;
  int pos = -1;
  int neg = -1;
};

struct Row {
  std::vector<ld> a;
  Relation rel;
  ld rhs;
};

enum class RunResult { Optimal, Unbounded, IterationLimit };

class Tableau {
public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), n_(cols), t_(rows, std::vector<ld>(cols + 1, 0.0L)), basis_(rows, -1) {}

  ld& at(std::size_t i, std::size_t j) { return t_[i][j]; }
  ld& rhs(std::size_t i) { return t_[i][n_]; }
  int& basis(std::size_t i) { return basis_[i]; }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }

  void pivot(std::size_t r, std::size_t c, std::vector<ld>& reduced) {
    const ld p = t_[r][c];
    for (auto& v : t_[r]) v /= p;
    t_[r][c] = 1.0L;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const ld f = t_[i][c];
      if (f == 0.0L) continue;
      for (std::size_t j = 0; j <= n_; ++j) t_[i][j] -= f * t_[r][j];
      t_[i][c] = 0.0L;
    }
    const ld f = reduced[c];
    if (f != 0.0L) {
      for (std::size_t j = 0; j <= n_; ++j) reduced[j] -= f * t_[r][j];
      reduced[c] = 0.0L;
    }
    basis_[r] = static_cast<int>(c);
  }

  // Minimizes cost . x over columns with allowed[j]. `reduced` has size
  // cols + 1; its last entry holds minus the objective value.
  RunResult run(const std::vector<ld>& cost, const std::vector<bool>& allowed, int max_iter,
                std::vector<ld>& reduced) {
    reduced.assign(n_ + 1, 0.0L);
    for (std::size_t j = 0; j < n_; ++j) reduced[j] = cost[j];
    for (std::size_t i = 0; i < m_; ++i) {
      const ld cb = cost[static_cast<std::size_t>(basis_[i])];
      if (cb == 0.0L) continue;
      for (std::size_t j = 0; j <= n_; ++j) reduced[j] -= cb * t_[i][j];
    }
    constexpr ld kCostTol = 1e-13L;
    constexpr ld kPivotTol = 1e-11L;
    int degenerate_streak = 0;
    for (int iter = 0; iter < max_iter; ++iter) {
      // Dantzig's rule, switching to Bland's rule while steps are degenerate.
      const bool bland = degenerate_streak > 20;
      int enter = -1;
      ld best = -kCostTol;
      for (std::size_t j = 0; j < n_; ++j) {
        if (!allowed[j] || reduced[j] >= -kCostTol) continue;
        if (bland) {
          enter = static_cast<int>(j);
          break;
        }
        if (reduced[j] < best) {
          best = reduced[j];
          enter = static_cast<int>(j);
        }
      }
      if (enter < 0) return RunResult::Optimal;
      const auto c = static_cast<std::size_t>(enter);
      int leave = -1;
      ld ratio = 0.0L;
      for (std::size_t i = 0; i < m_; ++i) {
        const ld a = t_[i][c];
        if (a <= kPivotTol) continue;
        const ld r = std::max(t_[i][n_], 0.0L) / a;
        const bool better = leave < 0 || r < ratio - 1e-15L * (1.0L + ratio) ||
                            (r <= ratio + 1e-15L * (1.0L + ratio) &&
                             basis_[i] < basis_[static_cast<std::size_t>(leave)]);
        if (better) {
          leave = static_cast<int>(i);
          ratio = r;
        }
      }
      if (leave < 0) return RunResult::Unbounded;
      degenerate_streak = ratio == 0.0L ? degenerate_streak + 1 : 0;
      pivot(static_cast<std::size_t>(leave), c, reduced);
    }
    return RunResult::IterationLimit;
  }

private:
  std::size_t m_;
  std::size_t n_;
  std::vector<std::vector<ld>> t_;
  std::vector<int> basis_;
};

}  // namespace

LpSolution solve_lp(const LPInstance& lp, const LpOptions& opts) {
  lp.validate();
  const auto& vars = lp.variables();
  const std::size_t nv = vars.size();

  // Map each variable to non-negative columns.
  std::vector<VarMap> map(nv);
  int ncol = 0;
  std::vector<Row> rows;
  for (std::size_t k = 0; k < nv; ++k) {
    const auto& v = vars[k];
    if (std::isfinite(v.lo)) {
      map[k] = {static_cast<ld>(v.lo), 1.0L, ncol++, -1};
    } else if (std::isfinite(v.hi)) {
      map[k] = {static_cast<ld>(v.hi), -1.0L, ncol++, -1};
    } else {
      map[k] = {0.0L, 1.0L, ncol, ncol + 1};
      ncol += 2;
    }
  }
  const auto structural = static_cast<std::size_t>(ncol);

  auto expand = [&](const std::vector<LpTerm>& terms, std::vector<ld>& a, ld& shift) {
    a.assign(structural, 0.0L);
    shift = 0.0L;
    for (const auto& t : terms) {
      const auto& m = map[static_cast<std::size_t>(t.var)];
      const ld c = t.coef;
      shift += c * m.offset;
      a[static_cast<std::size_t>(m.pos)] += c * m.sign;
      if (m.neg >= 0) a[static_cast<std::size_t>(m.neg)] -= c;
    }
  };

  for (const auto& c : lp.constraints()) {
    Row r;
    ld shift;
    expand(c.terms, r.a, shift);
    r.rel = c.rel;
    r.rhs = static_cast<ld>(c.rhs) - shift;
    rows.push_back(std::move(r));
  }
  for (std::size_t k = 0; k < nv; ++k) {
    const auto& v = vars[k];
    if (std::isfinite(v.lo) && std::isfinite(v.hi)) {
      Row r;
      r.a.assign(structural, 0.0L);
      r.a[static_cast<std::size_t>(map[k].pos)] = 1.0L;
      r.rel = Relation::LessEqual;
      r.rhs = static_cast<ld>(v.hi) - static_cast<ld>(v.lo);
      rows.push_back(std::move(r));
    }
  }
  for (auto& r : rows) {
    if (r.rhs < 0.0L) {
      for (auto& x : r.a) x = -x;
      r.rhs = -r.rhs;
      if (r.rel == Relation::LessEqual) {
        r.rel = Relation::GreaterEqual;
      } else if (r.rel == Relation::GreaterEqual) {
        r.rel = Relation::LessEqual;
      }
    }
  }

  std::size_t n_slack = 0, n_art = 0;
  for (const auto& r : rows) {
    if (r.rel != Relation::Equal) ++n_slack;
    if (r.rel != Relation::LessEqual) ++n_art;
  }
  const std::size_t m = rows.size();
  const std::size_t total = structural + n_slack + n_art;
  Tableau tab(m, total);
  std::vector<bool> is_art(total, false);
  std::size_t next_slack = structural, next_art = structural + n_slack;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& r = rows[i];
    for (std::size_t j = 0; j < structural; ++j) tab.at(i, j) = r.a[j];
    tab.rhs(i) = r.rhs;
    if (r.rel == Relation::LessEqual) {
      tab.at(i, next_slack) = 1.0L;
      tab.basis(i) = static_cast<int>(next_slack++);
    } else {
      if (r.rel == Relation::GreaterEqual) tab.at(i, next_slack++) = -1.0L;
      tab.at(i, next_art) = 1.0L;
      is_art[next_art] = true;
      tab.basis(i) = static_cast<int>(next_art++);
    }
  }

  LpSolution sol;
  std::vector<ld> reduced;
  std::vector<bool> allowed(total, true);

  if (n_art > 0) {
    std::vector<ld> cost(total, 0.0L);
    for (std::size_t j = 0; j < total; ++j) cost[j] = is_art[j] ? 1.0L : 0.0L;
    const auto res = tab.run(cost, allowed, opts.max_iterations, reduced);
    if (res == RunResult::IterationLimit) {
      sol.message = "phase 1 iteration limit";
      return sol;
    }
    const ld infeas = -reduced[total];
    if (infeas > static_cast<ld>(opts.feas_tol)) {
      sol.status = LpStatus::Infeasible;
      char buf[80];
      std::snprintf(buf, sizeof buf, "phase 1 residual %.3Le", infeas);
      sol.message = buf;
      return sol;
    }
    // Drive remaining artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_art[static_cast<std::size_t>(tab.basis(i))]) continue;
      std::size_t best = total;
      ld mag = 1e-9L;
      for (std::size_t j = 0; j < total; ++j) {
        if (is_art[j]) continue;
        if (std::abs(tab.at(i, j)) > mag) {
          mag = std::abs(tab.at(i, j));
          best = j;
        }
      }
      if (best < total) tab.pivot(i, best, reduced);
    }
    for (std::size_t j = 0; j < total; ++j) allowed[j] = !is_art[j];
  }

  std::vector<ld> cost(total, 0.0L);
  {
    std::vector<ld> a;
    ld shift;
    expand(lp.objective(), a, shift);
    const ld sgn = lp.sense() == Sense::Minimize ? 1.0L : -1.0L;
    for (std::size_t j = 0; j < structural; ++j) cost[j] = sgn * a[j];
  }
  const auto res = tab.run(cost, allowed, opts.max_iterations, reduced);
  if (res == RunResult::Unbounded) {
    sol.status = LpStatus::Unbounded;
    sol.message = "objective unbounded";
    return sol;
  }
  if (res == RunResult::IterationLimit) {
    sol.message = "phase 2 iteration limit";
    return sol;
  }

  std::vector<ld> col(total, 0.0L);
  for (std::size_t i = 0; i < m; ++i) col[static_cast<std::size_t>(tab.basis(i))] = tab.rhs(i);
  sol.x.resize(nv);
  double worst = 0.0;
  for (std::size_t k = 0; k < nv; ++k) {
    const auto& mp = map[k];
    ld x = mp.offset + mp.sign * col[static_cast<std::size_t>(mp.pos)];
    if (mp.neg >= 0) x -= col[static_cast<std::size_t>(mp.neg)];
    double xd = static_cast<double>(x);
    const double below = vars[k].lo - xd;
    const double above = xd - vars[k].hi;
    worst = std::max({worst, below, above});
    sol.x[k] = std::clamp(xd, vars[k].lo, vars[k].hi);
  }
  for (const auto& c : lp.constraints()) {
    ld lhs = 0.0L;
    for (const auto& t : c.terms) lhs += static_cast<ld>(t.coef) * sol.x[static_cast<std::size_t>(t.var)];
    const ld d = lhs - static_cast<ld>(c.rhs);
    double v = 0.0;
    if (c.rel == Relation::LessEqual) v = static_cast<double>(std::max(d, 0.0L));
    if (c.rel == Relation::GreaterEqual) v = static_cast<double>(std::max(-d, 0.0L));
    if (c.rel == Relation::Equal) v = static_cast<double>(std::abs(d));
    worst = std::max(worst, v);
  }
  sol.max_violation = worst;
  ld obj = 0.0L;
  for (const auto& t : lp.objective()) obj += static_cast<ld>(t.coef) * sol.x[static_cast<std::size_t>(t.var)];
  sol.objective = static_cast<double>(obj);
  if (worst > opts.feas_tol) {
    sol.status = LpStatus::NumericalFailure;
    char buf[80];
    std::snprintf(buf, sizeof buf, "solution residual %.3e exceeds tolerance", worst);
    sol.message = buf;
    return sol;
  }
  sol.status = LpStatus::Optimal;
  return sol;
}

}  // namespace pqkd
