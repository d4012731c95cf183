#pragma once

// Small dense linear programs: a named-variable instance type, a two-phase
// simplex solver with a feasibility certificate, and a plain-text dump.
//
// Dump format, one item per line:
//   objective <min|max> <coef> <var> [<coef> <var> ...]
//   var <name> <lo> <hi>
//   con <name> <coef> <var> [...] <<=|>=|=> <rhs>
// Numbers are printed with 17 significant digits.

#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace pqkd {

enum class Relation { LessEqual, GreaterEqual, Equal };
enum class Sense { Minimize, Maximize };

struct LpVariable {
  std::string name;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

struct LpTerm {
  int var;
  double coef;
};

struct LpConstraint {
  std::string name;
  std::vector<LpTerm> terms;
  Relation rel = Relation::LessEqual;
  double rhs = 0.0;
};

class LPInstance {
public:
  /// Throws LpBuildError on duplicate names or lo > hi.
  int add_variable(const std::string& name, double lo, double hi);
  /// Throws LpBuildError if the name is unknown.
  int index(const std::string& name) const;
  bool has_variable(const std::string& name) const { return by_name_.count(name) > 0; }

  void add_constraint(const std::string& name, std::vector<LpTerm> terms, Relation rel,
                      double rhs);
  void set_objective(Sense sense, std::vector<LpTerm> terms);

  /// Checks every term references a declared variable and an objective exists.
  void validate() const;

  const std::vector<LpVariable>& variables() const { return vars_; }
  const std::vector<LpConstraint>& constraints() const { return cons_; }
  Sense sense() const { return sense_; }
  const std::vector<LpTerm>& objective() const { return objective_; }

  void dump(std::ostream& os) const;

private:
  void check_terms(const std::vector<LpTerm>& terms, const std::string& where) const;

  std::vector<LpVariable> vars_;
  std::map<std::string, int> by_name_;
  std::vector<LpConstraint> cons_;
  Sense sense_ = Sense::Minimize;
  std::vector<LpTerm> objective_;
  bool has_objective_ = false;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::NumericalFailure;
  double objective = 0.0;
  std::vector<double> x;
  double max_violation = 0.0;  // worst constraint or bound residual of x
  std::string message;
};

struct LpOptions {
  double feas_tol = 1e-9;
  int max_iterations = 20000;
};

/// Solves the instance. The returned x is checked against every row and
/// bound; a residual above feas_tol is reported as NumericalFailure.
LpSolution solve_lp(const LPInstance& lp, const LpOptions& opts = {});

}  // namespace pqkd
