#pragma once

// Uniform random search over the free source and protocol parameters.
// Sample i is a pure function of (seed, i), so extending the budget only
// appends samples and never changes earlier ones.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pqkd/source.hpp"

namespace pqkd {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct Candidate {
  double w = 0.05;
  double q_T = 0.1;
  double nu_t = 0.3;
  double dtheta_key = 0.5;
  double dtheta_test = 0.3;
  double dphi_test = 0.3;

  /// Key intervals [3w,1),[2w,3w),[w,2w),[0,w) and test intervals
  /// [0,1),[0,3w),[0,2w),[0,w).
  SourceConfig source() const;
  bool operator==(const Candidate&) const = default;
};

struct SearchSpace {
  Range w{0.005, 0.15};
  Range q_T{0.01, 0.5};
  Range nu_t{0.05, 1.5};
  Range dtheta_key{0.05, 1.5};
  Range dtheta_test{0.05, 1.2};
  Range dphi_test{0.05, 1.2};
  std::size_t budget = 200;
  std::uint64_t seed = 1;

  /// Throws DomainError if a range leaves its physical domain or budget = 0.
  void validate() const;
};

/// The infinite-key search: w, dtheta_test and dphi_test pinned, only nu_t
/// and dtheta_key searched.
SearchSpace pinned_space(const SearchSpace& base, double w, double dtheta_test,
                         double dphi_test);

/// Sample `index` of the uniform sequence for `seed`.
Candidate sample_candidate(const SearchSpace& space, std::uint64_t seed, std::uint64_t index);

/// Sample `index` of a local sequence around `center`: each coordinate is
/// drawn uniformly within +-scale of the range width, clipped to the range.
Candidate perturb_candidate(const SearchSpace& space, const Candidate& center, double scale,
                            std::uint64_t seed, std::uint64_t index);

struct SearchResult {
  Candidate best;
  double rate = 0.0;
  std::size_t best_index = 0;     // position in the evaluation order
  std::vector<double> trace;      // best rate after each evaluation
  bool all_aborted = false;
  std::string reason;             // set when all samples aborted
};

/// Best of already evaluated samples: highest rate, lowest index on ties.
/// When no rate is positive, picks the first sample carrying the most
/// frequent abort reason (ties between reasons resolve alphabetically).
SearchResult best_of(const std::vector<Candidate>& samples, const std::vector<double>& rates,
                     const std::vector<std::string>& reasons);

/// Objective returns the rate; a rate <= 0 counts as an abort and may set
/// `reason`. The warm start, if given, is evaluated first.
using Objective = std::function<double(const Candidate&, std::string& reason)>;

SearchResult random_search(const SearchSpace& space, const Objective& objective,
                           const std::optional<Candidate>& warm_start = std::nullopt);

}  // namespace pqkd
