#include "pqkd/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "pqkd/errors.hpp"

namespace pqkd {

namespace {

// Uniform in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

double draw(std::mt19937_64& rng, const Range& r) { return r.lo + (r.hi - r.lo) * unit(rng); }

double nudge(std::mt19937_64& rng, const Range& r, double x, double scale) {
  const double span = (r.hi - r.lo) * scale;
  return std::clamp(x + span * (2.0 * unit(rng) - 1.0), r.lo, r.hi);
}

void check_range(const Range& r, double lo, double hi, bool open_lo, const char* name) {
  const bool ok = r.lo <= r.hi && (open_lo ? r.lo > lo : r.lo >= lo) && r.hi < hi;
  if (!ok) throw DomainError(std::string("search range for ") + name + " is out of bounds");
}

}  // namespace

SourceConfig Candidate::source() const {
  return SourceConfig::with_width(w, nu_t, dtheta_key, dtheta_test, dphi_test);
}

void SearchSpace::validate() const {
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  check_range(w, 0.0, 0.25 + 1e-15, true, "w");
  check_range(q_T, 0.0, 1.0, true, "q_T");
  check_range(nu_t, 0.0, 1e6, true, "nu_t");
  check_range(dtheta_key, 0.0, kHalfPi, true, "dtheta_key");
  check_range(dtheta_test, 0.0, kHalfPi, true, "dtheta_test");
  check_range(dphi_test, 0.0, kHalfPi, true, "dphi_test");
  if (budget == 0) throw DomainError("search budget must be at least 1");
}

SearchSpace pinned_space(const SearchSpace& base, double w, double dtheta_test,
                         double dphi_test) {
  SearchSpace s = base;
  s.w = {w, w};
  s.dtheta_test = {dtheta_test, dtheta_test};
  s.dphi_test = {dphi_test, dphi_test};
  return s;
}

Candidate sample_candidate(const SearchSpace& space, std::uint64_t seed, std::uint64_t index) {
  auto rng = stream(seed, 0, index);
  Candidate c;
  c.w = draw(rng, space.w);
  c.q_T = draw(rng, space.q_T);
  c.nu_t = draw(rng, space.nu_t);
  c.dtheta_key = draw(rng, space.dtheta_key);
  c.dtheta_test = draw(rng, space.dtheta_test);
  c.dphi_test = draw(rng, space.dphi_test);
  return c;
}

Candidate perturb_candidate(const SearchSpace& space, const Candidate& center, double scale,
                            std::uint64_t seed, std::uint64_t index) {
  auto rng = stream(seed, 1, index);
  Candidate c;
  c.w = nudge(rng, space.w, center.w, scale);
  c.q_T = nudge(rng, space.q_T, center.q_T, scale);
  c.nu_t = nudge(rng, space.nu_t, center.nu_t, scale);
  c.dtheta_key = nudge(rng, space.dtheta_key, center.dtheta_key, scale);
  c.dtheta_test = nudge(rng, space.dtheta_test, center.dtheta_test, scale);
  c.dphi_test = nudge(rng, space.dphi_test, center.dphi_test, scale);
  return c;
}

SearchResult best_of(const std::vector<Candidate>& samples, const std::vector<double>& rates,
                     const std::vector<std::string>& reasons) {
  if (samples.empty() || rates.size() != samples.size() || reasons.size() != samples.size()) {
    throw DomainError("best_of needs one rate and one reason per sample");
  }
  SearchResult res;
  res.best = samples[0];
  res.rate = rates[0];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (rates[i] > res.rate) {
      res.best = samples[i];
      res.rate = rates[i];
      res.best_index = i;
    }
    res.trace.push_back(res.rate);
  }
  if (res.rate > 0.0) return res;

  std::map<std::string, int> counts;
  for (const auto& r : reasons) ++counts[r.empty() ? "zero_rate" : r];
  int top = -1;
  for (const auto& [r, n] : counts) {
    if (n > top) {
      top = n;
      res.reason = r;
    }
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if ((reasons[i].empty() ? "zero_rate" : reasons[i]) == res.reason) {
      res.best = samples[i];
      res.best_index = i;
      break;
    }
  }
  res.all_aborted = true;
  res.rate = 0.0;
  std::fill(res.trace.begin(), res.trace.end(), 0.0);
  return res;
}

SearchResult random_search(const SearchSpace& space, const Objective& objective,
                           const std::optional<Candidate>& warm_start) {
  space.validate();
  std::vector<Candidate> order;
  if (warm_start) order.push_back(*warm_start);
  for (std::size_t i = 0; i < space.budget; ++i) order.push_back(sample_candidate(space, space.seed, i));

  std::vector<double> rates(order.size());
  std::vector<std::string> reasons(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) rates[i] = objective(order[i], reasons[i]);
  return best_of(order, rates, reasons);
}

}  // namespace pqkd
