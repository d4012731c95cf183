#pragma once

// Source shapes shared by the tests.

#include "pqkd/source.hpp"

namespace pqkd::test {

// Narrow intervals and stripes used for the infinite-key search, with the
// remaining geometry at the SourceConfig defaults.
inline SourceConfig reference_source() {
  const SourceConfig d;
  return SourceConfig::with_width(5e-3, d.nu_t, d.dtheta_key, 0.1, 0.1);
}

// A wider shape with a visible difference between settings.
inline SourceConfig wide_source() { return SourceConfig::with_width(0.05, 0.2, 0.5, 0.2, 0.2); }

}  // namespace pqkd::test
