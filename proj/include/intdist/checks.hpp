#pragma once

#include <iosfwd>

// The oracle verification suite behind the `check` CLI command: brute-force
// normalization, reduction identities, gradient spot checks and moment
// identities for every family.  Prints one PASS/FAIL row per property.

namespace intdist {

bool run_property_checks(std::ostream& out);

}  // namespace intdist
