#pragma once

// Property suites over seeded random bodies: the operator identities and
// inequalities the iteration relies on, runnable from the CLI as a quick
// health check of the numerics.

#include <string>
#include <vector>

namespace curvimg {

std::vector<std::string> check_suite_names();

// Runs every suite (or just `only` when nonempty) with `seeds` random bodies
// per suite and prints a pass/fail table. Returns 0 iff all pass. Unknown
// suite names throw ConfigError.
int cmd_check(int seeds, const std::string& only);

}  // namespace curvimg
