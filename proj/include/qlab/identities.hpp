#pragma once

#include <string>
#include <vector>

namespace qlab::identities {

struct IdentityRow {
  std::string name;
  std::string what;
  double measured = 0.0;   // worst deviation over the row's sample points
  double tolerance = 0.0;
  bool pass = false;
  std::string error;       // set when the computation threw; the row then fails
  double seconds = 0.0;
};

// Row names in suite order.
const std::vector<std::string>& identityNames();

// Runs the rows named in filter (comma-separated, empty = all), in suite
// order. Unknown names throw std::invalid_argument before anything runs.
std::vector<IdentityRow> runIdentitySuite(const std::string& filter = "");

}  // namespace qlab::identities
