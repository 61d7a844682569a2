#pragma once

#include <string>
#include <vector>

namespace lcq {

/// A result together with non-fatal diagnostics (slope range too narrow,
/// extremum on a box face, ...).
template <class T>
struct Flagged {
  T value;
  std::vector<std::string> warnings;
};

/// Appends `from` to `to`, skipping exact duplicates.
inline void merge_warnings(std::vector<std::string>& to, const std::vector<std::string>& from) {
  for (const auto& w : from) {
    bool seen = false;
    for (const auto& existing : to) seen = seen || existing == w;
    if (!seen) to.push_back(w);
  }
}

}  // namespace lcq
