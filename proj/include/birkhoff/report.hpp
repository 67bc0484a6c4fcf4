#pragma once

#include <string>
#include <vector>

namespace birkhoff {

// Outcome of a sweep of identity checks. Failures carry either the residual
// in canonical text or, for numeric checks, its largest magnitude.
struct Report {
  struct Entry {
    std::string identity;
    std::vector<int> indices;
    std::string residual;
    double max_abs_residual = 0;
  };

  std::string name;
  std::size_t checked = 0;
  std::vector<Entry> failures;
  std::vector<std::string> notes;

  bool ok() const { return failures.empty(); }
  void fail(std::string identity, std::vector<int> indices, std::string residual, double max_abs = 0) {
    failures.push_back({std::move(identity), std::move(indices), std::move(residual), max_abs});
  }
  void absorb(const Report& other) {
    checked += other.checked;
    failures.insert(failures.end(), other.failures.begin(), other.failures.end());
    notes.insert(notes.end(), other.notes.begin(), other.notes.end());
  }
};

}  // namespace birkhoff
