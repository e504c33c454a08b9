// Runs every acceptance criterion at its stated tolerance and time budget; one line each.
#include <iostream>

#include "loewner/validation.hpp"

int main() {
  const auto results = loewner::run_validation();
  int failed = 0;
  for (const auto& r : results) {
    std::cout << loewner::format_result(r) << "\n";
    if (!r.pass()) {
      ++failed;
      if (!r.message.empty()) std::cout << "       " << r.message << "\n";
    }
  }
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
