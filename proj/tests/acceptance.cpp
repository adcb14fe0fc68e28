// Runs every acceptance criterion and prints one verdict line each.

#include "fogpss/reproduce.hpp"

#include <exception>
#include <iostream>

int main() {
  try {
    const auto results = fogpss::run_acceptance();
    int failed = 0;
    for (const auto& r : results) {
      std::cout << fogpss::format_result(r) << '\n';
      if (!r.pass) ++failed;
    }
    std::cout << results.size() - static_cast<std::size_t>(failed) << '/' << results.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "acceptance run aborted: " << e.what() << '\n';
    return 2;
  }
}
