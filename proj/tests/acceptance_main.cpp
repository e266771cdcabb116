#include <iostream>

#include "wlab/acceptance.hpp"

int main() {
  const int failures = wlab::run_acceptance(std::cout);
  if (failures > 0) std::cout << failures << " criterion(s) failed\n";
  return failures > 0 ? 1 : 0;
}
