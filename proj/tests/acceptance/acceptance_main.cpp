#include <iostream>

#include "acceptance/criteria.hpp"

int main() {
  const int failures = seqcs::acceptance::run_all(std::cout);
  return failures == 0 ? 0 : 1;
}
