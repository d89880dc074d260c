#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <algorithm>
#include <thread>

#include "fracperim/core.hpp"

int main(int argc, char** argv) {
  // deterministic by contract for any worker count
  unsigned hw = std::thread::hardware_concurrency();
  fracperim::set_default_workers(std::max(1u, hw / 2));
  return doctest::Context(argc, argv).run();
}
