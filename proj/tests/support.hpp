#pragma once

#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "kinex/error.hpp"

namespace test {

// Uniform draw from the simplex (normalized exponentials).
inline std::vector<double> random_simplex(std::size_t n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> x(n);
  double total = 0.0;
  for (auto& v : x) total += (v = e(rng));
  for (auto& v : x) v /= total;
  return x;
}

template <class F>
void expect_code(kinex::ErrorCode code, F&& f) {
  try {
    f();
    FAIL("expected error ", std::string(kinex::to_string(code)));
  } catch (const kinex::Error& e) {
    CHECK_MESSAGE(e.code() == code, "got ", std::string(kinex::to_string(e.code())), ": ", e.what());
  }
}

}  // namespace test
