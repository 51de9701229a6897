#ifndef VAROSC_TEST_SUPPORT_HPP
#define VAROSC_TEST_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "varosc/potential.hpp"

namespace varosc::testing {

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

/// Random bounded polynomial of even degree <= max_degree, coefficients in
/// [-scale, scale] and a positive leading term.
inline PolynomialPotential<double> random_potential(std::mt19937_64& rng, std::size_t max_degree,
                                                    double scale = 2.0) {
  std::uniform_int_distribution<std::size_t> deg_dist(1, max_degree / 2);
  std::uniform_real_distribution<double> coef(-scale, scale);
  std::uniform_real_distribution<double> lead(0.1, scale);
  const std::size_t deg = 2 * deg_dist(rng);
  std::vector<double> c(deg + 1);
  for (std::size_t j = 0; j < deg; ++j)
    c[j] = coef(rng);
  c[deg] = lead(rng);
  return PolynomialPotential<double>(c);
}

} // namespace varosc::testing

#endif // VAROSC_TEST_SUPPORT_HPP
