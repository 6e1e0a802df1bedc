#pragma once

// Small statistics helpers for the test suites.

#include <cmath>
#include <stdexcept>

namespace teststats {

// Regularized upper incomplete gamma Q(a, x) by series / continued
// fraction, good enough for chi-square p-values.
inline double gamma_q(double a, double x) {
  if (x < 0 || a <= 0) throw std::invalid_argument("gamma_q domain");
  if (x == 0) return 1.0;
  double gln = std::lgamma(a);
  if (x < a + 1.0) {
    // P(a,x) series, return 1 - P.
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-14) break;
    }
    double p = sum * std::exp(-x + a * std::log(x) - gln);
    return 1.0 - p;
  }
  // Continued fraction for Q directly.
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::fabs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-14) break;
  }
  return std::exp(-x + a * std::log(x) - gln) * h;
}

// Chi-square p-value for observed counts against expected counts,
// pooling cells with small expectation into one bucket.
template <typename Map>
inline double chi_square_pvalue(const Map& observed, const Map& expected,
                                double total_shots, double min_expected = 5) {
  double chi2 = 0, pooled_obs = 0, pooled_exp = 0;
  int cells = 0;
  for (const auto& [key, prob] : expected) {
    double e = prob * total_shots;
    auto it = observed.find(key);
    double o = (it == observed.end()) ? 0.0 : it->second;
    if (e < min_expected) {
      pooled_obs += o;
      pooled_exp += e;
      continue;
    }
    chi2 += (o - e) * (o - e) / e;
    ++cells;
  }
  // Observed keys with no expected mass also pool.
  for (const auto& [key, o] : observed) {
    if (!expected.count(key)) pooled_obs += o;
  }
  if (pooled_exp > 0) {
    chi2 += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++cells;
  }
  int dof = cells - 1;
  if (dof < 1) return 1.0;
  return gamma_q(dof / 2.0, chi2 / 2.0);
}

}  // namespace teststats
