#pragma once

// Normal and Student-t distribution functions used by estimation and power
// analysis. Accuracy targets: normal quantile |error| <= 1e-9 on
// (1e-12, 1 - 1e-12); t CDF |error| <= 1e-10.

namespace pagerel {

double NormalCdf(double x);
// 1 - NormalCdf(x), without cancellation in the upper tail.
double NormalSurvival(double x);
double NormalPdf(double x);

// Inverse standard normal CDF. Throws Error(kOutOfDomain) unless 0 < p < 1.
double NormalQuantile(double p);

// I_x(a, b) for a, b > 0 and x in [0, 1].
double RegularizedIncompleteBeta(double a, double b, double x);

double StudentTCdf(double t, double df);
// P(|T| >= |t|).
double StudentTTwoSidedP(double t, double df);
// Inverse of StudentTCdf. Throws Error(kOutOfDomain) unless 0 < p < 1.
double StudentTQuantile(double p, double df);

}  // namespace pagerel
