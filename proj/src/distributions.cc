#include "pagerel/distributions.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pagerel/error.h"

namespace pagerel {
namespace {

double Polynomial(const double (&c)[8], double r) {
  double acc = c[7];
  for (int i = 6; i >= 0; --i) acc = acc * r + c[i];
  return acc;
}

// Wichura's AS241 (PPND16), good to about 1e-16 relative.
double QuantileAs241(double p) {
  static constexpr double kA[8] = {
      3.3871328727963666080e0, 1.3314166789178437745e+2,
      1.9715909503065514427e+3, 1.3731693765509461125e+4,
      4.5921953931549871457e+4, 6.7265770927008700853e+4,
      3.3430575583588128105e+4, 2.5090809287301226727e+3};
  static constexpr double kB[8] = {
      1.0, 4.2313330701600911252e+1,
      6.8718700749205790830e+2, 5.3941960214247511077e+3,
      2.1213794301586595867e+4, 3.9307895800092710610e+4,
      2.8729085735721942674e+4, 5.2264952788528545610e+3};
  static constexpr double kC[8] = {
      1.42343711074968357734e0, 4.63033784615654529590e0,
      5.76949722146069140550e0, 3.64784832476320460504e0,
      1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static constexpr double kD[8] = {
      1.0, 2.05319162663775882187e0,
      1.67638483018380384940e0, 6.89767334985100004550e-1,
      1.48103976427480074590e-1, 1.51986665636164571966e-2,
      5.47593808499534494600e-4, 1.05075007164441684324e-9};
  static constexpr double kE[8] = {
      6.65790464350110377720e0, 5.46378491116411436990e0,
      1.78482653991729133580e0, 2.96560571828504891230e-1,
      2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double kF[8] = {
      1.0, 5.99832206555887937690e-1,
      1.36929880922735805310e-1, 1.48753612908506148525e-2,
      7.86869131145613259100e-4, 1.84631831751005468180e-5,
      1.42151175831644588870e-7, 2.04426310338993978564e-15};

  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * Polynomial(kA, r) / Polynomial(kB, r);
  }
  double r = std::sqrt(-std::log(q < 0 ? p : 1.0 - p));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = Polynomial(kC, r) / Polynomial(kD, r);
  } else {
    r -= 5.0;
    x = Polynomial(kE, r) / Polynomial(kF, r);
  }
  return q < 0 ? -x : x;
}

// Continued fraction for the incomplete beta (modified Lentz).
double BetaContinuedFraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;
}

double StudentTPdf(double t, double df) {
  const double log_norm = std::lgamma((df + 1.0) / 2.0) -
                          std::lgamma(df / 2.0) -
                          0.5 * std::log(df * std::numbers::pi);
  return std::exp(log_norm - (df + 1.0) / 2.0 * std::log1p(t * t / df));
}

}  // namespace

double NormalCdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double NormalSurvival(double x) {
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double NormalPdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double NormalQuantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kOutOfDomain,
                "normal quantile needs 0 < p < 1, got " + std::to_string(p));
  }
  double x = QuantileAs241(p);
  // One Newton step, measuring the residual in the thinner tail.
  const double residual =
      p < 0.5 ? NormalCdf(x) - p : (1.0 - p) - NormalSurvival(x);
  const double density = NormalPdf(x);
  if (density > 0.0) x -= residual / density;
  return x;
}

double RegularizedIncompleteBeta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorCode::kOutOfDomain, "incomplete beta argument out of range");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * BetaContinuedFraction(a, b, x) / a;
  }
  return 1.0 - front * BetaContinuedFraction(b, a, 1.0 - x) / b;
}

double StudentTTwoSidedP(double t, double df) {
  if (!(df > 0.0)) {
    throw Error(ErrorCode::kOutOfDomain, "degrees of freedom must be positive");
  }
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  // df / (df + t^2) loses precision when t^2 is tiny; use the mirror form.
  if (t2 < df) {
    return 1.0 - RegularizedIncompleteBeta(0.5, df / 2.0, t2 / (df + t2));
  }
  return RegularizedIncompleteBeta(df / 2.0, 0.5, df / (df + t2));
}

double StudentTCdf(double t, double df) {
  const double tail = 0.5 * StudentTTwoSidedP(t, df);
  return t < 0 ? tail : 1.0 - tail;
}

double StudentTQuantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kOutOfDomain,
                "t quantile needs 0 < p < 1, got " + std::to_string(p));
  }
  if (!(df > 0.0)) {
    throw Error(ErrorCode::kOutOfDomain, "degrees of freedom must be positive");
  }
  if (p == 0.5) return 0.0;
  // Solve for the upper tail of |T|: P(T > x) = tail with x > 0.
  const bool lower = p < 0.5;
  const double tail = lower ? p : 1.0 - p;
  auto upper_tail = [df](double x) { return 0.5 * StudentTTwoSidedP(x, df); };

  double lo = 0.0;
  double hi = std::max(1.0, -NormalQuantile(tail));
  while (upper_tail(hi) > tail) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) break;
  }
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = upper_tail(x) - tail;
    if (f > 0) {
      lo = x;
    } else {
      hi = x;
    }
    const double density = StudentTPdf(x, df);
    double next = density > 0 ? x + f / density : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 1e-15 * std::max(1.0, std::fabs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return lower ? -x : x;
}

}  // namespace pagerel
