#include "segaudit/stats/special.hpp"

#include <cmath>
#include <limits>

#include "segaudit/common.hpp"

namespace segaudit::stats {

namespace {

constexpr double kEps = 1e-16;
constexpr double kFpMin = 1e-300;
constexpr int kMaxIter = 500;

// Lower tail P(s,x) by power series, valid for x < s+1.
double gamma_series(double s, double x) {
  if (x == 0.0) return 0.0;
  double ap = s;
  double del = 1.0 / s;
  double sum = del;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// Upper tail Q(s,x) by continued fraction (modified Lentz), x >= s+1.
double gamma_cont_fraction(double s, double x) {
  double b = x + 1.0 - s;
  double c = 1.0 / kFpMin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = b + an / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

double beta_cont_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 3e-16) break;
  }
  return h;
}

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

}  // namespace

double reg_inc_gamma_lower(double s, double x) {
  if (!(s > 0.0) || !(x >= 0.0) || !std::isfinite(s))
    throw ValidationError("reg_inc_gamma: require s > 0 and x >= 0");
  if (std::isinf(x)) return 1.0;
  if (x < s + 1.0) return clamp01(gamma_series(s, x));
  return clamp01(1.0 - gamma_cont_fraction(s, x));
}

double reg_inc_gamma_upper(double s, double x) {
  if (!(s > 0.0) || !(x >= 0.0) || !std::isfinite(s))
    throw ValidationError("reg_inc_gamma: require s > 0 and x >= 0");
  if (std::isinf(x)) return 0.0;
  if (x < s + 1.0) return clamp01(1.0 - gamma_series(s, x));
  return clamp01(gamma_cont_fraction(s, x));
}

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw ValidationError("reg_inc_beta: require a, b > 0");
  if (!(x >= 0.0 && x <= 1.0))
    throw ValidationError("reg_inc_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0))
    return clamp01(bt * beta_cont_fraction(a, b, x) / a);
  return clamp01(1.0 - bt * beta_cont_fraction(b, a, 1.0 - x) / b);
}

double erfc_gamma(double t) {
  if (t >= 0.0) return reg_inc_gamma_upper(0.5, t * t);
  return 1.0 + reg_inc_gamma_lower(0.5, t * t);
}

double sf_chi2(double x, double df) {
  if (!(df > 0.0)) throw ValidationError("sf_chi2: df must be > 0");
  if (x <= 0.0) return 1.0;
  return reg_inc_gamma_upper(df / 2.0, x / 2.0);
}

double sf_f(double f, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw ValidationError("sf_f: df must be > 0");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return reg_inc_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

double sf_norm(double z) {
  if (std::isnan(z)) throw ValidationError("sf_norm: non-finite input");
  return 0.5 * erfc_gamma(z / std::sqrt(2.0));
}

double two_sided_t_pvalue(double t, double df) {
  if (!(df > 0.0)) throw ValidationError("t p-value: df must be > 0");
  if (std::isinf(t)) return 0.0;
  if (std::isnan(t)) throw ValidationError("t p-value: NaN statistic");
  return reg_inc_beta(df / 2.0, 0.5, df / (df + t * t));
}

// PPND16 (Wichura 1988, algorithm AS 241): maximum relative error about
// 1e-15 over (0,1).
double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw ValidationError("inverse_normal_cdf: p must be in (0,1)");
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258) * r +
              3.64784832476320460504) * r + 5.76949722146069140550) * r +
            4.63033784615654529590) * r + 1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580) * r +
            5.46378491116411436990) * r + 6.65790464350110377720) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -val : val;
}

}  // namespace segaudit::stats
