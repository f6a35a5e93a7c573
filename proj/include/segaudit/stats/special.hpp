#ifndef SEGAUDIT_STATS_SPECIAL_HPP
#define SEGAUDIT_STATS_SPECIAL_HPP

namespace segaudit::stats {

// Regularized incomplete gamma, upper tail Q(s,x). Series for x < s+1,
// continued fraction otherwise; absolute error below 1e-12.
double reg_inc_gamma_upper(double s, double x);
double reg_inc_gamma_lower(double s, double x);

// Regularized incomplete beta I_x(a,b), continued fraction with the symmetry
// switch at x = (a+1)/(a+b+2).
double reg_inc_beta(double a, double b, double x);

// erfc built on the incomplete gamma: erfc(t) = Q(1/2, t^2) for t >= 0.
double erfc_gamma(double t);

// Survival functions (upper tails).
double sf_chi2(double x, double df);
double sf_f(double f, double d1, double d2);
double sf_norm(double z);

// Two-sided p for a t statistic with df residual degrees of freedom.
double two_sided_t_pvalue(double t, double df);

// Inverse standard normal CDF (Wichura's PPND16 rational approximation).
double inverse_normal_cdf(double p);

}  // namespace segaudit::stats

#endif
