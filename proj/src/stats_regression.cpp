#include "segaudit/stats/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "segaudit/common.hpp"
#include "segaudit/stats/special.hpp"

namespace segaudit::stats {

Term Term::numeric(std::string name) {
  Term t;
  t.kind = Kind::numeric;
  t.first = std::move(name);
  return t;
}

Term Term::categorical(std::string name) {
  Term t;
  t.kind = Kind::categorical;
  t.first = std::move(name);
  return t;
}

Term Term::interaction(Term a, Term b) {
  if (a.kind == Kind::interaction || b.kind == Kind::interaction)
    throw ValidationError("interaction terms cannot nest");
  Term t;
  t.kind = Kind::interaction;
  t.first = a.first;
  t.second = b.first;
  // interaction kind of each parent is re-derived at build time
  return t;
}

std::string Term::label() const {
  if (kind == Kind::interaction) return first + ":" + second;
  return first;
}

std::size_t Dataset::rows() const {
  if (!numeric.empty()) return numeric.begin()->second.size();
  if (!categorical.empty()) return categorical.begin()->second.size();
  return 0;
}

namespace {

// One expanded model column: values plus a display name.
struct BuiltColumn {
  std::string name;
  std::vector<double> values;
};

bool is_numeric_col(const Dataset& d, const std::string& name) {
  return d.numeric.count(name) > 0;
}

// Dummy-codes one base (non-interaction) column name into columns.
std::vector<BuiltColumn> expand_base(const Dataset& data, const std::string& name,
                                     const std::vector<std::size_t>& rows,
                                     std::map<std::string, std::string>& refs) {
  if (is_numeric_col(data, name)) {
    const auto& src = data.numeric.at(name);
    BuiltColumn col;
    col.name = name;
    col.values.reserve(rows.size());
    for (auto r : rows) col.values.push_back(src[r]);
    return {std::move(col)};
  }
  auto it = data.categorical.find(name);
  if (it == data.categorical.end())
    throw ValidationError("column not found: " + name);
  const auto& src = it->second;

  std::map<std::string, std::size_t> counts;
  for (auto r : rows) counts[src[r]]++;
  if (counts.size() < 2)
    throw ValidationError("constant categorical column: " + name);

  // Reference = most frequent level; ties go to the lexicographically
  // smallest (map iteration is already sorted).
  std::string ref;
  std::size_t best = 0;
  for (const auto& [level, cnt] : counts)
    if (cnt > best) {
      best = cnt;
      ref = level;
    }
  refs[name] = ref;

  std::vector<BuiltColumn> cols;
  for (const auto& [level, cnt] : counts) {
    if (level == ref) continue;
    BuiltColumn col;
    col.name = name + "[" + level + "]";
    col.values.reserve(rows.size());
    for (auto r : rows) col.values.push_back(src[r] == level ? 1.0 : 0.0);
    cols.push_back(std::move(col));
  }
  return cols;
}

}  // namespace

DesignBuild build_design(const Dataset& data, const std::string& response,
                         const std::vector<Term>& terms) {
  const auto resp_it = data.numeric.find(response);
  if (resp_it == data.numeric.end())
    throw ValidationError("response column not found or not numeric: " + response);
  const std::size_t n_all = data.rows();

  // Collect the base column names each term touches, for row filtering.
  std::vector<std::string> numeric_used;
  for (const auto& t : terms) {
    for (const std::string* name : {&t.first, &t.second}) {
      if (name->empty()) continue;
      if (is_numeric_col(data, *name)) numeric_used.push_back(*name);
      else if (!data.categorical.count(*name))
        throw ValidationError("column not found: " + *name);
    }
  }

  std::vector<std::size_t> rows;
  rows.reserve(n_all);
  for (std::size_t r = 0; r < n_all; ++r) {
    bool ok = std::isfinite(resp_it->second[r]);
    for (const auto& name : numeric_used)
      ok = ok && std::isfinite(data.numeric.at(name)[r]);
    if (ok) rows.push_back(r);
  }

  DesignBuild out;
  out.excluded_rows = n_all - rows.size();
  if (rows.empty()) throw ValidationError("no usable rows for model on " + response);

  std::vector<BuiltColumn> cols;
  std::vector<int> col_term;
  std::vector<std::string> labels;
  for (std::size_t ti = 0; ti < terms.size(); ++ti) {
    const Term& t = terms[ti];
    labels.push_back(t.label());
    if (t.kind == Term::Kind::interaction) {
      auto a_cols = expand_base(data, t.first, rows, out.design.reference_levels);
      auto b_cols = expand_base(data, t.second, rows, out.design.reference_levels);
      for (const auto& ac : a_cols)
        for (const auto& bc : b_cols) {
          BuiltColumn col;
          col.name = ac.name + ":" + bc.name;
          col.values.resize(rows.size());
          for (std::size_t i = 0; i < rows.size(); ++i)
            col.values[i] = ac.values[i] * bc.values[i];
          cols.push_back(std::move(col));
          col_term.push_back(static_cast<int>(ti));
        }
    } else {
      for (auto& c : expand_base(data, t.first, rows, out.design.reference_levels)) {
        cols.push_back(std::move(c));
        col_term.push_back(static_cast<int>(ti));
      }
    }
  }

  DesignMatrix& X = out.design;
  X.n = rows.size();
  X.p = cols.size() + 1;
  X.term_labels = std::move(labels);
  X.col_names.clear();
  X.col_names.push_back("(intercept)");
  for (const auto& c : cols) X.col_names.push_back(c.name);
  X.values.assign(X.n * X.p, 0.0);
  for (std::size_t i = 0; i < X.n; ++i) {
    X.values[i * X.p] = 1.0;
    for (std::size_t j = 0; j < cols.size(); ++j)
      X.values[i * X.p + j + 1] = cols[j].values[i];
  }

  out.response.reserve(rows.size());
  for (auto r : rows) out.response.push_back(resp_it->second[r]);
  return out;
}

RegressionResult ols_fit(const DesignMatrix& design, const std::vector<double>& y,
                         const std::string& response_name) {
  const std::size_t n = design.n, p = design.p;
  if (y.size() != n) throw ValidationError("ols_fit: response length mismatch");
  if (n <= p)
    throw ValidationError("ols_fit: need n > p (n=" + std::to_string(n) +
                          ", p=" + std::to_string(p) + ")");

  // Column-major working copy for the Householder sweep.
  std::vector<double> a(n * p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) a[j * n + i] = design.at(i, j);
  std::vector<double> qty(y);

  double max_col_norm = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[j * n + i] * a[j * n + i];
    max_col_norm = std::max(max_col_norm, std::sqrt(s));
  }
  const double rank_tol = 1e-10 * max_col_norm;

  std::vector<std::string> offenders;
  std::vector<double> r_diag(p, 0.0);
  for (std::size_t k = 0; k < p; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < n; ++i) norm += a[k * n + i] * a[k * n + i];
    norm = std::sqrt(norm);
    if (norm <= rank_tol) {
      offenders.push_back(design.col_names[k]);
      for (std::size_t i = k; i < n; ++i) a[k * n + i] = 0.0;
      continue;
    }
    const double alpha = (a[k * n + k] >= 0.0) ? -norm : norm;
    const double v0 = a[k * n + k] - alpha;
    a[k * n + k] = v0;  // Householder vector lives in place below the diagonal
    const double vtv = -2.0 * alpha * v0;  // == v0^2 + sum of squares below
    if (vtv > 0.0) {
      for (std::size_t j = k + 1; j < p; ++j) {
        double dot = 0.0;
        for (std::size_t i = k; i < n; ++i) dot += a[k * n + i] * a[j * n + i];
        const double scale = 2.0 * dot / vtv;
        for (std::size_t i = k; i < n; ++i) a[j * n + i] -= scale * a[k * n + i];
      }
      double dot = 0.0;
      for (std::size_t i = k; i < n; ++i) dot += a[k * n + i] * qty[i];
      const double scale = 2.0 * dot / vtv;
      for (std::size_t i = k; i < n; ++i) qty[i] -= scale * a[k * n + i];
    }
    a[k * n + k] = alpha;
    r_diag[k] = alpha;
  }
  if (!offenders.empty()) {
    std::string msg = "rank-deficient design, offending columns:";
    for (const auto& c : offenders) msg += " " + c;
    throw ValidationError(msg);
  }

  // R is the upper p x p of the swept matrix (column-major): R[i][j] = a[j*n+i].
  std::vector<double> beta(p, 0.0);
  for (std::size_t k = p; k-- > 0;) {
    double s = qty[k];
    for (std::size_t j = k + 1; j < p; ++j) s -= a[j * n + k] * beta[j];
    beta[k] = s / r_diag[k];
  }

  double rss = 0.0;
  for (std::size_t i = p; i < n; ++i) rss += qty[i] * qty[i];
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double tss = 0.0;
  for (double v : y) tss += (v - mean) * (v - mean);

  double y_scale = 0.0;
  for (double v : y) y_scale += v * v;

  RegressionResult res;
  res.response = response_name;
  res.term_labels = design.term_labels;
  res.n = n;
  res.p = p;
  res.rss = rss;
  res.tss = tss;
  if (tss > 1e-20 * std::max(1.0, y_scale)) {
    res.r2 = std::clamp(1.0 - rss / tss, 0.0, 1.0);
  } else {
    res.r2 = 0.0;
    res.degenerate = true;  // constant response up to rounding
  }

  // Standard errors from R^{-1}: diag((X'X)^{-1})_j = ||row j of R^{-1}||^2.
  const double df = static_cast<double>(n - p);
  const double sigma2 = rss / df;
  std::vector<double> rinv(p * p, 0.0);  // row-major upper triangular
  for (std::size_t j = p; j-- > 0;) {
    rinv[j * p + j] = 1.0 / r_diag[j];
    for (std::size_t i = j; i-- > 0;) {
      double s = 0.0;
      for (std::size_t k = i + 1; k <= j; ++k) s += a[k * n + i] * rinv[k * p + j];
      rinv[i * p + j] = -s / r_diag[i];
    }
  }
  res.coefficients.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    auto& c = res.coefficients[j];
    c.name = design.col_names[j];
    c.beta = beta[j];
    double d = 0.0;
    for (std::size_t k = j; k < p; ++k) d += rinv[j * p + k] * rinv[j * p + k];
    c.se = std::sqrt(sigma2 * d);
    if (c.se > 0.0) {
      c.t_stat = c.beta / c.se;
      c.p_value = two_sided_t_pvalue(c.t_stat, df);
    } else {
      c.t_stat = (c.beta == 0.0) ? 0.0 : std::numeric_limits<double>::infinity();
      c.p_value = (c.beta == 0.0) ? 1.0 : 0.0;
    }
  }

  if (p > 1 && !res.degenerate) {
    const double msr = (tss - rss) / static_cast<double>(p - 1);
    const double mse = rss / df;
    const double f = (mse > 0.0) ? msr / mse
                                 : (msr > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    res.f_stat = f;
    res.f_p_value = sf_f(f, static_cast<double>(p - 1), df);
  }
  return res;
}

RegressionResult fit_model(const Dataset& data, const std::string& response,
                           const std::vector<Term>& terms) {
  auto build = build_design(data, response, terms);
  return ols_fit(build.design, build.response, response);
}

TestResult anova_nested(const RegressionResult& reduced, const RegressionResult& full) {
  if (reduced.n != full.n || reduced.response != full.response)
    throw ValidationError("anova_nested: models were fit on different data");
  const std::set<std::string> rterms(reduced.term_labels.begin(), reduced.term_labels.end());
  const std::set<std::string> fterms(full.term_labels.begin(), full.term_labels.end());
  if (!std::includes(fterms.begin(), fterms.end(), rterms.begin(), rterms.end()))
    throw ValidationError("anova_nested: reduced terms are not a subset of full terms");
  const double df_r = reduced.df_resid();
  const double df_f = full.df_resid();
  if (!(df_f < df_r))
    throw ValidationError("anova_nested: models are not strictly nested (equal df)");
  if (full.rss > reduced.rss * (1.0 + 1e-9) + 1e-12)
    throw ValidationError("anova_nested: full-model RSS exceeds reduced-model RSS");

  const double num = std::max(0.0, reduced.rss - full.rss) / (df_r - df_f);
  const double den = full.rss / df_f;
  TestResult res;
  res.method = "anova_f";
  res.df = {df_r - df_f, df_f};
  if (den > 0.0) {
    res.statistic = num / den;
  } else {
    res.statistic = (num > 0.0) ? std::numeric_limits<double>::infinity() : 0.0;
    res.flags.push_back("degenerate");
  }
  res.p_value = sf_f(res.statistic, res.df[0], res.df[1]);
  return res;
}

namespace {

// Residual sum of squares onto the column span of the design, tolerating
// linearly dependent columns (they are skipped, as aliased directions).
// Needed by eta_squared: a covariate set that fully explains the effect
// makes the combined design rank-deficient by construction, yet its span
// RSS is perfectly well defined.
double span_rss(const DesignMatrix& design, const std::vector<double>& y) {
  const std::size_t n = design.n, p = design.p;
  std::vector<double> a(n * p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) a[j * n + i] = design.at(i, j);
  std::vector<double> qty(y);

  double max_col_norm = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[j * n + i] * a[j * n + i];
    max_col_norm = std::max(max_col_norm, std::sqrt(s));
  }
  const double tol = 1e-10 * max_col_norm;

  std::size_t rank = 0;
  for (std::size_t j = 0; j < p && rank < n; ++j) {
    double norm = 0.0;
    for (std::size_t i = rank; i < n; ++i) norm += a[j * n + i] * a[j * n + i];
    norm = std::sqrt(norm);
    if (norm <= tol) continue;  // aliased column
    const double alpha = (a[j * n + rank] >= 0.0) ? -norm : norm;
    const double v0 = a[j * n + rank] - alpha;
    a[j * n + rank] = v0;
    const double vtv = -2.0 * alpha * v0;
    if (vtv > 0.0) {
      for (std::size_t jj = j + 1; jj < p; ++jj) {
        double dot = 0.0;
        for (std::size_t i = rank; i < n; ++i) dot += a[j * n + i] * a[jj * n + i];
        const double scale = 2.0 * dot / vtv;
        for (std::size_t i = rank; i < n; ++i) a[jj * n + i] -= scale * a[j * n + i];
      }
      double dot = 0.0;
      for (std::size_t i = rank; i < n; ++i) dot += a[j * n + i] * qty[i];
      const double scale = 2.0 * dot / vtv;
      for (std::size_t i = rank; i < n; ++i) qty[i] -= scale * a[j * n + i];
    }
    ++rank;
  }
  double rss = 0.0;
  for (std::size_t i = rank; i < n; ++i) rss += qty[i] * qty[i];
  return rss;
}

}  // namespace

EtaSquared eta_squared(const Dataset& data, const std::string& response,
                       const Term& effect, const std::vector<Term>& covariates) {
  std::vector<Term> cov_plus_effect = covariates;
  cov_plus_effect.push_back(effect);

  // The three fits must share rows: filter once through the largest model.
  auto full_build = build_design(data, response, cov_plus_effect);
  const std::size_t n_all = data.rows();
  std::vector<std::size_t> keep;
  {
    // Recompute the row filter exactly as build_design does.
    const auto& resp = data.numeric.at(response);
    std::vector<std::string> numeric_used;
    for (const auto& t : cov_plus_effect)
      for (const std::string* name : {&t.first, &t.second})
        if (!name->empty() && data.numeric.count(*name)) numeric_used.push_back(*name);
    for (std::size_t r = 0; r < n_all; ++r) {
      bool ok = std::isfinite(resp[r]);
      for (const auto& nm : numeric_used) ok = ok && std::isfinite(data.numeric.at(nm)[r]);
      if (ok) keep.push_back(r);
    }
  }
  Dataset filtered;
  for (const auto& [name, col] : data.numeric) {
    auto& dst = filtered.numeric[name];
    dst.reserve(keep.size());
    for (auto r : keep) dst.push_back(col[r]);
  }
  for (const auto& [name, col] : data.categorical) {
    auto& dst = filtered.categorical[name];
    dst.reserve(keep.size());
    for (auto r : keep) dst.push_back(col[r]);
  }

  const auto b_effect = build_design(filtered, response, {effect});
  const auto b_cov = build_design(filtered, response, covariates);
  const auto b_both = build_design(filtered, response, cov_plus_effect);

  const auto& y = b_effect.response;
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double tss = 0.0, y_scale = 0.0;
  for (double v : y) {
    tss += (v - mean) * (v - mean);
    y_scale += v * v;
  }
  if (!(tss > 1e-20 * std::max(1.0, y_scale)))
    throw ValidationError("eta_squared: response has zero variance");

  const double rss_effect = span_rss(b_effect.design, b_effect.response);
  const double rss_cov = span_rss(b_cov.design, b_cov.response);
  const double rss_both = span_rss(b_both.design, b_both.response);

  EtaSquared out;
  out.unadjusted = std::clamp((tss - rss_effect) / tss, 0.0, 1.0);
  out.adjusted_delta = std::clamp((rss_cov - rss_both) / tss, 0.0, 1.0);
  if (out.unadjusted > 0.0)
    out.attenuation_pct = 100.0 * (out.unadjusted - out.adjusted_delta) / out.unadjusted;
  return out;
}

}  // namespace segaudit::stats
