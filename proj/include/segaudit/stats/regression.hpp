#ifndef SEGAUDIT_STATS_REGRESSION_HPP
#define SEGAUDIT_STATS_REGRESSION_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "segaudit/stats/tests.hpp"

namespace segaudit::stats {

// A model term: a numeric column, a categorical column (dummy-coded), or an
// interaction pair (all products of the parents' columns).
struct Term {
  enum class Kind { numeric, categorical, interaction };
  Kind kind = Kind::categorical;
  std::string first;
  std::string second;

  static Term numeric(std::string name);
  static Term categorical(std::string name);
  static Term interaction(Term a, Term b);
  std::string label() const;
};

// Column store the model builder reads from. All columns share row count.
struct Dataset {
  std::map<std::string, std::vector<double>> numeric;
  std::map<std::string, std::vector<std::string>> categorical;
  std::size_t rows() const;
};

struct DesignMatrix {
  std::size_t n = 0, p = 0;
  std::vector<double> values;  // row-major n x p, column 0 all ones
  std::vector<std::string> col_names;
  std::vector<std::string> term_labels;  // intercept excluded
  std::map<std::string, std::string> reference_levels;

  double at(std::size_t i, std::size_t j) const { return values[i * p + j]; }
};

struct DesignBuild {
  DesignMatrix design;
  std::vector<double> response;
  std::size_t excluded_rows = 0;  // rows dropped for non-finite values
};

// Dummy coding with reference level = most frequent (ties broken toward the
// lexicographically smallest); dummy columns in lexicographic level order,
// named term[level] and termA[la]:termB[lb] for interactions.
DesignBuild build_design(const Dataset& data, const std::string& response,
                         const std::vector<Term>& terms);

struct Coefficient {
  std::string name;
  double beta = 0.0, se = 0.0, t_stat = 0.0, p_value = 1.0;
};

struct RegressionResult {
  std::string response;
  std::vector<std::string> term_labels;
  std::size_t n = 0, p = 0;
  std::vector<Coefficient> coefficients;
  double rss = 0.0, tss = 0.0, r2 = 0.0;
  std::optional<double> f_stat, f_p_value;  // absent for intercept-only models
  bool degenerate = false;                  // constant response
  double df_resid() const { return static_cast<double>(n - p); }

  const Coefficient* find(const std::string& name) const {
    for (const auto& c : coefficients)
      if (c.name == name) return &c;
    return nullptr;
  }
};

// Least squares via Householder QR (no normal equations). Rank tolerance is
// 1e-10 times the largest column norm; offenders are named in the error.
RegressionResult ols_fit(const DesignMatrix& design, const std::vector<double>& y,
                         const std::string& response_name = "");

// Convenience: build + fit.
RegressionResult fit_model(const Dataset& data, const std::string& response,
                           const std::vector<Term>& terms);

// F-test comparing nested models: F = ((RSS_r - RSS_f)/(df_r - df_f)) /
// (RSS_f/df_f). Nesting is checked through term-set inclusion.
TestResult anova_nested(const RegressionResult& reduced, const RegressionResult& full);

struct EtaSquared {
  double unadjusted = 0.0;      // (TSS - RSS(y~effect)) / TSS
  double adjusted_delta = 0.0;  // (RSS(y~cov) - RSS(y~cov+effect)) / TSS
  std::optional<double> attenuation_pct;  // absent when unadjusted is zero
};

EtaSquared eta_squared(const Dataset& data, const std::string& response,
                       const Term& effect, const std::vector<Term>& covariates);

}  // namespace segaudit::stats

#endif
