#pragma once

// Self-contained statistical tests used by the analysis layer: Welch's
// t-test, Pearson chi-square on 2x2 tables, one-way repeated-measures
// ANOVA, effect sizes, and Benjamini-Hochberg adjustment. Tail
// probabilities come from hand-rolled regularized incomplete beta/gamma
// functions (Lentz continued fractions) accurate to 1e-12 absolute.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqmine::stats {

struct InsufficientData : std::runtime_error {
    explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroMarginal : std::runtime_error {
    ZeroMarginal() : std::runtime_error("chi-square table has a zero marginal") {}
};

struct OutOfRange : std::runtime_error {
    explicit OutOfRange(const std::string& what) : std::runtime_error(what) {}
};

enum class EffectKind { cohens_d, odds_ratio, partial_eta_squared };

struct TestResult {
    double statistic = 0.0;
    double df1 = 0.0;
    double df2 = 0.0;  // NaN for single-df tests
    double p_value = 1.0;
    double effect = 0.0;
    EffectKind effect_kind = EffectKind::cohens_d;
    // Set when a zero-variance structure forced the p-value to a limit
    // (0 for a nonzero observed difference).
    bool degenerate = false;
};

// Two-sample t-test on means. Default is Welch's unequal-variance form
// with Welch-Satterthwaite degrees of freedom; pooled=true switches to
// Student's equal-variance form. Effect is Cohen's d with the pooled
// standard deviation in both modes. Each sample needs n >= 2
// (InsufficientData). Two constant equal samples give t=0, p=1; constant
// samples with different means give the degenerate limit p=0.
TestResult welch_t_test(std::span<const double> x, std::span<const double> y,
                        bool pooled = false);

// Pearson chi-square with df=1 on [[a,b],[c,d]] (rows = groups, columns =
// outcome yes/no). No continuity correction unless yates=true. Effect is
// the odds ratio ad/bc, with 0.5 added to every cell when any cell is
// zero. All four marginals must be positive (ZeroMarginal).
TestResult chi_square_2x2(const std::array<std::array<std::uint64_t, 2>, 2>& table,
                          bool yates = false);

// One-way repeated-measures ANOVA over data[subject][bin]. Needs at
// least 2 subjects, 2 bins, and rectangular data (InsufficientData).
// F = MS_bins / MS_error with df = (bins-1, (bins-1)*(subjects-1));
// effect is partial eta squared. All-equal bin means give F=0, p=1; zero
// error variance with a real bin effect gives the degenerate limit p=0.
TestResult repeated_anova(const std::vector<std::vector<double>>& data);

// SS_bins / SS_total for the same layout; 0 when the data is constant.
double eta_squared_bins(const std::vector<std::vector<double>>& data);

// Benjamini-Hochberg step-up adjusted q-values, returned in input order.
// Inputs must lie in [0,1] (OutOfRange).
std::vector<double> bh_adjust(std::span<const double> p_values);

// Tail-probability primitives, exposed for testing.
double regularized_incomplete_beta(double a, double b, double x);
double regularized_gamma_q(double a, double x);
double student_t_two_sided_p(double t, double df);
double fisher_f_upper_p(double f, double df1, double df2);
double chi_square_upper_p(double x2, double df);

}  // namespace seqmine::stats
