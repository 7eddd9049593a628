#include "seqmine/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace seqmine::stats {

namespace {

constexpr double kEps = 1e-15;
constexpr double kFpMin = 1e-300;
constexpr int kMaxIter = 500;
const double kNaN = std::numeric_limits<double>::quiet_NaN();
const double kInf = std::numeric_limits<double>::infinity();

// Lentz continued fraction for the incomplete beta, Numerical-Recipes
// arrangement. Valid for x < (a+1)/(a+b+2); the caller applies the
// symmetry I_x(a,b) = 1 - I_{1-x}(b,a) otherwise.
double betacf(double a, double b, double x) {
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
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
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= kEps) break;
    }
    return h;
}

double beta_lower(double a, double b, double x) {
    double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x));
    return front * betacf(a, b, x) / a;
}

double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 1; i <= kMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_var(std::span<const double> v, double mean) {
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size() - 1);
}

void check_matrix(const std::vector<std::vector<double>>& data) {
    if (data.size() < 2)
        throw InsufficientData("repeated-measures layout needs at least 2 subjects");
    const std::size_t bins = data.front().size();
    if (bins < 2) throw InsufficientData("repeated-measures layout needs at least 2 bins");
    for (const auto& row : data)
        if (row.size() != bins)
            throw InsufficientData("repeated-measures layout must be rectangular");
}

struct SumsOfSquares {
    double total, bins, subjects, error;
};

SumsOfSquares decompose(const std::vector<std::vector<double>>& data) {
    const auto n = static_cast<double>(data.size());
    const std::size_t b = data.front().size();
    double grand = 0.0;
    for (const auto& row : data) grand += std::accumulate(row.begin(), row.end(), 0.0);
    grand /= n * static_cast<double>(b);

    std::vector<double> bin_means(b, 0.0);
    for (std::size_t j = 0; j < b; ++j) {
        for (const auto& row : data) bin_means[j] += row[j];
        bin_means[j] /= n;
    }

    double ss_bins = 0.0, ss_subj = 0.0, ss_err = 0.0;
    for (std::size_t j = 0; j < b; ++j)
        ss_bins += n * (bin_means[j] - grand) * (bin_means[j] - grand);
    for (const auto& row : data) {
        const double sm = std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(b);
        ss_subj += static_cast<double>(b) * (sm - grand) * (sm - grand);
        // Sum the double-centered residuals directly instead of subtracting
        // component sums from a separately accumulated total: a structurally
        // zero error term (identical integer rows) then comes out exactly
        // zero rather than as rounding noise that masks the degenerate case.
        for (std::size_t j = 0; j < b; ++j) {
            const double e = (row[j] - bin_means[j]) - (sm - grand);
            ss_err += e * e;
        }
    }
    return {ss_bins + ss_subj + ss_err, ss_bins, ss_subj, ss_err};
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw OutOfRange("incomplete beta needs positive shape parameters");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    if (x < (a + 1.0) / (a + b + 2.0)) return beta_lower(a, b, x);
    return 1.0 - beta_lower(b, a, 1.0 - x);
}

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0)) throw OutOfRange("incomplete gamma needs a positive shape parameter");
    if (x < 0.0) throw OutOfRange("incomplete gamma needs a non-negative argument");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double student_t_two_sided_p(double t, double df) {
    if (std::isnan(t)) return kNaN;
    if (std::isinf(t)) return 0.0;
    if (t == 0.0) return 1.0;
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double fisher_f_upper_p(double f, double df1, double df2) {
    if (std::isnan(f)) return kNaN;
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return regularized_incomplete_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f));
}

double chi_square_upper_p(double x2, double df) {
    if (x2 <= 0.0) return 1.0;
    return regularized_gamma_q(df / 2.0, x2 / 2.0);
}

TestResult welch_t_test(std::span<const double> x, std::span<const double> y, bool pooled) {
    if (x.size() < 2 || y.size() < 2)
        throw InsufficientData("t-test needs at least 2 observations per sample");
    const auto n1 = static_cast<double>(x.size());
    const auto n2 = static_cast<double>(y.size());
    const double m1 = mean_of(x), m2 = mean_of(y);
    const double v1 = sample_var(x, m1), v2 = sample_var(y, m2);
    const double diff = m1 - m2;

    const double pooled_var = ((n1 - 1.0) * v1 + (n2 - 1.0) * v2) / (n1 + n2 - 2.0);
    const double sp = std::sqrt(pooled_var);

    TestResult r;
    r.effect_kind = EffectKind::cohens_d;
    r.df2 = kNaN;

    double se, df;
    if (pooled) {
        se = sp * std::sqrt(1.0 / n1 + 1.0 / n2);
        df = n1 + n2 - 2.0;
    } else {
        se = std::sqrt(v1 / n1 + v2 / n2);
        double num = (v1 / n1 + v2 / n2) * (v1 / n1 + v2 / n2);
        double den = v1 * v1 / (n1 * n1 * (n1 - 1.0)) + v2 * v2 / (n2 * n2 * (n2 - 1.0));
        df = den > 0.0 ? num / den : n1 + n2 - 2.0;
    }
    r.df1 = df;

    if (se == 0.0) {
        if (diff == 0.0) {
            r.statistic = 0.0;
            r.p_value = 1.0;
            r.effect = 0.0;
        } else {
            r.statistic = diff > 0.0 ? kInf : -kInf;
            r.p_value = 0.0;
            r.effect = r.statistic;
            r.degenerate = true;
        }
        return r;
    }

    r.statistic = diff / se;
    r.p_value = student_t_two_sided_p(r.statistic, df);
    r.effect = sp > 0.0 ? diff / sp : (diff == 0.0 ? 0.0 : (diff > 0.0 ? kInf : -kInf));
    return r;
}

TestResult chi_square_2x2(const std::array<std::array<std::uint64_t, 2>, 2>& t, bool yates) {
    const double a = static_cast<double>(t[0][0]), b = static_cast<double>(t[0][1]);
    const double c = static_cast<double>(t[1][0]), d = static_cast<double>(t[1][1]);
    const double row0 = a + b, row1 = c + d, col0 = a + c, col1 = b + d;
    if (row0 == 0.0 || row1 == 0.0 || col0 == 0.0 || col1 == 0.0) throw ZeroMarginal();
    const double total = row0 + row1;

    double stat = 0.0;
    const double rows[2] = {row0, row1};
    const double cols[2] = {col0, col1};
    const double obs[2][2] = {{a, b}, {c, d}};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            double e = rows[i] * cols[j] / total;
            double dev = std::fabs(obs[i][j] - e);
            if (yates) dev = std::max(0.0, dev - 0.5);
            stat += dev * dev / e;
        }
    }

    TestResult r;
    r.statistic = stat;
    r.df1 = 1.0;
    r.df2 = kNaN;
    r.p_value = chi_square_upper_p(stat, 1.0);
    r.effect_kind = EffectKind::odds_ratio;
    if (a == 0.0 || b == 0.0 || c == 0.0 || d == 0.0)
        r.effect = ((a + 0.5) * (d + 0.5)) / ((b + 0.5) * (c + 0.5));
    else
        r.effect = (a * d) / (b * c);
    return r;
}

TestResult repeated_anova(const std::vector<std::vector<double>>& data) {
    check_matrix(data);
    const auto n = static_cast<double>(data.size());
    const auto b = static_cast<double>(data.front().size());
    const auto ss = decompose(data);

    TestResult r;
    r.df1 = b - 1.0;
    r.df2 = (b - 1.0) * (n - 1.0);
    r.effect_kind = EffectKind::partial_eta_squared;

    // Accumulated rounding error in the sums of squares scales with the
    // total variation; components within that noise floor are structural
    // zeros and must take their limit branch, not produce a garbage F.
    const double noise = ss.total * 1e-12;
    if (ss.bins <= noise) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        r.effect = 0.0;
        return r;
    }
    if (ss.error <= noise) {
        r.statistic = kInf;
        r.p_value = 0.0;
        r.effect = 1.0;
        r.degenerate = true;
        return r;
    }
    r.statistic = (ss.bins / r.df1) / (ss.error / r.df2);
    r.p_value = fisher_f_upper_p(r.statistic, r.df1, r.df2);
    r.effect = ss.bins / (ss.bins + ss.error);
    return r;
}

double eta_squared_bins(const std::vector<std::vector<double>>& data) {
    check_matrix(data);
    const auto ss = decompose(data);
    if (ss.total == 0.0) return 0.0;
    return ss.bins / ss.total;
}

std::vector<double> bh_adjust(std::span<const double> p_values) {
    const std::size_t m = p_values.size();
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0)) throw OutOfRange("p-values must lie in [0, 1]");
    if (m == 0) return {};

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return p_values[i] < p_values[j]; });

    std::vector<double> q(m);
    double running = 1.0;
    for (std::size_t r = m; r-- > 0;) {
        double val = p_values[order[r]] * static_cast<double>(m) / static_cast<double>(r + 1);
        running = std::min(running, std::min(val, 1.0));
        q[order[r]] = running;
    }
    return q;
}

}  // namespace seqmine::stats
