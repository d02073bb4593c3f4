#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "leakforge/common.hpp"
#include "leakforge/io.hpp"

namespace leakforge {

enum class Alternative { two_sided, greater, less };

inline const char* alternative_name(Alternative a) {
    switch (a) {
        case Alternative::two_sided: return "two_sided";
        case Alternative::greater: return "greater";
        case Alternative::less: return "less";
    }
    return "?";
}

enum class TestMethod { shapiro_wilk, wilcoxon_signed_rank, paired_t };

inline const char* method_name(TestMethod m) {
    switch (m) {
        case TestMethod::shapiro_wilk: return "shapiro_wilk";
        case TestMethod::wilcoxon_signed_rank: return "wilcoxon_signed_rank";
        case TestMethod::paired_t: return "paired_t";
    }
    return "?";
}

struct TestResult {
    TestMethod method = TestMethod::shapiro_wilk;
    double statistic = 0.0;
    double p_value = 1.0;
    int n_effective = 0;
    Alternative alternative = Alternative::two_sided;
};

struct PairedSample {
    std::vector<double> a;
    std::vector<double> b;
};

namespace numeric {

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double norm_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

/// Inverse normal CDF, Wichura's PPND16 (AS 241), ~1e-16 relative accuracy.
inline double norm_ppf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw config_error("norm_ppf requires p in (0,1)");
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                    3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                  4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                  2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                  5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-9) * r +
                      1.84631831751005468180e-6) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -value : value;
}

inline double betacf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3e-16, fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

/// Regularized incomplete beta I_x(a, b).
inline double betai(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                               a * std::log(x) + b * std::log(1.0 - x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

/// P(T >= |t|) for Student's t with df degrees of freedom.
inline double t_tail_two(double t, double df) { return betai(df / 2.0, 0.5, df / (df + t * t)); }

inline double t_sf(double t, double df) {  // P(T >= t)
    const double half = 0.5 * t_tail_two(t, df);
    return t >= 0.0 ? half : 1.0 - half;
}

/// Midranks of |values|, ties averaged; also returns the tie-correction term
/// sum(t^3 - t) over tie groups.
inline std::pair<std::vector<double>, double> midranks(const std::vector<double>& magnitudes) {
    const std::size_t n = magnitudes.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return magnitudes[x] < magnitudes[y]; });
    std::vector<double> ranks(n, 0.0);
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && magnitudes[order[j + 1]] == magnitudes[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    return {ranks, tie_term};
}

}  // namespace numeric

/// Shapiro-Wilk normality test with Royston's AS R94 coefficient and p-value
/// approximations. Valid here for 3 <= n <= 50 (the repeat counts this
/// toolkit produces); a constant sample is degenerate.
inline TestResult shapiro_wilk(std::vector<double> x) {
    const int n = static_cast<int>(x.size());
    if (n < 3 || n > 50)
        throw config_error("shapiro_wilk requires 3 <= n <= 50, got n = " + std::to_string(n));
    std::sort(x.begin(), x.end());
    if (x.back() - x.front() < 1e-300)
        throw degenerate_sample_error("shapiro_wilk: sample is constant");

    const int nn2 = n / 2;
    std::vector<double> coef(static_cast<std::size_t>(n), 0.0);  // full coefficient vector
    if (n == 3) {
        const double sqrth = std::sqrt(0.5);
        coef[0] = -sqrth;
        coef[2] = sqrth;
    } else {
        const double an25 = n + 0.25;
        std::vector<double> a(static_cast<std::size_t>(nn2));
        double summ2 = 0.0;
        for (int i = 1; i <= nn2; ++i) {
            a[static_cast<std::size_t>(i - 1)] = numeric::norm_ppf((i - 0.375) / an25);
            summ2 += a[static_cast<std::size_t>(i - 1)] * a[static_cast<std::size_t>(i - 1)];
        }
        summ2 *= 2.0;
        const double ssumm2 = std::sqrt(summ2);
        const double rsn = 1.0 / std::sqrt(static_cast<double>(n));
        auto poly = [](std::initializer_list<double> cs, double v) {
            double acc = 0.0, pw = 1.0;
            for (double c : cs) {
                acc += c * pw;
                pw *= v;
            }
            return acc;
        };
        const double a1 =
            poly({0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056}, rsn) - a[0] / ssumm2;
        int i1;
        double fac;
        if (n > 5) {
            i1 = 3;
            const double a2 =
                -a[1] / ssumm2 + poly({0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633}, rsn);
            fac = std::sqrt((summ2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1]) /
                            (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
            a[0] = a1;
            a[1] = a2;
        } else {
            i1 = 2;
            fac = std::sqrt((summ2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1));
            a[0] = a1;
        }
        for (int i = i1; i <= nn2; ++i) a[static_cast<std::size_t>(i - 1)] = -a[static_cast<std::size_t>(i - 1)] / fac;
        for (int i = 0; i < n; ++i) {
            const int j = n - 1 - i;
            if (i < j)
                coef[static_cast<std::size_t>(i)] = -a[static_cast<std::size_t>(i)];
            else if (i > j)
                coef[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(j)];
        }
    }

    // W = squared correlation between sorted data and coefficients
    double mean_x = 0.0, mean_c = 0.0;
    for (int i = 0; i < n; ++i) {
        mean_x += x[static_cast<std::size_t>(i)];
        mean_c += coef[static_cast<std::size_t>(i)];
    }
    mean_x /= n;
    mean_c /= n;
    double sax = 0.0, ssa = 0.0, ssx = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dc = coef[static_cast<std::size_t>(i)] - mean_c;
        const double dx = x[static_cast<std::size_t>(i)] - mean_x;
        sax += dc * dx;
        ssa += dc * dc;
        ssx += dx * dx;
    }
    const double w = (sax * sax) / (ssa * ssx);

    double p;
    if (n == 3) {
        const double pi6 = 6.0 / std::acos(-1.0);
        const double stqr = std::asin(std::sqrt(0.75));
        p = std::clamp(pi6 * (std::asin(std::sqrt(w)) - stqr), 0.0, 1.0);
    } else {
        double y = std::log(1.0 - w);
        const double an = static_cast<double>(n);
        double m, s;
        if (n <= 11) {
            const double gamma = -2.273 + 0.459 * an;
            if (y >= gamma) {
                p = 1e-19;
                TestResult out{TestMethod::shapiro_wilk, w, p, n, Alternative::two_sided};
                return out;
            }
            y = -std::log(gamma - y);
            m = 0.5440 - 0.39978 * an + 0.025054 * an * an - 0.0006714 * an * an * an;
            s = std::exp(1.3822 - 0.77857 * an + 0.062767 * an * an - 0.0020322 * an * an * an);
        } else {
            const double xx = std::log(an);
            m = -1.5861 - 0.31082 * xx - 0.083751 * xx * xx + 0.0038915 * xx * xx * xx;
            s = std::exp(-0.4803 - 0.082676 * xx + 0.0030302 * xx * xx);
        }
        p = numeric::norm_sf((y - m) / s);
    }
    return TestResult{TestMethod::shapiro_wilk, w, p, n, Alternative::two_sided};
}

/// Wilcoxon signed-rank test on paired differences a - b. Zero differences
/// are dropped (Wilcoxon's original treatment); tied magnitudes get average
/// ranks. The reported statistic is min(W+, W-), the two-sided convention.
/// Exact p by enumerating all 2^n sign assignments when n_effective <= 12,
/// otherwise normal approximation with continuity and tie corrections.
inline TestResult wilcoxon_signed_rank(const PairedSample& s,
                                       Alternative alternative = Alternative::two_sided) {
    if (s.a.size() != s.b.size() || s.a.size() < 2)
        throw config_error("wilcoxon_signed_rank requires |a| = |b| >= 2");
    std::vector<double> diffs;
    for (std::size_t i = 0; i < s.a.size(); ++i) {
        const double d = s.a[i] - s.b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    const int n = static_cast<int>(diffs.size());
    if (n == 0) throw degenerate_sample_error("wilcoxon_signed_rank: all differences are zero");

    std::vector<double> magnitudes(diffs.size());
    for (std::size_t i = 0; i < diffs.size(); ++i) magnitudes[i] = std::fabs(diffs[i]);
    auto [ranks, tie_term] = numeric::midranks(magnitudes);

    double w_plus = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        total += ranks[i];
        if (diffs[i] > 0.0) w_plus += ranks[i];
    }
    const double w_minus = total - w_plus;
    const double statistic = std::min(w_plus, w_minus);

    double p_greater, p_less;
    if (n <= 12) {
        // rank sums are multiples of 0.5, exactly representable: comparisons are exact
        const std::uint32_t m = 1u << n;
        std::uint64_t count_ge = 0, count_le = 0;
        for (std::uint32_t mask = 0; mask < m; ++mask) {
            double sum = 0.0;
            for (int bit = 0; bit < n; ++bit)
                if (mask & (1u << bit)) sum += ranks[static_cast<std::size_t>(bit)];
            if (sum >= w_plus) ++count_ge;
            if (sum <= w_plus) ++count_le;
        }
        p_greater = static_cast<double>(count_ge) / static_cast<double>(m);
        p_less = static_cast<double>(count_le) / static_cast<double>(m);
    } else {
        const double dn = n;
        const double mean = dn * (dn + 1.0) / 4.0;
        const double var = dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0 - tie_term / 48.0;
        const double sd = std::sqrt(var);
        p_greater = numeric::norm_sf((w_plus - mean - 0.5) / sd);
        p_less = numeric::norm_cdf((w_plus - mean + 0.5) / sd);
    }

    double p;
    switch (alternative) {
        case Alternative::greater: p = p_greater; break;
        case Alternative::less: p = p_less; break;
        case Alternative::two_sided:
        default: p = std::min(1.0, 2.0 * std::min(p_greater, p_less)); break;
    }
    return TestResult{TestMethod::wilcoxon_signed_rank, statistic, p, n, alternative};
}

/// Paired t-test on differences a - b: t = mean(d) / (sd(d)/sqrt(n)),
/// df = n - 1, p from the Student-t CDF via the regularized incomplete beta.
inline TestResult paired_t(const PairedSample& s, Alternative alternative = Alternative::two_sided) {
    if (s.a.size() != s.b.size() || s.a.size() < 2)
        throw config_error("paired_t requires |a| = |b| >= 2");
    const int n = static_cast<int>(s.a.size());
    std::vector<double> d(s.a.size());
    for (std::size_t i = 0; i < s.a.size(); ++i) d[i] = s.a[i] - s.b[i];
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : d) ss += (v - mean) * (v - mean);
    if (ss <= 0.0) throw degenerate_sample_error("paired_t: differences have zero variance");
    const double sd = std::sqrt(ss / (n - 1));
    const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
    const double df = n - 1;

    double p;
    switch (alternative) {
        case Alternative::greater: p = numeric::t_sf(t, df); break;
        case Alternative::less: p = 1.0 - numeric::t_sf(t, df); break;
        case Alternative::two_sided:
        default: p = numeric::t_tail_two(t, df); break;
    }
    return TestResult{TestMethod::paired_t, t, p, n, alternative};
}

struct ArmComparison {
    std::string arm_a;
    std::string arm_b;
    double mean_a = 0.0;
    double mean_b = 0.0;
    std::string direction;  // name of the higher-mean arm, or "equal"
    bool degenerate = false;
    std::optional<TestResult> normality;  // Shapiro-Wilk on the differences
    std::optional<TestResult> test;       // the chosen paired test, two-sided
};

/// Compare every arm pair the way the source analysis does: test the paired
/// differences for normality, then use the paired t-test when they look
/// normal (Shapiro p >= alpha) and the Wilcoxon signed-rank test otherwise.
inline std::vector<ArmComparison> compare_arms(
    const std::map<std::string, std::vector<double>>& arm_scores, double alpha = 0.05) {
    if (!arm_scores.empty()) {
        const std::size_t n = arm_scores.begin()->second.size();
        if (n < 3) throw config_error("compare_arms requires at least 3 repeats per arm");
        for (const auto& [name, scores] : arm_scores)
            if (scores.size() != n)
                throw config_error("compare_arms requires equal repeat counts; arm '" + name +
                                   "' differs");
    }

    std::vector<ArmComparison> out;
    for (auto ia = arm_scores.begin(); ia != arm_scores.end(); ++ia) {
        for (auto ib = std::next(ia); ib != arm_scores.end(); ++ib) {
            ArmComparison cmp;
            cmp.arm_a = ia->first;
            cmp.arm_b = ib->first;
            const std::vector<double>& a = ia->second;
            const std::vector<double>& b = ib->second;
            for (double v : a) cmp.mean_a += v;
            for (double v : b) cmp.mean_b += v;
            cmp.mean_a /= static_cast<double>(a.size());
            cmp.mean_b /= static_cast<double>(b.size());
            cmp.direction = cmp.mean_a > cmp.mean_b ? cmp.arm_a
                            : cmp.mean_b > cmp.mean_a ? cmp.arm_b
                                                      : "equal";
            std::vector<double> diffs(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) diffs[i] = a[i] - b[i];
            try {
                cmp.normality = shapiro_wilk(diffs);
                PairedSample sample{a, b};
                if (cmp.normality->p_value >= alpha)
                    cmp.test = paired_t(sample, Alternative::two_sided);
                else
                    cmp.test = wilcoxon_signed_rank(sample, Alternative::two_sided);
            } catch (const degenerate_sample_error&) {
                cmp.degenerate = true;
            }
            out.push_back(std::move(cmp));
        }
    }
    return out;
}

inline json test_result_to_json(const TestResult& r) {
    json j;
    j["method"] = method_name(r.method);
    j["statistic"] = json_real(r.statistic);
    j["p_value"] = json_real(r.p_value);
    j["n_effective"] = r.n_effective;
    j["alternative"] = alternative_name(r.alternative);
    return j;
}

inline json comparisons_to_json(const std::vector<ArmComparison>& comparisons) {
    json arr = json::array();
    for (const ArmComparison& c : comparisons) {
        json j;
        j["arm_a"] = c.arm_a;
        j["arm_b"] = c.arm_b;
        j["mean_a"] = json_real(c.mean_a);
        j["mean_b"] = json_real(c.mean_b);
        j["direction"] = c.direction;
        j["degenerate"] = c.degenerate;
        j["normality"] = c.normality ? test_result_to_json(*c.normality) : json(nullptr);
        j["test"] = c.test ? test_result_to_json(*c.test) : json(nullptr);
        arr.push_back(std::move(j));
    }
    return arr;
}

}  // namespace leakforge
