#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fragscope/errors.hpp"

namespace fragscope {

// Monte Carlo estimate: sample mean, stderr = sample sd / sqrt(n).
struct MCEstimate {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
    std::size_t n = 0;

    double variance_of_samples() const { return stderr_of_mean * stderr_of_mean * static_cast<double>(n); }
};

// Streaming moment accumulator (Welford), mergeable so chunked parallel
// reductions stay order-stable.
struct Accumulator {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const Accumulator& other) {
        if (other.n == 0) return;
        if (n == 0) { *this = other; return; }
        const double na = static_cast<double>(n), nb = static_cast<double>(other.n);
        const double d = other.mean - mean;
        mean += d * nb / (na + nb);
        m2 += other.m2 + d * d * na * nb / (na + nb);
        n += other.n;
    }

    double sample_variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }

    MCEstimate estimate() const {
        if (n < 2) throw PreconditionError("MCEstimate requires at least 2 samples");
        return MCEstimate{mean, std::sqrt(sample_variance() / static_cast<double>(n)), n};
    }
};

// Central moments up to order four; used when a *variance* is the quantity
// under test and needs its own standard error.
struct Accumulator4 {
    std::size_t n = 0;
    double mean = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;

    void push(double x) {
        const double n1 = static_cast<double>(n);
        ++n;
        const double nn = static_cast<double>(n);
        const double d = x - mean;
        const double dn = d / nn;
        const double dn2 = dn * dn;
        const double t1 = d * dn * n1;
        mean += dn;
        m4 += t1 * dn2 * (nn * nn - 3 * nn + 3) + 6 * dn2 * m2 - 4 * dn * m3;
        m3 += t1 * dn * (nn - 2) - 3 * dn * m2;
        m2 += t1;
    }

    double sample_variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }

    // stderr of the sample variance from the fourth central moment
    double stderr_of_variance() const {
        if (n < 2) return 0.0;
        const double nn = static_cast<double>(n);
        const double mu2 = m2 / nn;
        const double mu4 = m4 / nn;
        const double var_of_var = (mu4 - mu2 * mu2 * (nn - 3.0) / (nn - 1.0)) / nn;
        return var_of_var > 0 ? std::sqrt(var_of_var) : 0.0;
    }
};

inline MCEstimate estimate_from(std::span<const double> xs) {
    Accumulator acc;
    for (double x : xs) acc.push(x);
    return acc.estimate();
}

inline double zscore(const MCEstimate& a, const MCEstimate& b) {
    const double se = std::sqrt(a.stderr_of_mean * a.stderr_of_mean + b.stderr_of_mean * b.stderr_of_mean);
    const double diff = a.mean - b.mean;
    if (se == 0.0) return diff == 0.0 ? 0.0 : std::copysign(HUGE_VAL, diff);
    return diff / se;
}

// One-sample Kolmogorov-Smirnov statistic against a callable CDF.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double dmax = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        dmax = std::max(dmax, std::max(static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n));
    }
    return dmax;
}

// Ordinary least squares on the design (x1, x2, 1). Normal equations in
// long double; the designs here are 3-wide and well within that.
struct Ols3 {
    double b1 = 0.0, b2 = 0.0, intercept = 0.0;
};

inline Ols3 ols3_fit(std::span<const double> x1, std::span<const double> x2, std::span<const double> y) {
    const std::size_t n = y.size();
    if (x1.size() != n || x2.size() != n || n < 4)
        throw PreconditionError("ols3_fit: need >= 4 rows and matching lengths");
    long double a[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    long double b[3] = {0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        const long double r[3] = {x1[i], x2[i], 1.0L};
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < 3; ++k) a[j][k] += r[j] * r[k];
            b[j] += r[j] * y[i];
        }
    }
    // Gaussian elimination with partial pivoting on the 3x3 system.
    int idx[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(static_cast<double>(a[idx[r]][col])) > std::fabs(static_cast<double>(a[idx[piv]][col]))) piv = r;
        std::swap(idx[col], idx[piv]);
        const long double d = a[idx[col]][col];
        if (d == 0.0L) throw PreconditionError("ols3_fit: singular design (degenerate grid)");
        for (int r = col + 1; r < 3; ++r) {
            const long double f = a[idx[r]][col] / d;
            for (int k = col; k < 3; ++k) a[idx[r]][k] -= f * a[idx[col]][k];
            b[idx[r]] -= f * b[idx[col]];
        }
    }
    long double sol[3];
    for (int row = 2; row >= 0; --row) {
        long double s = b[idx[row]];
        for (int k = row + 1; k < 3; ++k) s -= a[idx[row]][k] * sol[k];
        sol[row] = s / a[idx[row]][row];
    }
    return Ols3{static_cast<double>(sol[0]), static_cast<double>(sol[1]), static_cast<double>(sol[2])};
}

// Simple straight-line fit y = slope*x + intercept.
struct LineFit {
    double slope = 0.0, intercept = 0.0;
};

inline LineFit line_fit(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (y.size() != n || n < 2) throw PreconditionError("line_fit: need >= 2 matching rows");
    long double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += static_cast<long double>(x[i]) * x[i];
        sxy += static_cast<long double>(x[i]) * y[i];
    }
    const long double nn = static_cast<long double>(n);
    const long double denom = nn * sxx - sx * sx;
    if (denom == 0.0L) throw PreconditionError("line_fit: degenerate abscissae");
    LineFit f;
    f.slope = static_cast<double>((nn * sxy - sx * sy) / denom);
    f.intercept = static_cast<double>((sy - f.slope * sx) / nn);
    return f;
}

} // namespace fragscope
