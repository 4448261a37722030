#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gfou::stats {

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);
/// Unbiased sample covariance of paired samples.
double covariance(std::span<const double> x, std::span<const double> y);
double median(std::vector<double> x);
/// Linear-interpolated quantile, q in [0, 1].
double quantile(std::vector<double> x, double q);

struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

/// Mean with standard error sd / sqrt(n).
Estimate mean_estimate(std::span<const double> x);

/// Batch-means estimates: the sample is split into `batches` contiguous
/// batches, the statistic is computed per batch, and the standard error is
/// sd(batch values) / sqrt(batches). The point value uses the full sample.
Estimate batch_means_covariance(std::span<const double> x, std::span<const double> y,
                                std::size_t batches = 50);
Estimate batch_means_variance(std::span<const double> x, std::size_t batches = 50);
Estimate batch_means_mean(std::span<const double> x, std::size_t batches = 50);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov law.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Survival function of the Kolmogorov distribution, P(K > t).
double kolmogorov_survival(double t);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Order-independent accumulator for moments of a sample; merges commute.
struct Moments {
    std::size_t n = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double v) {
        ++n;
        sum += v;
        sum_sq += v * v;
    }
    void merge(const Moments& o) {
        n += o.n;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double variance() const;
};

}  // namespace gfou::stats
