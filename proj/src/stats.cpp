#include "gfou/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gfou::stats {

double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean of empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    return covariance(x, x);
}

double covariance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("covariance: size mismatch");
    if (x.size() < 2) throw std::invalid_argument("covariance: need at least two points");
    const double mx = mean(x);
    const double my = mean(y);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - mx) * (y[i] - my);
    return acc / static_cast<double>(x.size() - 1);
}

double quantile(std::vector<double> x, double q) {
    if (x.empty()) throw std::invalid_argument("quantile of empty sample");
    std::sort(x.begin(), x.end());
    const double pos = q * static_cast<double>(x.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, x.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return x[lo] * (1.0 - frac) + x[hi] * frac;
}

double median(std::vector<double> x) {
    return quantile(std::move(x), 0.5);
}

Estimate mean_estimate(std::span<const double> x) {
    const double m = mean(x);
    const double v = x.size() > 1 ? variance(x) : 0.0;
    return {m, std::sqrt(v / static_cast<double>(x.size()))};
}

namespace {

template <class Stat>
Estimate batch_means(std::size_t n, std::size_t batches, Stat stat) {
    if (batches < 2 || n < 2 * batches) {
        throw std::invalid_argument("batch means: need at least two points per batch");
    }
    std::vector<double> per_batch;
    per_batch.reserve(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        const std::size_t lo = b * n / batches;
        const std::size_t hi = (b + 1) * n / batches;
        per_batch.push_back(stat(lo, hi));
    }
    const double sd = std::sqrt(variance(per_batch));
    return {stat(0, n), sd / std::sqrt(static_cast<double>(batches))};
}

}  // namespace

Estimate batch_means_covariance(std::span<const double> x, std::span<const double> y,
                                std::size_t batches) {
    if (x.size() != y.size()) throw std::invalid_argument("covariance: size mismatch");
    return batch_means(x.size(), batches, [&](std::size_t lo, std::size_t hi) {
        return covariance(x.subspan(lo, hi - lo), y.subspan(lo, hi - lo));
    });
}

Estimate batch_means_variance(std::span<const double> x, std::size_t batches) {
    return batch_means_covariance(x, x, batches);
}

Estimate batch_means_mean(std::span<const double> x, std::size_t batches) {
    return batch_means(x.size(), batches,
                       [&](std::size_t lo, std::size_t hi) { return mean(x.subspan(lo, hi - lo)); });
}

double kolmogorov_survival(double t) {
    if (t <= 0.0) return 1.0;
    if (t < 0.3) {
        // Small-t form converges faster here.
        const double pi2 = M_PI * M_PI;
        double cdf = 0.0;
        for (int k = 1; k < 50; k += 2) {
            cdf += std::exp(-k * k * pi2 / (8.0 * t * t));
        }
        cdf *= std::sqrt(2.0 * M_PI) / t;
        return 1.0 - cdf;
    }
    double sum = 0.0;
    for (int k = 1; k < 200; ++k) {
        const double term = std::exp(-2.0 * k * k * t * t);
        sum += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    const double sq = std::sqrt(ne);
    // Stephens' small-sample correction.
    const double t = (sq + 0.12 + 0.11 / sq) * d;
    return {d, kolmogorov_survival(t)};
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: bad input");
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - fit.intercept - fit.slope * x[i];
            rss += r * r;
        }
        fit.slope_stderr = std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx);
    }
    return fit;
}

double Moments::variance() const {
    if (n < 2) return 0.0;
    const double m = mean();
    return (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
}

}  // namespace gfou::stats
