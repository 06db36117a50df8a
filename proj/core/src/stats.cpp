#include "spdelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spdelab {

void Accumulator::add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
}

void Accumulator::merge(const Accumulator& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
        *this = o;
        return;
    }
    const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
    const double d = o.mean_ - mean_;
    const double n = na + nb;
    mean_ += d * nb / n;
    m2_ += o.m2_ + d * d * na * nb / n;
    n_ += o.n_;
}

double Accumulator::variance() const {
    if (n_ < 2) return 0.0;
    return m2_ / static_cast<double>(n_ - 1);
}

MCResult Accumulator::result() const {
    if (n_ == 0) throw std::invalid_argument("aggregate: empty sample");
    MCResult r;
    r.n = n_;
    r.mean = mean_;
    r.stderr_ = n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
    r.ci_lo = r.mean - 1.959963984540054 * r.stderr_;
    r.ci_hi = r.mean + 1.959963984540054 * r.stderr_;
    return r;
}

MCResult aggregate(std::span<const double> samples) {
    Accumulator a;
    for (double x : samples) a.add(x);
    return a.result();
}

SlopeFit loglog_slope(std::span<const std::pair<double, double>> pairs) {
    if (pairs.size() < 2) throw std::invalid_argument("loglog_slope: need at least two points");
    const std::size_t n = pairs.size();
    double sx = 0, sy = 0;
    for (auto& [t, p] : pairs) {
        if (!(t > 0) || !(p > 0))
            throw std::invalid_argument("loglog_slope: coordinates must be positive");
        sx += std::log(t);
        sy += std::log(p);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (auto& [t, p] : pairs) {
        const double dx = std::log(t) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(p) - my);
    }
    if (sxx == 0) throw std::invalid_argument("loglog_slope: abscissae are all equal");
    SlopeFit f;
    f.slope = sxy / sxx;
    if (n > 2) {
        double rss = 0;
        const double b0 = my - f.slope * mx;
        for (auto& [t, p] : pairs) {
            const double r = std::log(p) - (b0 + f.slope * std::log(t));
            rss += r * r;
        }
        f.stderr_ = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
    }
    return f;
}

KsResult ks_distance(std::vector<double> a, std::vector<double> b, double alpha) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double d = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(i / na - j / nb));
    }
    KsResult r;
    r.statistic = d;
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    r.threshold = c * std::sqrt((na + nb) / (na * nb));
    r.pass = r.statistic <= r.threshold;
    return r;
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) throw std::invalid_argument("wilson_interval: no trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2 * n)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace spdelab
