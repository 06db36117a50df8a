#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace spdelab {

// Point estimate with standard error and 95% interval.
struct MCResult {
    std::size_t n = 0;
    double mean = 0.0;
    double stderr_ = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

// Mergeable moment accumulator (Chan et al. pairwise update), so
// per-thread partials combine into exactly the whole-sample statistics.
class Accumulator {
  public:
    void add(double x);
    void merge(const Accumulator& o);
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const;  // sample variance, n-1 in the denominator
    MCResult result() const;

  private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

MCResult aggregate(std::span<const double> samples);

struct SlopeFit {
    double slope = 0.0;
    double stderr_ = 0.0;
};

// Least squares of log(p) against log(T); pairs must have positive
// coordinates and there must be at least two distinct abscissae.
SlopeFit loglog_slope(std::span<const std::pair<double, double>> pairs);

struct KsResult {
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

// Two-sample Kolmogorov-Smirnov distance with the large-sample
// rejection threshold c(alpha)*sqrt((n+m)/(n*m)).
KsResult ks_distance(std::vector<double> a, std::vector<double> b,
                     double alpha = 0.01);

struct WilsonInterval {
    double lo = 0.0;
    double hi = 0.0;
};

// Wilson score interval for a binomial proportion; behaves sensibly for
// successes near 0, which is where we use it.
WilsonInterval wilson_interval(std::size_t successes, std::size_t trials,
                               double z = 1.959963984540054);

}  // namespace spdelab
