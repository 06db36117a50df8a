#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace spdelab {

// Identifies one independent random stream.  Distinct
// (master_seed, replicate_index, stream_tag) triples give independent
// streams; the same triple always reproduces the same draws, no matter
// how work is scheduled across threads.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t replicate_index = 0;
    std::uint32_t stream_tag = 0;

    SeedSpec with_tag(std::uint32_t tag) const {
        return {master_seed, replicate_index, tag};
    }
    SeedSpec with_replicate(std::uint64_t rep) const {
        return {master_seed, rep, stream_tag};
    }
};

// SplitMix64 finalizer; full-avalanche 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Counter-based generator: every draw is a pure function of
// (stream key, step index, counter).  No state, so calls may be issued
// from any thread in any order.
class CounterRng {
  public:
    explicit CounterRng(const SeedSpec& s)
        : key_(mix64(mix64(mix64(s.master_seed) ^ s.replicate_index) ^ s.stream_tag)) {}

    std::uint64_t word(std::uint64_t step, std::uint64_t counter) const {
        return mix64(mix64(key_ ^ step) ^ (counter + 0x632be59bd9b4e019ull));
    }

    // Uniform on the open interval (0,1).
    double uniform(std::uint64_t step, std::uint64_t counter) const {
        return (static_cast<double>(word(step, counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller on counters (2k, 2k+1).
    double normal(std::uint64_t step, std::uint64_t counter) const;

    // Fills out[0..n) with i.i.d. standard normals (pairwise Box-Muller).
    void normal_fill(std::uint64_t step, double* out, std::size_t n) const;

  private:
    std::uint64_t key_;
};

// One time-step worth of standard-normal draws, one per spatial cell.
// The white-noise increment over a cell is values[i] * sqrt(dt*dx).
struct NoiseSlice {
    std::vector<double> values;
};

NoiseSlice white_noise_slice(const SeedSpec& seed, std::uint64_t step_index,
                             std::size_t n_cells);

// Reflecting Brownian motion on a uniform time grid together with a
// discrete local time at 0.
struct ReflectedPath {
    std::vector<double> times;
    std::vector<double> values;      // >= 0
    std::vector<double> local_time;  // nondecreasing, flat away from 0
};

// Discrete local-time increment: local_time_rate()*sqrt(dt) is added
// whenever the path sits below sqrt(dt).  The rate 1/2 is calibrated so
// that E[L_t(0)] from x0=0 matches E|B_t| = sqrt(2t/pi).
constexpr double local_time_rate() { return 0.5; }

ReflectedPath reflecting_bm(const SeedSpec& seed, double dt,
                            std::size_t n_steps, double x0);

}  // namespace spdelab
