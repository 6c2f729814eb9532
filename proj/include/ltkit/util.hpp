#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace ltkit {

// Received-symbol count for relative overhead epsilon: m = ceil(k*(1+eps)).
// The 1e-9 slack keeps representation noise in k*(1+eps) from bumping the
// ceiling (1000 * 1.05 evaluates to 1050.0000000000001).
inline std::uint32_t symbols_for_overhead(std::uint32_t k, double epsilon) {
    if (k == 0) throw std::invalid_argument("symbols_for_overhead: k must be positive");
    const double raw = static_cast<double>(k) * (1.0 + epsilon);
    if (!(raw >= 0.0))  // also rejects NaN
        throw std::invalid_argument("symbols_for_overhead: overhead below -1");
    const double m = std::ceil(raw - 1e-9);
    return m <= 0.0 ? 0u : static_cast<std::uint32_t>(m);
}

// Kahan-Neumaier compensated accumulator. Used wherever a probability mass
// or an expectation is summed over many entries of mixed magnitude.
class NeumaierSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// log C(n, r) via lgamma. Exact zero at the boundaries so that callers can
// rely on log_binomial(n, n) == 0 bit-for-bit.
inline double log_binomial(std::uint64_t n, std::uint64_t r) {
    if (r > n) throw std::invalid_argument("log_binomial: r > n");
    if (r == 0 || r == n) return 0.0;
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(r) + 1.0) -
           std::lgamma(static_cast<double>(n - r) + 1.0);
}

}  // namespace ltkit
