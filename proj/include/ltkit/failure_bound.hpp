// Lower bound on the probability that maximum-likelihood decoding fails.
//
// The bound is the probability that at least one input symbol is touched by
// no output symbol, expanded by inclusion-exclusion over input subsets:
//
//   sum_{i=1..k} (-1)^{i+1} C(k,i) * (sum_d omega_d C(k-i,d)/C(k,d))^m
//
// The inner sum is the chance a single output avoids i fixed inputs, so the
// i-th power term is the chance all m outputs avoid them. Terms grow to
// astronomical magnitudes before cancelling down to a probability, so the
// whole evaluation runs in a wide binary float with compensated summation.
// If the largest term towers too far above the final sum to leave 64 clean
// bits, the evaluation retries once at four times the precision and reports
// a hard error only if the retry is still swamped.
#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <ltkit/degree_dist.hpp>
#include <ltkit/util.hpp>

namespace ltkit {

struct BoundOptions {
    // Rounded up to the nearest supported width: 256, 512, 1024, 2048,
    // 4096, 8192 or 16384 mantissa bits.
    std::uint32_t precision_bits = 256;
    // Raise the inner sum to the real power k(1+epsilon) instead of the
    // integer symbol count ceil(k(1+epsilon)) the simulator uses.
    bool real_exponent = false;
};

struct BoundResult {
    double value = 0.0;             // clamped to [0, 1]
    std::uint64_t terms_used = 0;   // inclusion-exclusion terms evaluated
    std::uint32_t precision_bits = 0;  // width that produced the value
    // True when the requested width was swamped by cancellation and the
    // value came from the widened retry instead.
    bool cancellation_flag = false;
};

namespace detail {

inline constexpr std::uint32_t kPrecisionLadder[] = {256,  512,  1024, 2048,
                                                     4096, 8192, 16384};

inline std::uint32_t round_up_precision(std::uint32_t bits) {
    for (std::uint32_t rung : kPrecisionLadder)
        if (rung >= bits) return rung;
    throw std::invalid_argument("pf_lower_bound: precision above " +
                                std::to_string(kPrecisionLadder[6]) +
                                " bits is not supported");
}

// Neumaier's variant of Kahan summation, templated so it works on the wide
// float type as well as double.
template <typename T>
struct CompensatedSum {
    T sum{0};
    T comp{0};

    void add(const T& x) {
        const T t = sum + x;
        if (abs(sum) >= abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    T value() const { return sum + comp; }
};

struct RawBound {
    double value = 0.0;
    std::uint64_t terms = 0;
    bool swamped = false;
};

template <std::uint32_t Bits>
RawBound eval_bound(const DegreeDistribution& dist, std::uint32_t k,
                    std::uint64_t m_int, double m_real, bool real_exponent) {
    using boost::multiprecision::cpp_bin_float;
    using boost::multiprecision::digit_base_2;
    using boost::multiprecision::et_off;
    using Wide =
        boost::multiprecision::number<cpp_bin_float<Bits, digit_base_2>, et_off>;

    const auto& probs = dist.probs();
    const std::uint32_t d_max = dist.d_max();

    // C(k-i,d)/C(k,d) equals the ratio of falling factorials, the d! having
    // cancelled, so precompute omega_d / prod_{t<d}(k-t) once and each term
    // only needs the numerator product prod_{t<d}(k-i-t).
    std::vector<Wide> omega_over_falling(d_max);
    {
        Wide den = 1;
        for (std::uint32_t d = 1; d <= d_max; ++d) {
            den *= static_cast<std::int64_t>(k) - (d - 1);
            if (probs[d - 1] != 0.0)
                omega_over_falling[d - 1] = Wide(probs[d - 1]) / den;
        }
    }

    CompensatedSum<Wide> acc;
    Wide max_term = 0;
    Wide binom = k;  // C(k, i), updated incrementally
    const Wide negligible_factor = ldexp(Wide(1), -static_cast<int>(Bits - 8));
    std::uint32_t quiet_run = 0;
    std::uint64_t terms = 0;

    for (std::uint32_t i = 1; i <= k; ++i) {
        // inner = P(one output avoids i fixed inputs)
        //       = sum_d omega_d C(k-i,d)/C(k,d)
        Wide inner = 0;
        Wide num = 1;
        for (std::uint32_t d = 1; d <= d_max; ++d) {
            const std::int64_t factor =
                static_cast<std::int64_t>(k) - i - (d - 1);
            if (factor <= 0) break;  // C(k-i, d) = 0 from here on
            num *= factor;
            if (probs[d - 1] != 0.0) inner += omega_over_falling[d - 1] * num;
        }

        Wide powered;
        if (real_exponent) {
            if (inner == 0)
                powered = m_real > 0.0 ? Wide(0) : Wide(1);
            else
                powered = pow(inner, Wide(m_real));
        } else {
            powered = m_int == 0 ? Wide(1)
                                 : pow(inner, static_cast<int>(m_int));
        }

        const Wide term = binom * powered;
        ++terms;
        if (term > max_term) max_term = term;
        acc.add(i % 2 == 1 ? term : -term);

        // Tail cutoff: once 50 consecutive terms are each below 2^-(B-8)
        // of the running value, the remainder cannot move the result.
        const Wide scale = abs(acc.value());
        if (term == 0 || (scale != 0 && term < scale * negligible_factor)) {
            if (++quiet_run >= 50) break;
        } else {
            quiet_run = 0;
        }

        binom *= k - i;
        binom /= i + 1;
    }

    Wide total = acc.value();
    RawBound out;
    out.terms = terms;
    // Fewer than 64 trustworthy bits left after cancellation: reject.
    out.swamped =
        max_term != 0 &&
        (total == 0 ||
         max_term > ldexp(abs(total), static_cast<int>(Bits) - 64));
    if (total < 0) total = 0;
    if (total > 1) total = 1;
    out.value = static_cast<double>(total);
    return out;
}

inline RawBound dispatch_bound(std::uint32_t rung, const DegreeDistribution& dist,
                               std::uint32_t k, std::uint64_t m_int,
                               double m_real, bool real_exponent) {
    switch (rung) {
        case 256:   return eval_bound<256>(dist, k, m_int, m_real, real_exponent);
        case 512:   return eval_bound<512>(dist, k, m_int, m_real, real_exponent);
        case 1024:  return eval_bound<1024>(dist, k, m_int, m_real, real_exponent);
        case 2048:  return eval_bound<2048>(dist, k, m_int, m_real, real_exponent);
        case 4096:  return eval_bound<4096>(dist, k, m_int, m_real, real_exponent);
        case 8192:  return eval_bound<8192>(dist, k, m_int, m_real, real_exponent);
        case 16384: return eval_bound<16384>(dist, k, m_int, m_real, real_exponent);
    }
    throw std::logic_error("pf_lower_bound: precision rung out of ladder");
}

}  // namespace detail

inline BoundResult pf_lower_bound(const DegreeDistribution& dist,
                                  std::uint32_t k, double epsilon,
                                  BoundOptions opts = {}) {
    if (k == 0) throw std::invalid_argument("pf_lower_bound: k must be positive");
    if (dist.k() != k)
        throw std::invalid_argument(
            "pf_lower_bound: distribution was built for k=" +
            std::to_string(dist.k()) + ", not k=" + std::to_string(k));
    const double m_real = static_cast<double>(k) * (1.0 + epsilon);
    if (!(m_real >= 0.0))
        throw std::invalid_argument(
            "pf_lower_bound: k(1+epsilon) must be nonnegative");
    const std::uint64_t m_int = symbols_for_overhead(k, epsilon);

    const std::uint32_t rung = detail::round_up_precision(opts.precision_bits);
    auto first = detail::dispatch_bound(rung, dist, k, m_int, m_real,
                                        opts.real_exponent);
    if (!first.swamped) return {first.value, first.terms, rung, false};

    const std::uint32_t wider = detail::round_up_precision(
        std::min<std::uint32_t>(rung * 4, detail::kPrecisionLadder[6]));
    if (wider == rung)
        throw std::runtime_error(
            "pf_lower_bound: alternating sum cancels past the widest "
            "supported precision (" + std::to_string(rung) + " bits)");
    auto second = detail::dispatch_bound(wider, dist, k, m_int, m_real,
                                         opts.real_exponent);
    if (second.swamped)
        throw std::runtime_error(
            "pf_lower_bound: cancellation still swamps the sum after "
            "retrying at " + std::to_string(wider) +
            " bits (requested " + std::to_string(rung) + ")");
    return {second.value, second.terms, wider, true};
}

inline BoundResult pf_lower_bound(const DegreeDistribution& dist,
                                  std::uint32_t k, double epsilon,
                                  std::uint32_t precision_bits) {
    BoundOptions opts;
    opts.precision_bits = precision_bits;
    return pf_lower_bound(dist, k, epsilon, opts);
}

}  // namespace ltkit
