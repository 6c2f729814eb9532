#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <ltkit/degree_dist.hpp>
#include <ltkit/util.hpp>

// Deterministic evolution of the decoder's ripple occupancies. The state
// after j triangularization steps carries the expected number of still-active
// output symbols m^(j) and, for each level i, the probability p_i^(j) that an
// active output has exactly i active neighbours. One step accounts for the
// input marked at step j+1:
//
//   - an active output leaves level i when the marked input is one of its i
//     neighbours among the k-j still-active inputs, rate chi_i = i/(k-j);
//   - level 1 is special: if the first ripple is empty (probability
//     (1-p_1)^m) the step is an inactivation, and the marked input is then
//     never a level-1 neighbour, so level-1 departures combine the two cases
//     as (1-chi_1)*(1-(1-p_1)^m) + chi_1*m*p_1;
//   - the expected inactivation count per step is exactly the empty-ripple
//     probability evaluated in the pre-step state.
//
// Once m^(j) hits zero every remaining step is an inactivation.

namespace ltkit {

struct RippleState {
    std::uint32_t j = 0;             // triangularization steps taken
    double active_outputs = 0.0;     // m^(j)
    std::vector<double> p;           // p[i-1] = P(active output sits in ripple i)
    double step_inactivations = 0.0; // expected inactivations in the step that produced this state
    double cum_inactivations = 0.0;
};

// Probability that the input marked at state (k, j) touches a given level-i
// output: i of the k-j active inputs are its neighbours.
inline double chi(std::uint32_t i, std::uint32_t k, std::uint32_t j) {
    if (j >= k) throw std::invalid_argument("chi: j must be smaller than k");
    if (i < 1 || i > k - j) throw std::invalid_argument("chi: i must lie in [1, k-j]");
    return static_cast<double>(i) / (k - j);
}

inline RippleState initial_state(std::uint32_t k, std::uint32_t m, const DegreeDistribution& dist) {
    if (k == 0 || m == 0) throw std::invalid_argument("initial_state: k and m must be positive");
    if (dist.d_max() == 0 || dist.d_max() > k)
        throw std::invalid_argument("initial_state: distribution support must lie in [1, k]");
    RippleState s;
    s.j = 0;
    s.active_outputs = static_cast<double>(m);
    s.p = dist.probs();
    return s;
}

namespace detail {

// (1-p)^m for real m >= 0 with the usual boundary conventions.
inline double pow_survival(double base, double expo) {
    if (expo == 0.0) return 1.0;
    if (base <= 0.0) return 0.0;
    if (base >= 1.0) return 1.0;
    return std::pow(base, expo);
}

inline constexpr double kDepleted = 1e-12;

}  // namespace detail

// One transition of the evolution; the input state is left untouched.
inline RippleState step(const RippleState& s, std::uint32_t k) {
    if (s.j >= k) throw std::invalid_argument("step: state is already at j = k");
    const double remaining = static_cast<double>(k - s.j);
    const std::size_t levels = s.p.size();

    RippleState next;
    next.j = s.j + 1;
    next.p.assign(levels, 0.0);

    const double m = s.active_outputs;
    if (m < detail::kDepleted) {
        // No active outputs left: every remaining step inactivates one input.
        next.active_outputs = 0.0;
        next.step_inactivations = 1.0;
        next.cum_inactivations = s.cum_inactivations + 1.0;
        return next;
    }

    const double p1 = levels > 0 ? s.p[0] : 0.0;
    const double empty_ripple = detail::pow_survival(1.0 - p1, m);

    std::vector<double> leave(levels + 1, 0.0);  // leave[i], 1-based; leave[0] unused
    for (std::size_t i = 1; i <= levels; ++i) {
        const double chi_i = std::min(static_cast<double>(i) / remaining, 1.0);
        if (i == 1)
            leave[1] = (1.0 - chi_i) * (1.0 - empty_ripple) + chi_i * m * p1;
        else
            leave[i] = chi_i * m * s.p[i - 1];
    }

    double m_next = m - leave[1];
    if (m_next < detail::kDepleted) {
        next.active_outputs = 0.0;  // the level populations die with the pool
    } else {
        next.active_outputs = m_next;
        for (std::size_t i = 1; i <= levels; ++i) {
            const double inflow = i < levels ? leave[i + 1] : 0.0;
            double pi = (m * s.p[i - 1] + inflow - leave[i]) / m_next;
            if (pi < 0.0) {
                if (pi < -1e-9)
                    throw std::runtime_error("ripple step: level probability drifted below -1e-9");
                pi = 0.0;
            }
            next.p[i - 1] = std::min(pi, 1.0);
        }
    }
    next.step_inactivations = empty_ripple;
    next.cum_inactivations = s.cum_inactivations + empty_ripple;
    return next;
}

struct RipplePrediction {
    double total_inactivations = 0.0;
    std::vector<RippleState> trajectory;  // k+1 states, j = 0..k
};

inline RipplePrediction predict_inactivations(std::uint32_t k, double epsilon,
                                              const DegreeDistribution& dist) {
    const std::uint32_t m = symbols_for_overhead(k, epsilon);
    if (m == 0) throw std::invalid_argument("predict_inactivations: overhead leaves no symbols");
    RipplePrediction out;
    out.trajectory.reserve(k + 1);
    out.trajectory.push_back(initial_state(k, m, dist));
    for (std::uint32_t j = 0; j < k; ++j) out.trajectory.push_back(step(out.trajectory.back(), k));
    out.total_inactivations = out.trajectory.back().cum_inactivations;
    return out;
}

// Same fold without keeping the trajectory; the optimizer calls this in its
// inner loop.
inline double predict_total(std::uint32_t k, double epsilon, const DegreeDistribution& dist) {
    const std::uint32_t m = symbols_for_overhead(k, epsilon);
    if (m == 0) throw std::invalid_argument("predict_total: overhead leaves no symbols");
    RippleState s = initial_state(k, m, dist);
    for (std::uint32_t j = 0; j < k; ++j) s = step(s, k);
    return s.cum_inactivations;
}

// Columns: j, m_j, p_1..p_D, n_inact_step, cum_inact.
inline void write_trajectory_csv(std::ostream& os, const std::vector<RippleState>& trajectory) {
    if (trajectory.empty()) throw std::invalid_argument("write_trajectory_csv: empty trajectory");
    const std::size_t levels = trajectory.front().p.size();
    os << "j,m_j";
    for (std::size_t i = 1; i <= levels; ++i) os << ",p_" << i;
    os << ",n_inact_step,cum_inact\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        os << ',' << buf;
    };
    for (const auto& s : trajectory) {
        os << s.j;
        put(s.active_outputs);
        for (std::size_t i = 0; i < levels; ++i) put(i < s.p.size() ? s.p[i] : 0.0);
        put(s.step_inactivations);
        put(s.cum_inactivations);
        os << '\n';
    }
}

}  // namespace ltkit
