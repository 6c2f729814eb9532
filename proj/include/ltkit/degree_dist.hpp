#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include <ltkit/rng.hpp>
#include <ltkit/util.hpp>

// Output degree distributions: the generic container plus the two standard
// families (robust soliton, binomial "LRFC" profile) and truncation.

namespace ltkit {

class DegreeDistribution {
public:
    DegreeDistribution() = default;

    // probs[i] is the probability of degree i+1; trailing zeros are trimmed.
    // Construction does not normalize: validate() reports mass defects so
    // that hand-built inputs are checkable rather than silently patched.
    DegreeDistribution(std::uint32_t k, std::vector<double> probs) : k_(k), probs_(std::move(probs)) {
        if (k_ == 0) throw std::invalid_argument("DegreeDistribution: k must be positive");
        while (!probs_.empty() && probs_.back() == 0.0) probs_.pop_back();
        rebuild_cdf();
    }

    static DegreeDistribution from_pairs(std::uint32_t k,
                                         const std::vector<std::pair<std::uint32_t, double>>& entries) {
        std::uint32_t top = 0;
        for (const auto& [d, p] : entries) {
            if (d == 0) throw std::invalid_argument("DegreeDistribution: degree 0 entry");
            top = std::max(top, d);
        }
        std::vector<double> probs(top, 0.0);
        for (const auto& [d, p] : entries) {
            if (probs[d - 1] != 0.0)
                throw std::invalid_argument("DegreeDistribution: duplicate degree " + std::to_string(d));
            probs[d - 1] = p;
        }
        return DegreeDistribution(k, std::move(probs));
    }

    std::uint32_t k() const noexcept { return k_; }
    std::uint32_t d_max() const noexcept { return static_cast<std::uint32_t>(probs_.size()); }
    const std::vector<double>& probs() const noexcept { return probs_; }

    double omega(std::uint32_t d) const {
        if (d == 0) throw std::invalid_argument("DegreeDistribution: degree 0 query");
        return d <= probs_.size() ? probs_[d - 1] : 0.0;
    }

    double mean_degree() const noexcept {
        NeumaierSum sum;
        for (std::size_t i = 0; i < probs_.size(); ++i)
            sum.add(static_cast<double>(i + 1) * probs_[i]);
        return sum.value();
    }

    std::uint32_t sample_degree(Rng& rng) const {
        if (cdf_.empty() || cdf_.back() <= 0.0)
            throw std::runtime_error("sample_degree: distribution carries no mass");
        const double target = rng.uniform01() * cdf_.back();
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
        if (it == cdf_.end()) --it;  // target == total mass under rounding
        return static_cast<std::uint32_t>(it - cdf_.begin()) + 1;
    }

    // Human-readable violations; empty means the distribution is usable.
    std::vector<std::string> validate() const {
        std::vector<std::string> issues;
        if (k_ == 0) {
            issues.push_back("k is zero (default-constructed)");
            return issues;
        }
        NeumaierSum sum;
        for (std::size_t i = 0; i < probs_.size(); ++i) {
            if (!std::isfinite(probs_[i]))
                issues.push_back("omega[" + std::to_string(i + 1) + "] is not finite");
            else if (probs_[i] < 0.0)
                issues.push_back("omega[" + std::to_string(i + 1) + "] is negative (" +
                                 std::to_string(probs_[i]) + ")");
            sum.add(probs_[i]);
        }
        const double total = sum.value();
        if (!(std::abs(total - 1.0) <= 1e-12)) {
            std::ostringstream os;
            os << "probability mass sums to " << total << " (|sum - 1| > 1e-12)";
            issues.push_back(os.str());
        }
        if (probs_.size() > k_)
            issues.push_back("maximum degree " + std::to_string(probs_.size()) + " exceeds k = " +
                             std::to_string(k_));
        return issues;
    }

    bool is_valid() const { return validate().empty(); }

    DegreeDistribution normalized() const {
        NeumaierSum sum;
        for (double p : probs_) sum.add(p);
        const double total = sum.value();
        if (!(total > 0.0)) throw std::domain_error("normalized: total mass is not positive");
        std::vector<double> scaled(probs_);
        for (double& p : scaled) p /= total;
        return DegreeDistribution(k_, std::move(scaled));
    }

    bool operator==(const DegreeDistribution& o) const = default;

private:
    void rebuild_cdf() {
        cdf_.resize(probs_.size());
        NeumaierSum sum;
        for (std::size_t i = 0; i < probs_.size(); ++i) {
            sum.add(probs_[i]);
            cdf_[i] = sum.value();
        }
    }

    std::uint32_t k_ = 0;
    std::vector<double> probs_;
    std::vector<double> cdf_;
};

inline double mean_degree(const DegreeDistribution& d) { return d.mean_degree(); }
inline std::uint32_t sample_degree(const DegreeDistribution& d, Rng& rng) { return d.sample_degree(rng); }
inline std::vector<std::string> validate(const DegreeDistribution& d) { return d.validate(); }

// Robust soliton: ideal soliton rho plus the tau boost with pivot S =
// c * ln(k/delta) * sqrt(k) and spike at floor(k/S), normalized. The spike
// term is applied only when it lands inside 1..k; for tiny k the pivot can
// exceed k and only the 1/(d*k) boost below it applies.
inline DegreeDistribution make_rsd(std::uint32_t k, double c, double delta) {
    if (k == 0) throw std::invalid_argument("make_rsd: k must be positive");
    if (!(c > 0.0)) throw std::invalid_argument("make_rsd: c must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("make_rsd: delta must lie in (0, 1)");

    std::vector<double> w(k, 0.0);
    w[0] = 1.0 / k;
    for (std::uint32_t d = 2; d <= k; ++d)
        w[d - 1] = 1.0 / (static_cast<double>(d) * (d - 1));

    const double s = c * std::log(static_cast<double>(k) / delta) * std::sqrt(static_cast<double>(k));
    const auto spike = static_cast<std::uint64_t>(std::floor(static_cast<double>(k) / s));
    for (std::uint32_t d = 1; d <= k && d + 1 <= spike; ++d)
        w[d - 1] += s / (static_cast<double>(d) * k);
    if (spike >= 1 && spike <= k)
        w[spike - 1] += s * std::log(s / delta) / k;

    return DegreeDistribution(k, std::move(w)).normalized();
}

// Pivot degree floor(k/S) of the robust soliton; exposed for reporting.
inline std::uint32_t rsd_spike_degree(std::uint32_t k, double c, double delta) {
    const double s = c * std::log(static_cast<double>(k) / delta) * std::sqrt(static_cast<double>(k));
    const double spike = std::floor(static_cast<double>(k) / s);
    return spike < 1.0 ? 0u : spike > k ? 0u : static_cast<std::uint32_t>(spike);
}

// Binomial degree profile Binomial(k, mean/k) conditioned on d >= 1, the
// standard-fountain-code comparison point.
inline DegreeDistribution make_lrfc(std::uint32_t k, double mean) {
    if (k == 0) throw std::invalid_argument("make_lrfc: k must be positive");
    if (!(mean > 0.0 && mean <= static_cast<double>(k)))
        throw std::invalid_argument("make_lrfc: mean must lie in (0, k]");

    const double p = mean / k;
    std::vector<double> w(k, 0.0);
    if (p >= 1.0) {
        w[k - 1] = 1.0;
    } else {
        const double logp = std::log(p);
        const double log1mp = std::log1p(-p);
        for (std::uint32_t d = 1; d <= k; ++d) {
            const double lw = log_binomial(k, d) + d * logp + (k - d) * log1mp;
            w[d - 1] = std::exp(lw);  // harmless underflow to 0 in the far tail
        }
    }
    return DegreeDistribution(k, std::move(w)).normalized();
}

// Lump all mass at degrees above d_max onto d_max. Total mass is preserved
// (the tail is accumulated with compensation before being added).
inline DegreeDistribution truncate(const DegreeDistribution& dist, std::uint32_t d_max) {
    if (d_max < 1 || d_max > dist.k())
        throw std::invalid_argument("truncate: d_max must lie in [1, k]");
    const auto& src = dist.probs();
    if (src.size() <= d_max) return dist;

    std::vector<double> w(src.begin(), src.begin() + d_max);
    NeumaierSum tail;
    tail.add(w[d_max - 1]);
    for (std::size_t i = d_max; i < src.size(); ++i) tail.add(src[i]);
    w[d_max - 1] = tail.value();
    return DegreeDistribution(dist.k(), std::move(w));
}

// ---- serialization ----------------------------------------------------
//
// Text: a "k N" line followed by "degree probability" pairs, one per line,
// '#' comments allowed. JSON: {"k": N, "probs": {"degree": probability}}.
// Probabilities are written with enough digits to round-trip exactly.

inline void save_text(const DegreeDistribution& dist, std::ostream& os) {
    os << "k " << dist.k() << "\n";
    char buf[64];
    for (std::uint32_t d = 1; d <= dist.d_max(); ++d) {
        if (dist.omega(d) == 0.0) continue;
        std::snprintf(buf, sizeof buf, "%.17g", dist.omega(d));
        os << d << " " << buf << "\n";
    }
}

inline void save_json(const DegreeDistribution& dist, std::ostream& os) {
    nlohmann::json probs = nlohmann::json::object();
    for (std::uint32_t d = 1; d <= dist.d_max(); ++d)
        if (dist.omega(d) != 0.0) probs[std::to_string(d)] = dist.omega(d);
    nlohmann::json j{{"k", dist.k()}, {"probs", std::move(probs)}};
    os << j.dump(2) << "\n";
}

inline DegreeDistribution load_distribution(std::istream& is) {
    // Sniff the first meaningful character to pick the format.
    int ch;
    while ((ch = is.peek()) != EOF && std::isspace(ch)) is.get();
    if (ch == EOF) throw std::runtime_error("load_distribution: empty input");

    std::vector<std::pair<std::uint32_t, double>> entries;
    std::uint32_t k = 0;

    if (ch == '{') {
        nlohmann::json j;
        is >> j;
        k = j.at("k").get<std::uint32_t>();
        for (const auto& [key, val] : j.at("probs").items())
            entries.emplace_back(static_cast<std::uint32_t>(std::stoul(key)), val.get<double>());
    } else {
        std::string line;
        while (std::getline(is, line)) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::string first;
            if (!(ls >> first)) continue;
            if (first == "k") {
                if (!(ls >> k)) throw std::runtime_error("load_distribution: malformed k line");
                continue;
            }
            std::uint32_t d = 0;
            double p = 0.0;
            try {
                d = static_cast<std::uint32_t>(std::stoul(first));
            } catch (const std::exception&) {
                throw std::runtime_error("load_distribution: expected a degree, got '" + first + "'");
            }
            if (!(ls >> p)) throw std::runtime_error("load_distribution: missing probability for degree " + first);
            entries.emplace_back(d, p);
        }
        if (k == 0)  // no explicit k line: tightest k covering the support
            for (const auto& [d, p] : entries) k = std::max(k, d);
    }

    if (entries.empty()) throw std::runtime_error("load_distribution: no degree entries");
    return DegreeDistribution::from_pairs(k, entries);
}

inline DegreeDistribution load_distribution_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open distribution file: " + path);
    return load_distribution(f);
}

}  // namespace ltkit
