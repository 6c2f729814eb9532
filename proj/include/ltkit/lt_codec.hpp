#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include <ltkit/degree_dist.hpp>
#include <ltkit/gf2.hpp>
#include <ltkit/rng.hpp>

// LT encoding and inactivation decoding. The decoder runs in two phases:
//
//  1. Triangularization. k steps over the bipartite graph; whenever some
//     output symbol has exactly one active neighbor (the first ripple is
//     nonempty) that input is resolved, otherwise one active input is
//     inactivated. Nothing is XORed yet, only markings accumulate.
//  2. Elimination. Resolved pivots are substituted out, leaving every row
//     supported on its own pivot column plus inactive columns. The rows that
//     carry no pivot form a dense system over the inactive (reference)
//     inputs; decoding succeeds iff that system has full column rank.
//
// This mirrors plain Gaussian elimination on the full matrix but keeps all
// row operations on sparse supports until the final dense core.

namespace ltkit {

enum class InactivationStrategy { Random, MaxActiveDegree };

struct EncodeSpec {
    std::uint32_t k = 0;       // input symbols
    std::uint32_t m = 0;       // output symbols received
    DegreeDistribution dist;   // output degree distribution
    std::uint64_t seed = 0;
};

// Draw m rows: degree d from the distribution, then d distinct uniform
// columns. Rows are independent, matching the memoryless fountain channel.
inline gf2::SparseBitMatrix encode(const EncodeSpec& spec) {
    if (spec.k == 0 || spec.m == 0)
        throw std::invalid_argument("encode: k and m must be positive");
    if (spec.dist.d_max() == 0 || spec.dist.d_max() > spec.k)
        throw std::invalid_argument("encode: distribution support must lie in [1, k]");

    Rng rng(spec.seed);
    gf2::SparseBitMatrix g(spec.m, spec.k);
    std::vector<std::uint8_t> taken(spec.k, 0);
    std::vector<std::uint32_t> all(spec.k);
    for (std::uint32_t i = 0; i < spec.k; ++i) all[i] = i;

    for (std::uint32_t r = 0; r < spec.m; ++r) {
        const std::uint32_t d = spec.dist.sample_degree(rng);
        std::vector<std::uint32_t> sup;
        sup.reserve(d);
        if (static_cast<std::uint64_t>(d) * 4 >= spec.k) {
            // Dense row: partial Fisher-Yates beats rejection here.
            for (std::uint32_t i = 0; i < d; ++i) {
                const std::uint32_t j = i + static_cast<std::uint32_t>(rng.uniform_below(spec.k - i));
                std::swap(all[i], all[j]);
                sup.push_back(all[i]);
            }
        } else {
            while (sup.size() < d) {
                const auto c = static_cast<std::uint32_t>(rng.uniform_below(spec.k));
                if (!taken[c]) {
                    taken[c] = 1;
                    sup.push_back(c);
                }
            }
            for (std::uint32_t c : sup) taken[c] = 0;
        }
        g.set_row(r, std::move(sup));
    }
    return g;
}

// Received values for a known input vector: y = G u over GF(2).
inline std::vector<std::uint8_t> encode_payload(const gf2::SparseBitMatrix& g,
                                                const std::vector<std::uint8_t>& input) {
    if (input.size() != g.cols()) throw std::invalid_argument("encode_payload: input length mismatch");
    std::vector<std::uint8_t> out(g.rows(), 0);
    for (std::size_t r = 0; r < g.rows(); ++r) {
        unsigned acc = 0;
        for (std::uint32_t c : g.row(r)) acc ^= input[c] & 1u;
        out[r] = static_cast<std::uint8_t>(acc);
    }
    return out;
}

enum class InputMark : std::uint8_t { Active, Resolvable, Inactive };

struct StepEvent {
    enum class Kind { Resolved, Inactivated };
    Kind kind = Kind::Resolved;
    std::uint32_t input = 0;
};

// Ripple sizes recorded after every triangularization step (k+1 snapshots
// including the initial state); feeds the model-versus-simulation plots.
struct DecodeProbe {
    std::vector<std::uint32_t> ripple1, ripple2, ripple3;
};

class DecoderState {
public:
    static constexpr std::uint32_t npos32 = std::numeric_limits<std::uint32_t>::max();

    explicit DecoderState(gf2::SparseBitMatrix g)
        : g_(std::move(g)),
          k_(static_cast<std::uint32_t>(g_.cols())),
          m_(static_cast<std::uint32_t>(g_.rows())) {
        if (k_ == 0 || m_ == 0) throw std::invalid_argument("DecoderState: empty matrix");

        marks_.assign(k_, InputMark::Active);
        input_rows_.assign(k_, {});
        out_deg_.assign(m_, 0);

        std::uint32_t max_deg = 0;
        for (std::uint32_t r = 0; r < m_; ++r) {
            const auto& sup = g_.row(r);
            out_deg_[r] = static_cast<std::uint32_t>(sup.size());
            max_deg = std::max(max_deg, out_deg_[r]);
            for (std::uint32_t c : sup) input_rows_[c].push_back(r);
        }
        deg_hist_.assign(max_deg + 1, 0);
        for (std::uint32_t r = 0; r < m_; ++r) {
            ++deg_hist_[out_deg_[r]];
            if (out_deg_[r] == 1) ripple1_.insert(r);
        }

        active_inputs_.resize(k_);
        active_pos_.resize(k_);
        for (std::uint32_t c = 0; c < k_; ++c) {
            active_inputs_[c] = c;
            active_pos_[c] = c;
        }
    }

    std::uint32_t input_count() const noexcept { return k_; }
    std::uint32_t output_count() const noexcept { return m_; }
    std::uint32_t step_index() const noexcept { return j_; }
    std::uint32_t num_resolved() const noexcept { return l_r_; }
    std::uint32_t num_inactive() const noexcept { return l_x_; }
    std::uint32_t num_active() const noexcept { return k_ - l_r_ - l_x_; }

    const std::vector<InputMark>& marks() const noexcept { return marks_; }
    const std::vector<std::uint32_t>& output_active_degree() const noexcept { return out_deg_; }
    const std::set<std::uint32_t>& first_ripple() const noexcept { return ripple1_; }
    const std::vector<std::uint32_t>& active_inputs() const noexcept { return active_inputs_; }
    const std::vector<std::uint32_t>& adjacent_rows(std::uint32_t input) const { return input_rows_.at(input); }

    // Number of outputs whose active degree is exactly i.
    std::uint32_t ripple_size(std::uint32_t i) const noexcept {
        return i < deg_hist_.size() ? deg_hist_[i] : 0;
    }

    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& resolutions() const noexcept {
        return resolutions_;  // (output row, input column) in resolution order
    }
    const std::vector<std::uint32_t>& inactivated_inputs() const noexcept { return inactive_cols_; }
    const std::vector<std::uint8_t>& step_inactivation_flags() const noexcept { return step_flags_; }

    bool eliminated() const noexcept { return eliminated_; }
    bool success() const {
        require_eliminated();
        return success_;
    }
    std::size_t ge_rank() const {
        require_eliminated();
        return ge_rank_;
    }
    const gf2::DenseBitMatrix& reference_system() const {
        require_eliminated();
        return c_;
    }
    const std::vector<std::uint8_t>& reference_rhs() const {
        require_eliminated();
        if (!have_rhs_) throw std::logic_error("DecoderState: no received values were provided");
        return c_rhs_;
    }
    const gf2::SparseBitMatrix& matrix() const noexcept { return g_; }

    StepEvent step(InactivationStrategy strategy, Rng& rng);
    void eliminate() { run_elimination(nullptr); }
    void eliminate(const std::vector<std::uint8_t>& rhs) { run_elimination(&rhs); }
    std::vector<std::uint8_t> back_substitute(const std::vector<std::uint8_t>& reference_values) const;

private:
    friend std::uint32_t select_inactivation(const DecoderState&, InactivationStrategy, Rng&);

    void require_eliminated() const {
        if (!eliminated_) throw std::logic_error("DecoderState: elimination has not run");
    }

    void mark(std::uint32_t input, InputMark mk) {
        marks_[input] = mk;
        const std::uint32_t pos = active_pos_[input];
        const std::uint32_t last = active_inputs_.back();
        active_inputs_[pos] = last;
        active_pos_[last] = pos;
        active_inputs_.pop_back();
        active_pos_[input] = npos32;

        for (std::uint32_t r : input_rows_[input]) {
            const std::uint32_t d = out_deg_[r];
            --deg_hist_[d];
            ++deg_hist_[d - 1];
            out_deg_[r] = d - 1;
            if (d == 2) ripple1_.insert(r);
            else if (d == 1) ripple1_.erase(r);
        }
    }

    std::uint32_t single_active_neighbour(std::uint32_t row) const {
        for (std::uint32_t c : g_.row(row))
            if (marks_[c] == InputMark::Active) return c;
        throw std::logic_error("DecoderState: ripple row has no active neighbour");
    }

    void run_elimination(const std::vector<std::uint8_t>* rhs);

    gf2::SparseBitMatrix g_;
    std::uint32_t k_ = 0, m_ = 0;
    std::vector<InputMark> marks_;
    std::vector<std::vector<std::uint32_t>> input_rows_;
    std::vector<std::uint32_t> out_deg_;
    std::vector<std::uint32_t> deg_hist_;
    std::set<std::uint32_t> ripple1_;
    std::vector<std::uint32_t> active_inputs_;
    std::vector<std::uint32_t> active_pos_;
    std::uint32_t j_ = 0, l_r_ = 0, l_x_ = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> resolutions_;
    std::vector<std::uint32_t> inactive_cols_;
    std::vector<std::uint8_t> step_flags_;

    bool eliminated_ = false, success_ = false, have_rhs_ = false;
    std::size_t ge_rank_ = 0;
    gf2::DenseBitMatrix c_;
    std::vector<std::uint8_t> rhs_work_;
    std::vector<std::uint8_t> c_rhs_;

public:
    // Column -> position in the inactivation order, npos32 for others.
    // Populated by eliminate(); exposed for tests poking at the dense core.
    const std::vector<std::uint32_t>& inactive_col_positions() const {
        require_eliminated();
        return inactive_pos_;
    }

private:
    std::vector<std::uint32_t> inactive_pos_;
};

// Pick the input to inactivate. Random: uniform over active inputs.
// MaxActiveDegree: an input with the most active output neighbours, ties
// broken uniformly. While an input is unmarked every output incident to it
// still has an active neighbour, so its active degree equals its incidence
// count in the original graph.
inline std::uint32_t select_inactivation(const DecoderState& st, InactivationStrategy strategy, Rng& rng) {
    if (!st.first_ripple().empty())
        throw std::logic_error("select_inactivation: first ripple is nonempty");
    const auto& act = st.active_inputs();
    if (act.empty()) throw std::logic_error("select_inactivation: no active inputs");

    if (strategy == InactivationStrategy::Random)
        return act[rng.uniform_below(act.size())];

    std::size_t best = 0, ties = 0;
    for (std::uint32_t u : act) {
        const std::size_t deg = st.input_rows_[u].size();
        if (deg > best) {
            best = deg;
            ties = 1;
        } else if (deg == best) {
            ++ties;
        }
    }
    std::uint64_t pick = rng.uniform_below(ties);
    for (std::uint32_t u : act) {
        if (st.input_rows_[u].size() == best && pick-- == 0) return u;
    }
    throw std::logic_error("select_inactivation: tie scan out of sync");
}

inline StepEvent DecoderState::step(InactivationStrategy strategy, Rng& rng) {
    if (j_ >= k_) throw std::logic_error("DecoderState: all inputs already processed");
    StepEvent ev;
    if (!ripple1_.empty()) {
        const std::uint32_t row = *ripple1_.begin();  // lowest original row index
        const std::uint32_t input = single_active_neighbour(row);
        resolutions_.emplace_back(row, input);
        mark(input, InputMark::Resolvable);
        ++l_r_;
        step_flags_.push_back(0);
        ev = {StepEvent::Kind::Resolved, input};
    } else {
        const std::uint32_t input = select_inactivation(*this, strategy, rng);
        inactive_cols_.push_back(input);
        mark(input, InputMark::Inactive);
        ++l_x_;
        step_flags_.push_back(1);
        ev = {StepEvent::Kind::Inactivated, input};
    }
    ++j_;
    return ev;
}

inline StepEvent resolve_step(DecoderState& st, InactivationStrategy strategy, Rng& rng) {
    return st.step(strategy, rng);
}

inline void DecoderState::run_elimination(const std::vector<std::uint8_t>* rhs) {
    if (j_ != k_) throw std::logic_error("DecoderState: triangularization incomplete");
    if (eliminated_) throw std::logic_error("DecoderState: elimination already ran");
    if (rhs) {
        if (rhs->size() != m_) throw std::invalid_argument("DecoderState: rhs length mismatch");
        rhs_work_.assign(rhs->begin(), rhs->end());
        for (auto& b : rhs_work_) b &= 1u;
        have_rhs_ = true;
    }

    // Pivot order per column; substitution must follow resolution order so
    // that each pivot row is already reduced before anyone XORs it in.
    std::vector<std::uint32_t> order_of_col(k_, npos32);
    std::vector<std::uint8_t> is_pivot_row(m_, 0);
    for (std::uint32_t t = 0; t < resolutions_.size(); ++t) {
        order_of_col[resolutions_[t].second] = t;
        is_pivot_row[resolutions_[t].first] = 1;
    }

    inactive_pos_.assign(k_, npos32);
    for (std::uint32_t i = 0; i < inactive_cols_.size(); ++i)
        inactive_pos_[inactive_cols_[i]] = i;

    std::vector<std::uint32_t> pending;
    auto reduce_row = [&](std::uint32_t r, std::uint32_t order_limit) {
        pending.clear();
        for (std::uint32_t c : g_.row(r)) {
            const std::uint32_t t = order_of_col[c];
            if (t != npos32 && t < order_limit) pending.push_back(t);
        }
        std::sort(pending.begin(), pending.end());
        for (std::uint32_t t : pending) {
            const std::uint32_t src = resolutions_[t].first;
            gf2::xor_row(g_, src, r);
            if (have_rhs_) rhs_work_[r] ^= rhs_work_[src];
        }
    };

    for (std::uint32_t t = 0; t < resolutions_.size(); ++t)
        reduce_row(resolutions_[t].first, t);

    std::vector<std::uint32_t> nonpivot;
    for (std::uint32_t r = 0; r < m_; ++r) {
        if (is_pivot_row[r]) continue;
        reduce_row(r, static_cast<std::uint32_t>(resolutions_.size()));
        nonpivot.push_back(r);
    }

    // Dense core over the reference (inactivated) columns.
    c_ = gf2::DenseBitMatrix(nonpivot.size(), l_x_);
    if (have_rhs_) c_rhs_.resize(nonpivot.size());
    for (std::size_t i = 0; i < nonpivot.size(); ++i) {
        for (std::uint32_t c : g_.row(nonpivot[i])) {
            const std::uint32_t pos = inactive_pos_[c];
            if (pos == npos32)
                throw std::logic_error("DecoderState: residual row touches a non-reference column");
            c_.set(i, pos, true);
        }
        if (have_rhs_) c_rhs_[i] = rhs_work_[nonpivot[i]];
    }
    ge_rank_ = gf2::rank(c_);
    success_ = (ge_rank_ == l_x_);

    // Record the triangular shape: pivot rows then residual rows; resolved
    // columns in resolution order then reference columns.
    std::vector<std::uint32_t> rp;
    rp.reserve(m_);
    for (const auto& [row, col] : resolutions_) rp.push_back(row);
    rp.insert(rp.end(), nonpivot.begin(), nonpivot.end());
    std::vector<std::uint32_t> cp;
    cp.reserve(k_);
    for (const auto& [row, col] : resolutions_) cp.push_back(col);
    cp.insert(cp.end(), inactive_cols_.begin(), inactive_cols_.end());
    g_.set_row_perm(std::move(rp));
    g_.set_col_perm(std::move(cp));

    eliminated_ = true;
}

inline std::vector<std::uint8_t> DecoderState::back_substitute(
    const std::vector<std::uint8_t>& reference_values) const {
    require_eliminated();
    if (!success_) throw std::logic_error("back_substitute: decoding did not succeed");
    if (!have_rhs_) throw std::logic_error("back_substitute: no received values were provided");
    if (reference_values.size() != l_x_)
        throw std::invalid_argument("back_substitute: reference value count mismatch");

    std::vector<std::uint8_t> u(k_, 0);
    for (std::uint32_t i = 0; i < l_x_; ++i) u[inactive_cols_[i]] = reference_values[i] & 1u;

    // Post-elimination each pivot row reads u[pivot] = rhs ^ (reference
    // neighbours); walk resolutions backwards so nothing is needed early.
    for (std::uint32_t t = static_cast<std::uint32_t>(resolutions_.size()); t-- > 0;) {
        const auto [row, col] = resolutions_[t];
        std::uint8_t v = rhs_work_[row];
        for (std::uint32_t c : g_.row(row))
            if (c != col) v ^= u[c];
        u[col] = v;
    }
    return u;
}

struct DecoderTrace {
    std::uint32_t num_inactivations = 0;
    bool success = false;
    std::vector<std::uint8_t> per_step_inactivation;  // one flag per step
    std::size_t ge_rank = 0;
    std::optional<std::vector<std::uint8_t>> recovered;
};

// Full pipeline: triangularize, eliminate, and (when received values are
// given and the matrix has full rank) recover the input word.
inline DecoderTrace decode(gf2::SparseBitMatrix g, InactivationStrategy strategy, Rng& rng,
                           const std::vector<std::uint8_t>* rhs = nullptr,
                           DecodeProbe* probe = nullptr) {
    DecoderState st(std::move(g));
    const std::uint32_t k = st.input_count();

    auto record = [&] {
        if (!probe) return;
        probe->ripple1.push_back(st.ripple_size(1));
        probe->ripple2.push_back(st.ripple_size(2));
        probe->ripple3.push_back(st.ripple_size(3));
    };
    record();
    for (std::uint32_t t = 0; t < k; ++t) {
        st.step(strategy, rng);
        record();
    }
    if (rhs) st.eliminate(*rhs);
    else st.eliminate();

    DecoderTrace tr;
    tr.num_inactivations = st.num_inactive();
    tr.success = st.success();
    tr.per_step_inactivation = st.step_inactivation_flags();
    tr.ge_rank = st.ge_rank();

    if (rhs && st.success()) {
        auto sol = gf2::solve_dense(st.reference_system(), st.reference_rhs());
        if (sol.status != gf2::SolveStatus::Unique)
            throw std::runtime_error("decode: received values are inconsistent with the generator matrix");
        tr.recovered = st.back_substitute(sol.solution);
    }
    return tr;
}

}  // namespace ltkit
