#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "nsrps/sequence.hpp"

namespace nsrps {

// What to do when mu puts mass on a cell where nu is zero:
//   strict   - raise DominationError naming the offending block;
//   epsilon  - add pseudo_count to every (context, symbol) cell of nu
//              (requires a count-backed matrix);
//   infinity - the whole sum is +inf.
struct ZeroPolicy {
    enum class Kind { strict, epsilon, infinity };
    Kind kind = Kind::strict;
    double pseudo_count = 1.0;

    static ZeroPolicy strict() { return {Kind::strict, 0.0}; }
    static ZeroPolicy epsilon(double c = 1.0) { return {Kind::epsilon, c}; }
    static ZeroPolicy infinity() { return {Kind::infinity, 0.0}; }
};

// Empirical k-block statistics of a sequence: counts over all n-k+1
// overlapping windows, no wraparound. Blocks are bit-packed into 64-bit keys
// with the last symbol in the low bits.
class BlockDistribution {
public:
    BlockDistribution(const SymbolSequence& seq, int k);

    int block_length() const noexcept { return k_; }
    std::uint64_t total() const noexcept { return total_; }
    std::size_t alphabet_size() const noexcept { return m_; }
    const std::shared_ptr<const Alphabet>& alphabet_ptr() const noexcept { return alphabet_; }

    const std::unordered_map<std::uint64_t, std::uint64_t>& counts() const noexcept {
        return counts_;
    }

    std::uint64_t pack(std::span<const Symbol> block) const;
    std::vector<Symbol> unpack(std::uint64_t key) const;
    std::uint64_t count(std::span<const Symbol> block) const;
    double frequency(std::span<const Symbol> block) const;

    // Context key of a block key: the block minus its last symbol.
    std::uint64_t context_of(std::uint64_t key) const noexcept { return key >> width_; }
    Symbol last_of(std::uint64_t key) const noexcept {
        return static_cast<Symbol>(key & ((std::uint64_t{1} << width_) - 1));
    }

    // (k-1)-block counts obtained by dropping the last symbol of every block
    // (equivalently: k-1 statistics of the first n-1 positions). k must be >= 2.
    BlockDistribution drop_last() const;

    // TSV: block labels (space-joined), count. Sorted by block for determinism.
    void dump_tsv(std::ostream& out) const;

private:
    BlockDistribution() = default;

    int k_ = 0;
    unsigned width_ = 1;
    std::size_t m_ = 0;
    std::uint64_t total_ = 0;
    std::shared_ptr<const Alphabet> alphabet_;
    std::unordered_map<std::uint64_t, std::uint64_t> counts_;
};

BlockDistribution block_distribution(const SymbolSequence& seq, int k);

// -sum f log f in nats over blocks with f > 0.
double block_entropy(const BlockDistribution& dist);

// Order-k conditional law: row per k-block context, sparse cells per next
// symbol. Contexts are packed base-m with the most recent symbol in the low
// digit. Rows built from counts keep them so epsilon smoothing can be applied.
class TransitionMatrix {
public:
    struct Cell {
        Symbol symbol;
        double prob;
        std::uint64_t count;  // 0 for analytic rows
    };
    struct Row {
        double weight = 0.0;            // marginal probability of the context
        std::uint64_t total_count = 0;  // 0 for analytic rows
        bool flagged = false;           // dangling context: uniform fallback row
        std::vector<Cell> cells;        // sorted by symbol, prob > 0
    };

    TransitionMatrix(int order, std::shared_ptr<const Alphabet> alphabet);

    int order() const noexcept { return order_; }
    std::size_t alphabet_size() const noexcept { return m_; }
    const Alphabet& alphabet() const noexcept { return *alphabet_; }
    const std::shared_ptr<const Alphabet>& alphabet_ptr() const noexcept { return alphabet_; }

    std::uint64_t pack_context(std::span<const Symbol> context) const;
    std::vector<Symbol> unpack_context(std::uint64_t ctx) const;

    void set_row(std::uint64_t ctx, Row row);  // validates: sums to 1 within 1e-12
    const Row* row(std::uint64_t ctx) const;
    const std::map<std::uint64_t, Row>& rows() const noexcept { return rows_; }

    // 0 when the cell (or the whole row) is absent; 1/m on flagged rows.
    double prob(std::uint64_t ctx, Symbol a) const;
    bool has_counts() const noexcept { return has_counts_; }

    // TSV: context labels (space-joined), symbol label, probability.
    void dump_tsv(std::ostream& out) const;

private:
    int order_;
    std::size_t m_;
    std::shared_ptr<const Alphabet> alphabet_;
    std::map<std::uint64_t, Row> rows_;
    bool has_counts_ = true;  // vacuously true until an analytic row appears
};

// h_n = H_{n+1} - H_n, both over the same window span (the n-block statistics
// are taken over the first n_windows(n+1) positions). context_len = 0 gives
// H_1 itself.
double conditional_entropy(const SymbolSequence& seq, int context_len);
// Same quantity from pre-computed (n+1)-block statistics.
double conditional_entropy(const BlockDistribution& blocks);

// Order-1 conditional law P(y|x) = count(xy) / count(x.) from overlapping
// pair counts; row weights are the unigram frequencies. A symbol that occurs
// only at the end of the sequence has no outgoing pair: its row is marked
// flagged and treated as uniform.
TransitionMatrix markov1_projection(const SymbolSequence& seq);

// Analytic order-1 matrix from a dense pair-probability table f(x, y)
// (row-major m x m, summing to 1). Rows with zero mass are flagged.
TransitionMatrix transition_from_pair_probs(std::span<const double> pair_probs,
                                            std::shared_ptr<const Alphabet> alphabet);

// h_k(mu || nu) = -sum f_mu(wa) log Q(a|w) where f_mu ranges over (k+1)-blocks
// and Q is the order-k law of nu. Flagged nu rows participate as uniform.
double cross_conditional_entropy(const BlockDistribution& mu_blocks, const TransitionMatrix& nu,
                                 ZeroPolicy policy = ZeroPolicy::strict());

// sum_x pi(x) sum_y P(y|x) log(P(y|x)/Q(y|x)) for order-1 P, Q. Contexts whose
// row is flagged in either matrix are excluded from the sum.
double kl_1block(std::span<const double> mu_context_dist, const TransitionMatrix& trans_mu,
                 const TransitionMatrix& trans_nu, ZeroPolicy policy = ZeroPolicy::strict());
// pi taken from the context marginal of mu's pair statistics.
double kl_1block(const BlockDistribution& mu_pairs, const TransitionMatrix& trans_mu,
                 const TransitionMatrix& trans_nu, ZeroPolicy policy = ZeroPolicy::strict());

}  // namespace nsrps
