#include "nsrps/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>

#include "nsrps/errors.hpp"

namespace nsrps {

namespace {

// Dense counting scratch up to 2^20 cells; hashed beyond.
constexpr unsigned kDenseBits = 20;

unsigned symbol_width(std::size_t alphabet_size) {
    const std::size_t top = alphabet_size < 2 ? 1 : alphabet_size - 1;
    return std::max(1u, static_cast<unsigned>(std::bit_width(top)));
}

std::string block_labels(const Alphabet& alphabet, std::span<const Symbol> block) {
    std::string out;
    for (std::size_t i = 0; i < block.size(); ++i) {
        if (i) out += ' ';
        out += alphabet.label(block[i]);
    }
    return out;
}

}  // namespace

BlockDistribution::BlockDistribution(const SymbolSequence& seq, int k) {
    if (k < 1) throw Error("block length must be >= 1");
    const std::size_t n = seq.size();
    if (static_cast<std::size_t>(k) > n)
        throw InsufficientDataError("block length exceeds sequence length");

    k_ = k;
    m_ = seq.alphabet().size();
    alphabet_ = seq.alphabet_ptr();
    width_ = symbol_width(m_);
    const unsigned total_bits = width_ * static_cast<unsigned>(k);
    if (total_bits > 63) throw Error("block too wide to pack: shrink k or the alphabet");
    total_ = n - static_cast<std::size_t>(k) + 1;

    const std::uint64_t mask = (std::uint64_t{1} << total_bits) - 1;
    const auto s = seq.symbols();
    std::uint64_t key = 0;
    for (int i = 0; i + 1 < k; ++i) key = (key << width_) | s[static_cast<std::size_t>(i)];

    if (total_bits <= kDenseBits) {
        std::vector<std::uint64_t> dense(std::size_t{1} << total_bits, 0);
        for (std::size_t i = static_cast<std::size_t>(k) - 1; i < n; ++i) {
            key = ((key << width_) | s[i]) & mask;
            ++dense[key];
        }
        for (std::uint64_t b = 0; b < dense.size(); ++b) {
            if (dense[b]) counts_.emplace(b, dense[b]);
        }
    } else {
        counts_.reserve(std::min<std::uint64_t>(total_, 1u << 20));
        for (std::size_t i = static_cast<std::size_t>(k) - 1; i < n; ++i) {
            key = ((key << width_) | s[i]) & mask;
            ++counts_[key];
        }
    }
}

std::uint64_t BlockDistribution::pack(std::span<const Symbol> block) const {
    if (block.size() != static_cast<std::size_t>(k_)) throw Error("block length mismatch");
    std::uint64_t key = 0;
    for (Symbol s : block) {
        if (s >= m_) throw Error("block symbol out of alphabet range");
        key = (key << width_) | s;
    }
    return key;
}

std::vector<Symbol> BlockDistribution::unpack(std::uint64_t key) const {
    std::vector<Symbol> block(static_cast<std::size_t>(k_));
    const std::uint64_t mask = (std::uint64_t{1} << width_) - 1;
    for (int i = k_ - 1; i >= 0; --i) {
        block[static_cast<std::size_t>(i)] = static_cast<Symbol>(key & mask);
        key >>= width_;
    }
    return block;
}

std::uint64_t BlockDistribution::count(std::span<const Symbol> block) const {
    auto it = counts_.find(pack(block));
    return it == counts_.end() ? 0 : it->second;
}

double BlockDistribution::frequency(std::span<const Symbol> block) const {
    return static_cast<double>(count(block)) / static_cast<double>(total_);
}

BlockDistribution BlockDistribution::drop_last() const {
    if (k_ < 2) throw Error("cannot drop the last symbol of 1-blocks");
    BlockDistribution out;
    out.k_ = k_ - 1;
    out.width_ = width_;
    out.m_ = m_;
    out.total_ = total_;
    out.alphabet_ = alphabet_;
    out.counts_.reserve(counts_.size());
    for (const auto& [key, count] : counts_) out.counts_[key >> width_] += count;
    return out;
}

void BlockDistribution::dump_tsv(std::ostream& out) const {
    std::vector<std::uint64_t> keys;
    keys.reserve(counts_.size());
    for (const auto& [key, count] : counts_) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    out << "#block\tcount\n";
    for (std::uint64_t key : keys) {
        const auto block = unpack(key);
        out << block_labels(*alphabet_, block) << '\t' << counts_.at(key) << '\n';
    }
}

BlockDistribution block_distribution(const SymbolSequence& seq, int k) {
    return BlockDistribution(seq, k);
}

double block_entropy(const BlockDistribution& dist) {
    const double total = static_cast<double>(dist.total());
    double acc = 0.0;
    for (const auto& [key, count] : dist.counts()) {
        const double f = static_cast<double>(count) / total;
        acc -= f * std::log(f);
    }
    return acc;
}

TransitionMatrix::TransitionMatrix(int order, std::shared_ptr<const Alphabet> alphabet)
    : order_(order), alphabet_(std::move(alphabet)) {
    if (order_ < 0) throw Error("transition order must be >= 0");
    if (!alphabet_) throw Error("null alphabet");
    m_ = alphabet_->size();
    if (m_ == 0) throw Error("transition matrix over an empty alphabet");
    // Context space must fit in 63 bits base-m.
    double bits = order_ * std::log2(static_cast<double>(std::max<std::size_t>(m_, 2)));
    if (bits > 63) throw Error("context space too large");
}

std::uint64_t TransitionMatrix::pack_context(std::span<const Symbol> context) const {
    if (context.size() != static_cast<std::size_t>(order_)) throw Error("context length mismatch");
    std::uint64_t ctx = 0;
    for (Symbol s : context) {
        if (s >= m_) throw Error("context symbol out of alphabet range");
        ctx = ctx * m_ + s;
    }
    return ctx;
}

std::vector<Symbol> TransitionMatrix::unpack_context(std::uint64_t ctx) const {
    std::vector<Symbol> context(static_cast<std::size_t>(order_));
    for (int i = order_ - 1; i >= 0; --i) {
        context[static_cast<std::size_t>(i)] = static_cast<Symbol>(ctx % m_);
        ctx /= m_;
    }
    return context;
}

void TransitionMatrix::set_row(std::uint64_t ctx, Row row) {
    std::sort(row.cells.begin(), row.cells.end(),
              [](const Cell& x, const Cell& y) { return x.symbol < y.symbol; });
    double sum = 0.0;
    std::uint64_t count_sum = 0;
    for (const auto& cell : row.cells) {
        if (cell.symbol >= m_) throw Error("transition cell symbol out of range");
        if (cell.prob < 0.0) throw Error("negative transition probability");
        sum += cell.prob;
        count_sum += cell.count;
    }
    if (!row.flagged && std::abs(sum - 1.0) > 1e-12)
        throw Error("transition row does not sum to 1");
    if (row.total_count == 0 && count_sum > 0) row.total_count = count_sum;
    // Flagged rows legitimately carry zero counts; they do not make the
    // matrix analytic.
    if (row.total_count == 0 && !row.flagged) has_counts_ = false;
    rows_[ctx] = std::move(row);
}

const TransitionMatrix::Row* TransitionMatrix::row(std::uint64_t ctx) const {
    auto it = rows_.find(ctx);
    return it == rows_.end() ? nullptr : &it->second;
}

double TransitionMatrix::prob(std::uint64_t ctx, Symbol a) const {
    const Row* r = row(ctx);
    if (!r) return 0.0;
    if (r->flagged) return 1.0 / static_cast<double>(m_);
    auto it = std::lower_bound(r->cells.begin(), r->cells.end(), a,
                               [](const Cell& cell, Symbol s) { return cell.symbol < s; });
    if (it == r->cells.end() || it->symbol != a) return 0.0;
    return it->prob;
}

void TransitionMatrix::dump_tsv(std::ostream& out) const {
    out << "#context\tsymbol\tprobability\n";
    const auto precision = out.precision(12);
    for (const auto& [ctx, row] : rows_) {
        const auto context = unpack_context(ctx);
        const std::string prefix = order_ == 0 ? "-" : block_labels(*alphabet_, context);
        if (row.flagged) {
            out << prefix << '\t' << "*uniform*" << '\t' << 1.0 / static_cast<double>(m_) << '\n';
            continue;
        }
        for (const auto& cell : row.cells)
            out << prefix << '\t' << alphabet_->label(cell.symbol) << '\t' << cell.prob << '\n';
    }
    out.precision(precision);
}

double conditional_entropy(const BlockDistribution& blocks) {
    if (blocks.block_length() < 1) throw Error("need at least 1-blocks");
    const double total = static_cast<double>(blocks.total());
    double acc = 0.0;
    if (blocks.block_length() == 1) {  // empty context: H_1 itself
        for (const auto& [key, count] : blocks.counts()) {
            const double c = static_cast<double>(count);
            acc -= c * std::log(c / total);
        }
        return acc / total;
    }
    std::unordered_map<std::uint64_t, std::uint64_t> context_counts;
    context_counts.reserve(blocks.counts().size());
    for (const auto& [key, count] : blocks.counts()) context_counts[blocks.context_of(key)] += count;
    for (const auto& [key, count] : blocks.counts()) {
        const double c = static_cast<double>(count);
        const double ctx = static_cast<double>(context_counts.at(blocks.context_of(key)));
        acc -= c * std::log(c / ctx);
    }
    return acc / total;
}

double conditional_entropy(const SymbolSequence& seq, int context_len) {
    if (context_len < 0) throw Error("context length must be >= 0");
    if (seq.size() < static_cast<std::size_t>(context_len) + 1)
        throw InsufficientDataError("sequence shorter than context length + 1");
    return conditional_entropy(BlockDistribution(seq, context_len + 1));
}

TransitionMatrix markov1_projection(const SymbolSequence& seq) {
    if (seq.size() < 2) throw InsufficientDataError("markov1 projection needs length >= 2");
    const BlockDistribution pairs(seq, 2);
    const BlockDistribution unigrams(seq, 1);

    TransitionMatrix trans(1, seq.alphabet_ptr());
    // Outgoing counts per context.
    std::unordered_map<std::uint64_t, std::uint64_t> outgoing;
    for (const auto& [key, count] : pairs.counts()) outgoing[pairs.context_of(key)] += count;

    // Group cells by context.
    std::unordered_map<std::uint64_t, TransitionMatrix::Row> rows;
    for (const auto& [key, count] : pairs.counts()) {
        const std::uint64_t ctx = pairs.context_of(key);
        TransitionMatrix::Row& row = rows[ctx];
        const double denom = static_cast<double>(outgoing.at(ctx));
        row.cells.push_back({pairs.last_of(key), static_cast<double>(count) / denom, count});
    }

    const double n_unigrams = static_cast<double>(unigrams.total());
    for (const auto& [key, count] : unigrams.counts()) {
        auto it = rows.find(key);
        if (it == rows.end()) {
            // The symbol occurs only at the very end: no outgoing statistics.
            TransitionMatrix::Row row;
            row.weight = static_cast<double>(count) / n_unigrams;
            row.flagged = true;
            trans.set_row(key, std::move(row));
        } else {
            it->second.weight = static_cast<double>(count) / n_unigrams;
            it->second.total_count = outgoing.at(key);
            trans.set_row(key, std::move(it->second));
        }
    }
    return trans;
}

TransitionMatrix transition_from_pair_probs(std::span<const double> pair_probs,
                                            std::shared_ptr<const Alphabet> alphabet) {
    if (!alphabet) throw Error("null alphabet");
    const std::size_t m = alphabet->size();
    if (pair_probs.size() != m * m) throw Error("pair table must be m x m");
    TransitionMatrix trans(1, std::move(alphabet));
    for (std::size_t x = 0; x < m; ++x) {
        double mass = 0.0;
        for (std::size_t y = 0; y < m; ++y) mass += pair_probs[x * m + y];
        TransitionMatrix::Row row;
        row.weight = mass;
        if (mass <= 0.0) {
            row.flagged = true;
        } else {
            for (std::size_t y = 0; y < m; ++y) {
                const double p = pair_probs[x * m + y] / mass;
                if (p > 0.0) row.cells.push_back({static_cast<Symbol>(y), p, 0});
            }
        }
        trans.set_row(x, std::move(row));
    }
    return trans;
}

namespace {

// Probability nu assigns to symbol `a` after `ctx`, under the zero policy.
// Returns nullopt when the infinity policy hits a zero.
std::optional<double> policy_prob(const TransitionMatrix& nu, std::uint64_t ctx, Symbol a,
                                  const ZeroPolicy& policy, const std::string& block_for_error) {
    switch (policy.kind) {
        case ZeroPolicy::Kind::epsilon: {
            const TransitionMatrix::Row* r = nu.row(ctx);
            const double c = policy.pseudo_count;
            const double m = static_cast<double>(nu.alphabet_size());
            std::uint64_t cell_count = 0;
            std::uint64_t row_count = 0;
            if (r) {
                row_count = r->total_count;
                for (const auto& cell : r->cells) {
                    if (cell.symbol == a) {
                        cell_count = cell.count;
                        break;
                    }
                }
            }
            return (static_cast<double>(cell_count) + c) /
                   (static_cast<double>(row_count) + c * m);
        }
        case ZeroPolicy::Kind::strict: {
            const double q = nu.prob(ctx, a);
            if (q <= 0.0)
                throw DominationError("domination failure: block " + block_for_error +
                                          " has mu-mass but zero nu-probability",
                                      block_for_error);
            return q;
        }
        case ZeroPolicy::Kind::infinity: {
            const double q = nu.prob(ctx, a);
            if (q <= 0.0) return std::nullopt;
            return q;
        }
    }
    return std::nullopt;  // unreachable
}

std::string describe_block(const BlockDistribution& dist, std::uint64_t key) {
    return block_labels(*dist.alphabet_ptr(), dist.unpack(key));
}

}  // namespace

double cross_conditional_entropy(const BlockDistribution& mu_blocks, const TransitionMatrix& nu,
                                 ZeroPolicy policy) {
    if (mu_blocks.block_length() != nu.order() + 1)
        throw Error("mu block length must be nu order + 1");
    if (mu_blocks.alphabet_size() != nu.alphabet_size())
        throw Error("cross entropy requires a shared alphabet");
    if (policy.kind == ZeroPolicy::Kind::epsilon && !nu.has_counts())
        throw Error("epsilon policy needs a count-backed nu model");

    const int k = nu.order();
    const double total = static_cast<double>(mu_blocks.total());
    double acc = 0.0;
    std::vector<Symbol> scratch;
    for (const auto& [key, count] : mu_blocks.counts()) {
        scratch = mu_blocks.unpack(key);
        const Symbol a = scratch.back();
        const std::uint64_t ctx =
            nu.pack_context(std::span<const Symbol>(scratch.data(), static_cast<std::size_t>(k)));
        const auto q = policy_prob(nu, ctx, a, policy, describe_block(mu_blocks, key));
        if (!q) return std::numeric_limits<double>::infinity();
        acc -= static_cast<double>(count) * std::log(*q);
    }
    return acc / total;
}

namespace {

double kl_1block_impl(const std::function<double(Symbol)>& pi, const TransitionMatrix& trans_mu,
                      const TransitionMatrix& trans_nu, ZeroPolicy policy) {
    if (trans_mu.order() != 1 || trans_nu.order() != 1)
        throw Error("kl_1block requires order-1 transition matrices");
    if (trans_mu.alphabet_size() != trans_nu.alphabet_size())
        throw Error("kl requires a shared alphabet");
    if (policy.kind == ZeroPolicy::Kind::epsilon && !trans_nu.has_counts())
        throw Error("epsilon policy needs a count-backed nu model");

    double acc = 0.0;
    for (const auto& [ctx, row] : trans_mu.rows()) {
        const double weight = pi(static_cast<Symbol>(ctx));
        if (weight <= 0.0) continue;
        if (row.flagged) continue;  // no mu statistics for this context
        const TransitionMatrix::Row* nu_row = trans_nu.row(ctx);
        if (nu_row && nu_row->flagged) continue;  // flagged rows stay out of KL sums
        for (const auto& cell : row.cells) {
            const std::string block = trans_mu.alphabet().label(static_cast<Symbol>(ctx)) + " " +
                                      trans_mu.alphabet().label(cell.symbol);
            const auto q = policy_prob(trans_nu, ctx, cell.symbol, policy, block);
            if (!q) return std::numeric_limits<double>::infinity();
            acc += weight * cell.prob * std::log(cell.prob / *q);
        }
    }
    return acc;
}

}  // namespace

double kl_1block(std::span<const double> mu_context_dist, const TransitionMatrix& trans_mu,
                 const TransitionMatrix& trans_nu, ZeroPolicy policy) {
    if (mu_context_dist.size() != trans_mu.alphabet_size())
        throw Error("context distribution size must match the alphabet");
    return kl_1block_impl(
        [&mu_context_dist](Symbol s) { return mu_context_dist[s]; }, trans_mu, trans_nu, policy);
}

double kl_1block(const BlockDistribution& mu_pairs, const TransitionMatrix& trans_mu,
                 const TransitionMatrix& trans_nu, ZeroPolicy policy) {
    if (mu_pairs.block_length() != 2) throw Error("kl_1block needs pair statistics");
    const BlockDistribution contexts = mu_pairs.drop_last();
    const double total = static_cast<double>(contexts.total());
    return kl_1block_impl(
        [&contexts, total](Symbol s) {
            const Symbol block[1] = {s};
            return static_cast<double>(contexts.count(block)) / total;
        },
        trans_mu, trans_nu, policy);
}

}  // namespace nsrps
