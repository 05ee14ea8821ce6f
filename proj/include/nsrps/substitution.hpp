#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nsrps/sequence.hpp"

namespace nsrps {

// The pair substitution ab -> alpha. alpha must be registered in the
// sequence's alphabet as derived(a, b); a == b is allowed.
struct SubstitutionRule {
    Symbol a;
    Symbol b;
    Symbol alpha;
};

struct SubstitutionStep {
    SubstitutionRule rule;
    std::uint64_t replacements = 0;  // left-to-right non-overlapping occurrences
    std::uint64_t length_before = 0;
    std::uint64_t length_after = 0;
    double z_step = 1.0;  // length_before / length_after, >= 1
};

struct NsrpsTrace {
    std::vector<SubstitutionStep> steps;
    std::vector<double> zbar;  // zbar[i] = initial length / length after step i
    SymbolSequence final_sequence;
    std::shared_ptr<const Alphabet> final_alphabet;
    bool early_stop = false;  // the sequence dropped below 2 symbols
};

// Single left-to-right scan: whenever the current symbol is a and the next is
// b, emit alpha and advance by two, else emit the current symbol. Injective;
// expand_pair inverts it.
std::pair<SymbolSequence, SubstitutionStep> substitute_pair(const SymbolSequence& seq,
                                                            const SubstitutionRule& rule);

// Replaces every alpha by the pair (a, b). Inverse of substitute_pair.
SymbolSequence expand_pair(const SymbolSequence& seq, const SubstitutionRule& rule);

// Left-to-right non-overlapping occurrence counts of every adjacent pair.
// For a != b this equals the plain adjacency count; for a == b a run of
// length L contributes floor(L / 2).
class PairCounts {
public:
    static PairCounts of(const SymbolSequence& seq);

    std::uint64_t count(Symbol a, Symbol b) const;
    // Maximal-count pair; ties broken by smallest (a, b) lexicographically.
    std::optional<std::pair<Symbol, Symbol>> most_frequent() const;
    // Pairs with nonzero count, keyed by a * alphabet_size + b.
    std::unordered_map<std::uint64_t, std::uint64_t> as_map() const;

private:
    std::size_t m_ = 0;
    bool dense_ = false;
    std::vector<std::uint64_t> table_;
    std::unordered_map<std::uint64_t, std::uint64_t> sparse_;
};

std::pair<Symbol, Symbol> choose_pair_most_frequent(const SymbolSequence& seq);

// Selects the pair to substitute at a given step, or nullopt to stop early.
using PairStrategy =
    std::function<std::optional<std::pair<Symbol, Symbol>>(const SymbolSequence&, std::size_t)>;

PairStrategy most_frequent_strategy();
PairStrategy fixed_rules_strategy(std::vector<std::pair<Symbol, Symbol>> pairs);
// Labels are resolved against the evolving alphabet at each step, so later
// entries may name symbols derived by earlier steps.
PairStrategy fixed_label_rules_strategy(std::vector<std::pair<std::string, std::string>> labels);

using StepObserver = std::function<void(std::size_t step, const SymbolSequence& current)>;

// Applies n_steps substitutions, each chosen by the strategy on the current
// sequence, registering a fresh derived symbol per step. The observer (when
// set) sees step 0 (the input) and the sequence after every step.
NsrpsTrace run_nsrps(const SymbolSequence& seq, std::size_t n_steps,
                     const PairStrategy& strategy = most_frequent_strategy(),
                     const StepObserver& observer = nullptr);

enum class Driver { mu, nu };

struct PairedTraces {
    NsrpsTrace mu;
    NsrpsTrace nu;
};

using PairedStepObserver = std::function<void(std::size_t step, const SymbolSequence& mu_seq,
                                              const SymbolSequence& nu_seq)>;

// At each step the pair is chosen from the driver sequence and the same rule
// is applied to both. A rule absent from the other sequence is a no-op there
// (z_step = 1). Both sequences must be over the same alphabet.
PairedTraces run_paired_nsrps(const SymbolSequence& seq_mu, const SymbolSequence& seq_nu,
                              std::size_t n_steps, Driver driver = Driver::nu,
                              const PairStrategy& strategy = most_frequent_strategy(),
                              const PairedStepObserver& observer = nullptr);

// TSV columns: step, a, b, alpha, replacements, length_after, z_step, zbar.
void write_trace_tsv(std::ostream& out, const NsrpsTrace& trace);

}  // namespace nsrps
