#include "nsrps/substitution.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

#include "nsrps/errors.hpp"

namespace nsrps {

namespace {

// Dense pair tables up to this many cells; hashed beyond.
constexpr std::size_t kDensePairLimit = std::size_t{1} << 22;

void validate_rule(const Alphabet& alphabet, const SubstitutionRule& rule) {
    if (rule.alpha >= alphabet.size())
        throw InvalidRuleError("rule symbol alpha is not registered in the alphabet");
    const SymbolOrigin& origin = alphabet.origin(rule.alpha);
    if (!origin.derived || origin.first != rule.a || origin.second != rule.b)
        throw InvalidRuleError("rule alpha is not registered as derived(a, b)");
    if (rule.a >= alphabet.size() || rule.b >= alphabet.size())
        throw InvalidRuleError("rule symbols out of alphabet range");
}

double length_ratio(std::uint64_t before, std::uint64_t after) {
    if (after == 0) return 1.0;  // only reachable from an empty input
    return static_cast<double>(before) / static_cast<double>(after);
}

}  // namespace

std::pair<SymbolSequence, SubstitutionStep> substitute_pair(const SymbolSequence& seq,
                                                            const SubstitutionRule& rule) {
    validate_rule(seq.alphabet(), rule);
    const auto s = seq.symbols();
    const std::size_t n = s.size();
    std::vector<Symbol> out;
    out.reserve(n);
    std::uint64_t replacements = 0;
    std::size_t i = 0;
    while (i < n) {
        if (i + 1 < n && s[i] == rule.a && s[i + 1] == rule.b) {
            out.push_back(rule.alpha);
            ++replacements;
            i += 2;
        } else {
            out.push_back(s[i]);
            ++i;
        }
    }
    SubstitutionStep step;
    step.rule = rule;
    step.replacements = replacements;
    step.length_before = n;
    step.length_after = out.size();
    step.z_step = length_ratio(step.length_before, step.length_after);
    return {SymbolSequence(std::move(out), seq.alphabet_ptr()), step};
}

SymbolSequence expand_pair(const SymbolSequence& seq, const SubstitutionRule& rule) {
    if (rule.alpha >= seq.alphabet().size()) return seq;  // alpha cannot occur
    validate_rule(seq.alphabet(), rule);
    const auto s = seq.symbols();
    std::vector<Symbol> out;
    out.reserve(s.size());
    for (Symbol x : s) {
        if (x == rule.alpha) {
            out.push_back(rule.a);
            out.push_back(rule.b);
        } else {
            out.push_back(x);
        }
    }
    return SymbolSequence(std::move(out), seq.alphabet_ptr());
}

PairCounts PairCounts::of(const SymbolSequence& seq) {
    PairCounts pc;
    pc.m_ = seq.alphabet().size();
    pc.dense_ = pc.m_ * pc.m_ <= kDensePairLimit;
    if (pc.dense_) pc.table_.assign(pc.m_ * pc.m_, 0);

    auto bump = [&pc](Symbol a, Symbol b, std::uint64_t by) {
        const std::uint64_t key = static_cast<std::uint64_t>(a) * pc.m_ + b;
        if (pc.dense_) pc.table_[key] += by;
        else pc.sparse_[key] += by;
    };

    // One pass over maximal runs: a run of c^L yields floor(L/2) for (c, c),
    // and every boundary contributes one (s[j], s[j+1]) with distinct symbols.
    const auto s = seq.symbols();
    const std::size_t n = s.size();
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && s[j + 1] == s[i]) ++j;
        const std::uint64_t run = j - i + 1;
        if (run >= 2) bump(s[i], s[i], run / 2);
        if (j + 1 < n) bump(s[j], s[j + 1], 1);
        i = j + 1;
    }
    return pc;
}

std::uint64_t PairCounts::count(Symbol a, Symbol b) const {
    if (a >= m_ || b >= m_) return 0;
    const std::uint64_t key = static_cast<std::uint64_t>(a) * m_ + b;
    if (dense_) return table_[key];
    auto it = sparse_.find(key);
    return it == sparse_.end() ? 0 : it->second;
}

std::optional<std::pair<Symbol, Symbol>> PairCounts::most_frequent() const {
    std::uint64_t best_key = 0;
    std::uint64_t best_count = 0;
    if (dense_) {
        for (std::uint64_t key = 0; key < table_.size(); ++key) {
            if (table_[key] > best_count) {  // first strict max = lexicographic min
                best_count = table_[key];
                best_key = key;
            }
        }
    } else {
        for (const auto& [key, count] : sparse_) {
            if (count > best_count || (count == best_count && count > 0 && key < best_key)) {
                best_count = count;
                best_key = key;
            }
        }
    }
    if (best_count == 0) return std::nullopt;
    return std::make_pair(static_cast<Symbol>(best_key / m_), static_cast<Symbol>(best_key % m_));
}

std::unordered_map<std::uint64_t, std::uint64_t> PairCounts::as_map() const {
    if (!dense_) return sparse_;
    std::unordered_map<std::uint64_t, std::uint64_t> out;
    for (std::uint64_t key = 0; key < table_.size(); ++key) {
        if (table_[key]) out.emplace(key, table_[key]);
    }
    return out;
}

std::pair<Symbol, Symbol> choose_pair_most_frequent(const SymbolSequence& seq) {
    if (seq.size() < 2)
        throw InsufficientDataError("no pair to choose: sequence shorter than 2");
    auto best = PairCounts::of(seq).most_frequent();
    if (!best) throw InsufficientDataError("no pair to choose");  // unreachable for n >= 2
    return *best;
}

PairStrategy most_frequent_strategy() {
    return [](const SymbolSequence& seq, std::size_t) -> std::optional<std::pair<Symbol, Symbol>> {
        if (seq.size() < 2) return std::nullopt;
        return PairCounts::of(seq).most_frequent();
    };
}

PairStrategy fixed_rules_strategy(std::vector<std::pair<Symbol, Symbol>> pairs) {
    return [pairs = std::move(pairs)](const SymbolSequence& seq, std::size_t step)
               -> std::optional<std::pair<Symbol, Symbol>> {
        if (step >= pairs.size()) throw Error("fixed rule list exhausted");
        const auto [a, b] = pairs[step];
        if (a >= seq.alphabet().size() || b >= seq.alphabet().size())
            throw Error("fixed rule names a symbol outside the current alphabet");
        return pairs[step];
    };
}

PairStrategy fixed_label_rules_strategy(std::vector<std::pair<std::string, std::string>> labels) {
    return [labels = std::move(labels)](const SymbolSequence& seq, std::size_t step)
               -> std::optional<std::pair<Symbol, Symbol>> {
        if (step >= labels.size()) throw Error("fixed rule list exhausted");
        const Alphabet& alphabet = seq.alphabet();
        auto a = alphabet.find(labels[step].first);
        auto b = alphabet.find(labels[step].second);
        if (!a || !b)
            throw Error("fixed rule label not in the current alphabet: " +
                        labels[step].first + " " + labels[step].second);
        return std::make_pair(*a, *b);
    };
}

namespace {

// Registers a fresh derived symbol for (a, b) on top of `alphabet`.
std::shared_ptr<const Alphabet> extend_alphabet(const Alphabet& alphabet, Symbol a, Symbol b,
                                                Symbol& alpha_out) {
    Alphabet extended = alphabet;
    alpha_out = extended.add_derived(a, b);
    return std::make_shared<const Alphabet>(std::move(extended));
}

}  // namespace

NsrpsTrace run_nsrps(const SymbolSequence& seq, std::size_t n_steps, const PairStrategy& strategy,
                     const StepObserver& observer) {
    NsrpsTrace trace;
    SymbolSequence current = seq;
    const std::uint64_t initial_length = seq.size();
    if (observer) observer(0, current);
    for (std::size_t step = 0; step < n_steps; ++step) {
        if (current.size() < 2) {
            trace.early_stop = true;
            break;
        }
        auto pair = strategy(current, step);
        if (!pair) {
            trace.early_stop = true;
            break;
        }
        Symbol alpha = 0;
        auto extended = extend_alphabet(current.alphabet(), pair->first, pair->second, alpha);
        current = current.rebound(extended);
        auto [next, record] = substitute_pair(current, {pair->first, pair->second, alpha});
        current = std::move(next);
        trace.steps.push_back(record);
        trace.zbar.push_back(record.length_after == 0
                                 ? 1.0
                                 : static_cast<double>(initial_length) /
                                       static_cast<double>(record.length_after));
        if (observer) observer(step + 1, current);
    }
    trace.final_sequence = current;
    trace.final_alphabet = current.alphabet_ptr();
    return trace;
}

PairedTraces run_paired_nsrps(const SymbolSequence& seq_mu, const SymbolSequence& seq_nu,
                              std::size_t n_steps, Driver driver, const PairStrategy& strategy,
                              const PairedStepObserver& observer) {
    if (!(seq_mu.alphabet() == seq_nu.alphabet()))
        throw Error("paired run requires both sequences over the same alphabet");

    PairedTraces traces;
    SymbolSequence mu = seq_mu;
    SymbolSequence nu = seq_nu;
    const std::uint64_t initial_mu = mu.size();
    const std::uint64_t initial_nu = nu.size();
    if (observer) observer(0, mu, nu);

    auto push = [](NsrpsTrace& trace, const SubstitutionStep& record, std::uint64_t initial) {
        trace.steps.push_back(record);
        trace.zbar.push_back(record.length_after == 0
                                 ? 1.0
                                 : static_cast<double>(initial) /
                                       static_cast<double>(record.length_after));
    };

    for (std::size_t step = 0; step < n_steps; ++step) {
        const SymbolSequence& chooser = driver == Driver::nu ? nu : mu;
        if (chooser.size() < 2) {
            traces.mu.early_stop = traces.nu.early_stop = true;
            break;
        }
        auto pair = strategy(chooser, step);
        if (!pair) {
            traces.mu.early_stop = traces.nu.early_stop = true;
            break;
        }
        Symbol alpha = 0;
        auto extended = extend_alphabet(mu.alphabet(), pair->first, pair->second, alpha);
        const SubstitutionRule rule{pair->first, pair->second, alpha};
        auto [next_mu, record_mu] = substitute_pair(mu.rebound(extended), rule);
        auto [next_nu, record_nu] = substitute_pair(nu.rebound(extended), rule);
        mu = std::move(next_mu);
        nu = std::move(next_nu);
        push(traces.mu, record_mu, initial_mu);
        push(traces.nu, record_nu, initial_nu);
        if (observer) observer(step + 1, mu, nu);
    }
    traces.mu.final_sequence = mu;
    traces.mu.final_alphabet = mu.alphabet_ptr();
    traces.nu.final_sequence = nu;
    traces.nu.final_alphabet = nu.alphabet_ptr();
    return traces;
}

void write_trace_tsv(std::ostream& out, const NsrpsTrace& trace) {
    const Alphabet& alphabet = *trace.final_alphabet;
    out << "#step\ta\tb\talpha\treplacements\tlength_after\tz_step\tzbar\n";
    const auto precision = out.precision(12);
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const SubstitutionStep& s = trace.steps[i];
        out << i + 1 << '\t' << alphabet.label(s.rule.a) << '\t' << alphabet.label(s.rule.b)
            << '\t' << alphabet.label(s.rule.alpha) << '\t' << s.replacements << '\t'
            << s.length_after << '\t' << s.z_step << '\t' << trace.zbar[i] << '\n';
    }
    out.precision(precision);
}

}  // namespace nsrps
