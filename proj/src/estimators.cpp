#include "nsrps/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "nsrps/errors.hpp"

namespace nsrps {

namespace {

// Bytes to write one substitution rule as a text line "a b alpha".
std::uint64_t rule_line_bytes(const Alphabet& alphabet, const SubstitutionRule& rule) {
    return alphabet.label(rule.a).size() + alphabet.label(rule.b).size() +
           alphabet.label(rule.alpha).size() + 3;  // two separators + newline
}

// Bytes of a packed pair-count table: two symbol ids and a count per entry.
std::uint64_t pair_table_bytes(const BlockDistribution& pairs) {
    return pairs.counts().size() * 16;
}

}  // namespace

EstimateSeries entropy_via_nsrps(const SymbolSequence& seq, std::size_t n_steps,
                                 const PairStrategy& strategy) {
    if (seq.size() < 2) throw InsufficientDataError("entropy estimate needs length >= 2");

    EstimateSeries series;
    series.policy = ZeroPolicy::strict();
    bool exhausted = false;

    auto observer = [&](std::size_t step, const SymbolSequence& current) {
        if (exhausted) return;
        if (current.size() < 2) {
            exhausted = true;
            return;
        }
        const BlockDistribution pairs(current, 2);
        EstimatePoint point;
        point.step = step;
        point.length_mu = point.length_nu = current.size();
        point.zbar_mu = point.zbar_nu =
            static_cast<double>(seq.size()) / static_cast<double>(current.size());
        point.h1 = conditional_entropy(pairs);
        point.estimate = point.h1 / point.zbar_mu;
        point.pair_table_bytes = pair_table_bytes(pairs);
        series.points.push_back(point);
    };

    NsrpsTrace trace = run_nsrps(seq, n_steps, strategy, observer);
    series.early_stop = trace.early_stop || exhausted;
    series.final_alphabet = trace.final_alphabet;
    for (const auto& step : trace.steps) series.rules.push_back(step.rule);

    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < series.points.size(); ++i) {
        if (i > 0 && i - 1 < series.rules.size())
            acc += rule_line_bytes(*trace.final_alphabet, series.rules[i - 1]);
        series.points[i].rule_bytes = acc;
    }
    return series;
}

namespace {

EstimateSeries paired_series(const SymbolSequence& seq_mu, const SymbolSequence& seq_nu,
                             std::size_t n_steps, Driver driver, ZeroPolicy policy,
                             const PairStrategy& strategy) {
    if (seq_mu.size() < 2 || seq_nu.size() < 2)
        throw InsufficientDataError("cross estimate needs both lengths >= 2");

    EstimateSeries series;
    series.policy = policy;
    series.has_cross = true;
    bool exhausted = false;

    auto observer = [&](std::size_t step, const SymbolSequence& mu, const SymbolSequence& nu) {
        if (exhausted) return;
        if (mu.size() < 2 || nu.size() < 2) {
            exhausted = true;
            return;
        }
        const BlockDistribution pairs_mu(mu, 2);
        const TransitionMatrix proj_nu = markov1_projection(nu);

        EstimatePoint point;
        point.step = step;
        point.length_mu = mu.size();
        point.length_nu = nu.size();
        point.zbar_mu = static_cast<double>(seq_mu.size()) / static_cast<double>(mu.size());
        point.zbar_nu = static_cast<double>(seq_nu.size()) / static_cast<double>(nu.size());
        // Entropy and cross terms share the mu pair statistics; for nu == mu
        // they agree term by term and the KL column is exactly zero.
        point.h1 = conditional_entropy(pairs_mu);
        point.estimate = point.h1 / point.zbar_mu;
        try {
            point.cross_h1 = cross_conditional_entropy(pairs_mu, proj_nu, policy);
        } catch (const DominationError& e) {
            throw DominationError(std::string(e.what()) + " (at NSRPS step " +
                                      std::to_string(step) + ")",
                                  e.block(), static_cast<long>(step));
        }
        point.cross = *point.cross_h1 / point.zbar_mu;
        point.kl = *point.cross - point.estimate;
        point.pair_table_bytes = pair_table_bytes(pairs_mu);
        series.points.push_back(point);
    };

    PairedTraces traces = run_paired_nsrps(seq_mu, seq_nu, n_steps, driver, strategy, observer);
    series.early_stop = traces.mu.early_stop || exhausted;
    series.final_alphabet = traces.mu.final_alphabet;
    for (const auto& step : traces.mu.steps) series.rules.push_back(step.rule);

    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < series.points.size(); ++i) {
        if (i > 0 && i - 1 < series.rules.size())
            acc += rule_line_bytes(*series.final_alphabet, series.rules[i - 1]);
        series.points[i].rule_bytes = acc;
    }
    return series;
}

}  // namespace

EstimateSeries cross_entropy_via_nsrps(const SymbolSequence& seq_mu, const SymbolSequence& seq_nu,
                                       std::size_t n_steps, Driver driver, ZeroPolicy policy,
                                       const PairStrategy& strategy) {
    return paired_series(seq_mu, seq_nu, n_steps, driver, policy, strategy);
}

EstimateSeries kl_via_nsrps(const SymbolSequence& seq_mu, const SymbolSequence& seq_nu,
                            std::size_t n_steps, Driver driver, ZeroPolicy policy,
                            const PairStrategy& strategy) {
    return paired_series(seq_mu, seq_nu, n_steps, driver, policy, strategy);
}

void write_series_tsv(std::ostream& out, const EstimateSeries& series, bool bits,
                      const AnalyticReference* analytic) {
    const double unit = bits ? std::log(2.0) : 1.0;
    out << "#N\tzbar_mu\tzbar_nu\th1\testimate";
    if (series.has_cross) out << "\tcross\tkl";
    out << "\tflags\trule_bytes\tpair_table_bytes";
    if (analytic) {
        if (analytic->h) out << "\tanalytic_h\trel_err_h";
        if (series.has_cross && analytic->cross) out << "\tanalytic_cross\trel_err_cross";
        if (series.has_cross && analytic->kl) out << "\tanalytic_kl\terr_kl";
    }
    out << '\n';
    const auto precision = out.precision(12);
    for (const auto& p : series.points) {
        out << p.step << '\t' << p.zbar_mu << '\t' << p.zbar_nu << '\t' << p.h1 / unit << '\t'
            << p.estimate / unit;
        if (series.has_cross) out << '\t' << *p.cross / unit << '\t' << *p.kl / unit;
        const bool last = &p == &series.points.back();
        out << '\t' << (last && series.early_stop ? "early-stop" : "-");
        out << '\t' << p.rule_bytes << '\t' << p.pair_table_bytes;
        if (analytic) {
            if (analytic->h)
                out << '\t' << *analytic->h / unit << '\t'
                    << (p.estimate - *analytic->h) / std::abs(*analytic->h);
            if (series.has_cross && analytic->cross)
                out << '\t' << *analytic->cross / unit << '\t'
                    << (*p.cross - *analytic->cross) / std::abs(*analytic->cross);
            if (series.has_cross && analytic->kl)
                out << '\t' << *analytic->kl / unit << '\t' << (*p.kl - *analytic->kl) / unit;
        }
        out << '\n';
    }
    out.precision(precision);
}

namespace {

// First 1-based k > 1 with z_k^{k+n-1} = w_1^n, by direct scan.
std::optional<std::uint64_t> first_occurrence(std::span<const Symbol> pattern,
                                              std::span<const Symbol> text) {
    const std::size_t n = pattern.size();
    if (n == 0 || text.size() < n + 1) return std::nullopt;
    const Symbol head = pattern[0];
    for (std::size_t start = 1; start + n <= text.size(); ++start) {
        if (text[start] != head) continue;
        if (std::equal(pattern.begin() + 1, pattern.end(), text.begin() + start + 1))
            return start + 1;  // 1-based position
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::uint64_t> returning_time(const SymbolSequence& w, std::size_t n) {
    if (n == 0 || n > w.size()) throw Error("prefix length out of range");
    return first_occurrence(w.symbols().subspan(0, n), w.symbols());
}

std::optional<std::uint64_t> waiting_time(const SymbolSequence& w, const SymbolSequence& z,
                                          std::size_t n) {
    if (n == 0 || n > w.size()) throw Error("prefix length out of range");
    return first_occurrence(w.symbols().subspan(0, n), z.symbols());
}

namespace {

std::vector<TimeEstimate> time_series(const SymbolSequence& w, const SymbolSequence& z,
                                      std::span<const int> n_list) {
    std::vector<TimeEstimate> out;
    for (int n : n_list) {
        TimeEstimate e;
        e.n = n;
        if (n <= 0 || static_cast<std::size_t>(n) > w.size()) {
            e.near_exhaustion = true;
            out.push_back(e);
            continue;
        }
        e.time = waiting_time(w, z, static_cast<std::size_t>(n));
        e.found = e.time.has_value();
        if (e.found) {
            e.value = std::log(static_cast<double>(*e.time)) / static_cast<double>(n);
            // A match in the last decade of z means exp(n h) is close to |z|;
            // the estimate is at the edge of what the sample can support.
            e.near_exhaustion = *e.time * 10 > z.size();
        } else {
            e.near_exhaustion = true;
        }
        out.push_back(e);
    }
    return out;
}

}  // namespace

std::vector<TimeEstimate> entropy_via_returning_time(const SymbolSequence& w,
                                                     std::span<const int> n_list) {
    return time_series(w, w, n_list);
}

std::vector<TimeEstimate> cross_entropy_via_waiting_time(const SymbolSequence& w,
                                                         const SymbolSequence& z,
                                                         std::span<const int> n_list) {
    return time_series(w, z, n_list);
}

}  // namespace nsrps
