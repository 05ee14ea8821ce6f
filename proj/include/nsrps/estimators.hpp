#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "nsrps/sources.hpp"
#include "nsrps/substitution.hpp"

namespace nsrps {

// One row of an estimate series: the rescaled 1-block statistics after N
// substitution steps. estimate == h1 / zbar_mu by construction.
struct EstimatePoint {
    std::size_t step = 0;
    std::uint64_t length_mu = 0;
    std::uint64_t length_nu = 0;
    double zbar_mu = 1.0;
    double zbar_nu = 1.0;
    double h1 = 0.0;       // h_1 of the transformed mu-sequence, nats
    double estimate = 0.0; // h1 / zbar_mu, nats per original symbol
    std::optional<double> cross_h1;  // h_1(mu_N || P(nu_N)), nats
    std::optional<double> cross;     // cross_h1 / zbar_mu
    std::optional<double> kl;        // cross - estimate
    // Informational description-length counters (never subtracted): bytes of
    // the rule list so far, and of a packed pair-count table of mu_N.
    std::uint64_t rule_bytes = 0;
    std::uint64_t pair_table_bytes = 0;
};

struct EstimateSeries {
    std::vector<EstimatePoint> points;  // steps 0..N, contiguous
    std::vector<SubstitutionRule> rules;
    std::shared_ptr<const Alphabet> final_alphabet;
    bool early_stop = false;
    ZeroPolicy policy = ZeroPolicy::strict();
    bool has_cross = false;
};

// h(mu) = lim h_1(mu_N) / Zbar_N: the full series of rescaled 1-conditional
// entropies along an NSRPS run.
EstimateSeries entropy_via_nsrps(const SymbolSequence& seq, std::size_t n_steps,
                                 const PairStrategy& strategy = most_frequent_strategy());

// h(mu||nu) = lim h_1(mu_N || nu_N) / Zbar^mu_N on a paired run: at each step
// the 1-Markov projection of the transformed nu-sequence is the model. The
// series also carries the mu-entropy estimate from the same trace and their
// difference (the KL series).
EstimateSeries cross_entropy_via_nsrps(const SymbolSequence& seq_mu, const SymbolSequence& seq_nu,
                                       std::size_t n_steps, Driver driver = Driver::nu,
                                       ZeroPolicy policy = ZeroPolicy::epsilon(),
                                       const PairStrategy& strategy = most_frequent_strategy());

// d_N = cross_N - entropy_N on the same paired trace.
EstimateSeries kl_via_nsrps(const SymbolSequence& seq_mu, const SymbolSequence& seq_nu,
                            std::size_t n_steps, Driver driver = Driver::nu,
                            ZeroPolicy policy = ZeroPolicy::epsilon(),
                            const PairStrategy& strategy = most_frequent_strategy());

// Reference values (the "dashed lines"): when present, the TSV gains
// analytic/error columns next to the matching estimates.
struct AnalyticReference {
    std::optional<double> h;
    std::optional<double> cross;
    std::optional<double> kl;
};

// TSV columns: N, zbar_mu, zbar_nu, h1, estimate, [cross, kl,] flags, plus the
// informational byte counters. Values divided by ln 2 when bits is set.
void write_series_tsv(std::ostream& out, const EstimateSeries& series, bool bits = false,
                      const AnalyticReference* analytic = nullptr);

// R(w_1^n) = min{k > 1: w_k^{k+n-1} = w_1^n}; nullopt when no reoccurrence
// fits in w. Positions are 1-based.
std::optional<std::uint64_t> returning_time(const SymbolSequence& w, std::size_t n);

// W(w_1^n, z) = min{k > 1: z_k^{k+n-1} = w_1^n}; W(w_1^n, w) = R(w_1^n).
std::optional<std::uint64_t> waiting_time(const SymbolSequence& w, const SymbolSequence& z,
                                          std::size_t n);

struct TimeEstimate {
    int n = 0;
    std::optional<std::uint64_t> time;  // R or W
    double value = 0.0;                 // log(time) / n, nats; 0 when absent
    bool found = false;
    // The match sits in the last decade of z (or was not found): the sample
    // is too short for this n and the value is unreliable.
    bool near_exhaustion = false;
};

std::vector<TimeEstimate> entropy_via_returning_time(const SymbolSequence& w,
                                                     std::span<const int> n_list);
std::vector<TimeEstimate> cross_entropy_via_waiting_time(const SymbolSequence& w,
                                                         const SymbolSequence& z,
                                                         std::span<const int> n_list);

}  // namespace nsrps
