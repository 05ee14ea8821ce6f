#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nsrps/stats.hpp"

namespace nsrps {

// Order-k Markov source (k = 0 is i.i.d.). Carries its transition law and the
// stationary distribution over k-block contexts; both a synthetic source and
// an analytic oracle. Immutable once built.
class MarkovModel {
public:
    MarkovModel(std::shared_ptr<const Alphabet> alphabet, int order, TransitionMatrix law);

    int order() const noexcept { return order_; }
    const Alphabet& alphabet() const noexcept { return *alphabet_; }
    const std::shared_ptr<const Alphabet>& alphabet_ptr() const noexcept { return alphabet_; }
    const TransitionMatrix& law() const noexcept { return law_; }
    // Sorted (context, probability) pairs; the fixed point of the k-block chain.
    const std::vector<std::pair<std::uint64_t, double>>& stationary() const noexcept {
        return stationary_;
    }

    // Binary i.i.d. source; p0 = probability of symbol "0".
    static MarkovModel bernoulli(double p0);
    static MarkovModel iid(std::vector<double> probs, std::shared_ptr<const Alphabet> alphabet);
    // Order-1 binary chain that flips the previous symbol with probability q.
    static MarkovModel binary_flip(double q);
    // Order-k binary model with transition probabilities drawn uniformly in
    // [0.1, 0.9] and row-normalized; entries bounded away from zero, so any
    // two such models dominate each other.
    static MarkovModel random_binary(int order, std::uint64_t law_seed);

    // Model file: "order k", "alphabet m", then rows "block a prob" with
    // symbols as integer ids (k ids for the block, omitted when k = 0).
    static MarkovModel load(std::istream& in);
    void save(std::ostream& out) const;

    // Initial k-block drawn from the stationary distribution, then length-k
    // transitions. Deterministic given the seed.
    SymbolSequence generate(std::uint64_t length, std::uint64_t seed) const;

private:
    std::shared_ptr<const Alphabet> alphabet_;
    int order_;
    TransitionMatrix law_;
    std::vector<std::pair<std::uint64_t, double>> stationary_;
};

// Fixed point of the k-block chain via damped power iteration (tolerance
// 1e-12 in L1, at most 1e6 iterations). The chain over the matrix's contexts
// must be irreducible; reducibility and non-convergence raise ModelError.
std::vector<std::pair<std::uint64_t, double>> stationary_distribution(const TransitionMatrix& law);

// Exact l-block probabilities, indexed by base-m packed block (size m^l).
std::vector<double> block_probabilities(const MarkovModel& model, int len);

// h = -sum_b pi(b) sum_a P(a|b) log P(a|b), nats per symbol.
double analytic_entropy_rate(const MarkovModel& model);
// h_l of the model (l >= 0), from exact (l+1)-block marginals.
double analytic_conditional_entropy(const MarkovModel& model, int len);
// h_l(mu || nu) for l >= nu.order(), from mu's exact (l+1)-block marginals.
double analytic_cross_conditional(const MarkovModel& mu, const MarkovModel& nu, int len);
// h(mu || nu) = h_k(mu || nu) with k = max of the two orders.
double analytic_cross_entropy_rate(const MarkovModel& mu, const MarkovModel& nu);
double analytic_kl_rate(const MarkovModel& mu, const MarkovModel& nu);

// The image of a Bernoulli measure under the substitution 01 -> 2, in closed
// form: a 1-Markov chain over {0, 1, 2} with Z = 1 / (1 - p(1-p)).
struct BernoulliTransform {
    std::shared_ptr<const Alphabet> alphabet;  // {0, 1, (0.1)}
    std::array<double, 3> stationary;
    TransitionMatrix transition;
    double z;
};
BernoulliTransform exact_bernoulli_transform(double p0);
MarkovModel transform_to_model(const BernoulliTransform& transform);

// Block probabilities of a binary process up to length 4, the input of
// exact_pair_table. Construction validates the marginalization consistency
// of the entries.
class BinaryMarginals {
public:
    static BinaryMarginals bernoulli(double p0);
    static BinaryMarginals from_map(std::map<std::string, double> probs);
    static BinaryMarginals from_model(const MarkovModel& model);

    double operator()(std::string_view block) const;

private:
    BinaryMarginals() = default;
    void validate() const;

    std::map<std::string, double> probs_;
};

// The nine pair probabilities of the transformed process G(mu) over {0, 1, 2}
// for the substitution 01 -> 2, valid for a generic binary process; entries
// sum to 1 and entry (0, 1) is exactly 0.
std::array<std::array<double, 3>, 3> exact_pair_table(const BinaryMarginals& marginals);

}  // namespace nsrps
