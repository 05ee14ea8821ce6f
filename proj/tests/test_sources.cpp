#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nsrps/errors.hpp"
#include "nsrps/sources.hpp"
#include "nsrps/substitution.hpp"
#include "test_util.hpp"

using namespace nsrps;

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Deterministic alternator: one-hot rows 0 -> 1 -> 0.
MarkovModel alternator() {
    auto alphabet = test::digits(2);
    TransitionMatrix law(1, alphabet);
    TransitionMatrix::Row r0, r1;
    r0.cells.push_back({1, 1.0, 0});
    r1.cells.push_back({0, 1.0, 0});
    law.set_row(0, std::move(r0));
    law.set_row(1, std::move(r1));
    return MarkovModel(alphabet, 1, std::move(law));
}

}  // namespace

TEST_SUITE("sources") {

TEST_CASE("generation") {
    SUBCASE("one-hot rows force the periodic sequence") {
        auto seq = alternator().generate(10, 3);
        REQUIRE(seq.size() == 10);
        for (std::size_t i = 1; i < seq.size(); ++i) CHECK(seq[i] == (seq[i - 1] ^ 1u));
    }
    SUBCASE("fair coin unigram frequency within 3 sigma") {
        auto seq = MarkovModel::bernoulli(0.5).generate(1000000, 1);
        std::uint64_t zeros = 0;
        for (Symbol s : seq.symbols()) zeros += s == 0;
        const double f = static_cast<double>(zeros) / 1e6;
        CHECK(f > 0.497);
        CHECK(f < 0.503);
    }
    SUBCASE("determinism and seed sensitivity") {
        auto model = MarkovModel::random_binary(3, 5);
        auto a = model.generate(5000, 42);
        auto b = model.generate(5000, 42);
        auto c = model.generate(5000, 43);
        CHECK(std::equal(a.symbols().begin(), a.symbols().end(), b.symbols().begin()));
        CHECK_FALSE(std::equal(a.symbols().begin(), a.symbols().end(), c.symbols().begin()));
    }
    SUBCASE("degenerate lengths") {
        CHECK(MarkovModel::bernoulli(0.5).generate(0, 1).size() == 0);
        CHECK(MarkovModel::random_binary(4, 1).generate(2, 1).size() == 2);  // length < order
    }
}

TEST_CASE("stationary distributions") {
    SUBCASE("symmetric flip chain") {
        auto model = MarkovModel::binary_flip(0.3);
        REQUIRE(model.stationary().size() == 2);
        CHECK(model.stationary()[0].second == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(model.stationary()[1].second == doctest::Approx(0.5).epsilon(1e-10));
    }
    SUBCASE("iid law viewed as order 1") {
        const double pair_probs[4] = {0.09, 0.21, 0.21, 0.49};  // p0 = 0.3 product pairs
        auto trans = transition_from_pair_probs(pair_probs, test::digits(2));
        auto pi = stationary_distribution(trans);
        CHECK(pi[0].second == doctest::Approx(0.3).epsilon(1e-10));
        CHECK(pi[1].second == doctest::Approx(0.7).epsilon(1e-10));
    }
    SUBCASE("random chain satisfies pi P = pi") {
        auto model = MarkovModel::random_binary(2, 9);
        const auto& law = model.law();
        for (const auto& [ctx, p] : model.stationary()) {
            double inflow = 0.0;
            for (const auto& [from, pf] : model.stationary()) {
                for (const auto& cell : law.row(from)->cells) {
                    if ((from % 2) * 2 + cell.symbol == ctx) inflow += pf * cell.prob;
                }
            }
            CHECK(std::abs(inflow - p) <= 1e-10);
        }
    }
    SUBCASE("reducible chains are rejected") {
        auto alphabet = test::digits(2);
        TransitionMatrix law(1, alphabet);
        TransitionMatrix::Row r0, r1;
        r0.cells.push_back({0, 1.0, 0});  // absorbing in 0
        r1.cells.push_back({0, 1.0, 0});
        law.set_row(0, std::move(r0));
        law.set_row(1, std::move(r1));
        CHECK_THROWS_AS(stationary_distribution(law), ModelError);
    }
    SUBCASE("transitions into undescribed contexts are rejected") {
        auto alphabet = test::digits(2);
        TransitionMatrix law(1, alphabet);
        TransitionMatrix::Row r0;
        r0.cells.push_back({1, 1.0, 0});
        law.set_row(0, std::move(r0));  // no row for context 1
        CHECK_THROWS_AS(stationary_distribution(law), ModelError);
    }
}

TEST_CASE("analytic entropy rates") {
    CHECK(analytic_entropy_rate(MarkovModel::bernoulli(0.5)) ==
          doctest::Approx(kLn2).epsilon(1e-12));
    CHECK(analytic_entropy_rate(MarkovModel::binary_flip(0.3)) ==
          doctest::Approx(0.610864).epsilon(1e-5));
    CHECK(analytic_entropy_rate(alternator()) == 0.0);

    SUBCASE("the rate equals the k-conditional entropy") {
        auto model = MarkovModel::random_binary(3, 21);
        CHECK(std::abs(analytic_entropy_rate(model) - analytic_conditional_entropy(model, 3)) <=
              1e-12);
    }
    SUBCASE("conditional entropies decrease towards the rate") {
        auto model = MarkovModel::random_binary(5, 2);
        const double rate = analytic_entropy_rate(model);
        double prev = analytic_conditional_entropy(model, 0);
        for (int l = 1; l <= 5; ++l) {
            const double h = analytic_conditional_entropy(model, l);
            CHECK(h <= prev + 1e-10);
            prev = h;
        }
        CHECK(std::abs(prev - rate) <= 1e-10);  // order-5 saturates at l = 5
    }
    SUBCASE("empirical conditional entropy agrees across seeds") {
        auto model = MarkovModel::random_binary(2, 33);
        const double rate = analytic_entropy_rate(model);
        double sum = 0.0, sq = 0.0;
        const int trials = 10;
        for (int i = 0; i < trials; ++i) {
            const double h = conditional_entropy(model.generate(200000, 100 + i), 2);
            sum += h;
            sq += h * h;
        }
        const double mean = sum / trials;
        const double sd = std::sqrt(std::max(0.0, sq / trials - mean * mean));
        CHECK(std::abs(mean - rate) <= 3.0 * sd / std::sqrt(double(trials)) + 1e-4);
    }
    SUBCASE("empirical conditional entropies decrease in the context length") {
        auto seq = MarkovModel::random_binary(3, 34).generate(1000000, 35);
        double prev = conditional_entropy(seq, 0);
        for (int l = 1; l <= 5; ++l) {
            const double h = conditional_entropy(seq, l);
            CHECK(h <= prev + 3e-3);  // statistical slack at this sample size
            prev = h;
        }
    }
}

TEST_CASE("analytic cross entropy and KL") {
    SUBCASE("self cross entropy is the entropy rate") {
        auto model = MarkovModel::random_binary(2, 11);
        CHECK(std::abs(analytic_cross_entropy_rate(model, model) -
                       analytic_entropy_rate(model)) <= 1e-12);
        CHECK(std::abs(analytic_kl_rate(model, model)) <= 1e-12);
    }
    SUBCASE("bernoulli pair closed forms") {
        auto mu = MarkovModel::bernoulli(0.5);
        auto nu = MarkovModel::bernoulli(0.25);
        CHECK(analytic_cross_entropy_rate(mu, nu) == doctest::Approx(0.836988).epsilon(1e-6));
        CHECK(analytic_kl_rate(mu, nu) == doctest::Approx(0.143841).epsilon(1e-5));
    }
    SUBCASE("uniform nu makes the cross entropy ln 2") {
        auto mu = MarkovModel::binary_flip(0.3);
        auto nu = MarkovModel::bernoulli(0.5);
        CHECK(analytic_cross_entropy_rate(mu, nu) == doctest::Approx(kLn2).epsilon(1e-12));
        CHECK(analytic_kl_rate(mu, nu) == doctest::Approx(0.082283).epsilon(1e-5));
    }
    SUBCASE("k-Markov saturation: h_l constant for l >= k") {
        auto mu = MarkovModel::random_binary(3, 13);
        auto nu = MarkovModel::random_binary(2, 14);
        const double at_k = analytic_cross_conditional(mu, nu, 2);
        for (int l = 3; l <= 6; ++l)
            CHECK(std::abs(analytic_cross_conditional(mu, nu, l) - at_k) <= 1e-10);
    }
    SUBCASE("KL is nonnegative on random model pairs") {
        for (std::uint64_t s = 0; s < 8; ++s) {
            auto mu = MarkovModel::random_binary(1 + s % 3, 50 + s);
            auto nu = MarkovModel::random_binary(1 + (s + 1) % 3, 60 + s);
            CHECK(analytic_kl_rate(mu, nu) >= -1e-10);
        }
    }
    SUBCASE("cross = entropy + KL agrees with the 1-block route on order-1 laws") {
        auto mu = MarkovModel::binary_flip(0.3);
        auto nu = MarkovModel::binary_flip(0.45);
        std::vector<double> pi(2, 0.0);
        for (const auto& [ctx, p] : mu.stationary()) pi[ctx] = p;
        const double via_blocks = kl_1block(pi, mu.law(), nu.law(), ZeroPolicy::strict());
        CHECK(std::abs(via_blocks - analytic_kl_rate(mu, nu)) <= 1e-10);
    }
    SUBCASE("domination failure is detected") {
        auto mu = MarkovModel::bernoulli(0.5);
        CHECK_THROWS_AS(analytic_cross_entropy_rate(mu, alternator()), DominationError);
    }
}

TEST_CASE("exact bernoulli transform") {
    SUBCASE("fair coin values") {
        auto t = exact_bernoulli_transform(0.5);
        CHECK(t.z == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
        for (double p : t.stationary) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(t.transition.prob(0, 0) == 0.5);
        CHECK(t.transition.prob(0, 1) == 0.0);
        CHECK(t.transition.prob(0, 2) == 0.5);
        for (std::uint64_t ctx : {1, 2}) {
            CHECK(t.transition.prob(ctx, 0) == 0.25);
            CHECK(t.transition.prob(ctx, 1) == 0.5);
            CHECK(t.transition.prob(ctx, 2) == 0.25);
        }
    }
    SUBCASE("stationary vector sums to 1 and is the fixed point") {
        for (double p : {0.1, 0.33, 0.5, 0.71, 0.9}) {
            auto t = exact_bernoulli_transform(p);
            CHECK(std::abs(t.stationary[0] + t.stationary[1] + t.stationary[2] - 1.0) <= 1e-12);
            auto model = transform_to_model(t);  // power iteration cross-check
            for (const auto& [ctx, pi] : model.stationary())
                CHECK(std::abs(pi - t.stationary[ctx]) <= 1e-10);
        }
    }
    SUBCASE("entropy rate of the transformed fair coin") {
        CHECK(std::abs(analytic_entropy_rate(transform_to_model(exact_bernoulli_transform(0.5))) -
                       4.0 / 3.0 * kLn2) <= 1e-10);
    }
}

TEST_CASE("exact pair table") {
    SUBCASE("fair coin") {
        auto t = exact_pair_table(BinaryMarginals::bernoulli(0.5));
        CHECK(t[0][1] == 0.0);
        double sum = 0.0;
        for (const auto& row : t)
            for (double v : row) sum += v;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
    SUBCASE("table-derived transition equals the closed-form transform") {
        for (double p : {0.2, 0.5, 0.8}) {
            auto table = exact_pair_table(BinaryMarginals::bernoulli(p));
            auto transform = exact_bernoulli_transform(p);
            double flat[9];
            for (int x = 0; x < 3; ++x)
                for (int y = 0; y < 3; ++y) flat[x * 3 + y] = table[x][y];
            auto trans = transition_from_pair_probs(flat, transform.alphabet);
            for (std::uint64_t x = 0; x < 3; ++x)
                for (Symbol y = 0; y < 3; ++y)
                    CHECK(std::abs(trans.prob(x, y) - transform.transition.prob(x, y)) <= 1e-12);
        }
    }
    SUBCASE("empirical pair law of a substituted sample converges to the table") {
        // product measure and a 1-Markov source: the table holds for both
        for (int which = 0; which < 2; ++which) {
            auto model =
                which == 0 ? MarkovModel::bernoulli(0.5) : MarkovModel::binary_flip(0.3);
            auto table = exact_pair_table(which == 0 ? BinaryMarginals::bernoulli(0.5)
                                                     : BinaryMarginals::from_model(model));
            auto seq = model.generate(1000000, 77 + which);
            Alphabet grown = seq.alphabet();
            const Symbol alpha = grown.add_derived(0, 1);
            auto shared = std::make_shared<const Alphabet>(std::move(grown));
            auto [out, step] = substitute_pair(seq.rebound(shared), {0, 1, alpha});
            const BlockDistribution pairs(out, 2);
            double l1 = 0.0;
            for (Symbol x = 0; x < 3; ++x) {
                for (Symbol y = 0; y < 3; ++y) {
                    const Symbol block[2] = {x, y};
                    l1 += std::abs(pairs.frequency(block) - table[x][y]);
                }
            }
            CHECK(l1 < 5e-3);
        }
    }
    SUBCASE("inconsistent marginals are rejected") {
        auto probs = BinaryMarginals::bernoulli(0.5);
        (void)probs;
        std::map<std::string, double> bad;
        for (int len = 1; len <= 4; ++len)
            for (int bits = 0; bits < (1 << len); ++bits) {
                std::string key;
                for (int i = len - 1; i >= 0; --i) key += ((bits >> i) & 1) ? '1' : '0';
                bad[key] = 1.0 / (1 << len);
            }
        bad["0101"] = 0.2;  // breaks marginalization of "010"
        CHECK_THROWS_AS(BinaryMarginals::from_map(bad), Error);
    }
}

TEST_CASE("model files") {
    SUBCASE("round trip") {
        auto model = MarkovModel::random_binary(3, 99);
        std::stringstream io;
        model.save(io);
        auto back = MarkovModel::load(io);
        CHECK(back.order() == 3);
        for (const auto& [ctx, row] : model.law().rows()) {
            for (const auto& cell : row.cells)
                CHECK(back.law().prob(ctx, cell.symbol) ==
                      doctest::Approx(cell.prob).epsilon(1e-15));
        }
    }
    SUBCASE("order-0 format omits the context block") {
        std::istringstream in("order 0\nalphabet 2\n0 0.25\n1 0.75\n");
        auto model = MarkovModel::load(in);
        CHECK(model.order() == 0);
        CHECK(model.law().prob(0, 0) == 0.25);
        CHECK(analytic_entropy_rate(model) ==
              doctest::Approx(-(0.25 * std::log(0.25) + 0.75 * std::log(0.75)))
                  .epsilon(1e-12));
    }
    SUBCASE("bad headers and rows are rejected") {
        std::istringstream a("orden 1\n");
        CHECK_THROWS_AS(MarkovModel::load(a), IoError);
        std::istringstream b("order 1\nalphabet 2\n0 0 0.5\n0 1 0.4\n1 0 0.5\n1 1 0.5\n");
        CHECK_THROWS_AS(MarkovModel::load(b), Error);  // row does not sum to 1
        std::istringstream c("order 0\nalphabet 2\n0 1.5\n");
        CHECK_THROWS_AS(MarkovModel::load(c), IoError);
    }
}

TEST_CASE("block probabilities are a consistent family") {
    auto model = MarkovModel::random_binary(2, 3);
    for (int len : {1, 2, 3, 4}) {
        auto probs = block_probabilities(model, len);
        double sum = 0.0;
        for (double p : probs) sum += p;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
    auto p4 = block_probabilities(model, 4);
    auto p3 = block_probabilities(model, 3);
    for (std::size_t idx = 0; idx < p3.size(); ++idx)
        CHECK(std::abs(p4[idx * 2] + p4[idx * 2 + 1] - p3[idx]) <= 1e-12);
}

}  // TEST_SUITE
