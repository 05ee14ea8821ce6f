// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// fails. Scales are desk-sized (1e6..1e7 symbols); the whole run stays well
// under two minutes on commodity hardware.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nsrps/estimators.hpp"
#include "nsrps/io.hpp"

using namespace nsrps;

namespace {

constexpr double kLn2 = 0.6931471805599453;

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s  (%s)\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
    va_list args;
    va_start(args, format);
    char buffer[512];
    std::vsnprintf(buffer, sizeof(buffer), format, args);
    va_end(args);
    return buffer;
}

SymbolSequence seq_lit(const std::string& digits, std::size_t m) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < m; ++i) labels.push_back(std::to_string(i));
    std::vector<Symbol> symbols;
    for (char c : digits) symbols.push_back(static_cast<Symbol>(c - '0'));
    return SymbolSequence(std::move(symbols),
                          std::make_shared<const Alphabet>(Alphabet::from_labels(labels)));
}

std::string lit_of(const SymbolSequence& seq) {
    std::string out;
    for (Symbol s : seq.symbols()) out += static_cast<char>('0' + s);
    return out;
}

std::pair<SymbolSequence, SubstitutionRule> with_rule(const SymbolSequence& seq, Symbol a,
                                                      Symbol b, const std::string& label) {
    Alphabet grown = seq.alphabet();
    const Symbol alpha = grown.add_derived(a, b, label);
    auto shared = std::make_shared<const Alphabet>(std::move(grown));
    return {seq.rebound(shared), SubstitutionRule{a, b, alpha}};
}

SymbolSequence shared_sample(const MarkovModel& model, std::uint64_t n, std::uint64_t seed,
                             const std::shared_ptr<const Alphabet>& alphabet) {
    auto raw = model.generate(n, seed);
    return SymbolSequence(std::vector<Symbol>(raw.symbols().begin(), raw.symbols().end()),
                          alphabet);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

// ---- criteria ---------------------------------------------------------------

void criterion_literal_substitutions() {
    auto [s1, r1] = with_rule(seq_lit("0010001011100100", 2), 0, 1, "2");
    const std::string out1 = lit_of(substitute_pair(s1, r1).first);
    auto [s2, r2] = with_rule(seq_lit("0001000011", 2), 0, 0, "2");
    const std::string out2 = lit_of(substitute_pair(s2, r2).first);
    const bool pass = out1 == "020022110200" && out2 == "2012211";
    report(1, "literal pair-substitution examples", pass, out1 + " ; " + out2);
}

void criterion_exact_transform_oracle() {
    auto t = exact_bernoulli_transform(0.5);
    bool pass = true;
    double worst = 0.0;
    for (double pi : t.stationary) worst = std::max(worst, std::abs(pi - 1.0 / 3.0));
    pass &= worst <= 1e-12;

    const double expected[3][3] = {{0.5, 0.0, 0.5}, {0.25, 0.5, 0.25}, {0.25, 0.5, 0.25}};
    for (std::uint64_t x = 0; x < 3; ++x)
        for (Symbol y = 0; y < 3; ++y)
            pass &= t.transition.prob(x, y) == expected[x][y];

    // fixed point via independent power iteration
    auto model = transform_to_model(t);
    double fixed_point_err = 0.0;
    for (const auto& [ctx, pi] : model.stationary())
        fixed_point_err = std::max(fixed_point_err, std::abs(pi - t.stationary[ctx]));
    pass &= fixed_point_err <= 1e-10;

    auto table = exact_pair_table(BinaryMarginals::bernoulli(0.5));
    double sum = 0.0;
    for (const auto& row : table)
        for (double v : row) sum += v;
    pass &= std::abs(sum - 1.0) <= 1e-12;
    pass &= table[0][1] == 0.0;
    report(2, "closed-form transformed bernoulli oracle", pass,
           fmt("max|pi-1/3|=%.1e, fixed-point err=%.1e, table sum-1=%.1e, table01=%g", worst,
               fixed_point_err, sum - 1.0, table[0][1]));
}

void criterion_entropy_invariance() {
    const double analytic =
        analytic_entropy_rate(transform_to_model(exact_bernoulli_transform(0.5)));
    const double analytic_err = std::abs(analytic - 4.0 / 3.0 * kLn2);
    bool pass = analytic_err <= 1e-10;

    auto model = MarkovModel::bernoulli(0.5);
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto seq = model.generate(1000000, seed);
        auto [bound, rule] = with_rule(seq, 0, 1, "2");
        auto [transformed, step] = substitute_pair(bound, rule);
        const double rescaled = conditional_entropy(transformed, 1) / step.z_step;
        worst = std::max(worst, std::abs(rescaled - kLn2));
    }
    pass &= worst <= 0.005;
    report(3, "entropy invariance under one substitution", pass,
           fmt("analytic err=%.1e (tol 1e-10), worst empirical dev=%.5f (tol 0.005)",
               analytic_err, worst));
}

void criterion_relative_entropy_scaling() {
    auto tp = exact_bernoulli_transform(0.5);
    auto tq = exact_bernoulli_transform(0.25);
    const double d = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
    const double kl_exact = kl_1block(std::span<const double>(tp.stationary.data(), 3),
                                      tp.transition, tq.transition, ZeroPolicy::strict());
    const double exact_err = std::abs(kl_exact - 4.0 / 3.0 * d);
    bool pass = exact_err <= 1e-9;

    auto w = MarkovModel::bernoulli(0.5).generate(1000000, 31);
    auto z = shared_sample(MarkovModel::bernoulli(0.25), 1000000, 32, w.alphabet_ptr());
    auto [wb, rule] = with_rule(w, 0, 1, "2");
    auto zb = z.rebound(wb.alphabet_ptr());
    auto [gw, step_w] = substitute_pair(wb, rule);
    auto [gz, step_z] = substitute_pair(zb, rule);
    const BlockDistribution pairs(gw, 2);
    const double kl_emp = kl_1block(pairs, markov1_projection(gw), markov1_projection(gz),
                                    ZeroPolicy::strict());
    const double emp_err = std::abs(kl_emp / step_w.z_step - d);
    pass &= emp_err <= 0.01;
    report(4, "relative entropy scales by the contraction factor", pass,
           fmt("exact err=%.1e (tol 1e-9), empirical err=%.5f (tol 0.01)", exact_err, emp_err));
}

// Criteria 5 and 6 share one paired run.
void criteria_convergence_and_zbar() {
    auto mu_model = MarkovModel::random_binary(5, 1);
    auto nu_model = MarkovModel::random_binary(5, 2);
    const double h_mu = analytic_entropy_rate(mu_model);
    const double h_nu = analytic_entropy_rate(nu_model);
    const double cross = analytic_cross_entropy_rate(mu_model, nu_model);
    const double kl = cross - h_mu;

    auto w = mu_model.generate(1000000, 11);
    auto z = shared_sample(nu_model, 1000000, 12, w.alphabet_ptr());
    auto series = cross_entropy_via_nsrps(w, z, 20, Driver::nu, ZeroPolicy::epsilon());
    auto series_nu = entropy_via_nsrps(z, 20);

    const auto& last = series.points.back();
    const auto& last_nu = series_nu.points.back();
    const double err_h_mu = std::abs(last.estimate - h_mu) / h_mu;
    const double err_h_nu = std::abs(last_nu.estimate - h_nu) / h_nu;
    const double err_cross = std::abs(*last.cross - cross) / cross;
    const double err_kl = std::abs(*last.kl - kl);
    const bool pass5 = last.step == 20 && err_h_mu <= 0.02 && err_h_nu <= 0.02 &&
                       err_cross <= 0.02 && err_kl <= std::max(0.02 * kl, 0.01);
    report(5, "rescaled estimates converge on order-5 chains", pass5,
           fmt("rel err: h_mu %.3f%%, h_nu %.3f%%, cross %.3f%%; kl err %.4f "
               "(tols 2%%, max(2%%, 0.01))",
               100 * err_h_mu, 100 * err_h_nu, 100 * err_cross, err_kl));

    bool increasing = series.points.size() == 21;
    for (std::size_t i = 1; i < series.points.size(); ++i) {
        increasing &= series.points[i].zbar_mu > series.points[i - 1].zbar_mu;
        increasing &= series.points[i].zbar_nu > series.points[i - 1].zbar_nu;
    }
    report(6, "both contraction factors increase strictly", increasing,
           fmt("zbar_mu: 1 -> %.3f, zbar_nu: 1 -> %.3f over %zu steps", last.zbar_mu,
               last.zbar_nu, series.points.size() - 1));
}

void criterion_identity_suite() {
    std::mt19937_64 rng(2024);
    // W(w, w, n) == R(w, n) on 100 random pairs
    bool waiting_ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 2 + trial % 3;
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < m; ++i) labels.push_back(std::to_string(i));
        auto alphabet = std::make_shared<const Alphabet>(Alphabet::from_labels(labels));
        std::vector<Symbol> symbols(20 + rng() % 300);
        for (auto& s : symbols) s = static_cast<Symbol>(rng() % m);
        SymbolSequence w(std::move(symbols), alphabet);
        const std::size_t n = 1 + rng() % 10;
        waiting_ok &= waiting_time(w, w, n) == returning_time(w, n);
    }

    // self-KL identically zero (strict policy keeps the identity exact)
    auto sample = MarkovModel::random_binary(3, 7).generate(50000, 70);
    auto self_series = kl_via_nsrps(sample, sample, 10, Driver::nu, ZeroPolicy::strict());
    bool self_kl_ok = self_series.points.size() == 11;
    double worst_kl = 0.0;
    for (const auto& p : self_series.points) {
        worst_kl = std::max(worst_kl, std::abs(*p.kl));
        self_kl_ok &= *p.kl == 0.0;
    }

    // expand(substitute(x)) == x on 1000 random sequences and rules
    bool roundtrip_ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t m = 1 + trial % 5;
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < m; ++i) labels.push_back(std::to_string(i));
        Alphabet grown = Alphabet::from_labels(labels);
        const Symbol a = static_cast<Symbol>(rng() % m);
        const Symbol b = static_cast<Symbol>(rng() % m);
        const Symbol alpha = grown.add_derived(a, b);
        auto alphabet = std::make_shared<const Alphabet>(std::move(grown));
        std::vector<Symbol> symbols(rng() % 200);
        for (auto& s : symbols) s = static_cast<Symbol>(rng() % m);
        SymbolSequence x(std::move(symbols), alphabet);
        auto [contracted, step] = substitute_pair(x, {a, b, alpha});
        auto back = expand_pair(contracted, {a, b, alpha});
        roundtrip_ok &= back.size() == x.size() &&
                        std::equal(back.symbols().begin(), back.symbols().end(),
                                   x.symbols().begin());
    }
    const bool pass = waiting_ok && self_kl_ok && roundtrip_ok;
    report(7, "identity suite (waiting=returning, self-KL=0, round trips)", pass,
           fmt("waiting==returning: %s, worst |self kl|=%g, round trips: %s",
               waiting_ok ? "100/100" : "FAIL", worst_kl, roundtrip_ok ? "1000/1000" : "FAIL"));
}

void criterion_monotonicity_gibbs() {
    auto mu = MarkovModel::random_binary(5, 3);
    bool chain_ok = true;
    double prev = analytic_conditional_entropy(mu, 0);
    for (int l = 1; l <= 5; ++l) {
        const double h = analytic_conditional_entropy(mu, l);
        chain_ok &= h <= prev + 1e-10;
        prev = h;
    }

    bool gibbs_ok = true;
    for (std::uint64_t s = 0; s < 5; ++s) {
        auto a = MarkovModel::random_binary(2 + s % 3, 80 + s);
        auto b = MarkovModel::random_binary(1 + s % 4, 90 + s);
        gibbs_ok &= analytic_cross_entropy_rate(a, b) >= analytic_entropy_rate(a) - 1e-10;
    }

    auto nu = MarkovModel::random_binary(2, 4);
    auto any_mu = MarkovModel::random_binary(4, 5);
    const double at_k = analytic_cross_conditional(any_mu, nu, 2);
    bool saturation_ok = true;
    double worst = 0.0;
    for (int l = 2; l <= 6; ++l) {
        const double h = analytic_cross_conditional(any_mu, nu, l);
        worst = std::max(worst, std::abs(h - at_k));
        saturation_ok &= std::abs(h - at_k) <= 1e-10;
    }
    const bool pass = chain_ok && gibbs_ok && saturation_ok;
    report(8, "conditional-entropy chain, Gibbs bound, k-Markov saturation", pass,
           fmt("chain %s, gibbs %s, saturation worst dev %.1e", chain_ok ? "ok" : "FAIL",
               gibbs_ok ? "ok" : "FAIL", worst));
}

void criterion_waiting_time_trend() {
    const double ref = -0.5 * std::log(0.25) - 0.5 * std::log(0.75);
    auto w = MarkovModel::bernoulli(0.5).generate(100000, 21);
    auto z = shared_sample(MarkovModel::bernoulli(0.25), 10000000, 22, w.alphabet_ptr());

    double median20 = 0.0;
    std::vector<double> median_errs;
    for (int n : {10, 15, 20}) {
        std::vector<double> values, errors;
        for (int i = 0; i < 50; ++i) {
            const std::size_t offset = static_cast<std::size_t>(i) * 2000;
            std::vector<Symbol> prefix_symbols(w.symbols().begin() + offset,
                                               w.symbols().begin() + offset + n);
            SymbolSequence prefix(std::move(prefix_symbols), w.alphabet_ptr());
            auto wt = waiting_time(prefix, z, static_cast<std::size_t>(n));
            // a not-found prefix enters as the censored lower bound W >= |z|-n+1
            const double t = wt ? static_cast<double>(*wt)
                                : static_cast<double>(z.size() - n + 1);
            const double v = std::log(t) / n;
            values.push_back(v);
            errors.push_back(std::abs(v - ref));
        }
        if (n == 20) median20 = median(values);
        median_errs.push_back(median(errors));
    }
    const bool within = std::abs(median20 - ref) / ref <= 0.25;
    const bool shrinking =
        median_errs[1] <= median_errs[0] && median_errs[2] <= median_errs[1];
    report(9, "waiting-time estimates tighten with the prefix length", within && shrinking,
           fmt("median@20=%.4f (ref %.4f, tol 25%%); median errs %.4f > %.4f > %.4f", median20,
               ref, median_errs[0], median_errs[1], median_errs[2]));
}

}  // namespace

int main() {
    criterion_literal_substitutions();
    criterion_exact_transform_oracle();
    criterion_entropy_invariance();
    criterion_relative_entropy_scaling();
    criteria_convergence_and_zbar();
    criterion_identity_suite();
    criterion_monotonicity_gibbs();
    criterion_waiting_time_trend();
    if (g_failures) std::printf("%d criterion(s) FAILED\n", g_failures);
    else std::printf("all criteria passed\n");
    return g_failures == 0 ? 0 : 1;
}
