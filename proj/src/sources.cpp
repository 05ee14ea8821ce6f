#include "nsrps/sources.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <ostream>
#include <random>
#include <unordered_map>

#include "nsrps/errors.hpp"

namespace nsrps {

namespace {

constexpr double kStationaryTolerance = 1e-12;  // L1, successive iterates
constexpr double kResidualTolerance = 1e-10;    // L1, pi P - pi
constexpr std::uint64_t kMaxIterations = 1000000;

std::uint64_t ipow(std::uint64_t base, int exp) {
    std::uint64_t out = 1;
    for (int i = 0; i < exp; ++i) out *= base;
    return out;
}

std::uint64_t next_context(std::uint64_t ctx, Symbol a, std::uint64_t mod, std::uint64_t m) {
    return (ctx % mod) * m + a;
}

}  // namespace

std::vector<std::pair<std::uint64_t, double>> stationary_distribution(
    const TransitionMatrix& law) {
    const std::uint64_t m = law.alphabet_size();
    const int k = law.order();
    if (k == 0) return {{0, 1.0}};

    const auto& rows = law.rows();
    if (rows.empty()) throw ModelError("transition law has no rows");
    const std::uint64_t mod = ipow(m, k - 1);

    // Every positive transition must land on a described context, and the
    // directed graph over contexts must be strongly connected (irreducible).
    std::vector<std::uint64_t> contexts;
    contexts.reserve(rows.size());
    for (const auto& [ctx, row] : rows) {
        contexts.push_back(ctx);
        if (row.flagged) throw ModelError("model rows cannot be flagged");
        for (const auto& cell : row.cells) {
            if (cell.prob > 0.0 && !law.row(next_context(ctx, cell.symbol, mod, m)))
                throw ModelError("transition into an undescribed context: model incomplete");
        }
    }

    std::unordered_map<std::uint64_t, std::size_t> index;
    for (std::size_t i = 0; i < contexts.size(); ++i) index.emplace(contexts[i], i);
    std::vector<std::vector<std::size_t>> forward(contexts.size());
    std::vector<std::vector<std::size_t>> backward(contexts.size());
    for (std::size_t i = 0; i < contexts.size(); ++i) {
        for (const auto& cell : law.row(contexts[i])->cells) {
            if (cell.prob <= 0.0) continue;
            const std::size_t j = index.at(next_context(contexts[i], cell.symbol, mod, m));
            forward[i].push_back(j);
            backward[j].push_back(i);
        }
    }
    auto reach = [&](const std::vector<std::vector<std::size_t>>& edges) {
        std::vector<char> seen(contexts.size(), 0);
        std::deque<std::size_t> queue{0};
        seen[0] = 1;
        std::size_t found = 1;
        while (!queue.empty()) {
            const std::size_t at = queue.front();
            queue.pop_front();
            for (std::size_t to : edges[at]) {
                if (!seen[to]) {
                    seen[to] = 1;
                    ++found;
                    queue.push_back(to);
                }
            }
        }
        return found;
    };
    if (reach(forward) != contexts.size() || reach(backward) != contexts.size())
        throw ModelError("context chain is reducible");

    // Damped power iteration: pi <- pi (I + P) / 2 keeps the fixed points and
    // converges on periodic chains too.
    std::vector<double> pi(contexts.size(), 1.0 / static_cast<double>(contexts.size()));
    std::vector<double> step(contexts.size());

    auto apply = [&](const std::vector<double>& from, std::vector<double>& to) {
        std::fill(to.begin(), to.end(), 0.0);
        for (std::size_t i = 0; i < contexts.size(); ++i) {
            const auto* row = law.row(contexts[i]);
            for (const auto& cell : row->cells) {
                const std::uint64_t next = next_context(contexts[i], cell.symbol, mod, m);
                to[index.at(next)] += from[i] * cell.prob;
            }
        }
    };

    double residual = 1.0;
    for (std::uint64_t iter = 0; iter < kMaxIterations; ++iter) {
        apply(pi, step);
        residual = 0.0;
        double diff = 0.0;
        for (std::size_t i = 0; i < pi.size(); ++i) {
            residual += std::abs(step[i] - pi[i]);
            const double damped = 0.5 * (step[i] + pi[i]);
            diff += std::abs(damped - pi[i]);
            pi[i] = damped;
        }
        if (diff < kStationaryTolerance && residual < kResidualTolerance) break;
    }
    if (residual >= kResidualTolerance)
        throw ModelError("stationary distribution did not converge");

    double mass = 0.0;
    for (double p : pi) mass += p;
    std::vector<std::pair<std::uint64_t, double>> out;
    out.reserve(contexts.size());
    for (std::size_t i = 0; i < contexts.size(); ++i) out.emplace_back(contexts[i], pi[i] / mass);
    std::sort(out.begin(), out.end());
    return out;
}

MarkovModel::MarkovModel(std::shared_ptr<const Alphabet> alphabet, int order,
                         TransitionMatrix law)
    : alphabet_(std::move(alphabet)), order_(order), law_(std::move(law)) {
    if (!alphabet_) throw Error("null alphabet");
    if (order_ < 0) throw ModelError("model order must be >= 0");
    if (law_.order() != order_) throw ModelError("law order does not match model order");
    if (law_.alphabet_size() != alphabet_->size()) throw ModelError("law alphabet mismatch");
    stationary_ = stationary_distribution(law_);

    // Context weights are the stationary masses.
    for (const auto& [ctx, p] : stationary_) {
        auto row = *law_.row(ctx);
        row.weight = p;
        law_.set_row(ctx, std::move(row));
    }
}

MarkovModel MarkovModel::bernoulli(double p0) {
    if (p0 <= 0.0 || p0 >= 1.0) throw ModelError("bernoulli parameter must be in (0, 1)");
    auto alphabet = std::make_shared<const Alphabet>(Alphabet::from_labels({"0", "1"}));
    return iid({p0, 1.0 - p0}, alphabet);
}

MarkovModel MarkovModel::iid(std::vector<double> probs,
                             std::shared_ptr<const Alphabet> alphabet) {
    if (!alphabet || alphabet->size() != probs.size())
        throw ModelError("iid probability vector must match the alphabet");
    TransitionMatrix law(0, alphabet);
    TransitionMatrix::Row row;
    row.weight = 1.0;
    for (std::size_t a = 0; a < probs.size(); ++a) {
        if (probs[a] < 0.0) throw ModelError("negative probability");
        if (probs[a] > 0.0) row.cells.push_back({static_cast<Symbol>(a), probs[a], 0});
    }
    law.set_row(0, std::move(row));
    return MarkovModel(alphabet, 0, std::move(law));
}

MarkovModel MarkovModel::binary_flip(double q) {
    if (q <= 0.0 || q >= 1.0) throw ModelError("flip probability must be in (0, 1)");
    auto alphabet = std::make_shared<const Alphabet>(Alphabet::from_labels({"0", "1"}));
    TransitionMatrix law(1, alphabet);
    for (Symbol x : {Symbol{0}, Symbol{1}}) {
        TransitionMatrix::Row row;
        row.cells.push_back({x, 1.0 - q, 0});
        row.cells.push_back({x ^ 1u, q, 0});
        law.set_row(x, std::move(row));
    }
    return MarkovModel(alphabet, 1, std::move(law));
}

MarkovModel MarkovModel::random_binary(int order, std::uint64_t law_seed) {
    if (order < 0 || order > 20) throw ModelError("random binary order out of range");
    auto alphabet = std::make_shared<const Alphabet>(Alphabet::from_labels({"0", "1"}));
    std::mt19937_64 rng(law_seed);
    std::uniform_real_distribution<double> weight(0.1, 0.9);
    TransitionMatrix law(order, alphabet);
    const std::uint64_t contexts = ipow(2, order);
    for (std::uint64_t ctx = 0; ctx < contexts; ++ctx) {
        const double w0 = weight(rng);
        const double w1 = weight(rng);
        TransitionMatrix::Row row;
        row.cells.push_back({0, w0 / (w0 + w1), 0});
        row.cells.push_back({1, w1 / (w0 + w1), 0});
        law.set_row(ctx, std::move(row));
    }
    return MarkovModel(alphabet, order, std::move(law));
}

MarkovModel MarkovModel::load(std::istream& in) {
    std::string word;
    int order = -1;
    std::size_t m = 0;
    if (!(in >> word) || word != "order" || !(in >> order) || order < 0)
        throw IoError("model file: expected header line 'order k'");
    if (!(in >> word) || word != "alphabet" || !(in >> m) || m == 0)
        throw IoError("model file: expected header line 'alphabet m'");

    std::vector<std::string> labels;
    labels.reserve(m);
    for (std::size_t i = 0; i < m; ++i) labels.push_back(std::to_string(i));
    auto alphabet = std::make_shared<const Alphabet>(Alphabet::from_labels(labels));

    TransitionMatrix law(order, alphabet);
    std::map<std::uint64_t, TransitionMatrix::Row> rows;
    std::vector<Symbol> block(static_cast<std::size_t>(order));
    while (true) {
        std::uint64_t first = 0;
        if (!(in >> first)) break;
        std::uint64_t ctx = 0;
        Symbol a = 0;
        if (order == 0) {
            a = static_cast<Symbol>(first);
        } else {
            block[0] = static_cast<Symbol>(first);
            for (int i = 1; i < order; ++i) {
                std::uint64_t v = 0;
                if (!(in >> v)) throw IoError("model file: truncated row");
                block[static_cast<std::size_t>(i)] = static_cast<Symbol>(v);
            }
            std::uint64_t next = 0;
            if (!(in >> next)) throw IoError("model file: truncated row");
            a = static_cast<Symbol>(next);
            ctx = law.pack_context(block);
        }
        double prob = 0.0;
        if (!(in >> prob)) throw IoError("model file: missing probability");
        if (prob < 0.0 || prob > 1.0) throw IoError("model file: probability out of [0, 1]");
        if (a >= m) throw IoError("model file: symbol id out of range");
        if (prob > 0.0) rows[ctx].cells.push_back({a, prob, 0});
    }
    if (rows.empty()) throw IoError("model file: no rows");
    for (auto& [ctx, row] : rows) law.set_row(ctx, std::move(row));
    return MarkovModel(alphabet, order, std::move(law));
}

void MarkovModel::save(std::ostream& out) const {
    out << "order " << order_ << '\n';
    out << "alphabet " << alphabet_->size() << '\n';
    const auto precision = out.precision(17);
    for (const auto& [ctx, row] : law_.rows()) {
        const auto context = law_.unpack_context(ctx);
        for (const auto& cell : row.cells) {
            for (Symbol s : context) out << s << ' ';
            out << cell.symbol << ' ' << cell.prob << '\n';
        }
    }
    out.precision(precision);
}

SymbolSequence MarkovModel::generate(std::uint64_t length, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Cumulative rows for O(log m) draws.
    std::unordered_map<std::uint64_t, std::pair<std::vector<double>, std::vector<Symbol>>> cdfs;
    cdfs.reserve(law_.rows().size());
    for (const auto& [ctx, row] : law_.rows()) {
        auto& [cum, syms] = cdfs[ctx];
        double acc = 0.0;
        for (const auto& cell : row.cells) {
            acc += cell.prob;
            cum.push_back(acc);
            syms.push_back(cell.symbol);
        }
        if (!cum.empty()) cum.back() = 1.0;  // guard the tail against rounding
    }
    auto draw = [&](std::uint64_t ctx) {
        const auto& [cum, syms] = cdfs.at(ctx);
        const double u = unit(rng);
        const auto it = std::upper_bound(cum.begin(), cum.end(), u);
        const std::size_t i = std::min<std::size_t>(cum.size() - 1,
                                                    static_cast<std::size_t>(it - cum.begin()));
        return syms[i];
    };

    std::vector<Symbol> symbols;
    symbols.reserve(length);
    std::uint64_t ctx = 0;
    if (order_ > 0) {
        // Initial k-block from the stationary distribution.
        const double u = unit(rng);
        double acc = 0.0;
        ctx = stationary_.back().first;
        for (const auto& [candidate, p] : stationary_) {
            acc += p;
            if (u < acc) {
                ctx = candidate;
                break;
            }
        }
        const auto block = law_.unpack_context(ctx);
        for (std::uint64_t i = 0; i < std::min<std::uint64_t>(length, block.size()); ++i)
            symbols.push_back(block[static_cast<std::size_t>(i)]);
    }
    const std::uint64_t mod = order_ > 0 ? ipow(alphabet_->size(), order_ - 1) : 1;
    while (symbols.size() < length) {
        const Symbol a = draw(ctx);
        symbols.push_back(a);
        if (order_ > 0) ctx = next_context(ctx, a, mod, alphabet_->size());
    }
    return SymbolSequence(std::move(symbols), alphabet_);
}

std::vector<double> block_probabilities(const MarkovModel& model, int len) {
    if (len < 0) throw Error("block length must be >= 0");
    if (len == 0) return {1.0};
    const std::uint64_t m = model.alphabet().size();
    const double bits = len * std::log2(static_cast<double>(m));
    if (bits > 24) throw Error("block enumeration too large");

    const int k = model.order();

    // Start from the stationary k-block law; marginalize trailing symbols
    // away when len < k, extend one symbol at a time when len > k.
    std::vector<double> probs;
    if (k == 0) {
        probs = {1.0};
    } else {
        probs.assign(ipow(m, k), 0.0);
        for (const auto& [ctx, p] : model.stationary()) probs[ctx] = p;
    }
    int cur = k;
    while (cur > len) {
        std::vector<double> down(probs.size() / m, 0.0);
        for (std::uint64_t idx = 0; idx < probs.size(); ++idx) down[idx / m] += probs[idx];
        probs = std::move(down);
        --cur;
    }
    const std::uint64_t ctx_mod = ipow(m, k);
    while (cur < len) {
        std::vector<double> up(probs.size() * m, 0.0);
        for (std::uint64_t idx = 0; idx < probs.size(); ++idx) {
            if (probs[idx] == 0.0) continue;
            const std::uint64_t ctx = idx % ctx_mod;
            const auto* row = model.law().row(ctx);
            if (!row) continue;
            for (const auto& cell : row->cells)
                up[idx * m + cell.symbol] += probs[idx] * cell.prob;
        }
        probs = std::move(up);
        ++cur;
    }
    return probs;
}

double analytic_entropy_rate(const MarkovModel& model) {
    double acc = 0.0;
    for (const auto& [ctx, p] : model.stationary()) {
        const auto* row = model.law().row(ctx);
        for (const auto& cell : row->cells) {
            if (cell.prob > 0.0) acc -= p * cell.prob * std::log(cell.prob);
        }
    }
    return acc;
}

double analytic_conditional_entropy(const MarkovModel& model, int len) {
    if (len < 0) throw Error("context length must be >= 0");
    const std::uint64_t m = model.alphabet().size();
    const auto joint = block_probabilities(model, len + 1);
    std::vector<double> contexts(joint.size() / m, 0.0);
    for (std::uint64_t idx = 0; idx < joint.size(); ++idx) contexts[idx / m] += joint[idx];
    double acc = 0.0;
    for (std::uint64_t idx = 0; idx < joint.size(); ++idx) {
        if (joint[idx] > 0.0) acc -= joint[idx] * std::log(joint[idx] / contexts[idx / m]);
    }
    return acc;
}

double analytic_cross_conditional(const MarkovModel& mu, const MarkovModel& nu, int len) {
    if (!(mu.alphabet() == nu.alphabet()))
        throw Error("cross entropy requires a shared alphabet");
    if (len < nu.order())
        throw Error("cross conditional entropy needs a context at least as long as nu's order");
    const std::uint64_t m = mu.alphabet().size();
    const auto joint = block_probabilities(mu, len + 1);
    const std::uint64_t nu_ctx_mod = ipow(m, nu.order());
    double acc = 0.0;
    for (std::uint64_t idx = 0; idx < joint.size(); ++idx) {
        if (joint[idx] == 0.0) continue;
        const Symbol a = static_cast<Symbol>(idx % m);
        const std::uint64_t ctx = (idx / m) % nu_ctx_mod;
        const double q = nu.law().prob(ctx, a);
        if (q <= 0.0) {
            std::string block;
            std::uint64_t rest = idx;
            for (int i = 0; i <= len; ++i) {
                block = mu.alphabet().label(static_cast<Symbol>(rest % m)) +
                        (block.empty() ? "" : " ") + block;
                rest /= m;
            }
            throw DominationError(
                "domination failure: mu-positive block " + block + " has zero nu-probability",
                block);
        }
        acc -= joint[idx] * std::log(q);
    }
    return acc;
}

double analytic_cross_entropy_rate(const MarkovModel& mu, const MarkovModel& nu) {
    return analytic_cross_conditional(mu, nu, std::max(mu.order(), nu.order()));
}

double analytic_kl_rate(const MarkovModel& mu, const MarkovModel& nu) {
    return analytic_cross_entropy_rate(mu, nu) - analytic_entropy_rate(mu);
}

BernoulliTransform exact_bernoulli_transform(double p0) {
    if (p0 <= 0.0 || p0 >= 1.0) throw Error("bernoulli parameter must be in (0, 1)");
    const double p = p0;
    const double q = 1.0 - p0;
    const double z = 1.0 / (1.0 - p * q);  // 1 / (1 - mu(01))

    Alphabet alphabet;
    const Symbol zero = alphabet.add_base("0");
    const Symbol one = alphabet.add_base("1");
    const Symbol two = alphabet.add_derived(zero, one);
    auto shared = std::make_shared<const Alphabet>(std::move(alphabet));

    const std::array<double, 3> stationary = {z * p * p, z * q * q, z * p * q};
    TransitionMatrix trans(1, shared);
    {
        TransitionMatrix::Row row;  // after 0: never 1 (it would have merged)
        row.weight = stationary[0];
        row.cells.push_back({zero, p, 0});
        row.cells.push_back({two, q, 0});
        trans.set_row(zero, std::move(row));
    }
    for (Symbol x : {one, two}) {
        TransitionMatrix::Row row;
        row.weight = stationary[x];
        row.cells.push_back({zero, p * p, 0});
        row.cells.push_back({one, q, 0});
        row.cells.push_back({two, p * q, 0});
        trans.set_row(x, std::move(row));
    }
    return BernoulliTransform{shared, stationary, std::move(trans), z};
}

MarkovModel transform_to_model(const BernoulliTransform& transform) {
    return MarkovModel(transform.alphabet, 1, transform.transition);
}

BinaryMarginals BinaryMarginals::bernoulli(double p0) {
    if (p0 <= 0.0 || p0 >= 1.0) throw Error("bernoulli parameter must be in (0, 1)");
    std::map<std::string, double> probs;
    for (int len = 1; len <= 4; ++len) {
        for (int bits = 0; bits < (1 << len); ++bits) {
            std::string key;
            double p = 1.0;
            for (int i = len - 1; i >= 0; --i) {
                const bool one = (bits >> i) & 1;
                key += one ? '1' : '0';
                p *= one ? 1.0 - p0 : p0;
            }
            probs.emplace(std::move(key), p);
        }
    }
    return from_map(std::move(probs));
}

BinaryMarginals BinaryMarginals::from_model(const MarkovModel& model) {
    if (model.alphabet().size() != 2) throw Error("binary marginals need a binary model");
    std::map<std::string, double> probs;
    for (int len = 1; len <= 4; ++len) {
        const auto blocks = block_probabilities(model, len);
        for (std::uint64_t idx = 0; idx < blocks.size(); ++idx) {
            std::string key;
            for (int i = len - 1; i >= 0; --i) key += ((idx >> i) & 1) ? '1' : '0';
            probs.emplace(std::move(key), blocks[idx]);
        }
    }
    return from_map(std::move(probs));
}

BinaryMarginals BinaryMarginals::from_map(std::map<std::string, double> probs) {
    BinaryMarginals out;
    out.probs_ = std::move(probs);
    out.validate();
    return out;
}

void BinaryMarginals::validate() const {
    constexpr double tol = 1e-9;
    for (int len = 1; len <= 4; ++len) {
        for (int bits = 0; bits < (1 << len); ++bits) {
            std::string key;
            for (int i = len - 1; i >= 0; --i) key += ((bits >> i) & 1) ? '1' : '0';
            auto it = probs_.find(key);
            if (it == probs_.end()) throw Error("missing marginal for block " + key);
            if (it->second < -tol || it->second > 1.0 + tol)
                throw Error("marginal out of range for block " + key);
        }
    }
    if (std::abs(probs_.at("0") + probs_.at("1") - 1.0) > tol)
        throw Error("inconsistent marginals: 1-blocks do not sum to 1");
    for (int len = 1; len <= 3; ++len) {
        for (int bits = 0; bits < (1 << len); ++bits) {
            std::string key;
            for (int i = len - 1; i >= 0; --i) key += ((bits >> i) & 1) ? '1' : '0';
            const double p = probs_.at(key);
            const double right = probs_.at(key + "0") + probs_.at(key + "1");
            const double left = probs_.at("0" + key) + probs_.at("1" + key);
            if (std::abs(p - right) > tol || std::abs(p - left) > tol)
                throw Error("inconsistent marginals at block " + key);
        }
    }
}

double BinaryMarginals::operator()(std::string_view block) const {
    auto it = probs_.find(std::string(block));
    if (it == probs_.end()) throw Error("no marginal for block " + std::string(block));
    return it->second;
}

std::array<std::array<double, 3>, 3> exact_pair_table(const BinaryMarginals& mu) {
    const double z = 1.0 / (1.0 - mu("01"));
    std::array<std::array<double, 3>, 3> t{};
    t[0][0] = z * (mu("00") - mu("001"));
    t[0][1] = 0.0;
    t[0][2] = z * mu("001");
    t[1][0] = z * (mu("10") - mu("010") - mu("101") + mu("0101"));
    t[1][1] = z * (mu("11") - mu("011"));
    t[1][2] = z * (mu("101") - mu("0101"));
    t[2][0] = z * (mu("010") - mu("0101"));
    t[2][1] = z * mu("011");
    t[2][2] = z * mu("0101");
    return t;
}

}  // namespace nsrps
