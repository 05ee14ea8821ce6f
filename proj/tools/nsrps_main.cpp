// Command-line front end: source generation, NSRPS runs, estimator sweeps,
// and figure-ready TSV output. Data goes to stdout (or --output), progress
// and diagnostics to stderr.

#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nsrps/errors.hpp"
#include "nsrps/estimators.hpp"
#include "nsrps/io.hpp"

namespace {

using namespace nsrps;

constexpr int kExitIoError = 2;
constexpr int kExitDomination = 3;
constexpr int kExitInsufficientData = 4;

// "bernoulli:P", "markovK:SEED" (binary, random law), or a model file path.
MarkovModel parse_model_spec(const std::string& spec) {
    if (spec.rfind("bernoulli:", 0) == 0) {
        return MarkovModel::bernoulli(std::stod(spec.substr(10)));
    }
    if (spec.rfind("markov", 0) == 0) {
        const auto colon = spec.find(':');
        if (colon != std::string::npos) {
            try {
                const int order = std::stoi(spec.substr(6, colon - 6));
                const std::uint64_t seed = std::stoull(spec.substr(colon + 1));
                return MarkovModel::random_binary(order, seed);
            } catch (const std::invalid_argument&) {
                // fall through: treat as a file path
            }
        }
    }
    std::ifstream in(spec);
    if (!in) throw IoError("cannot open model spec or file: " + spec);
    return MarkovModel::load(in);
}

SequenceFormat parse_format(const std::string& format) {
    if (format == "tokens") return SequenceFormat::tokens;
    if (format == "bytes") return SequenceFormat::bytes;
    throw Error("unknown format: " + format);
}

ZeroPolicy parse_policy(const std::string& policy, double pseudo_count) {
    if (policy == "strict") return ZeroPolicy::strict();
    if (policy == "epsilon") return ZeroPolicy::epsilon(pseudo_count);
    if (policy == "infinity") return ZeroPolicy::infinity();
    throw Error("unknown zero policy: " + policy);
}

PairStrategy parse_strategy(const std::string& strategy) {
    if (strategy == "most-frequent") return most_frequent_strategy();
    if (strategy.rfind("fixed:", 0) == 0) {
        const std::string path = strategy.substr(6);
        std::ifstream in(path);
        if (!in) throw IoError("cannot open fixed rule file: " + path);
        std::vector<std::pair<std::string, std::string>> labels;
        std::string a, b;
        while (in >> a >> b) labels.emplace_back(a, b);
        if (labels.empty()) throw Error("fixed rule file is empty: " + path);
        return fixed_label_rules_strategy(std::move(labels));
    }
    throw Error("unknown strategy: " + strategy);
}

// Writes to --output or stdout.
void emit(const std::optional<std::string>& output, const std::string& text) {
    if (output) {
        write_file(*output, text);
    } else {
        std::cout << text;
    }
}

struct CommonOptions {
    std::optional<std::string> input;
    std::optional<std::string> input2;
    std::optional<std::string> model_spec;
    std::optional<std::string> model_spec2;
    std::optional<std::string> alphabet_file;
    std::string format = "tokens";
    std::uint64_t length = 1000000;
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> seed2;
    std::vector<std::uint64_t> seeds;
};

// Inputs for one estimator trial: either files read once, or model samples
// regenerated per seed.
struct TrialInputs {
    SymbolSequence mu;
    std::optional<SymbolSequence> nu;
};

TrialInputs load_inputs(const CommonOptions& opt, bool paired, std::uint64_t seed) {
    if (opt.input) {
        if (opt.model_spec || opt.model_spec2)
            throw Error("give either --input files or --model specs, not both");
        std::shared_ptr<const Alphabet> fixed;
        if (opt.alphabet_file)
            fixed = std::make_shared<const Alphabet>(read_alphabet_file(*opt.alphabet_file));
        const SequenceFormat format = parse_format(opt.format);
        if (!paired) return {read_sequence_file(*opt.input, format, fixed), std::nullopt};
        if (!opt.input2) throw Error("this command needs --input2");
        auto both = read_sequence_files({*opt.input, *opt.input2}, format, fixed);
        return {both[0], both[1]};
    }
    if (!opt.model_spec) throw Error("need --input or --model");
    const MarkovModel mu = parse_model_spec(*opt.model_spec);
    TrialInputs trial{mu.generate(opt.length, seed), std::nullopt};
    if (paired) {
        if (!opt.model_spec2) throw Error("this command needs --input2 or --model2");
        const MarkovModel nu = parse_model_spec(*opt.model_spec2);
        if (!(mu.alphabet() == nu.alphabet()))
            throw Error("mu and nu models must share an alphabet");
        const std::uint64_t nu_seed = opt.seed2 ? *opt.seed2 : seed + 1;
        // Rebind nu's sample onto mu's alphabet object so the pair shares one.
        SymbolSequence sample = nu.generate(opt.length, nu_seed);
        trial.nu = SymbolSequence(
            std::vector<Symbol>(sample.symbols().begin(), sample.symbols().end()),
            trial.mu.alphabet_ptr());
    }
    return trial;
}

void add_common_options(CLI::App* cmd, CommonOptions& opt, bool paired) {
    cmd->add_option("--input", opt.input, "input sequence file (mu)");
    cmd->add_option("--model", opt.model_spec,
                    "model spec instead of --input: bernoulli:P, markovK:SEED, or a model file");
    if (paired) {
        cmd->add_option("--input2", opt.input2, "second sequence file (nu)");
        cmd->add_option("--model2", opt.model_spec2, "model spec for nu");
        cmd->add_option("--seed2", opt.seed2, "sample seed for nu (default: seed + 1)");
    }
    cmd->add_option("--format", opt.format, "sequence file format: tokens|bytes")
        ->default_str("tokens");
    cmd->add_option("--alphabet", opt.alphabet_file, "fixed alphabet sidecar file");
    cmd->add_option("--length", opt.length, "sample length for model inputs")
        ->default_str("1000000");
    cmd->add_option("--seed", opt.seed, "sample seed for model inputs")->default_str("1");
    cmd->add_option("--seeds", opt.seeds, "seed sweep: run one trial per seed concurrently")
        ->expected(-1);
}

int run_cli(int argc, char** argv) {
    CLI::App app{
        "nsrps: entropy, cross entropy and KL divergence between symbolic sources\n"
        "via non-sequential recursive pair substitution, with waiting-time and\n"
        "analytic Markov cross-checks. Data to stdout, diagnostics to stderr."};
    app.require_subcommand(1);

    // ---- generate ----------------------------------------------------------
    struct {
        std::string model;
        std::uint64_t length = 0;
        std::uint64_t seed = 1;
        std::string format = "tokens";
        std::optional<std::string> output;
        bool bits = false;
    } gen;
    auto* cmd_generate = app.add_subcommand("generate", "sample a synthetic source into a file");
    cmd_generate->add_option("--model", gen.model, "bernoulli:P, markovK:SEED, or a model file")
        ->required();
    cmd_generate->add_option("--length", gen.length, "number of symbols")->required();
    cmd_generate->add_option("--seed", gen.seed, "sample seed")->default_str("1");
    cmd_generate->add_option("--format", gen.format, "tokens|bytes")->default_str("tokens");
    cmd_generate->add_option("--output", gen.output, "output file (default: stdout)");
    cmd_generate->add_flag("--bits", gen.bits, "report the analytic rate in bits");

    // ---- estimate ----------------------------------------------------------
    CommonOptions est_opt;
    struct {
        std::string mode;
        std::size_t n_steps = 0;
        std::string strategy = "most-frequent";
        std::string driver = "nu";
        std::string policy = "epsilon";
        double pseudo_count = 1.0;
        std::vector<std::string> analytic;
        bool bits = false;
        std::optional<std::string> output;
    } est;
    auto* cmd_estimate =
        app.add_subcommand("estimate", "entropy / cross entropy / KL divergence series");
    cmd_estimate->add_option("mode", est.mode, "entropy|cross|kl")->required();
    add_common_options(cmd_estimate, est_opt, /*paired=*/true);
    cmd_estimate->add_option("--n-steps", est.n_steps, "number of pair substitutions")
        ->default_str("0");
    cmd_estimate->add_option("--strategy", est.strategy, "most-frequent | fixed:FILE")
        ->default_str("most-frequent");
    cmd_estimate->add_option("--driver", est.driver, "which sequence selects pairs: nu|mu")
        ->default_str("nu");
    cmd_estimate->add_option("--policy", est.policy, "zero policy: strict|epsilon|infinity")
        ->default_str("epsilon");
    cmd_estimate->add_option("--pseudo-count", est.pseudo_count, "epsilon policy pseudo-count")
        ->default_str("1");
    cmd_estimate->add_option("--analytic", est.analytic,
                             "model spec(s) for reference values (1 for entropy, 2 for cross/kl)")
        ->expected(-1);
    cmd_estimate->add_flag("--bits", est.bits, "entropies in bits instead of nats");
    cmd_estimate->add_option("--output", est.output, "output TSV file (default: stdout)");

    // ---- zbar --------------------------------------------------------------
    CommonOptions zbar_opt;
    struct {
        std::size_t n_steps = 20;
        std::optional<std::string> output;
    } zb;
    auto* cmd_zbar = app.add_subcommand(
        "zbar", "contraction diagnostics: Zbar_mu and Zbar_nu under the nu-driven strategy");
    add_common_options(cmd_zbar, zbar_opt, /*paired=*/true);
    cmd_zbar->add_option("--n-steps", zb.n_steps, "number of pair substitutions")
        ->default_str("20");
    cmd_zbar->add_option("--output", zb.output, "output TSV file (default: stdout)");

    // ---- nsrps -------------------------------------------------------------
    CommonOptions run_opt;
    struct {
        std::size_t n_steps = 1;
        std::string strategy = "most-frequent";
        std::optional<std::string> output;
        std::optional<std::string> alphabet_out;
    } run;
    auto* cmd_run =
        app.add_subcommand("nsrps", "run substitutions; dump the trace and transformed sequence");
    add_common_options(cmd_run, run_opt, /*paired=*/false);
    cmd_run->add_option("--n-steps", run.n_steps, "number of pair substitutions")
        ->default_str("1");
    cmd_run->add_option("--strategy", run.strategy, "most-frequent | fixed:FILE")
        ->default_str("most-frequent");
    cmd_run->add_option("--output", run.output, "transformed sequence file (token format)");
    cmd_run->add_option("--alphabet-out", run.alphabet_out, "final alphabet sidecar file");

    CLI11_PARSE(app, argc, argv);

    if (cmd_generate->parsed()) {
        const MarkovModel model = parse_model_spec(gen.model);
        const double rate = analytic_entropy_rate(model);
        const SymbolSequence seq = model.generate(gen.length, gen.seed);
        if (gen.output) {
            write_sequence_file(*gen.output, seq, parse_format(gen.format));
        } else if (parse_format(gen.format) == SequenceFormat::bytes) {
            std::cout << sequence_to_bytes(seq);
        } else {
            const std::string text = sequence_to_tokens(seq);
            std::cout << text;
            if (!text.empty()) std::cout << '\n';
        }
        std::cerr << "model order " << model.order() << ", alphabet " << model.alphabet().size()
                  << ", analytic entropy rate " << (gen.bits ? rate / std::log(2.0) : rate)
                  << (gen.bits ? " bits" : " nats") << "/symbol\n";
        return 0;
    }

    if (cmd_estimate->parsed()) {
        const bool paired = est.mode == "cross" || est.mode == "kl";
        if (!paired && est.mode != "entropy") throw Error("estimate mode must be entropy|cross|kl");
        const ZeroPolicy policy = parse_policy(est.policy, est.pseudo_count);
        if (est.driver != "mu" && est.driver != "nu") throw Error("driver must be nu or mu");
        const Driver driver = est.driver == "mu" ? Driver::mu : Driver::nu;

        AnalyticReference analytic;
        bool have_analytic = false;
        if (!est.analytic.empty()) {
            const MarkovModel mu_model = parse_model_spec(est.analytic[0]);
            analytic.h = analytic_entropy_rate(mu_model);
            if (paired) {
                if (est.analytic.size() != 2)
                    throw Error("cross/kl --analytic needs two model specs");
                const MarkovModel nu_model = parse_model_spec(est.analytic[1]);
                analytic.cross = analytic_cross_entropy_rate(mu_model, nu_model);
                analytic.kl = *analytic.cross - *analytic.h;
            } else if (est.analytic.size() != 1) {
                throw Error("entropy --analytic needs one model spec");
            }
            have_analytic = true;
        }

        auto run_trial = [&](std::uint64_t seed) {
            const TrialInputs inputs = load_inputs(est_opt, paired, seed);
            const PairStrategy strategy = parse_strategy(est.strategy);
            EstimateSeries series =
                paired ? cross_entropy_via_nsrps(inputs.mu, *inputs.nu, est.n_steps, driver,
                                                 policy, strategy)
                       : entropy_via_nsrps(inputs.mu, est.n_steps, strategy);
            std::ostringstream buf;
            write_series_tsv(buf, series, est.bits, have_analytic ? &analytic : nullptr);
            return std::move(buf).str();
        };

        if (est_opt.seeds.empty()) {
            emit(est.output, run_trial(est_opt.seed));
            return 0;
        }
        if (!est_opt.model_spec) throw Error("--seeds sweeps need model inputs");
        // One concurrent trial per seed; rows are tagged and emitted in the
        // listed seed order, each trial's block written atomically.
        std::vector<std::future<std::string>> trials;
        trials.reserve(est_opt.seeds.size());
        for (std::uint64_t seed : est_opt.seeds)
            trials.push_back(std::async(std::launch::async, run_trial, seed));
        std::ostringstream all;
        for (std::size_t i = 0; i < trials.size(); ++i) {
            std::istringstream rows(trials[i].get());
            std::string line;
            bool header = true;
            while (std::getline(rows, line)) {
                if (header) {
                    if (i == 0) all << "#seed\t" << line.substr(1) << '\n';
                    header = false;
                } else {
                    all << est_opt.seeds[i] << '\t' << line << '\n';
                }
            }
        }
        emit(est.output, all.str());
        return 0;
    }

    if (cmd_zbar->parsed()) {
        const TrialInputs inputs = load_inputs(zbar_opt, /*paired=*/true, zbar_opt.seed);
        const PairedTraces traces =
            run_paired_nsrps(inputs.mu, *inputs.nu, zb.n_steps, Driver::nu);
        std::ostringstream buf;
        buf << "#N\tzbar_mu\tzbar_nu\n";
        buf.precision(12);
        buf << 0 << '\t' << 1.0 << '\t' << 1.0 << '\n';
        for (std::size_t i = 0; i < traces.mu.zbar.size(); ++i)
            buf << i + 1 << '\t' << traces.mu.zbar[i] << '\t' << traces.nu.zbar[i] << '\n';
        emit(zb.output, buf.str());
        return 0;
    }

    if (cmd_run->parsed()) {
        const TrialInputs inputs = load_inputs(run_opt, /*paired=*/false, run_opt.seed);
        const NsrpsTrace trace = run_nsrps(inputs.mu, run.n_steps, parse_strategy(run.strategy));
        std::ostringstream buf;
        write_trace_tsv(buf, trace);
        std::cout << buf.str();
        if (trace.early_stop) std::cerr << "early stop: sequence dropped below 2 symbols\n";
        if (run.output)
            write_sequence_file(*run.output, trace.final_sequence, SequenceFormat::tokens);
        if (run.alphabet_out) write_alphabet_file(*run.alphabet_out, *trace.final_alphabet);
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const nsrps::DominationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomination;
    } catch (const nsrps::InsufficientDataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInsufficientData;
    } catch (const nsrps::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
