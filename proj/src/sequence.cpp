#include "nsrps/sequence.hpp"

#include <utility>

#include "nsrps/errors.hpp"

namespace nsrps {

namespace {

const std::shared_ptr<const Alphabet>& empty_alphabet() {
    static const auto instance = std::make_shared<const Alphabet>();
    return instance;
}

const std::shared_ptr<const std::vector<Symbol>>& empty_symbols() {
    static const auto instance = std::make_shared<const std::vector<Symbol>>();
    return instance;
}

}  // namespace

SymbolSequence::SymbolSequence() : data_(empty_symbols()), alphabet_(empty_alphabet()) {}

SymbolSequence::SymbolSequence(std::vector<Symbol> symbols,
                               std::shared_ptr<const Alphabet> alphabet)
    : data_(std::make_shared<const std::vector<Symbol>>(std::move(symbols))),
      alphabet_(alphabet ? std::move(alphabet) : empty_alphabet()) {
    const Symbol limit = static_cast<Symbol>(alphabet_->size());
    for (Symbol s : *data_) {
        if (s >= limit) throw Error("sequence symbol out of alphabet range");
    }
}

SymbolSequence SymbolSequence::rebound(std::shared_ptr<const Alphabet> extended) const {
    if (!extended || !extended->extends(*alphabet_))
        throw Error("rebound alphabet must extend the current one");
    SymbolSequence out;
    out.data_ = data_;
    out.alphabet_ = std::move(extended);
    return out;
}

SymbolSequence SymbolSequence::prefix(std::size_t n) const {
    if (n >= size()) return *this;
    return SymbolSequence(std::vector<Symbol>(data_->begin(), data_->begin() + n), alphabet_);
}

std::vector<Symbol> tokenize(std::string_view text, Alphabet& grow, bool allow_new) {
    std::vector<Symbol> symbols;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        while (i < n && static_cast<unsigned char>(text[i]) <= ' ') ++i;
        if (i >= n) break;
        std::size_t j = i;
        while (j < n && static_cast<unsigned char>(text[j]) > ' ') ++j;
        const std::string_view token = text.substr(i, j - i);
        if (auto id = grow.find(token)) {
            symbols.push_back(*id);
        } else if (allow_new) {
            symbols.push_back(grow.add_base(std::string(token)));
        } else {
            throw Error("unknown token for fixed alphabet: " + std::string(token));
        }
        i = j;
    }
    return symbols;
}

SymbolSequence sequence_from_tokens(std::string_view text, InferAlphabet) {
    Alphabet alphabet;
    auto symbols = tokenize(text, alphabet, /*allow_new=*/true);
    return SymbolSequence(std::move(symbols),
                          std::make_shared<const Alphabet>(std::move(alphabet)));
}

SymbolSequence sequence_from_tokens(std::string_view text,
                                    std::shared_ptr<const Alphabet> alphabet) {
    if (!alphabet) throw Error("null alphabet");
    Alphabet fixed = *alphabet;  // tokenize needs a mutable view; nothing is added
    auto symbols = tokenize(text, fixed, /*allow_new=*/false);
    return SymbolSequence(std::move(symbols), std::move(alphabet));
}

std::string sequence_to_tokens(const SymbolSequence& seq) {
    std::string out;
    const Alphabet& alphabet = seq.alphabet();
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i) out += ' ';
        out += alphabet.label(seq[i]);
    }
    return out;
}

SymbolSequence sequence_from_bytes(std::string_view bytes) {
    std::vector<Symbol> symbols;
    symbols.reserve(bytes.size());
    for (unsigned char c : bytes) symbols.push_back(static_cast<Symbol>(c));
    return SymbolSequence(std::move(symbols), Alphabet::bytes());
}

std::string sequence_to_bytes(const SymbolSequence& seq) {
    std::string out;
    out.reserve(seq.size());
    for (Symbol s : seq.symbols()) {
        if (s >= 256) throw Error("sequence contains non-byte symbols; use token output");
        out.push_back(static_cast<char>(static_cast<unsigned char>(s)));
    }
    return out;
}

}  // namespace nsrps
