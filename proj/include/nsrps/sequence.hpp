#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nsrps/alphabet.hpp"

namespace nsrps {

// Finite word over an Alphabet. Immutable after construction; copies share
// storage, so passing sequences around is cheap.
class SymbolSequence {
public:
    SymbolSequence();  // empty word over an empty alphabet
    SymbolSequence(std::vector<Symbol> symbols, std::shared_ptr<const Alphabet> alphabet);

    std::size_t size() const noexcept { return data_->size(); }
    bool empty() const noexcept { return data_->empty(); }
    Symbol operator[](std::size_t i) const { return (*data_)[i]; }
    std::span<const Symbol> symbols() const noexcept { return {data_->data(), data_->size()}; }

    const Alphabet& alphabet() const noexcept { return *alphabet_; }
    const std::shared_ptr<const Alphabet>& alphabet_ptr() const noexcept { return alphabet_; }

    // Same word, read over an alphabet that extends the current one.
    SymbolSequence rebound(std::shared_ptr<const Alphabet> extended) const;
    SymbolSequence prefix(std::size_t n) const;

private:
    std::shared_ptr<const std::vector<Symbol>> data_;
    std::shared_ptr<const Alphabet> alphabet_;
};

struct InferAlphabet {};

// Token ingestion. In infer mode the base alphabet is built from distinct
// tokens in order of first appearance; with a fixed alphabet an unknown
// token is an error. Empty input yields a length-0 sequence.
SymbolSequence sequence_from_tokens(std::string_view text, InferAlphabet);
SymbolSequence sequence_from_tokens(std::string_view text,
                                    std::shared_ptr<const Alphabet> alphabet);
// Appends previously unseen tokens to `grow`; used to build one alphabet
// shared by several token streams.
std::vector<Symbol> tokenize(std::string_view text, Alphabet& grow, bool allow_new);

std::string sequence_to_tokens(const SymbolSequence& seq);

// Byte mode: every byte is one base symbol over the shared 256-symbol alphabet.
SymbolSequence sequence_from_bytes(std::string_view bytes);
std::string sequence_to_bytes(const SymbolSequence& seq);

}  // namespace nsrps
