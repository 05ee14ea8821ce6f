#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nsrps {

using Symbol = std::uint32_t;

// Where a symbol came from: the initial alphabet, or a pair substitution
// that introduced it as an abbreviation for (first, second).
struct SymbolOrigin {
    bool derived = false;
    Symbol first = 0;
    Symbol second = 0;
};

// Growing symbol inventory. Identifiers are dense (0..size-1) and append-only:
// registering a derived symbol never renames existing ones, and a derived
// symbol's constituents always have strictly smaller identifiers. Labels are
// unique printable tokens without whitespace.
class Alphabet {
public:
    // Alphabets past 2^16 symbols are out of scope for this library.
    static constexpr std::size_t kMaxSymbols = std::size_t{1} << 16;

    Alphabet() = default;

    static Alphabet from_labels(const std::vector<std::string>& labels);

    // 256 base symbols labeled "0".."255", one per byte value. Shared instance.
    static const std::shared_ptr<const Alphabet>& bytes();

    Symbol add_base(std::string label);
    // Default label is "(a.b)" built from the constituent labels; when that
    // token is already taken a "#<id>" suffix disambiguates.
    Symbol add_derived(Symbol a, Symbol b);
    Symbol add_derived(Symbol a, Symbol b, std::string label);

    std::size_t size() const noexcept { return labels_.size(); }
    const std::string& label(Symbol s) const;
    const SymbolOrigin& origin(Symbol s) const;
    std::optional<Symbol> find(std::string_view label) const;

    bool operator==(const Alphabet& other) const;
    // True when this alphabet starts with `prefix` symbol-for-symbol.
    bool extends(const Alphabet& prefix) const;

    // Sidecar format: one label per line, line number = symbol id. Derived
    // symbols keep their "(a.b)" labels, which is enough to rebuild origins.
    static Alphabet load(std::istream& in);
    void save(std::ostream& out) const;

private:
    void check_new_label(const std::string& label) const;

    std::vector<std::string> labels_;
    std::vector<SymbolOrigin> origins_;
    std::unordered_map<std::string, Symbol> index_;
};

}  // namespace nsrps
