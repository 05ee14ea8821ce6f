#include "nsrps/alphabet.hpp"

#include <istream>
#include <ostream>

#include "nsrps/errors.hpp"

namespace nsrps {

namespace {

bool printable_token(const std::string& label) {
    if (label.empty()) return false;
    for (unsigned char c : label) {
        if (c <= ' ') return false;  // no whitespace or control characters
    }
    return true;
}

}  // namespace

Alphabet Alphabet::from_labels(const std::vector<std::string>& labels) {
    Alphabet a;
    for (const auto& label : labels) a.add_base(label);
    return a;
}

const std::shared_ptr<const Alphabet>& Alphabet::bytes() {
    static const std::shared_ptr<const Alphabet> instance = [] {
        auto a = std::make_shared<Alphabet>();
        for (int b = 0; b < 256; ++b) a->add_base(std::to_string(b));
        return a;
    }();
    return instance;
}

void Alphabet::check_new_label(const std::string& label) const {
    if (!printable_token(label))
        throw Error("alphabet label must be a non-empty token without whitespace");
    if (index_.count(label)) throw Error("duplicate alphabet label: " + label);
    if (size() >= kMaxSymbols) throw Error("alphabet limit of 65536 symbols reached");
}

Symbol Alphabet::add_base(std::string label) {
    check_new_label(label);
    const Symbol id = static_cast<Symbol>(size());
    index_.emplace(label, id);
    labels_.push_back(std::move(label));
    origins_.push_back(SymbolOrigin{});
    return id;
}

Symbol Alphabet::add_derived(Symbol a, Symbol b) {
    if (a >= size() || b >= size()) throw Error("derived symbol constituents out of range");
    std::string label = "(" + labels_[a] + "." + labels_[b] + ")";
    if (index_.count(label)) label += "#" + std::to_string(size());
    return add_derived(a, b, std::move(label));
}

Symbol Alphabet::add_derived(Symbol a, Symbol b, std::string label) {
    if (a >= size() || b >= size()) throw Error("derived symbol constituents out of range");
    check_new_label(label);
    const Symbol id = static_cast<Symbol>(size());
    index_.emplace(label, id);
    labels_.push_back(std::move(label));
    origins_.push_back(SymbolOrigin{true, a, b});
    return id;
}

const std::string& Alphabet::label(Symbol s) const {
    if (s >= size()) throw Error("symbol id out of range");
    return labels_[s];
}

const SymbolOrigin& Alphabet::origin(Symbol s) const {
    if (s >= size()) throw Error("symbol id out of range");
    return origins_[s];
}

std::optional<Symbol> Alphabet::find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool Alphabet::operator==(const Alphabet& other) const {
    if (labels_ != other.labels_) return false;
    for (std::size_t i = 0; i < origins_.size(); ++i) {
        const auto& x = origins_[i];
        const auto& y = other.origins_[i];
        if (x.derived != y.derived || x.first != y.first || x.second != y.second) return false;
    }
    return true;
}

bool Alphabet::extends(const Alphabet& prefix) const {
    if (prefix.size() > size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (labels_[i] != prefix.labels_[i]) return false;
        const auto& x = origins_[i];
        const auto& y = prefix.origins_[i];
        if (x.derived != y.derived || x.first != y.first || x.second != y.second) return false;
    }
    return true;
}

namespace {

// Splits "(x.y)" at the dot that sits at parenthesis depth 0 of the interior.
std::optional<std::pair<std::string, std::string>> split_derived_label(const std::string& label) {
    if (label.size() < 5 || label.front() != '(' || label.back() != ')') return std::nullopt;
    int depth = 0;
    for (std::size_t i = 1; i + 1 < label.size(); ++i) {
        const char c = label[i];
        if (c == '(') ++depth;
        else if (c == ')') --depth;
        else if (c == '.' && depth == 0)
            return std::make_pair(label.substr(1, i - 1), label.substr(i + 1, label.size() - i - 2));
    }
    return std::nullopt;
}

}  // namespace

Alphabet Alphabet::load(std::istream& in) {
    Alphabet a;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        // "(x.y)" labels rebuild their derived origin when both halves exist.
        if (auto parts = split_derived_label(line)) {
            auto first = a.find(parts->first);
            auto second = a.find(parts->second);
            if (first && second) {
                a.add_derived(*first, *second, line);
                continue;
            }
        }
        a.add_base(line);
    }
    return a;
}

void Alphabet::save(std::ostream& out) const {
    for (const auto& label : labels_) out << label << '\n';
}

}  // namespace nsrps
