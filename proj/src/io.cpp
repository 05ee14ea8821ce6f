#include "nsrps/io.hpp"

#include <fstream>
#include <sstream>

#include "nsrps/errors.hpp"

namespace nsrps {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failure on " + path.string());
    return std::move(buf).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failure on " + path.string());
}

SymbolSequence read_sequence_file(const std::filesystem::path& path, SequenceFormat format,
                                  std::shared_ptr<const Alphabet> alphabet) {
    const std::string contents = read_file(path);
    if (format == SequenceFormat::bytes) {
        if (alphabet && !(*alphabet == *Alphabet::bytes()))
            throw Error("byte mode always uses the byte alphabet");
        return sequence_from_bytes(contents);
    }
    if (alphabet) return sequence_from_tokens(contents, std::move(alphabet));
    return sequence_from_tokens(contents, InferAlphabet{});
}

std::vector<SymbolSequence> read_sequence_files(const std::vector<std::filesystem::path>& paths,
                                                SequenceFormat format,
                                                std::shared_ptr<const Alphabet> alphabet) {
    std::vector<SymbolSequence> out;
    if (format == SequenceFormat::bytes || alphabet) {
        for (const auto& path : paths) out.push_back(read_sequence_file(path, format, alphabet));
        return out;
    }
    // One alphabet over all files, tokens numbered in order of appearance.
    Alphabet shared;
    std::vector<std::vector<Symbol>> words;
    for (const auto& path : paths)
        words.push_back(tokenize(read_file(path), shared, /*allow_new=*/true));
    auto shared_ptr_alphabet = std::make_shared<const Alphabet>(std::move(shared));
    for (auto& word : words) out.emplace_back(std::move(word), shared_ptr_alphabet);
    return out;
}

void write_sequence_file(const std::filesystem::path& path, const SymbolSequence& seq,
                         SequenceFormat format) {
    if (format == SequenceFormat::bytes) {
        write_file(path, sequence_to_bytes(seq));
        return;
    }
    std::string text = sequence_to_tokens(seq);
    if (!text.empty()) text += '\n';
    write_file(path, text);
}

Alphabet read_alphabet_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return Alphabet::load(in);
}

void write_alphabet_file(const std::filesystem::path& path, const Alphabet& alphabet) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    alphabet.save(out);
    if (!out) throw IoError("write failure on " + path.string());
}

}  // namespace nsrps
