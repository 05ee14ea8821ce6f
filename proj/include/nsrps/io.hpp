#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "nsrps/sequence.hpp"

namespace nsrps {

enum class SequenceFormat { tokens, bytes };

// Reads one sequence. Token mode infers the alphabet unless one is given;
// byte mode always uses the shared byte alphabet.
SymbolSequence read_sequence_file(const std::filesystem::path& path, SequenceFormat format,
                                  std::shared_ptr<const Alphabet> alphabet = nullptr);

// Reads several token files over one shared alphabet, built from distinct
// tokens in order of appearance across the files (unless `alphabet` fixes it).
std::vector<SymbolSequence> read_sequence_files(const std::vector<std::filesystem::path>& paths,
                                                SequenceFormat format,
                                                std::shared_ptr<const Alphabet> alphabet = nullptr);

void write_sequence_file(const std::filesystem::path& path, const SymbolSequence& seq,
                         SequenceFormat format);

Alphabet read_alphabet_file(const std::filesystem::path& path);
void write_alphabet_file(const std::filesystem::path& path, const Alphabet& alphabet);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace nsrps
