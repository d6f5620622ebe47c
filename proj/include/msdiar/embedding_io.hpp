#pragma once

#include <span>
#include <string>
#include <vector>

#include "msdiar/types.hpp"

namespace msdiar {

// JSON Lines, one record per line:
//   {"start": float, "end": float, "turn": bool, "vec": [float, ...]}
// Blank lines are skipped. Vectors are renormalized on the way in; any
// other problem raises MalformedLineError with the 1-based line number.
std::vector<EmbeddingRecord> parse_embeddings_jsonl(const std::string& text);
std::string write_embeddings_jsonl(std::span<const EmbeddingRecord> records);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace msdiar
