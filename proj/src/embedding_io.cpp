#include "msdiar/embedding_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace msdiar {

using nlohmann::json;

std::vector<EmbeddingRecord> parse_embeddings_jsonl(const std::string& text) {
  std::vector<EmbeddingRecord> records;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    EmbeddingRecord record;
    try {
      const json j = json::parse(line);
      record.start_time = j.at("start").get<double>();
      record.end_time = j.at("end").get<double>();
      record.turn_initiated = j.at("turn").get<bool>();
      record.vector = j.at("vec").get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw MalformedLineError(line_no, e.what());
    }
    if (record.vector.empty()) throw MalformedLineError(line_no, "empty 'vec'");
    if (!records.empty() && record.vector.size() != records.front().vector.size()) {
      throw MalformedLineError(line_no, "'vec' dimension " +
                                            std::to_string(record.vector.size()) +
                                            " differs from the stream dimension " +
                                            std::to_string(records.front().vector.size()));
    }
    try {
      records.push_back(normalize_record(std::move(record)));
    } catch (const InvalidRecordError& e) {
      throw MalformedLineError(line_no, e.what());
    }
  }
  return records;
}

std::string write_embeddings_jsonl(std::span<const EmbeddingRecord> records) {
  std::string out;
  for (const auto& r : records) {
    json j;
    j["start"] = r.start_time;
    j["end"] = r.end_time;
    j["turn"] = r.turn_initiated;
    j["vec"] = r.vector;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << contents;
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace msdiar
