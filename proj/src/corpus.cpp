#include "intentclust/corpus.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "intentclust/error.hpp"
#include "intentclust/util.hpp"
#include "json.hpp"

namespace intentclust {

using nlohmann::json;

CorpusFormat parse_corpus_format(std::string_view name) {
  const auto lower = to_lower_ascii(name);
  if (lower == "jsonl") return CorpusFormat::Jsonl;
  if (lower == "csv") return CorpusFormat::Csv;
  throw ConfigError("unknown corpus format '" + std::string(name) + "' (expected jsonl or csv)");
}

Corpus::Corpus(std::string name, std::vector<Utterance> utterances)
    : name_(std::move(name)), utterances_(std::move(utterances)) {
  if (utterances_.size() < 2) {
    throw EmptyCorpus("corpus '" + name_ + "' needs at least 2 utterances, got " +
                      std::to_string(utterances_.size()));
  }
  std::size_t labeled = 0;
  for (std::size_t i = 0; i < utterances_.size(); ++i) {
    auto& u = utterances_[i];
    u.id = i;
    if (trim(u.text).empty()) throw MalformedRecord(i + 1, "empty text");
    if (u.gold_intent) ++labeled;
  }
  if (labeled != 0 && labeled != utterances_.size()) {
    throw MixedLabeling(std::to_string(labeled) + " of " + std::to_string(utterances_.size()) +
                        " records carry a label; labels must be all-or-none");
  }
  if (labeled == 0) return;

  std::map<std::string, std::size_t> ids;
  gold_ids_.reserve(utterances_.size());
  for (const auto& u : utterances_) {
    auto [it, inserted] = ids.emplace(*u.gold_intent, gold_names_.size());
    if (inserted) gold_names_.push_back(*u.gold_intent);
    gold_ids_.push_back(it->second);
  }
  gold_k_ = gold_names_.size();
}

namespace {

struct Record {
  std::size_t line;
  std::string text;
  std::optional<std::string> label;
};

std::vector<Record> parse_jsonl(std::string_view content) {
  std::vector<Record> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    const auto eol = content.find('\n', pos);
    const auto line = content.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? content.size() + 1 : eol + 1;
    if (trim(line).empty()) continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw MalformedRecord(line_no, e.what());
    }
    if (!obj.is_object()) throw MalformedRecord(line_no, "record is not a JSON object");
    auto text = obj.find("text");
    if (text == obj.end() || !text->is_string()) throw MalformedRecord(line_no, "missing string field \"text\"");
    Record r{line_no, trim(text->get<std::string>()), std::nullopt};
    if (r.text.empty()) throw MalformedRecord(line_no, "empty text");
    if (auto label = obj.find("label"); label != obj.end() && !label->is_null()) {
      if (label->is_string()) {
        r.label = label->get<std::string>();
      } else if (label->is_number_integer()) {
        r.label = std::to_string(label->get<long long>());
      } else {
        throw MalformedRecord(line_no, "\"label\" must be a string or integer");
      }
    }
    records.push_back(std::move(r));
  }
  return records;
}

// RFC 4180 reader: quoted fields may contain commas, quotes ("") and newlines.
std::vector<std::pair<std::size_t, std::vector<std::string>>> parse_csv_rows(std::string_view content) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t row_line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    const bool blank = row.size() == 1 && trim(row[0]).empty();
    if (!blank) rows.emplace_back(row_line, std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !trim(field).empty()) throw MalformedRecord(line, "stray quote in unquoted field");
        field.clear();
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        row_line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (quoted) throw MalformedRecord(row_line, "unterminated quoted field");
  if (field_started || !row.empty()) end_row();
  return rows;
}

std::vector<Record> parse_csv(std::string_view content) {
  auto rows = parse_csv_rows(content);
  if (rows.empty()) return {};
  const auto& header = rows.front().second;
  std::optional<std::size_t> text_col, label_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto name = to_lower_ascii(trim(header[c]));
    if (name == "text") text_col = c;
    if (name == "label") label_col = c;
  }
  if (!text_col) throw MalformedRecord(rows.front().first, "CSV header lacks a \"text\" column");

  std::vector<Record> records;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [line, cells] = rows[r];
    if (cells.size() != header.size()) {
      throw MalformedRecord(line, "expected " + std::to_string(header.size()) + " columns, got " +
                                      std::to_string(cells.size()));
    }
    Record rec{line, trim(cells[*text_col]), std::nullopt};
    if (rec.text.empty()) throw MalformedRecord(line, "empty text");
    if (label_col) {
      auto label = trim(cells[*label_col]);
      if (!label.empty()) rec.label = std::move(label);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

Corpus parse_corpus(std::string_view content, CorpusFormat format, std::string name) {
  const auto records = format == CorpusFormat::Jsonl ? parse_jsonl(content) : parse_csv(content);
  if (records.empty()) throw EmptyCorpus("corpus '" + name + "' contains no records");

  std::vector<Utterance> utts;
  utts.reserve(records.size());
  for (const auto& r : records) utts.push_back(Utterance{utts.size(), r.text, r.label});
  return Corpus(std::move(name), std::move(utts));
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open corpus file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), format, path.stem().string());
}

std::string to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& u : corpus.utterances()) {
    json obj{{"text", u.text}};
    if (u.gold_intent) obj["label"] = *u.gold_intent;
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

void save_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << to_jsonl(corpus);
}

}  // namespace intentclust
