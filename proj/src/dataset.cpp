#include "sarcbench/dataset.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <unordered_set>

#include "sarcbench/errors.hpp"
#include "sarcbench/util.hpp"

namespace sarcbench {

using nlohmann::json;

std::string variety_code(Variety v) {
  switch (v) {
    case Variety::StandardAmerican: return "us";
    case Variety::Australian: return "au";
    case Variety::Indian: return "in";
  }
  return "us";
}

std::optional<Variety> variety_from_code(std::string_view code) {
  if (code == "us") return Variety::StandardAmerican;
  if (code == "au") return Variety::Australian;
  if (code == "in") return Variety::Indian;
  return std::nullopt;
}

std::string variety_name(Variety v) {
  switch (v) {
    case Variety::StandardAmerican: return "American";
    case Variety::Australian: return "Australian";
    case Variety::Indian: return "Indian";
  }
  return "American";
}

std::size_t word_count(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (char c : text) {
    bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) count++;
    in_word = !space;
  }
  return count;
}

namespace {

std::string require_string(const json& obj, const char* field, int line_no) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) throw MissingFieldError(line_no, field);
  if (!it->is_string())
    throw MalformedLineError(line_no, std::string("field '") + field + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path, std::optional<Variety> expected_variety,
                     std::string name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset file: " + path.string());

  Dataset ds;
  ds.name = name.empty() ? path.stem().string() : std::move(name);

  std::unordered_set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    line_no++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw MalformedLineError(line_no, e.what());
    }
    if (!obj.is_object()) throw MalformedLineError(line_no, "expected a JSON object");

    Sample s;
    s.id = require_string(obj, "id", line_no);
    s.text = require_string(obj, "text", line_no);
    if (trim(s.text).empty()) throw MalformedLineError(line_no, "text is empty");

    auto code = require_string(obj, "variety", line_no);
    auto v = variety_from_code(code);
    if (!v) throw MalformedLineError(line_no, "unknown variety '" + code + "'");
    s.variety = *v;
    if (expected_variety && s.variety != *expected_variety) {
      throw VarietyMismatchError(line_no, "expected " + variety_code(*expected_variety) +
                                              ", got " + code);
    }

    s.gold_label = require_string(obj, "label", line_no);
    if (obj.contains("explanation") && obj["explanation"].is_string()) {
      s.gold_explanation = obj["explanation"].get<std::string>();
    }
    if (s.is_sarcastic() && trim(s.gold_explanation).empty()) {
      throw MissingFieldError(line_no, "explanation");
    }

    if (!seen_ids.insert(s.id).second) throw DuplicateIdError(s.id);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

std::string serialize_dataset(const Dataset& ds) {
  std::string out;
  for (const auto& s : ds.samples) {
    json obj;
    obj["id"] = s.id;
    obj["text"] = s.text;
    obj["variety"] = variety_code(s.variety);
    obj["label"] = s.gold_label;
    obj["explanation"] = s.gold_explanation;
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

StatsRow dataset_stats(const Dataset& ds) {
  if (ds.samples.empty()) throw EmptyDatasetError();
  StatsRow row;
  row.n = ds.samples.size();
  double text_total = 0, expl_total = 0;
  for (const auto& s : ds.samples) {
    text_total += static_cast<double>(word_count(s.text));
    expl_total += static_cast<double>(word_count(s.gold_explanation));
  }
  row.avg_text_words = text_total / static_cast<double>(row.n);
  row.avg_expl_words = expl_total / static_cast<double>(row.n);
  return row;
}

}  // namespace sarcbench
