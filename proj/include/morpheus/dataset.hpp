#pragma once

// JSONL datasets. One example per line:
//   QA      {"id", "question", "passage", "answers": ["..."] | [{"text": "..."}]}
//   MT      {"id", "source", "reference"}
//   generic {"id", "text", "label"?}
// Any example may also carry "tokens" and "tags" arrays for pretagged input.

#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "morpheus/error.hpp"
#include "morpheus/oracle.hpp"

namespace morpheus {

struct Example {
  std::string id;
  std::string text;  // the perturbed field: question, source or text
  TaskContext context;
  std::optional<std::vector<std::string>> tokens;
  std::optional<std::vector<std::string>> tags;
  json raw;  // the input record, passed through to outputs
};

inline std::string_view text_field(Task task) {
  switch (task) {
    case Task::QA: return "question";
    case Task::MT: return "source";
    case Task::GENERIC: return "text";
  }
  return "text";
}

/// Guesses the task from the fields present.
inline Task detect_task(const json& j) {
  if (j.contains("question")) return Task::QA;
  if (j.contains("source")) return Task::MT;
  return Task::GENERIC;
}

inline std::vector<std::string> parse_answers(const json& j) {
  std::vector<std::string> out;
  if (!j.is_array()) throw FormatError("answers must be an array");
  for (const auto& a : j) {
    if (a.is_string()) {
      out.push_back(a.get<std::string>());
    } else if (a.is_object() && a.contains("text") && a["text"].is_string()) {
      out.push_back(a["text"].get<std::string>());
    } else {
      throw FormatError("answer must be a string or {\"text\": ...}");
    }
  }
  return out;
}

inline std::string require_string(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw FormatError(std::string("missing string field '") + key + "'");
  }
  return j[key].get<std::string>();
}

/// Parses one record. `task` forces the schema; nullopt detects it.
inline Example parse_example(const json& j, std::optional<Task> task, std::size_t lineno) {
  if (!j.is_object()) throw FormatError("record is not a JSON object");
  Example ex;
  ex.raw = j;
  ex.context.task = task.value_or(detect_task(j));
  if (j.contains("id")) {
    ex.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
  } else {
    ex.id = std::to_string(lineno);
  }
  ex.text = require_string(j, std::string(text_field(ex.context.task)).c_str());
  switch (ex.context.task) {
    case Task::QA:
      ex.context.passage = require_string(j, "passage");
      if (!j.contains("answers")) throw FormatError("missing field 'answers'");
      ex.context.gold_answers = parse_answers(j["answers"]);
      break;
    case Task::MT:
      ex.context.reference = require_string(j, "reference");
      break;
    case Task::GENERIC:
      if (j.contains("label")) {
        ex.context.label = j["label"].is_string() ? j["label"].get<std::string>() : j["label"].dump();
      }
      break;
  }
  if (j.contains("tokens") || j.contains("tags")) {
    if (!j.contains("tokens") || !j.contains("tags")) {
      throw FormatError("pretagged input needs both 'tokens' and 'tags'");
    }
    ex.tokens = j["tokens"].get<std::vector<std::string>>();
    ex.tags = j["tags"].get<std::vector<std::string>>();
    if (ex.tokens->size() != ex.tags->size()) throw FormatError("tokens and tags differ in length");
  }
  return ex;
}

struct ParseFailure {
  std::size_t line = 0;
  std::string message;
};

/// Streams a JSONL dataset, calling `on_example` per good record and
/// `on_failure` per bad one. Blank lines are skipped silently.
inline void for_each_example(std::istream& in, std::optional<Task> task,
                             const std::function<void(Example&&)>& on_example,
                             const std::function<void(const ParseFailure&)>& on_failure) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      on_example(parse_example(json::parse(line), task, lineno));
    } catch (const json::exception& e) {
      on_failure({lineno, e.what()});
    } catch (const FormatError& e) {
      on_failure({lineno, e.what()});
    }
  }
}

struct Dataset {
  std::vector<Example> examples;
  std::vector<ParseFailure> failures;
};

inline Dataset load_dataset(const std::filesystem::path& path, std::optional<Task> task) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset " + path.string());
  Dataset ds;
  for_each_example(
      in, task, [&](Example&& ex) { ds.examples.push_back(std::move(ex)); },
      [&](const ParseFailure& f) { ds.failures.push_back(f); });
  return ds;
}

}  // namespace morpheus
