#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sarcbench/agent.hpp"
#include "sarcbench/dataset.hpp"
#include "sarcbench/errors.hpp"
#include "sarcbench/metrics.hpp"
#include "sarcbench/prompts.hpp"
#include "sarcbench/verdict.hpp"

namespace py = pybind11;

namespace {

sarcbench::Strategy strategy_arg(const std::string& code) {
  auto strategy = sarcbench::strategy_from_code(code);
  if (!strategy) throw py::value_error("unknown strategy '" + code + "'");
  return *strategy;
}

sarcbench::Sample make_sample(const std::string& text, const std::string& variety_code) {
  auto variety = sarcbench::variety_from_code(variety_code);
  if (!variety) throw py::value_error("unknown variety '" + variety_code + "'");
  sarcbench::Sample sample;
  sample.id = "py";
  sample.text = text;
  sample.variety = *variety;
  sample.gold_label = "sarcastic";
  sample.gold_explanation = "-";
  return sample;
}

std::vector<sarcbench::Verdict> verdicts_arg(const std::vector<std::string>& kinds) {
  std::vector<sarcbench::Verdict> verdicts;
  verdicts.reserve(kinds.size());
  for (const auto& kind : kinds) {
    if (kind == "sarcastic") {
      verdicts.push_back(sarcbench::Verdict::sarcastic("x"));
    } else if (kind == "not_sarcastic") {
      verdicts.push_back(sarcbench::Verdict::not_sarcastic());
    } else if (kind == "need_context") {
      verdicts.push_back(sarcbench::Verdict::need_context());
    } else {
      throw py::value_error("unknown verdict kind '" + kind + "'");
    }
  }
  return verdicts;
}

py::dict verdict_dict(const sarcbench::Verdict& v) {
  py::dict d;
  switch (v.kind) {
    case sarcbench::VerdictKind::NotSarcastic: d["verdict"] = "not_sarcastic"; break;
    case sarcbench::VerdictKind::NeedContext: d["verdict"] = "need_context"; break;
    case sarcbench::VerdictKind::Sarcastic:
      d["verdict"] = "sarcastic";
      d["explanation"] = v.explanation;
      break;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Core operations of the sarcasm-explanation prompting benchmark";

  py::register_exception<sarcbench::Error>(m, "SarcbenchError");

  // dataset_io
  m.def("word_count", [](const std::string& s) { return sarcbench::word_count(s); },
        "Number of whitespace-separated words", py::arg("text"));
  m.def(
      "load_dataset",
      [](const std::string& path) {
        auto ds = sarcbench::load_dataset(path);
        py::list rows;
        for (const auto& s : ds.samples) {
          py::dict d;
          d["id"] = s.id;
          d["text"] = s.text;
          d["variety"] = sarcbench::variety_code(s.variety);
          d["label"] = s.gold_label;
          d["explanation"] = s.gold_explanation;
          rows.append(d);
        }
        return rows;
      },
      py::arg("path"));
  m.def(
      "dataset_stats",
      [](const std::string& path) {
        auto stats = sarcbench::dataset_stats(sarcbench::load_dataset(path));
        py::dict d;
        d["n"] = stats.n;
        d["avg_text_words"] = stats.avg_text_words;
        d["avg_expl_words"] = stats.avg_expl_words;
        return d;
      },
      py::arg("path"));

  // prompt_engine
  m.def("few_shot_exemplars", [] {
    py::list out;
    for (const auto& e : sarcbench::few_shot_exemplars()) {
      out.append(py::make_tuple(e.text, e.explanation));
    }
    return out;
  });
  m.def(
      "build_prompt",
      [](const std::string& strategy, const std::string& text, const std::string& variety) {
        auto bundle = sarcbench::build_prompt(strategy_arg(strategy), make_sample(text, variety));
        py::list messages;
        for (const auto& msg : bundle.messages) {
          py::dict d;
          d["role"] = sarcbench::role_name(msg.role);
          d["content"] = msg.content;
          messages.append(d);
        }
        return messages;
      },
      py::arg("strategy"), py::arg("text"), py::arg("variety") = "us");
  m.def("build_kg_system_prompt", &sarcbench::build_kg_system_prompt);

  // verdict_parser
  m.def(
      "parse_verdict",
      [](const std::string& text, const std::string& strategy) {
        return verdict_dict(sarcbench::parse_verdict(text, strategy_arg(strategy)));
      },
      py::arg("text"), py::arg("strategy") = "zero");
  m.def(
      "extract_explanation",
      [](const std::string& text, const std::string& strategy) {
        return sarcbench::extract_explanation(text, strategy_arg(strategy));
      },
      py::arg("text"), py::arg("strategy") = "zero");

  // agent_runtime
  m.def("parse_action_blob", [](const std::string& output) {
    auto parsed = sarcbench::parse_action_blob(output);
    py::dict d;
    d["thought"] = parsed.thought;
    d["action"] = parsed.action.name;
    d["action_input"] = parsed.action.input;
    if (parsed.warning) d["warning"] = *parsed.warning;
    return d;
  });

  // metrics
  m.def(
      "accuracy",
      [](const std::vector<std::string>& kinds) {
        auto verdicts = verdicts_arg(kinds);
        return sarcbench::accuracy(verdicts);
      },
      py::arg("verdict_kinds"));
  m.def(
      "error_counts",
      [](const std::vector<std::string>& kinds) {
        auto verdicts = verdicts_arg(kinds);
        auto [ns, nc] = sarcbench::error_counts(verdicts);
        return py::make_tuple(ns, nc);
      },
      py::arg("verdict_kinds"));
  m.def(
      "cosine_similarity",
      [](const std::vector<double>& u, const std::vector<double>& v) {
        return sarcbench::cosine_similarity(u, v);
      },
      py::arg("u"), py::arg("v"));
  m.def(
      "paired_permutation_test",
      [](const std::vector<double>& a, const std::vector<double>& b, int resamples,
         std::uint64_t seed) { return sarcbench::paired_permutation_test(a, b, resamples, seed); },
      py::arg("a"), py::arg("b"), py::arg("resamples") = 10000, py::arg("seed") = 0);

#ifdef VERSION_INFO
#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
