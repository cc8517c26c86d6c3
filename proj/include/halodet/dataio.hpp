#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "halodet/backend.hpp"
#include "halodet/metrics.hpp"
#include "halodet/types.hpp"

namespace halodet {

// Reads a JSONL dataset. Required per line: id, lang, model_input (question),
// model_output_text (answer). Optional: hard_labels as [[s,e],...] and
// soft_labels as [{"start":s,"end":e,"prob":p},...]. Offsets are code-point
// indices. Unknown fields are kept in QAInstance::extra. Every instance is
// validated; parse errors name the line, validation errors the instance id.
std::vector<QAInstance> load_dataset(const std::filesystem::path& path);

std::vector<QAInstance> parse_dataset(std::string_view jsonl, const std::string& origin);

struct Prediction {
    std::string id;
    std::string lang;
    std::vector<SpanAnnotation> hard;
    std::vector<SpanAnnotation> soft;

    friend bool operator==(const Prediction&, const Prediction&) = default;
};

// First line of every predictions file: the run is meaningless without the
// configuration that produced it.
struct RunHeader {
    std::string fingerprint;
    HyperParams hp;
    std::vector<std::string> model_ids;
    std::string router_id;
    std::string backend_kind;  // "synthetic" or "http"

    friend bool operator==(const RunHeader&, const RunHeader&) = default;
};

struct PredictionFile {
    RunHeader header;
    std::vector<Prediction> predictions;
};

void write_predictions(const std::filesystem::path& path, const RunHeader& header,
                       std::span<const Prediction> predictions);

PredictionFile load_predictions(const std::filesystem::path& path);

void write_dataset(const std::filesystem::path& path, std::span<const QAInstance> instances);

// CSV mirroring the per-language score table: Language, IoU, SpearmanCorr,
// one row per language plus an Overall row. The fingerprint rides along as
// a leading comment line.
void write_report_csv(const std::filesystem::path& path, const EvalReport& report,
                      const std::string& fingerprint);

std::string report_csv(const EvalReport& report, const std::string& fingerprint);

// Stable 64-bit fingerprint over hyperparameters, prompt templates, ensemble
// identity and router identity, rendered as 16 hex digits.
std::string config_fingerprint(const HyperParams& hp, std::string_view routing_template,
                               std::string_view span_template,
                               std::span<const ModelProfile> ensemble,
                               const ModelProfile& router);

}  // namespace halodet
