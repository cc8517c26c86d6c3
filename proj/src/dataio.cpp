#include "halodet/dataio.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "halodet/errors.hpp"

namespace halodet {

namespace {

using nlohmann::json;

constexpr const char* kKnownFields[] = {"id", "lang", "model_input", "model_output_text",
                                        "hard_labels", "soft_labels"};

bool is_known_field(const std::string& key) {
    for (const char* k : kKnownFields) {
        if (key == k) return true;
    }
    return false;
}

std::string id_to_string(const json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number_integer()) return std::to_string(value.get<std::int64_t>());
    throw ParseError("field 'id' must be a string or integer");
}

std::vector<SpanAnnotation> parse_hard_labels(const json& labels) {
    std::vector<SpanAnnotation> out;
    for (const auto& pair : labels) {
        if (!pair.is_array() || pair.size() != 2) {
            throw ParseError("hard_labels entries must be [start, end] pairs");
        }
        out.push_back(SpanAnnotation{pair[0].get<std::size_t>(), pair[1].get<std::size_t>(),
                                     std::nullopt});
    }
    return out;
}

std::vector<SpanAnnotation> parse_soft_labels(const json& labels) {
    std::vector<SpanAnnotation> out;
    for (const auto& entry : labels) {
        if (!entry.is_object() || !entry.contains("start") || !entry.contains("end") ||
            !entry.contains("prob")) {
            throw ParseError("soft_labels entries must carry start, end and prob");
        }
        out.push_back(SpanAnnotation{entry["start"].get<std::size_t>(),
                                     entry["end"].get<std::size_t>(),
                                     entry["prob"].get<double>()});
    }
    return out;
}

QAInstance instance_from_json(const json& line) {
    QAInstance inst;
    for (const char* field : {"id", "lang", "model_input", "model_output_text"}) {
        if (!line.contains(field)) {
            throw ParseError(std::string("missing required field '") + field + "'");
        }
    }
    inst.id = id_to_string(line["id"]);
    inst.lang = line["lang"].get<std::string>();
    inst.question = line["model_input"].get<std::string>();
    inst.answer = line["model_output_text"].get<std::string>();
    if (line.contains("hard_labels")) inst.gold_hard = parse_hard_labels(line["hard_labels"]);
    if (line.contains("soft_labels")) inst.gold_soft = parse_soft_labels(line["soft_labels"]);
    for (const auto& [key, value] : line.items()) {
        if (!is_known_field(key)) inst.extra[key] = value;
    }
    return inst;
}

json hard_labels_to_json(const std::vector<SpanAnnotation>& spans) {
    json out = json::array();
    for (const auto& s : spans) out.push_back(json::array({s.start, s.end}));
    return out;
}

json soft_labels_to_json(const std::vector<SpanAnnotation>& spans) {
    json out = json::array();
    for (const auto& s : spans) {
        out.push_back({{"start", s.start}, {"end", s.end}, {"prob", s.prob.value_or(1.0)}});
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x00000100000001B3ULL;
    }
    return h;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::vector<QAInstance> parse_dataset(std::string_view jsonl, const std::string& origin) {
    std::vector<QAInstance> instances;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= jsonl.size()) {
        const std::size_t nl = jsonl.find('\n', pos);
        const std::string_view line =
            jsonl.substr(pos, nl == std::string_view::npos ? jsonl.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? jsonl.size() + 1 : nl + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

        json parsed = json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (parsed.is_discarded() || !parsed.is_object()) {
            throw ParseError(origin + ":" + std::to_string(line_no) + ": invalid JSON object");
        }
        try {
            instances.push_back(instance_from_json(parsed));
        } catch (const ParseError& e) {
            throw ParseError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
        validate_instance(instances.back());
    }
    return instances;
}

std::vector<QAInstance> load_dataset(const std::filesystem::path& path) {
    return parse_dataset(read_file(path), path.string());
}

void write_dataset(const std::filesystem::path& path, std::span<const QAInstance> instances) {
    std::ostringstream out;
    for (const auto& inst : instances) {
        json line = {{"id", inst.id},
                     {"lang", inst.lang},
                     {"model_input", inst.question},
                     {"model_output_text", inst.answer}};
        if (inst.gold_hard) line["hard_labels"] = hard_labels_to_json(*inst.gold_hard);
        if (inst.gold_soft) line["soft_labels"] = soft_labels_to_json(*inst.gold_soft);
        for (const auto& [key, value] : inst.extra.items()) line[key] = value;
        out << line.dump() << '\n';
    }
    write_file(path, out.str());
}

void write_predictions(const std::filesystem::path& path, const RunHeader& header,
                       std::span<const Prediction> predictions) {
    std::ostringstream out;
    const json head = {{"config_fingerprint", header.fingerprint},
                       {"hyperparams",
                        {{"beta", header.hp.beta},
                         {"sigma", header.hp.sigma},
                         {"tau", header.hp.tau}}},
                       {"models", header.model_ids},
                       {"router", header.router_id},
                       {"backend", header.backend_kind}};
    out << head.dump() << '\n';
    for (const auto& pred : predictions) {
        // empty arrays, never missing fields: consumers rely on the schema
        const json line = {{"id", pred.id},
                           {"lang", pred.lang},
                           {"hard_labels", hard_labels_to_json(pred.hard)},
                           {"soft_labels", soft_labels_to_json(pred.soft)}};
        out << line.dump() << '\n';
    }
    write_file(path, out.str());
}

PredictionFile load_predictions(const std::filesystem::path& path) {
    const std::string content = read_file(path);
    PredictionFile file;
    std::size_t line_no = 0;
    std::istringstream in(content);
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json parsed = json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (parsed.is_discarded() || !parsed.is_object()) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": invalid JSON object");
        }
        if (!have_header) {
            if (!parsed.contains("config_fingerprint")) {
                throw ParseError(path.string() + ": first line must be the run header");
            }
            file.header.fingerprint = parsed["config_fingerprint"].get<std::string>();
            const auto& hp = parsed["hyperparams"];
            file.header.hp.beta = hp["beta"].get<double>();
            file.header.hp.sigma = hp["sigma"].get<double>();
            file.header.hp.tau = hp["tau"].get<double>();
            file.header.model_ids = parsed["models"].get<std::vector<std::string>>();
            file.header.router_id = parsed["router"].get<std::string>();
            file.header.backend_kind = parsed["backend"].get<std::string>();
            have_header = true;
            continue;
        }
        Prediction pred;
        pred.id = id_to_string(parsed.at("id"));
        pred.lang = parsed.at("lang").get<std::string>();
        pred.hard = parse_hard_labels(parsed.at("hard_labels"));
        pred.soft = parse_soft_labels(parsed.at("soft_labels"));
        file.predictions.push_back(std::move(pred));
    }
    if (!have_header) throw ParseError(path.string() + ": missing run header line");
    return file;
}

std::string report_csv(const EvalReport& report, const std::string& fingerprint) {
    std::ostringstream out;
    out << "# config_fingerprint=" << fingerprint << '\n';
    out << "Language,IoU,SpearmanCorr\n";
    for (const auto& row : report.per_language) {
        out << row.lang << ',' << format_double(row.iou) << ',' << format_double(row.spearman)
            << '\n';
    }
    out << report.overall.lang << ',' << format_double(report.overall.iou) << ','
        << format_double(report.overall.spearman) << '\n';
    return out.str();
}

void write_report_csv(const std::filesystem::path& path, const EvalReport& report,
                      const std::string& fingerprint) {
    write_file(path, report_csv(report, fingerprint));
}

std::string config_fingerprint(const HyperParams& hp, std::string_view routing_template,
                               std::string_view span_template,
                               std::span<const ModelProfile> ensemble,
                               const ModelProfile& router) {
    json ensemble_ids = json::array();
    for (const auto& profile : ensemble) {
        ensemble_ids.push_back({{"id", profile.model_id},
                                {"name", profile.display_name},
                                {"endpoint", profile.endpoint}});
    }
    const json canonical = {
        {"beta", format_double(hp.beta)},
        {"sigma", format_double(hp.sigma)},
        {"tau", format_double(hp.tau)},
        {"routing_template", std::string(routing_template)},
        {"span_template", std::string(span_template)},
        {"ensemble", ensemble_ids},
        {"router", {{"id", router.model_id}, {"endpoint", router.endpoint}}},
    };
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a64(canonical.dump()));
    return buf;
}

}  // namespace halodet
