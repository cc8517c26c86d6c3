#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "halodet/backend.hpp"
#include "halodet/errors.hpp"
#include "halodet/text.hpp"

namespace halodet {

namespace {

using nlohmann::json;

struct SplitUrl {
    std::string base;    // scheme://host[:port]
    std::string prefix;  // path prefix, possibly empty
};

SplitUrl split_endpoint(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint '" + endpoint + "' is not a URL");
    }
    const auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return SplitUrl{endpoint, ""};
    std::string prefix = endpoint.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return SplitUrl{endpoint.substr(0, path_start), prefix};
}

httplib::Headers auth_headers(const ModelProfile& profile) {
    httplib::Headers headers;
    if (!profile.auth_env.empty()) {
        const char* token = std::getenv(profile.auth_env.c_str());
        if (!token || !*token) {
            throw ConfigError("auth environment variable " + profile.auth_env + " is not set");
        }
        headers.emplace("Authorization", std::string("Bearer ") + token);
    }
    return headers;
}

json parse_body(const std::string& body) {
    json parsed = json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) throw ProtocolError("endpoint returned malformed JSON");
    return parsed;
}

const json& choice0(const json& body) {
    if (!body.contains("choices") || !body["choices"].is_array() || body["choices"].empty()) {
        throw ProtocolError("response has no choices");
    }
    return body["choices"][0];
}

}  // namespace

HttpBackend::HttpBackend(HttpOptions options) : options_(options) {}

std::string HttpBackend::post_json(const ModelProfile& profile, const std::string& path,
                                   const std::string& body) {
    const SplitUrl url = split_endpoint(profile.endpoint);
    const httplib::Headers headers = auth_headers(profile);

    std::string last_error;
    for (int attempt = 0; attempt < options_.max_attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(options_.initial_backoff * (1 << (attempt - 1)));
        }
        httplib::Client client(url.base);
        client.set_connection_timeout(options_.timeout);
        client.set_read_timeout(options_.timeout);
        auto res = client.Post(url.prefix + path, headers, body, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;  // transport failure, retryable
        }
        if (res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status >= 400) {
            // misconfiguration, not transient load: fail fast
            throw ProtocolError("endpoint " + profile.endpoint + " returned HTTP " +
                                std::to_string(res->status) + ": " + res->body);
        }
        return res->body;
    }
    throw TransportError("endpoint " + profile.endpoint + " unreachable after " +
                         std::to_string(options_.max_attempts) + " attempts: " + last_error);
}

std::vector<ScoredToken> HttpBackend::token_logprobs(const ModelProfile& profile,
                                                     const std::string& text) {
    if (text.empty()) throw ValidationError("token_logprobs: empty text");

    const json request = {
        {"model", profile.model_id}, {"prompt", text},        {"max_tokens", 0},
        {"echo", true},              {"logprobs", options_.echo_logprobs},
    };
    const json body = parse_body(post_json(profile, "/completions", request.dump()));
    const json& choice = choice0(body);
    if (!choice.contains("logprobs") || choice["logprobs"].is_null()) {
        throw ProtocolError("endpoint returned no logprobs");
    }
    const json& lp = choice["logprobs"];
    if (!lp.contains("tokens") || !lp.contains("token_logprobs") ||
        !lp.contains("text_offset")) {
        throw ProtocolError("logprobs object is missing tokens/token_logprobs/text_offset");
    }
    const auto& token_texts = lp["tokens"];
    const auto& token_logprobs = lp["token_logprobs"];
    const auto& byte_offsets = lp["text_offset"];
    const std::size_t n = token_texts.size();
    if (token_logprobs.size() != n || byte_offsets.size() != n || n == 0) {
        throw ProtocolError("logprobs arrays are empty or of unequal length");
    }

    std::vector<ScoredToken> tokens(n);
    try {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t byte_start = byte_offsets[i].get<std::size_t>();
            const std::size_t byte_end =
                i + 1 < n ? byte_offsets[i + 1].get<std::size_t>() : text.size();
            if (byte_start >= byte_end || byte_end > text.size()) {
                throw CoverageError("token byte offsets do not tile the text");
            }
            tokens[i].text = token_texts[i].get<std::string>();
            tokens[i].start = cp_offset_at_byte(text, byte_start);
            tokens[i].end = cp_offset_at_byte(text, byte_end);
            if (!token_logprobs[i].is_null()) {
                double logprob = token_logprobs[i].get<double>();
                if (logprob > 0.0 && logprob <= 1e-6) logprob = 0.0;  // fp noise from servers
                if (!(logprob <= 0.0)) {
                    throw ProtocolError("token logprob " + std::to_string(logprob) +
                                        " is positive");
                }
                tokens[i].logprob = logprob;
            } else if (i > 0) {
                throw ProtocolError("missing logprob for non-initial token " +
                                    std::to_string(i));
            }
        }
        if (tokens.front().start != 0 || tokens.back().end != cp_length(text)) {
            throw CoverageError("token offsets do not start at 0 or do not reach the end");
        }
    } catch (const ParseError& e) {
        throw CoverageError(std::string("token offsets are not code-point aligned: ") +
                            e.what());
    }
    return tokens;
}

std::map<std::string, double> HttpBackend::next_token_logits(
    const ModelProfile& profile, const std::string& prompt,
    const std::vector<std::string>& candidates) {
    if (candidates.empty()) throw ValidationError("next_token_logits: no candidates");

    const json request = {
        {"model", profile.model_id},
        {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
        {"max_tokens", 1},
        {"temperature", 0},
        {"logprobs", true},
        {"top_logprobs", options_.top_logprobs},
    };
    const json body = parse_body(post_json(profile, "/chat/completions", request.dump()));
    const json& choice = choice0(body);
    if (!choice.contains("logprobs") || !choice["logprobs"].contains("content") ||
        choice["logprobs"]["content"].empty()) {
        throw ProtocolError("endpoint returned no next-token logprobs");
    }
    const json& top = choice["logprobs"]["content"][0]["top_logprobs"];
    if (!top.is_array() || top.empty()) {
        throw ProtocolError("endpoint returned an empty top_logprobs list");
    }

    std::map<std::string, double> returned;
    double min_logit = 0.0;
    bool first = true;
    for (const auto& entry : top) {
        const double logit = entry["logprob"].get<double>();
        returned[entry["token"].get<std::string>()] = logit;
        if (first || logit < min_logit) min_logit = logit;
        first = false;
    }

    // absent candidates get a finite floor so downstream log arithmetic
    // never sees -inf
    std::map<std::string, double> out;
    for (const auto& candidate : candidates) {
        auto it = returned.find(candidate);
        out[candidate] = it != returned.end() ? it->second : min_logit - 10.0;
    }
    return out;
}

std::string HttpBackend::propose_span(const ModelProfile& profile, const std::string& answer,
                                      const WordSpan& focus,
                                      const std::optional<std::string>& left,
                                      const std::optional<std::string>& right,
                                      const std::string& prompt) {
    (void)answer;
    (void)focus;
    (void)left;
    (void)right;
    const json request = {
        {"model", profile.model_id},
        {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
        {"max_tokens", 64},
        {"temperature", 0},
    };
    const json body = parse_body(post_json(profile, "/chat/completions", request.dump()));
    const json& choice = choice0(body);
    if (!choice.contains("message") || !choice["message"].contains("content") ||
        choice["message"]["content"].is_null()) {
        throw ProtocolError("endpoint returned no message content");
    }
    const std::string content = choice["message"]["content"].get<std::string>();
    if (content.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw EmptyResponseError("span proposer returned an empty response");
    }
    return content;
}

}  // namespace halodet
