#include "canopy/species.hpp"

#ifdef CANOPY_WITH_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <json.hpp>

#include <fmt/format.h>

#include <cstdlib>

namespace canopy::species {

namespace {

struct SplitUrl {
    std::string base; // scheme://host[:port]
    std::string path; // leading slash
};

std::optional<SplitUrl> split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return std::nullopt;
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return SplitUrl{url, "/"};
    }
    return SplitUrl{url.substr(0, path_start), url.substr(path_start)};
}

} // namespace

std::optional<GatewayConfig> GatewayConfig::from_env() {
    const char* url = std::getenv("GATEWAY_URL");
    if (url == nullptr || *url == '\0') return std::nullopt;
    GatewayConfig config;
    config.url = url;
    if (const char* key = std::getenv("GATEWAY_KEY")) config.api_key = key;
    return config;
}

GeneratedText generate_via_gateway(const Recommendation& recommendation,
                                   const KnowledgeChunk& chunk,
                                   const std::optional<GatewayConfig>& gateway) {
    GeneratedText result;
    result.text = recommendation.rendered_text;
    result.generated = false;

    if (!gateway) {
        return result; // offline mode, template stands
    }

    const auto split = split_url(gateway->url);
    if (!split) {
        result.warnings.push_back(fmt::format("gateway URL '{}' is not absolute", gateway->url));
        return result;
    }

    nlohmann::json request;
    request["prompt"] = fmt::format(
        "Reference material:\n{}\nDraft recommendation:\n{}\n"
        "Expand the draft into advice for a planting crew without dropping any species.",
        chunk.body, recommendation.rendered_text);

    httplib::Client client(split->base);
    client.set_connection_timeout(gateway->timeout_seconds, 0);
    client.set_read_timeout(gateway->timeout_seconds, 0);
    client.set_write_timeout(gateway->timeout_seconds, 0);
    httplib::Headers headers;
    if (!gateway->api_key.empty()) {
        headers.emplace("Authorization", fmt::format("Bearer {}", gateway->api_key));
    }

    const auto response = client.Post(split->path, headers, request.dump(), "application/json");
    if (!response) {
        result.warnings.push_back(fmt::format("gateway unreachable: {}",
                                              httplib::to_string(response.error())));
        return result;
    }
    if (response->status != 200) {
        result.warnings.push_back(fmt::format("gateway returned HTTP {}", response->status));
        return result;
    }
    const auto payload = nlohmann::json::parse(response->body, nullptr, false);
    if (payload.is_discarded() || !payload.contains("text") || !payload["text"].is_string()) {
        result.warnings.push_back("gateway reply is not a {\"text\": ...} object");
        return result;
    }
    result.text = payload["text"].get<std::string>();
    result.generated = true;
    return result;
}

} // namespace canopy::species
