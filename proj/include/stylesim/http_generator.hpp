#pragma once

#include <stdexcept>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "stylesim/generation.hpp"

namespace stylesim {

// Pure request/response mapping, split out so the wire format is testable
// without a socket.
inline nlohmann::json build_chat_request(const GeneratorRequest& req,
                                         const std::string& model) {
    nlohmann::json body;
    body["model"] = model;
    body["max_tokens"] = req.max_reply_tokens;
    nlohmann::json messages = nlohmann::json::array();
    messages.push_back({{"role", "system"}, {"content", req.system_prompt}});
    for (const auto& [role, text] : req.history) {
        messages.push_back({{"role", role}, {"content", text}});
    }
    body["messages"] = messages;
    return body;
}

inline std::string parse_chat_response(const nlohmann::json& body) {
    if (!body.contains("choices") || !body["choices"].is_array() ||
        body["choices"].empty()) {
        throw std::runtime_error("generator response has no choices");
    }
    const auto& first = body["choices"][0];
    if (!first.contains("message") || !first["message"].contains("content")) {
        throw std::runtime_error("generator response missing message content");
    }
    return first["message"]["content"].get<std::string>();
}

namespace detail {

struct SplitUrl {
    std::string host_part; // scheme://host[:port]
    std::string path;
};

inline SplitUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw std::invalid_argument("generator url must include a scheme");
    }
    auto path_begin = url.find('/', scheme_end + 3);
    if (path_begin == std::string::npos) {
        return {url, "/v1/chat/completions"};
    }
    return {url.substr(0, path_begin), url.substr(path_begin)};
}

} // namespace detail

class RemoteGenerator final : public Generator {
public:
    explicit RemoteGenerator(RemoteGeneratorConfig cfg) : cfg_(std::move(cfg)) {
        auto split = detail::split_url(cfg_.url);
        host_ = split.host_part;
        path_ = split.path;
    }

    GeneratorResponse generate(const GeneratorRequest& request) override {
        httplib::Client client(host_);
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(60, 0);
        httplib::Headers headers;
        if (!cfg_.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + cfg_.api_key);
        }
        const auto started = std::chrono::steady_clock::now();
        auto res = client.Post(path_, headers,
                               build_chat_request(request, cfg_.model).dump(),
                               "application/json");
        if (!res) {
            throw std::runtime_error("generator transport error: " +
                                     httplib::to_string(res.error()));
        }
        if (res->status != 200) {
            throw std::runtime_error("generator http status " +
                                     std::to_string(res->status));
        }
        GeneratorResponse out;
        out.text = parse_chat_response(nlohmann::json::parse(res->body));
        out.latency_ms = static_cast<int>(
            std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - started)
                .count());
        out.provider_tag = cfg_.model.empty() ? "remote" : cfg_.model;
        return out;
    }

    std::string_view name() const override { return "remote"; }

private:
    RemoteGeneratorConfig cfg_;
    std::string host_;
    std::string path_;
};

inline std::unique_ptr<Generator> make_remote_generator(RemoteGeneratorConfig cfg) {
    return std::make_unique<RemoteGenerator>(std::move(cfg));
}

} // namespace stylesim
