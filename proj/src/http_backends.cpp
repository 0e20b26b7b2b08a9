#include "aquasem/http_backends.hpp"

#include <chrono>
#include <utility>

#include "httplib.h"
#include "json.hpp"

#include "aquasem/base64.hpp"

namespace aquasem {

using nlohmann::json;

void ParallelGate::acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return available_ > 0; });
    --available_;
}

void ParallelGate::release() {
    {
        std::lock_guard lock(mutex_);
        ++available_;
    }
    cv_.notify_one();
}

namespace detail {

namespace {

std::string attempt_post(const BackendEndpoint& endpoint, const std::string& path,
                         const std::string& body) {
    httplib::Client client(endpoint.base_url);
    auto micros = std::chrono::microseconds(
        static_cast<std::int64_t>(endpoint.timeout_seconds * 1e6));
    client.set_connection_timeout(micros);
    client.set_read_timeout(micros);
    client.set_write_timeout(micros);
    if (endpoint.auth_token) {
        client.set_bearer_token_auth(*endpoint.auth_token);
    }

    auto res = client.Post(path, body, "application/json");
    if (!res) {
        throw TransportError(endpoint.base_url,
                             "POST " + path + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        std::string detail = res->body;
        auto parsed = json::parse(res->body, nullptr, false);
        if (parsed.is_object() && parsed.contains("error") && parsed["error"].is_string()) {
            detail = parsed["error"].get<std::string>();
        }
        throw ProtocolError(endpoint.base_url, "POST " + path + " returned status " +
                                                   std::to_string(res->status) + ": " + detail);
    }
    return res->body;
}

}  // namespace

std::string http_post_json(const BackendEndpoint& endpoint, ParallelGate& gate,
                           const std::string& path, const std::string& body) {
    // Only transport failures are retried, always with the identical payload;
    // a server that answered (any status) is never asked again.
    for (int attempt = 0;; ++attempt) {
        ParallelGate::Pass pass(gate);
        try {
            return attempt_post(endpoint, path, body);
        } catch (const TransportError&) {
            if (attempt >= endpoint.transport_retries) throw;
        }
    }
}

}  // namespace detail

namespace {

json parse_response(const std::string& provider, const std::string& path,
                    const std::string& body) {
    auto parsed = json::parse(body, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        throw ProtocolError(provider, "POST " + path + " returned a non-JSON body");
    }
    return parsed;
}

std::string encode_image(const ImageBuffer& img) {
    auto bytes = write_ppm(img);
    return base64_encode(std::span<const std::uint8_t>(bytes));
}

ImageBuffer decode_image(const std::string& provider, const std::string& b64) {
    try {
        auto bytes = base64_decode(b64);
        return read_ppm(std::span<const std::uint8_t>(bytes));
    } catch (const std::exception& e) {
        throw ProtocolError(provider, std::string("invalid image payload: ") + e.what());
    }
}

}  // namespace

HttpCaptioner::HttpCaptioner(BackendEndpoint endpoint, std::shared_ptr<ParallelGate> gate)
    : endpoint_(std::move(endpoint)), gate_(std::move(gate)) {}

TextMessage HttpCaptioner::caption(const ImageBuffer& img) {
    json req{{"image_ppm_b64", encode_image(img)}};
    auto body = detail::http_post_json(endpoint_, *gate_, "/caption", req.dump());
    auto resp = parse_response(endpoint_.base_url, "/caption", body);
    if (!resp.contains("text") || !resp["text"].is_string()) {
        throw ProtocolError(endpoint_.base_url, "/caption response lacks a \"text\" string");
    }
    return TextMessage{sanitize(resp["text"].get<std::string>())};
}

HttpGenerator::HttpGenerator(BackendEndpoint endpoint, std::shared_ptr<ParallelGate> gate)
    : endpoint_(std::move(endpoint)), gate_(std::move(gate)) {}

ImageBuffer HttpGenerator::generate(const GenerationRequest& req) {
    json body{{"prompt", req.prompt.content},
              {"seed", req.seed},
              {"width", req.width},
              {"height", req.height}};
    auto raw = detail::http_post_json(endpoint_, *gate_, "/generate", body.dump());
    auto resp = parse_response(endpoint_.base_url, "/generate", raw);
    if (!resp.contains("image_ppm_b64") || !resp["image_ppm_b64"].is_string()) {
        throw ProtocolError(endpoint_.base_url,
                            "/generate response lacks an \"image_ppm_b64\" string");
    }
    return decode_image(endpoint_.base_url, resp["image_ppm_b64"].get<std::string>());
}

HttpEmbedder::HttpEmbedder(BackendEndpoint endpoint, std::shared_ptr<ParallelGate> gate)
    : endpoint_(std::move(endpoint)), gate_(std::move(gate)) {}

Embedding HttpEmbedder::embed(const ImageBuffer& img) {
    json req{{"image_ppm_b64", encode_image(img)}};
    auto body = detail::http_post_json(endpoint_, *gate_, "/embed", req.dump());
    auto resp = parse_response(endpoint_.base_url, "/embed", body);
    if (!resp.contains("vector") || !resp["vector"].is_array()) {
        throw ProtocolError(endpoint_.base_url, "/embed response lacks a \"vector\" array");
    }
    Embedding e;
    for (const auto& v : resp["vector"]) {
        if (!v.is_number()) {
            throw ProtocolError(endpoint_.base_url, "/embed vector holds a non-number");
        }
        e.values.push_back(v.get<double>());
    }
    if (e.values.empty()) {
        throw ProtocolError(endpoint_.base_url, "/embed vector is empty");
    }
    return e;
}

ProviderSet make_http_providers(const BackendEndpoint& endpoint) {
    endpoint.validate();
    auto gate = std::make_shared<ParallelGate>(endpoint.max_parallel);
    return ProviderSet{std::make_shared<HttpCaptioner>(endpoint, gate),
                       std::make_shared<HttpGenerator>(endpoint, gate),
                       std::make_shared<HttpEmbedder>(endpoint, gate)};
}

}  // namespace aquasem
