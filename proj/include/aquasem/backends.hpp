#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "aquasem/image.hpp"
#include "aquasem/metrics.hpp"
#include "aquasem/text.hpp"

namespace aquasem {

struct BackendEndpoint {
    std::string base_url;  // e.g. "http://localhost:8090"
    double timeout_seconds = 30.0;
    int max_parallel = 4;
    std::optional<std::string> auth_token;  // sent as a bearer token when set
    int transport_retries = 2;  // extra attempts after a transport failure

    // Throws std::invalid_argument when timeout or max_parallel is invalid.
    void validate() const;
};

struct GenerationRequest {
    TextMessage prompt;  // may be empty (fully corrupted channel output)
    std::uint64_t seed = 0;
    int width = 512;
    int height = 512;
};

// Backend failures carry the identity of the provider that raised them.
class BackendError : public std::runtime_error {
public:
    BackendError(std::string provider, const std::string& what);
    const std::string& provider() const { return provider_; }

private:
    std::string provider_;
};

// Connect, read or timeout failures. Requests may be retried with an
// identical payload.
class TransportError : public BackendError {
public:
    using BackendError::BackendError;
};

// Non-200 responses and malformed bodies. Never retried.
class ProtocolError : public BackendError {
public:
    using BackendError::BackendError;
};

class Captioner {
public:
    virtual ~Captioner() = default;
    virtual TextMessage caption(const ImageBuffer& img) = 0;
    virtual std::string name() const = 0;
};

class Generator {
public:
    virtual ~Generator() = default;
    // Deterministic for a fixed (prompt, seed) per provider.
    virtual ImageBuffer generate(const GenerationRequest& req) = 0;
    virtual std::string name() const = 0;
};

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual Embedding embed(const ImageBuffer& img) = 0;
    virtual std::string name() const = 0;
};

struct ProviderSet {
    std::shared_ptr<Captioner> captioner;
    std::shared_ptr<Generator> generator;
    std::shared_ptr<Embedder> embedder;
};

// Fully offline deterministic providers.
ProviderSet make_mock_providers();

// JSON-over-HTTP clients for a model server speaking the /caption, /generate
// and /embed protocol. The three providers share one in-flight limit.
ProviderSet make_http_providers(const BackendEndpoint& endpoint);

}  // namespace aquasem
