#include "aquasem/backends.hpp"

#include "aquasem/mock_backends.hpp"

namespace aquasem {

void BackendEndpoint::validate() const {
    if (base_url.empty()) {
        throw std::invalid_argument("backend base_url must not be empty");
    }
    if (!(timeout_seconds > 0.0)) {
        throw std::invalid_argument("backend timeout must be positive");
    }
    if (max_parallel < 1) {
        throw std::invalid_argument("backend max_parallel must be at least 1");
    }
    if (transport_retries < 0) {
        throw std::invalid_argument("backend transport_retries must not be negative");
    }
}

BackendError::BackendError(std::string provider, const std::string& what)
    : std::runtime_error("[" + provider + "] " + what), provider_(std::move(provider)) {}

ProviderSet make_mock_providers() {
    return ProviderSet{std::make_shared<MockCaptioner>(), std::make_shared<MockGenerator>(),
                       std::make_shared<MockEmbedder>()};
}

}  // namespace aquasem
