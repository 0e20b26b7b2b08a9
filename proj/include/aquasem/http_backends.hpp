#pragma once

#include <condition_variable>
#include <memory>
#include <mutex>

#include "aquasem/backends.hpp"

namespace aquasem {

// Bounds concurrent in-flight requests against one endpoint.
class ParallelGate {
public:
    explicit ParallelGate(int limit) : available_(limit) {}

    class Pass {
    public:
        explicit Pass(ParallelGate& gate) : gate_(gate) { gate_.acquire(); }
        ~Pass() { gate_.release(); }
        Pass(const Pass&) = delete;
        Pass& operator=(const Pass&) = delete;

    private:
        ParallelGate& gate_;
    };

private:
    void acquire();
    void release();

    std::mutex mutex_;
    std::condition_variable cv_;
    int available_;
};

namespace detail {

// One POST round-trip shared by the three provider clients. Transport
// failures are retried up to endpoint.transport_retries extra times with the
// identical payload; protocol failures are never retried.
std::string http_post_json(const BackendEndpoint& endpoint, ParallelGate& gate,
                           const std::string& path, const std::string& body);

}  // namespace detail

class HttpCaptioner : public Captioner {
public:
    HttpCaptioner(BackendEndpoint endpoint, std::shared_ptr<ParallelGate> gate);
    TextMessage caption(const ImageBuffer& img) override;
    std::string name() const override { return endpoint_.base_url; }

private:
    BackendEndpoint endpoint_;
    std::shared_ptr<ParallelGate> gate_;
};

class HttpGenerator : public Generator {
public:
    HttpGenerator(BackendEndpoint endpoint, std::shared_ptr<ParallelGate> gate);
    ImageBuffer generate(const GenerationRequest& req) override;
    std::string name() const override { return endpoint_.base_url; }

private:
    BackendEndpoint endpoint_;
    std::shared_ptr<ParallelGate> gate_;
};

class HttpEmbedder : public Embedder {
public:
    HttpEmbedder(BackendEndpoint endpoint, std::shared_ptr<ParallelGate> gate);
    Embedding embed(const ImageBuffer& img) override;
    std::string name() const override { return endpoint_.base_url; }

private:
    BackendEndpoint endpoint_;
    std::shared_ptr<ParallelGate> gate_;
};

}  // namespace aquasem
