// In-process HTTP stub used by the protocol tests and the acceptance gate.
// Serves canned JSON for the /caption, /generate and /embed endpoints while
// recording every request verbatim, so tests can compare wire bytes against
// golden strings. Failure modes cover the error taxonomy: a non-200 status
// with an {"error"} body, and a connection-dropping listener for transport
// faults.
#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"

namespace stub {

struct Exchange {
    std::string path;
    std::string body;
    std::string authorization;  // raw header value, empty when absent
};

class StubServer {
public:
    StubServer() {
        auto record = [this](const httplib::Request& req) {
            std::lock_guard lock(mutex_);
            Exchange ex;
            ex.path = req.path;
            ex.body = req.body;
            if (req.has_header("Authorization")) {
                ex.authorization = req.get_header_value("Authorization");
            }
            exchanges_.push_back(std::move(ex));
        };
        auto respond = [this, record](const httplib::Request& req, httplib::Response& res,
                                      const std::string& body) {
            record(req);
            int delay = 0;
            {
                std::lock_guard lock(mutex_);
                delay = delay_ms_;
            }
            if (delay > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay));
            std::lock_guard lock(mutex_);
            if (fail_status_ != 0) {
                res.status = fail_status_;
                res.set_content(fail_body_, "application/json");
            } else {
                res.set_content(body, "application/json");
            }
        };
        server_.Post("/caption", [this, respond](const httplib::Request& req,
                                                 httplib::Response& res) {
            respond(req, res, caption_response_);
        });
        server_.Post("/generate", [this, respond](const httplib::Request& req,
                                                  httplib::Response& res) {
            respond(req, res, generate_response_);
        });
        server_.Post("/embed", [this, respond](const httplib::Request& req,
                                               httplib::Response& res) {
            respond(req, res, embed_response_);
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~StubServer() {
        server_.stop();
        thread_.join();
    }

    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

    void set_caption_response(std::string body) {
        std::lock_guard lock(mutex_);
        caption_response_ = std::move(body);
    }
    void set_generate_response(std::string body) {
        std::lock_guard lock(mutex_);
        generate_response_ = std::move(body);
    }
    void set_embed_response(std::string body) {
        std::lock_guard lock(mutex_);
        embed_response_ = std::move(body);
    }

    // All endpoints answer `status` with `body` until cleared with status 0.
    void set_failure(int status, std::string body) {
        std::lock_guard lock(mutex_);
        fail_status_ = status;
        fail_body_ = std::move(body);
    }

    // Every response is held back this long; lets clients hit read timeouts.
    void set_delay_ms(int ms) {
        std::lock_guard lock(mutex_);
        delay_ms_ = ms;
    }

    std::vector<Exchange> exchanges() const {
        std::lock_guard lock(mutex_);
        return exchanges_;
    }

    void clear_exchanges() {
        std::lock_guard lock(mutex_);
        exchanges_.clear();
    }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    mutable std::mutex mutex_;
    std::vector<Exchange> exchanges_;
    std::string caption_response_ = R"({"text":"a dim scene"})";
    // 2x2 all-(10,20,30) pixmap, base64 of its canonical encoding.
    std::string generate_response_ = R"({"image_ppm_b64":"UDYKMiAyCjI1NQoKFB4KFB4KFB4KFB4="})";
    std::string embed_response_ = R"({"vector":[1.0,0.0,0.0]})";
    int fail_status_ = 0;
    std::string fail_body_;
    int delay_ms_ = 0;
};

// Listener that accepts TCP connections and closes them without answering.
// Every accept is counted, which makes transport-retry behavior observable:
// a client configured with N extra retries produces exactly N+1 accepts.
class DroppingListener {
public:
    DroppingListener() {
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        int yes = 1;
        ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        addr.sin_port = 0;
        ::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
        socklen_t len = sizeof(addr);
        ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
        port_ = ntohs(addr.sin_port);
        ::listen(fd_, 16);
        thread_ = std::thread([this] {
            for (;;) {
                int client = ::accept(fd_, nullptr, nullptr);
                if (client < 0) return;  // listener closed
                ++accepts_;
                ::close(client);
            }
        });
    }

    ~DroppingListener() {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        thread_.join();
    }

    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    int accepts() const { return accepts_.load(); }

private:
    int fd_ = -1;
    int port_ = 0;
    std::thread thread_;
    std::atomic<int> accepts_{0};
};

}  // namespace stub
