#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "honeyhsi/pipeline.hpp"

namespace httplib {
class Server;
}

namespace honeyhsi {

inline constexpr std::size_t kMaxClassifyBodyBytes = 16u * 1024u * 1024u;

struct HttpReply {
    int status = 200;
    std::string contentType = "application/json";
    std::string body;
};

/// Serves one immutable model bundle. Handlers are const and safe to call concurrently.
class ClassifyService {
public:
    explicit ClassifyService(FittedPipeline pipeline);

    /// POST /classify. 400 malformed CSV, 422 band-count mismatch, 413 oversized body.
    HttpReply classify(std::string_view csvBody) const;
    /// GET /model.
    HttpReply modelInfo() const;
    /// GET /healthz.
    HttpReply health() const;

    /// Registers the routes and permissive CORS headers on `server`.
    void mount(httplib::Server& server) const;

    const FittedPipeline& pipeline() const noexcept { return *pipeline_; }

private:
    std::shared_ptr<const FittedPipeline> pipeline_;
    std::string modelInfoBody_;
};

/// Blocks serving on host:port until the process is stopped.
void serve(const ClassifyService& service, const std::string& host, int port);

}  // namespace honeyhsi
