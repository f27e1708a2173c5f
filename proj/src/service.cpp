#include "honeyhsi/service.hpp"

#include <httplib.h>

#include "honeyhsi/error.hpp"

namespace honeyhsi {

using nlohmann::json;

namespace {

HttpReply errorReply(int status, const std::string& message) {
    return {status, "application/json", json{{"error", message}, {"status", status}}.dump()};
}

void toResponse(const HttpReply& reply, httplib::Response& res) {
    res.status = reply.status;
    res.set_content(reply.body, reply.contentType);
}

}  // namespace

ClassifyService::ClassifyService(FittedPipeline pipeline)
    : pipeline_(std::make_shared<const FittedPipeline>(std::move(pipeline))),
      modelInfoBody_(modelInfoJson(*pipeline_).dump()) {}

HttpReply ClassifyService::classify(std::string_view csvBody) const {
    if (csvBody.size() > kMaxClassifyBodyBytes) return errorReply(413, "request body exceeds 16 MiB");
    try {
        std::vector<SampleRow> rows;
        const auto result = classifySampleCsv(*pipeline_, csvBody, &rows);
        return {200, "application/json", classifyResponseJson(*pipeline_, result, rows).dump()};
    } catch (const BandCountError& e) {
        return errorReply(422, e.what());
    } catch (const ParseError& e) {
        return errorReply(400, e.what());
    } catch (const ArgumentError& e) {
        return errorReply(400, e.what());
    } catch (const ShapeError& e) {
        return errorReply(422, e.what());
    } catch (const std::exception& e) {
        return errorReply(500, e.what());
    }
}

HttpReply ClassifyService::modelInfo() const { return {200, "application/json", modelInfoBody_}; }

HttpReply ClassifyService::health() const { return {200, "text/plain", "ok"}; }

void ClassifyService::mount(httplib::Server& server) const {
    server.set_payload_max_length(kMaxClassifyBodyBytes);
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) { toResponse(health(), res); });
    server.Get("/model", [this](const httplib::Request&, httplib::Response& res) { toResponse(modelInfo(), res); });
    server.Post("/classify", [this](const httplib::Request& req, httplib::Response& res) {
        toResponse(classify(req.body), res);
    });
}

void serve(const ClassifyService& service, const std::string& host, int port) {
    httplib::Server server;
    service.mount(server);
    if (!server.listen(host, port)) throw ArgumentError("cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace honeyhsi
