#pragma once

// cpp-httplib binding for PreviewService.

#include <ostream>
#include <string>

#include <httplib.h>

#include "nmface/service.hpp"

namespace nmface {

inline QueryParams to_query(const httplib::Request& req) {
    QueryParams q;
    for (const auto& [k, v] : req.params) q.emplace(k, v);  // first value wins
    return q;
}

inline void install_routes(httplib::Server& server, const PreviewService& svc) {
    auto reply = [](httplib::Response& res, const HttpResponse& r) {
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    server.Get("/health", [&svc, reply](const httplib::Request&, httplib::Response& res) { reply(res, svc.health()); });
    server.Get("/grid", [&svc, reply](const httplib::Request&, httplib::Response& res) { reply(res, svc.grid()); });
    server.Get("/pose", [&svc, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.pose(to_query(req)));
    });
    server.Post("/compile", [&svc, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.compile(req.body, to_query(req)));
    });
}

/// Blocks until the server stops. Returns 1 when the address cannot be bound.
inline int run_server(const PreviewService& svc, const std::string& host, int port, std::ostream& log) {
    httplib::Server server;
    install_routes(server, svc);
    if (!server.bind_to_port(host, port)) {
        log << "error: cannot listen on " << host << ':' << port << " (address in use?)\n";
        return 1;
    }
    log << "listening on http://" << host << ':' << port << std::endl;
    return server.listen_after_bind() ? 0 : 1;
}

} // namespace nmface
