#ifdef LA3_WITH_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <thread>

#include "la3/provider.hpp"

namespace la3::augment {

ParsedUrl parse_url(std::string_view url) {
  ParsedUrl out;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) throw TransportError(TransportError::Kind::Connection, "bad URL: " + std::string(url));
  out.scheme = std::string(url.substr(0, scheme_end));
  if (out.scheme != "http" && out.scheme != "https") {
    throw TransportError(TransportError::Kind::Connection, "unsupported URL scheme: " + out.scheme);
  }
  auto rest = url.substr(scheme_end + 3);
  const auto slash = rest.find('/');
  auto authority = rest.substr(0, slash);
  out.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  out.port = out.scheme == "https" ? 443 : 80;
  const auto colon = authority.rfind(':');
  if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    try {
      out.port = std::stoi(std::string(authority.substr(colon + 1)));
    } catch (const std::exception&) {
      throw TransportError(TransportError::Kind::Connection, "bad port in URL: " + std::string(url));
    }
    authority = authority.substr(0, colon);
  }
  out.host = std::string(authority);
  if (out.host.empty()) throw TransportError(TransportError::Kind::Connection, "URL without host: " + std::string(url));
  return out;
}

HttpResponse HttplibTransport::post(const HttpRequest& request) {
  const auto url = parse_url(request.url);
#ifndef LA3_WITH_OPENSSL
  if (url.scheme == "https") {
    throw TransportError(TransportError::Kind::Connection, "built without TLS support; cannot reach " + request.url);
  }
#endif
  httplib::Client client(url.scheme + "://" + url.host + ":" + std::to_string(url.port));
  client.set_connection_timeout(request.timeout);
  client.set_read_timeout(request.timeout);
  client.set_write_timeout(request.timeout);
  httplib::Headers headers;
  for (const auto& [k, v] : request.headers) headers.emplace(k, v);
  auto res = client.Post(url.path, headers, request.body, "application/json");
  if (!res) {
    const auto err = res.error();
    const auto kind = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read
                          ? TransportError::Kind::Timeout
                          : TransportError::Kind::Connection;
    throw TransportError(kind, "POST " + request.url + ": " + httplib::to_string(err));
  }
  return {res->status, res->body};
}

struct MockServer::Impl {
  httplib::Server server;
  std::thread thread;
};

MockServer::MockServer(MockProvider& provider) : impl_(std::make_unique<Impl>()) {
  impl_->server.Post(".*", [&provider](const httplib::Request& req, httplib::Response& res) {
    auto reply = provider.handle(req.body);
    if (reply.status == 0) {
      // A scripted timeout is served as a gateway timeout over HTTP.
      res.status = 504;
      res.set_content("{\"error\":\"timeout\"}", "application/json");
      return;
    }
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
  port_ = impl_->server.bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw ExternalError("mock server could not bind a port");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

MockServer::~MockServer() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string MockServer::endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

}  // namespace la3::augment
