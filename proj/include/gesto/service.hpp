// Copyright 2026 The Gesto Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <gesto/artwork.hpp>
#include <gesto/gstb.hpp>
#include <gesto/store.hpp>

#include "httplib.h"
#include "json.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <unordered_map>

namespace gesto {

struct ServiceConfig {
  std::size_t max_payload = 16u * 1024u * 1024u;
  std::size_t default_limit = 20;
  std::size_t max_limit = 100;
  /// Receives one JSON line per request; empty disables logging.
  std::function<void(const std::string&)> request_log;
};

struct Session {
  std::string token;
  std::string author;
  std::int64_t issued_at = 0;
};

/// HTTP/1.1 front of an ArtworkStore:
///
///   POST   /v1/sessions          {"author"} -> 201 {"token"}
///   POST   /v1/artworks          GSTB body, bearer token -> 201 {"artwork_id"}
///   GET    /v1/artworks/{id}     -> 200 GSTB bytes
///   GET    /v1/artworks?author=&limit=&after= -> {"items", "next"}
///   DELETE /v1/artworks/{id}     bearer token of the author -> 204
///   GET    /v1/health            -> {"status":"ok","artworks":n}
class ArtworkService {
 public:
  static constexpr const char* kChecksumHeader = "X-Gesto-Checksum";

  explicit ArtworkService(ArtworkStore& store, ServiceConfig config = {})
      : store_(store), config_(std::move(config)) {
    server_.set_payload_max_length(config_.max_payload);
    routes();
    if (config_.request_log) {
      server_.set_logger([this](const httplib::Request& req, const httplib::Response& res) {
        nlohmann::json line = {{"method", req.method},
                               {"path", req.path},
                               {"status", res.status},
                               {"bytes_in", req.body.size()},
                               {"bytes_out", res.body.size()},
                               {"remote", req.remote_addr}};
        config_.request_log(line.dump());
      });
    }
  }

  bool bind(const std::string& host, int port) { return server_.bind_to_port(host, port); }
  int bind_to_any_port(const std::string& host) { return server_.bind_to_any_port(host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void wait_until_ready() const { server_.wait_until_ready(); }
  void stop() { server_.stop(); }

 private:
  static void json_reply(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void error_reply(httplib::Response& res, int status, const std::string& message) {
    json_reply(res, status, {{"error", message}});
  }

  std::optional<Session> session_for(const httplib::Request& req) {
    const auto header = req.get_header_value("Authorization");
    constexpr std::string_view kBearer = "Bearer ";
    if (header.size() <= kBearer.size() || header.compare(0, kBearer.size(), kBearer) != 0) {
      return std::nullopt;
    }
    std::lock_guard lock(sessions_mu_);
    auto it = sessions_.find(header.substr(kBearer.size()));
    if (it == sessions_.end()) return std::nullopt;
    return it->second;
  }

  std::string fresh_token() {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string token;
    for (int word_index = 0; word_index < 4; ++word_index) {
      const std::uint32_t word = token_source_();
      for (int i = 0; i < 8; ++i) token.push_back(kHex[(word >> (4 * i)) & 0xF]);
    }
    return token;
  }

  static std::string checksum_hex(std::uint32_t crc) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", crc);
    return buf;
  }

  static nlohmann::json record_json(const ArtworkRecord& r) {
    return {{"artwork_id", r.artwork_id.to_string()},
            {"byte_len", r.byte_len},
            {"created_at", r.created_at},
            {"author", r.author},
            {"title", r.title},
            {"checksum", checksum_hex(r.checksum)}};
  }

  void routes() {
    server_.Post("/v1/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = nlohmann::json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object() || !body.contains("author") ||
          !body["author"].is_string()) {
        return error_reply(res, 400, "body must be {\"author\": string}");
      }
      const auto author = body["author"].get<std::string>();
      if (author.empty() || author.size() > kMaxAuthorBytes) {
        return error_reply(res, 400, "author must be 1 to 64 bytes");
      }
      Session session;
      session.author = author;
      session.issued_at = std::chrono::duration_cast<std::chrono::seconds>(
                              std::chrono::system_clock::now().time_since_epoch())
                              .count();
      {
        std::lock_guard lock(sessions_mu_);
        do {
          session.token = fresh_token();
        } while (sessions_.contains(session.token));
        sessions_.emplace(session.token, session);
      }
      json_reply(res, 201, {{"token", session.token}});
    });

    server_.Post("/v1/artworks", [this](const httplib::Request& req, httplib::Response& res) {
      if (!session_for(req)) return error_reply(res, 401, "missing or unknown session token");
      if (req.body.size() > config_.max_payload) {
        return error_reply(res, 413, "payload exceeds 16 MiB");
      }
      Artwork artwork;
      try {
        artwork = gstb::decode(req.body);
      } catch (const Error& e) {
        return error_reply(res, 400, e.what());
      }
      ArtworkRecord record;
      record.artwork_id = artwork.artwork_id;
      record.created_at = artwork.created_at;
      record.author = artwork.author;
      record.title = artwork.title;
      const auto* data = reinterpret_cast<const std::uint8_t*>(req.body.data());
      try {
        if (store_.put(record, {data, req.body.size()}) == ArtworkStore::PutResult::kConflict) {
          return error_reply(res, 409, "artwork " + record.artwork_id.to_string() + " exists");
        }
      } catch (const Error& e) {
        return error_reply(res, 500, e.what());
      }
      json_reply(res, 201, {{"artwork_id", record.artwork_id.to_string()}});
    });

    server_.Get(R"(/v1/artworks/([^/]+))", [this](const httplib::Request& req,
                                                  httplib::Response& res) {
      const auto id = ArtworkId::parse(req.matches[1].str());
      const auto record = id ? store_.record(*id) : std::nullopt;
      const auto bytes = record ? store_.get(*id) : std::nullopt;
      if (!bytes) return error_reply(res, 404, "unknown artwork");
      res.status = 200;
      res.set_header(kChecksumHeader, checksum_hex(record->checksum));
      res.set_content(std::string(bytes->begin(), bytes->end()), "application/octet-stream");
    });

    server_.Get("/v1/artworks", [this](const httplib::Request& req, httplib::Response& res) {
      std::size_t limit = config_.default_limit;
      if (req.has_param("limit")) {
        const auto text = req.get_param_value("limit");
        std::size_t value = 0;
        auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || end != text.data() + text.size() || value < 1 ||
            value > config_.max_limit) {
          return error_reply(res, 400, "limit must be an integer in [1, 100]");
        }
        limit = value;
      }
      std::optional<std::string> author;
      if (req.has_param("author")) author = req.get_param_value("author");
      std::optional<std::string> after;
      if (req.has_param("after")) after = req.get_param_value("after");
      ArtworkPage page;
      try {
        page = store_.list(author, limit, after);
      } catch (const Error& e) {
        return error_reply(res, 400, e.what());
      }
      nlohmann::json items = nlohmann::json::array();
      for (const auto& r : page.items) items.push_back(record_json(r));
      json_reply(res, 200, {{"items", items},
                            {"next", page.next ? nlohmann::json(*page.next) : nlohmann::json()}});
    });

    server_.Delete(R"(/v1/artworks/([^/]+))", [this](const httplib::Request& req,
                                                     httplib::Response& res) {
      const auto session = session_for(req);
      if (!session) return error_reply(res, 401, "missing or unknown session token");
      const auto id = ArtworkId::parse(req.matches[1].str());
      const auto record = id ? store_.record(*id) : std::nullopt;
      if (!record) return error_reply(res, 404, "unknown artwork");
      if (record->author != session->author) {
        return error_reply(res, 403, "only the author may delete an artwork");
      }
      if (store_.remove(*id) == ArtworkStore::RemoveResult::kNotFound) {
        return error_reply(res, 404, "unknown artwork");
      }
      res.status = 204;
    });

    server_.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
      json_reply(res, 200, {{"status", "ok"}, {"artworks", store_.count()}});
    });
  }

  ArtworkStore& store_;
  ServiceConfig config_;
  httplib::Server server_;
  std::mutex sessions_mu_;
  std::unordered_map<std::string, Session> sessions_;
  std::random_device token_source_;
};

}  // namespace gesto
