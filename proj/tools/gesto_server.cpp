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

// gesto-server: artwork persistence service.
//
//   GESTO_ADDR      listen address, host:port (default 127.0.0.1:8787)
//   GESTO_DATA_DIR  storage directory (default ./gesto-data)

#include <gesto/service.hpp>
#include <gesto/store.hpp>

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <string>

namespace {

gesto::ArtworkService* g_service = nullptr;

void on_signal(int) {
  if (g_service != nullptr) g_service->stop();
}

}  // namespace

int main() {
  const char* addr_env = std::getenv("GESTO_ADDR");
  const char* dir_env = std::getenv("GESTO_DATA_DIR");
  const std::string addr = addr_env ? addr_env : "127.0.0.1:8787";
  const std::string dir = dir_env ? dir_env : "./gesto-data";

  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) {
    std::cerr << "gesto-server: GESTO_ADDR must be host:port\n";
    return 2;
  }
  const std::string host = addr.substr(0, colon);
  const int port = std::atoi(addr.c_str() + colon + 1);

  try {
    gesto::ArtworkStore store(dir);
    gesto::ServiceConfig config;
    config.request_log = [](const std::string& line) { std::cerr << line << '\n'; };
    gesto::ArtworkService service(store, config);
    g_service = &service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    if (!service.bind(host, port)) {
      std::cerr << "gesto-server: cannot bind " << addr << '\n';
      return 1;
    }
    std::cerr << "gesto-server: listening on " << addr << ", data in " << dir << " ("
              << store.count() << " artworks)\n";
    service.listen_after_bind();
    g_service = nullptr;
  } catch (const std::exception& e) {
    std::cerr << "gesto-server: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
