#pragma once

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "gestlang/service/pipeline.hpp"

namespace gestlang::service {

// TCP front end for the line protocol: one thread per connection, replies
// written in request order. The server greets each connection with hello.
class Server {
 public:
  // Port 0 picks a free port; see port().
  Server(PipelineService& service, std::uint16_t port, const std::string& address = "127.0.0.1");
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const;

  // Accept loop; returns after stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gestlang::service
