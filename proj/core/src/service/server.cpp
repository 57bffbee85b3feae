#include "gestlang/service/server.hpp"

#include <boost/asio.hpp>

#include "gestlang/errors.hpp"
#include "gestlang/service/protocol.hpp"

namespace gestlang::service {

namespace asio = boost::asio;
using asio::ip::tcp;

struct Server::Impl {
  PipelineService& service;
  asio::io_context io;
  tcp::acceptor acceptor;
  std::atomic<bool> stopping{false};
  std::mutex mutex;
  std::list<std::shared_ptr<tcp::socket>> sockets;
  std::list<std::thread> workers;
  std::uint16_t port = 0;
  asio::ip::address address;

  Impl(PipelineService& s, std::uint16_t port, const std::string& address) : service(s), acceptor(io) {
    boost::system::error_code ec;
    const auto addr = asio::ip::make_address(address, ec);
    if (ec) throw Error(ErrorKind::kInvalidArgument, "bad listen address " + address);
    const tcp::endpoint ep(addr, port);
    acceptor.open(ep.protocol());
    acceptor.set_option(tcp::acceptor::reuse_address(true));
    acceptor.bind(ep, ec);
    if (ec) throw Error(ErrorKind::kIo, "cannot bind " + address + ":" + std::to_string(port) + ": " + ec.message());
    acceptor.listen();
    this->port = acceptor.local_endpoint().port();
    this->address = addr;
  }

  void serve(std::shared_ptr<tcp::socket> sock) {
    boost::system::error_code ec;
    auto send = [&](const nlohmann::json& j) {
      const std::string line = j.dump() + "\n";
      asio::write(*sock, asio::buffer(line), ec);
      return !ec;
    };
    if (!send(hello_message())) return;
    asio::streambuf buf;
    while (!stopping) {
      const std::size_t n = asio::read_until(*sock, buf, '\n', ec);
      if (ec) break;
      std::string line(asio::buffers_begin(buf.data()), asio::buffers_begin(buf.data()) + n - 1);
      buf.consume(n);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      for (const auto& reply : handle_line(service, line)) {
        if (!send(reply)) return;
      }
    }
  }
};

Server::Server(PipelineService& service, std::uint16_t port, const std::string& address)
    : impl_(std::make_unique<Impl>(service, port, address)) {}

Server::~Server() {
  stop();
  for (auto& t : impl_->workers) {
    if (t.joinable()) t.join();
  }
}

std::uint16_t Server::port() const { return impl_->port; }

void Server::run() {
  while (!impl_->stopping) {
    auto sock = std::make_shared<tcp::socket>(impl_->io);
    boost::system::error_code ec;
    impl_->acceptor.accept(*sock, ec);
    if (ec || impl_->stopping) break;
    std::lock_guard lock(impl_->mutex);
    impl_->sockets.push_back(sock);
    impl_->workers.emplace_back([this, sock] { impl_->serve(sock); });
  }
}

void Server::stop() {
  if (impl_->stopping.exchange(true)) return;
  boost::system::error_code ec;
  // A blocking accept() is not woken by close(), so connect to it once.
  {
    asio::io_context io;
    tcp::socket wake(io);
    auto target = impl_->address.is_unspecified() ? asio::ip::make_address("127.0.0.1") : impl_->address;
    wake.connect(tcp::endpoint(target, impl_->port), ec);
  }
  impl_->acceptor.close(ec);
  std::lock_guard lock(impl_->mutex);
  for (auto& s : impl_->sockets) {
    s->shutdown(tcp::socket::shutdown_both, ec);
    s->close(ec);
  }
}

}  // namespace gestlang::service
