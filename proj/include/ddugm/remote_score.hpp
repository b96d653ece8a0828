// ScoreProvider backed by a score server speaking the wire protocol.
#pragma once

#include "ddugm/score.hpp"
#include "ddugm/socket.hpp"

namespace ddugm {

/// One connection, one request in flight. Frames of a multi-frame input are sent
/// sequentially in frame order.
class RemoteScore final : public ScoreProvider {
 public:
  RemoteScore(ScoreDomain domain, net::Endpoint endpoint, double timeout_seconds = 120.0)
      : ScoreProvider(domain), endpoint_(std::move(endpoint)), timeout_(timeout_seconds) {}

  std::string describe() const override { return "remote(" + endpoint_.str() + ")"; }
  const net::Endpoint& endpoint() const { return endpoint_; }

  /// Round-trips {"op":"ping"}; throws on anything but {"status":"ok"}.
  void ping() {
    auto reply = exchange(wire::ping_request());
    if (reply.header.value("status", std::string()) != "ok")
      throw ProtocolError("ping to " + endpoint_.str() + " answered " + reply.header.dump());
  }

 protected:
  DynamicTensor evaluate(const DynamicTensor& x, double sigma) override {
    DynamicTensor out(x.shape());
    for (std::size_t t = 0; t < x.frames(); ++t) {
      auto reply = exchange(wire::score_request(domain(), sigma, x.frame_span(t), x.height(), x.width()));
      auto values = wire::parse_score_reply(reply, x.height(), x.width());
      std::copy(values.begin(), values.end(), out.frame_span(t).begin());
    }
    return out;
  }

 private:
  wire::Message exchange(const wire::Message& request) {
    try {
      if (!fd_.valid()) fd_ = net::connect_to(endpoint_, timeout_);
      net::write_message(fd_.get(), request);
      auto reply = net::read_message(fd_.get());
      if (!reply) throw TransportError("server closed the connection");
      return std::move(*reply);
    } catch (const TransportError& e) {
      fd_.reset();
      throw TransportError(describe() + ": " + e.what());
    } catch (const ProtocolError&) {
      fd_.reset();
      throw;
    }
  }

  net::Endpoint endpoint_;
  double timeout_;
  net::Fd fd_;
};

}  // namespace ddugm
