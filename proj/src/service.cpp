/*
 * Copyright 2026 The vcoach Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "vcoach/service.hpp"

#include <algorithm>
#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <charconv>
#include <chrono>
#include <csignal>
#include <deque>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include "vcoach/analytics.hpp"
#include "vcoach/engine.hpp"
#include "vcoach/error.hpp"
#include "vcoach/json_io.hpp"
#include "vcoach/protocol.hpp"

namespace vcoach::service {

namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using io::Json;

constexpr std::size_t kMaxQueuedFrames = 1024;
constexpr std::size_t kMaxBodyBytes = 1 << 20;

struct Reply {
  http::status status = http::status::ok;
  std::string content_type = "application/json";
  std::string body;
};

Reply error_reply(http::status status, ErrorCode code, const std::string& message) {
  return {status, "application/json", protocol::error_json(code, message)};
}

http::status status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::Protocol: return http::status::bad_request;
    case ErrorCode::NotFound: return http::status::not_found;
    case ErrorCode::Integrity:
    case ErrorCode::Version:
    case ErrorCode::Domain: return http::status::unprocessable_entity;
    default: return http::status::internal_server_error;
  }
}

std::string_view sv(beast::string_view s) { return {s.data(), s.size()}; }

bool valid_id(std::string_view id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  for (char c : id)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') return false;
  return true;
}

std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
               std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

struct Target {
  std::string path;
  std::map<std::string, std::string> query;
};

Target split_target(std::string_view target) {
  Target t;
  const auto q = target.find('?');
  t.path = std::string(target.substr(0, q));
  if (q == std::string_view::npos) return t;
  std::string_view rest = target.substr(q + 1);
  while (!rest.empty()) {
    const auto amp = rest.find('&');
    const std::string_view kv = rest.substr(0, amp);
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos)
      t.query[percent_decode(kv)] = "";
    else
      t.query[percent_decode(kv.substr(0, eq))] = percent_decode(kv.substr(eq + 1));
    if (amp == std::string_view::npos) break;
    rest = rest.substr(amp + 1);
  }
  return t;
}

std::vector<std::string_view> path_parts(std::string_view path) {
  std::vector<std::string_view> parts;
  while (!path.empty()) {
    const auto s = path.find('/');
    if (s != 0) parts.push_back(path.substr(0, s));
    if (s == std::string_view::npos) break;
    path = path.substr(s + 1);
  }
  return parts;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + p.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Header and completion state from the first and last lines only.
std::optional<SessionInfo> stored_info(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::string first;
  if (!in || !std::getline(in, first)) return std::nullopt;
  SessionInfo info;
  info.id = p.stem().string();
  try {
    const Json h = Json::parse(first);
    info.participant = h.value("participant", "");
    info.mode = h.value("mode", "");
  } catch (const Json::exception&) {
    return std::nullopt;
  }
  in.clear();
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::streamoff>(in.tellg());
  const std::streamoff tail = std::min<std::streamoff>(size, 4096);
  in.seekg(size - tail);
  std::string end(static_cast<std::size_t>(tail), '\0');
  in.read(end.data(), tail);
  if (!end.empty() && end.back() == '\n') end.pop_back();
  const auto nl = end.rfind('\n');
  info.complete = end.compare(nl == std::string::npos ? 0 : nl + 1, 11, "{\"metrics\":") == 0;
  return info;
}

Json info_json(const SessionInfo& s) {
  return Json{{"id", s.id}, {"participant", s.participant}, {"mode", s.mode}, {"live", s.live}, {"complete", s.complete}};
}

class LiveSession;

}  // namespace

struct Server::Impl {
  explicit Impl(ServiceOptions o) : opt(std::move(o)) {}

  ServiceOptions opt;
  mutable std::mutex mu;
  std::map<std::string, SessionInfo> live_info;
  std::map<std::string, std::weak_ptr<LiveSession>> live;
  int next_serial = 1;
  bool started = false;
  bool stopped = false;
  uint16_t bound_port = 0;
  std::vector<std::thread> threads;
  net::thread_pool workers{2};
  // Destroyed first so pending handlers never outlive the members above.
  net::io_context ioc;
  std::optional<net::executor_work_guard<net::io_context::executor_type>> guard;
  std::optional<tcp::acceptor> acceptor;

  std::filesystem::path sessions_dir() const { return opt.data_dir / "sessions"; }
  std::filesystem::path clips_dir() const { return opt.data_dir / "clips"; }
  std::filesystem::path session_path(const std::string& id) const { return sessions_dir() / (id + ".vcs"); }

  std::string allocate_id(const std::string& participant);
  void session_ended(const std::string& id);
  std::vector<SessionInfo> list() const;
  Reply handle(const http::request<http::string_body>& req) const;
  Reply report(const http::request<http::string_body>& req, const Target& target) const;
  void do_accept();
};

namespace {

class LiveSession : public std::enable_shared_from_this<LiveSession> {
 public:
  LiveSession(Server::Impl& srv, tcp::socket socket, std::string id, session::SessionHeader header)
      : srv_(srv),
        ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        id_(std::move(id)),
        engine_(std::move(header)),
        sampler_(protocol::hold_input(engine_.world())) {
    const double rate = engine_.record().header.config.task.tick_rate * srv.opt.speed;
    period_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(1.0 / rate));
  }

  void start(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    upgrade_ = std::move(req);
    ws_.async_accept(upgrade_, [self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
  }

  // Runs on the session strand.
  void shutdown() {
    finalize();
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

  net::any_io_executor executor() { return ws_.get_executor(); }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) {
      finalize();
      return;
    }
    ws_.text(true);
    do_read();
    next_ = std::chrono::steady_clock::now() + period_;
    schedule();
  }

  void do_read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      finalize();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    if (finalized_) return;
    try {
      const auto in = protocol::parse_client_input(text);
      const auto last = sampler_.last_seq();
      if (!sampler_.offer(in))
        engine_.warn("input seq " + std::to_string(in.seq) + " does not follow " + std::to_string(*last) + "; ignored");
    } catch (const Error& e) {
      finalize();
      send(protocol::error_json(e.code(), e.what()), websocket::close_code::policy_error);
      return;
    }
    do_read();
  }

  void schedule() {
    timer_.expires_at(next_);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (!ec) self->tick();
    });
  }

  void tick() {
    if (finalized_) return;
    std::string state;
    try {
      const auto& events = engine_.step(sampler_.sample(engine_.next_tick()));
      state = protocol::server_state_json(engine_, events);
    } catch (const Error& e) {
      finalize();
      send(protocol::error_json(e.code(), e.what()), websocket::close_code::internal_error);
      return;
    }
    if (engine_.complete()) {
      finalize();
      send(std::move(state), websocket::close_code::normal);
      return;
    }
    if (queue_.size() >= kMaxQueuedFrames) {
      finalize();
      send(protocol::error_json(ErrorCode::Protocol, "client is not reading state frames"),
           websocket::close_code::policy_error);
      return;
    }
    send(std::move(state));
    // Fixed-rate schedule; after a long stall, resume from now.
    next_ += period_;
    const auto now = std::chrono::steady_clock::now();
    if (now - next_ > 5 * period_) next_ = now;
    schedule();
  }

  void send(std::string frame, std::optional<websocket::close_code> close_after = std::nullopt) {
    if (closing_) return;
    if (close_after) {
      close_after_ = close_after;
      closing_ = true;
    }
    queue_.push_back(std::move(frame));
    if (!writing_) write_next();
  }

  void write_next() {
    if (queue_.empty()) {
      if (close_after_) {
        ws_.async_close(*close_after_, [self = shared_from_this()](beast::error_code) {});
        close_after_.reset();
      }
      return;
    }
    writing_ = true;
    ws_.async_write(net::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->writing_ = false;
      if (ec) {
        self->queue_.clear();
        self->finalize();
        return;
      }
      self->queue_.pop_front();
      self->write_next();
    });
  }

  // Writes the session file once; later calls are no-ops.
  void finalize() {
    if (finalized_) return;
    finalized_ = true;
    timer_.cancel();
    if (!engine_.record().ticks.empty()) {
      try {
        session::write_file(srv_.session_path(id_), engine_.finish());
      } catch (const std::exception& e) {
        std::cerr << "vcoach: session " << id_ << " not stored: " << e.what() << '\n';
      }
    }
    srv_.session_ended(id_);
  }

  Server::Impl& srv_;
  http::request<http::string_body> upgrade_;
  websocket::stream<beast::tcp_stream> ws_;
  net::steady_timer timer_;
  beast::flat_buffer buffer_;
  std::string id_;
  Engine engine_;
  protocol::InputSampler sampler_;
  std::chrono::steady_clock::duration period_{};
  std::chrono::steady_clock::time_point next_;
  std::deque<std::string> queue_;
  bool writing_ = false;
  bool closing_ = false;
  bool finalized_ = false;
  std::optional<websocket::close_code> close_after_;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(Server::Impl& srv, tcp::socket socket) : srv_(srv), stream_(std::move(socket)) {}

  void start() {
    net::dispatch(stream_.get_executor(), [self = shared_from_this()] { self->do_read(); });
  }

 private:
  void do_read() {
    parser_.emplace();
    parser_->body_limit(kMaxBodyBytes);
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, *parser_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      beast::error_code ignored;
      stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
      return;
    }
    auto req = parser_->release();
    if (websocket::is_upgrade(req)) {
      upgrade(std::move(req));
      return;
    }
    // Request handling may read many files; keep it off the I/O threads.
    auto shared_req = std::make_shared<http::request<http::string_body>>(std::move(req));
    net::post(srv_.workers, [self = shared_from_this(), shared_req] {
      Reply reply = self->srv_.handle(*shared_req);
      net::post(self->stream_.get_executor(),
                [self, shared_req, reply = std::move(reply)]() mutable { self->respond(*shared_req, std::move(reply)); });
    });
  }

  void upgrade(http::request<http::string_body> req) {
    const Target target = split_target(sv(req.target()));
    auto reject = [&](Reply r) { respond(req, std::move(r)); };
    if (target.path != "/ws") return reject(error_reply(http::status::not_found, ErrorCode::NotFound, "no such socket"));
    std::string token;
    if (auto it = target.query.find("token"); it != target.query.end()) token = it->second;
    if (const auto auth = sv(req[http::field::authorization]); auth.starts_with("Bearer "))
      token = std::string(auth.substr(7));
    if (srv_.opt.token.empty() || token != srv_.opt.token)
      return reject(error_reply(http::status::unauthorized, ErrorCode::InvalidArgument, "invalid token"));

    session::SessionHeader header;
    header.config = srv_.opt.config;
    try {
      auto q = target.query;
      if (q.contains("mode")) {
        const auto m = coach::mode_from_string(q["mode"]);
        if (!m) fail(ErrorCode::InvalidArgument, "unknown mode '" + q["mode"] + "'");
        header.mode = *m;
      }
      header.participant = q.contains("participant") ? q["participant"] : "anonymous";
      if (!valid_id(header.participant)) fail(ErrorCode::InvalidArgument, "participant must match [A-Za-z0-9_.-]+");
      if (q.contains("handedness")) {
        if (q["handedness"] != "left" && q["handedness"] != "right")
          fail(ErrorCode::InvalidArgument, "handedness must be left or right");
        header.handedness = q["handedness"] == "left" ? task::Side::Left : task::Side::Right;
      }
      if (q.contains("start_segment")) {
        std::size_t used = 0;
        header.config.start_segment = std::stoi(q["start_segment"], &used);
        if (used != q["start_segment"].size()) fail(ErrorCode::InvalidArgument, "start_segment must be an integer");
      }
      const std::string id = srv_.allocate_id(header.participant);
      SessionInfo info{id, header.participant, coach::to_string(header.mode), true, false};
      auto live = std::make_shared<LiveSession>(srv_, stream_.release_socket(), id, std::move(header));
      {
        std::lock_guard lock(srv_.mu);
        srv_.live_info[id] = info;
        srv_.live[id] = live;
      }
      live->start(std::move(req));
    } catch (const std::invalid_argument&) {
      reject(error_reply(http::status::bad_request, ErrorCode::InvalidArgument, "start_segment must be an integer"));
    } catch (const std::out_of_range&) {
      reject(error_reply(http::status::bad_request, ErrorCode::InvalidArgument, "start_segment out of range"));
    } catch (const Error& e) {
      reject(error_reply(status_for(e.code()), e.code(), e.what()));
    }
  }

  void respond(const http::request<http::string_body>& req, Reply reply) {
    auto res = std::make_shared<http::response<http::string_body>>(reply.status, req.version());
    res->set(http::field::server, "vcoach");
    res->set(http::field::content_type, reply.content_type);
    res->keep_alive(req.keep_alive());
    res->body() = std::move(reply.body);
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (!res->keep_alive()) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        return;
      }
      self->do_read();
    });
  }

  Server::Impl& srv_;
  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
};

}  // namespace

std::string Server::Impl::allocate_id(const std::string& participant) {
  std::lock_guard lock(mu);
  for (;;) {
    char serial[16];
    std::snprintf(serial, sizeof serial, "%04d", next_serial++);
    std::string id = participant + "-" + serial;
    if (!live_info.contains(id) && !std::filesystem::exists(session_path(id))) return id;
  }
}

void Server::Impl::session_ended(const std::string& id) {
  std::lock_guard lock(mu);
  live_info.erase(id);
  live.erase(id);
}

std::vector<SessionInfo> Server::Impl::list() const {
  std::vector<SessionInfo> out;
  std::error_code ec;
  if (std::filesystem::is_directory(sessions_dir(), ec)) {
    for (const auto& e : std::filesystem::directory_iterator(sessions_dir(), ec)) {
      if (!e.is_regular_file() || e.path().extension() != ".vcs") continue;
      if (auto info = stored_info(e.path())) out.push_back(std::move(*info));
    }
  }
  {
    std::lock_guard lock(mu);
    for (const auto& [id, info] : live_info) out.push_back(info);
  }
  std::sort(out.begin(), out.end(), [](const SessionInfo& a, const SessionInfo& b) { return a.id < b.id; });
  return out;
}

Reply Server::Impl::report(const http::request<http::string_body>& req, const Target& target) const {
  Json manifest;
  try {
    manifest = Json::parse(req.body());
  } catch (const Json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed manifest: ") + e.what());
  }
  if (!manifest.is_object()) fail(ErrorCode::InvalidArgument, "manifest must be an object");
  std::vector<analytics::ParticipantSeries> series;
  for (auto [key, arm] : {std::pair{"experimental", analytics::Arm::Experimental},
                          std::pair{"control", analytics::Arm::Control}}) {
    const Json& entries = io::require(manifest, key);
    if (!entries.is_array()) fail(ErrorCode::InvalidArgument, std::string(key) + " must be an array");
    for (const auto& entry : entries) {
      analytics::ParticipantSeries s;
      s.participant = io::require_string(entry, "participant");
      s.arm = arm;
      const Json& sessions = io::require(entry, "sessions");
      if (!sessions.is_object()) fail(ErrorCode::InvalidArgument, "sessions must map labels to session ids");
      for (const auto& [label, id_json] : sessions.items()) {
        if (!id_json.is_string()) fail(ErrorCode::InvalidArgument, "session id must be a string");
        const std::string id = id_json.get<std::string>();
        if (!valid_id(id)) fail(ErrorCode::NotFound, "unknown session '" + id + "'");
        if (std::find(analytics::kLabels.begin(), analytics::kLabels.end(), label) == analytics::kLabels.end())
          fail(ErrorCode::InvalidArgument, "unknown repetition label '" + label + "'");
        const auto path = session_path(id);
        if (!std::filesystem::exists(path)) fail(ErrorCode::NotFound, "unknown session '" + id + "'");
        const auto rec = session::read_file(path);
        if (!rec.footer) fail(ErrorCode::Integrity, "session '" + id + "' has no footer");
        s.repetitions.push_back({label, *rec.footer});
      }
      series.push_back(std::move(s));
    }
  }
  const auto r = analytics::report(series);
  const auto it = target.query.find("format");
  const std::string format = it == target.query.end() ? "json" : it->second;
  if (format == "json") return {http::status::ok, "application/json", analytics::report_json(r)};
  if (format == "text") return {http::status::ok, "text/plain; charset=utf-8", analytics::format_table(r)};
  if (format == "csv") return {http::status::ok, "text/csv; charset=utf-8", analytics::grid_csv(r)};
  fail(ErrorCode::InvalidArgument, "format must be json, text or csv");
}

Reply Server::Impl::handle(const http::request<http::string_body>& req) const {
  const Target target = split_target(sv(req.target()));
  const auto parts = path_parts(target.path);
  try {
    if (!parts.empty() && parts[0] == "sessions") {
      if (req.method() != http::verb::get)
        return error_reply(http::status::method_not_allowed, ErrorCode::InvalidArgument, "use GET");
      if (parts.size() == 1) {
        Json a = Json::array();
        for (const auto& s : list()) a.push_back(info_json(s));
        return {http::status::ok, "application/json", a.dump()};
      }
      const std::string id(parts[1]);
      if (!valid_id(id) || !std::filesystem::exists(session_path(id)) || parts.size() > 3 ||
          (parts.size() == 3 && parts[2] != "metrics"))
        return error_reply(http::status::not_found, ErrorCode::NotFound, "unknown session '" + id + "'");
      if (parts.size() == 2) return {http::status::ok, "application/x-ndjson", read_text(session_path(id))};
      const auto metrics = session::replay(session::read_file(session_path(id)));
      return {http::status::ok, "application/json", io::to_json(metrics).dump()};
    }
    if (parts.size() == 1 && parts[0] == "reports") {
      if (req.method() != http::verb::post)
        return error_reply(http::status::method_not_allowed, ErrorCode::InvalidArgument, "use POST");
      return report(req, target);
    }
    if (parts.size() == 2 && parts[0] == "clips") {
      if (req.method() != http::verb::get)
        return error_reply(http::status::method_not_allowed, ErrorCode::InvalidArgument, "use GET");
      int segment = -1;
      const auto [p, ec] = std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), segment);
      if (ec != std::errc{} || p != parts[1].data() + parts[1].size())
        return error_reply(http::status::not_found, ErrorCode::NotFound, "no clip '" + std::string(parts[1]) + "'");
      const session::ClipStore store(clips_dir());
      const auto clip = store.clip(segment);
      return {http::status::ok, "application/x-ndjson", session::serialize(clip.record)};
    }
    return error_reply(http::status::not_found, ErrorCode::NotFound, "no route for " + target.path);
  } catch (const Error& e) {
    return error_reply(status_for(e.code()), e.code(), e.what());
  } catch (const std::exception& e) {
    return error_reply(http::status::internal_server_error, ErrorCode::Internal, e.what());
  }
}

void Server::Impl::do_accept() {
  acceptor->async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (ec == net::error::operation_aborted || !acceptor->is_open()) return;
    if (!ec) std::make_shared<HttpConnection>(*this, std::move(socket))->start();
    do_accept();
  });
}

Server::Server(ServiceOptions options) : impl_(std::make_shared<Impl>(std::move(options))) {
  if (impl_->opt.speed <= 0.0) fail(ErrorCode::InvalidArgument, "speed must be positive");
  if (impl_->opt.threads < 1) fail(ErrorCode::InvalidArgument, "threads must be at least 1");
  impl_->opt.config.task.validate();
  impl_->opt.config.thresholds.validate();
}

Server::~Server() { stop(); }

void Server::start() {
  Impl& s = *impl_;
  {
    std::lock_guard lock(s.mu);
    if (s.started) fail(ErrorCode::InvalidArgument, "server already started");
    s.started = true;
  }
  std::filesystem::create_directories(s.sessions_dir());
  beast::error_code ec;
  const auto addr = net::ip::make_address(s.opt.address, ec);
  if (ec) fail(ErrorCode::InvalidArgument, "bad address '" + s.opt.address + "'");
  const tcp::endpoint ep(addr, s.opt.port);
  s.acceptor.emplace(net::make_strand(s.ioc));
  s.acceptor->open(ep.protocol(), ec);
  if (!ec) s.acceptor->set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) s.acceptor->bind(ep, ec);
  if (!ec) s.acceptor->listen(net::socket_base::max_listen_connections, ec);
  if (ec) fail(ErrorCode::Io, "cannot listen on " + s.opt.address + ":" + std::to_string(s.opt.port) + ": " + ec.message());
  s.bound_port = s.acceptor->local_endpoint().port();
  s.guard.emplace(net::make_work_guard(s.ioc));
  s.do_accept();
  for (int i = 0; i < s.opt.threads; ++i) s.threads.emplace_back([&s] { s.ioc.run(); });
}

uint16_t Server::port() const { return impl_->bound_port; }

void Server::stop() {
  Impl& s = *impl_;
  {
    std::lock_guard lock(s.mu);
    if (!s.started || s.stopped) return;
    s.stopped = true;
  }
  // Close the acceptor, then finalize every live session on its own strand.
  auto closed = std::make_shared<std::promise<void>>();
  auto closed_future = closed->get_future();
  net::post(s.acceptor->get_executor(), [&s, closed] {
    beast::error_code ec;
    s.acceptor->close(ec);
    closed->set_value();
  });
  closed_future.wait_for(std::chrono::seconds(5));
  std::vector<std::shared_ptr<LiveSession>> live;
  {
    std::lock_guard lock(s.mu);
    for (auto& [id, w] : s.live)
      if (auto p = w.lock()) live.push_back(std::move(p));
  }
  std::vector<std::future<void>> done;
  for (auto& p : live) {
    auto pr = std::make_shared<std::promise<void>>();
    done.push_back(pr->get_future());
    net::post(p->executor(), [p, pr] {
      p->shutdown();
      pr->set_value();
    });
  }
  for (auto& f : done) f.wait_for(std::chrono::seconds(10));
  s.guard.reset();
  s.ioc.stop();
  for (auto& t : s.threads) t.join();
  s.threads.clear();
  s.workers.join();
}

void Server::run_until_signal() {
  net::io_context sig_ctx;
  net::signal_set signals(sig_ctx, SIGINT, SIGTERM);
  signals.async_wait([](beast::error_code, int) {});
  sig_ctx.run();
  stop();
}

std::vector<SessionInfo> Server::sessions() const { return impl_->list(); }

}  // namespace vcoach::service
