#pragma once

#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <optional>
#include <random>
#include <string>

#include "webforge/util.hpp"

namespace webforge::ws {

inline std::string accept_key_for(const std::string& key) {
  auto digest = sha1(key + "258EAFA5-E914-47DA-95CA-C5AB0DC85B11");
  return base64_encode(std::string(digest.begin(), digest.end()));
}

// Minimal RFC 6455 client: text frames, masking, fragmentation, ping/pong.
class Client {
 public:
  Client(const std::string& host, int port, const std::string& path,
         double timeout_s = 10) {
    connect_socket(host, port, timeout_s);
    handshake(host, port, path, timeout_s);
  }

  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  ~Client() { close(); }

  void close() {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
  }

  void send_text(const std::string& payload) { send_frame(0x1, payload); }

  // One complete text message, or nullopt when the deadline passes first.
  std::optional<std::string> recv_text(double timeout_s) {
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(timeout_s));
    std::string message;
    bool in_message = false;
    for (;;) {
      if (!ensure(2, deadline)) return std::nullopt;
      uint8_t b0 = uint8_t(buffer_[0]);
      uint8_t b1 = uint8_t(buffer_[1]);
      bool fin = b0 & 0x80;
      uint8_t opcode = b0 & 0x0f;
      bool masked = b1 & 0x80;
      uint64_t len = b1 & 0x7f;
      size_t header = 2;
      if (len == 126) {
        if (!ensure(4, deadline)) return std::nullopt;
        len = (uint64_t(uint8_t(buffer_[2])) << 8) | uint8_t(buffer_[3]);
        header = 4;
      } else if (len == 127) {
        if (!ensure(10, deadline)) return std::nullopt;
        len = 0;
        for (int i = 0; i < 8; ++i) len = (len << 8) | uint8_t(buffer_[2 + i]);
        header = 10;
      }
      size_t mask_at = header;
      if (masked) header += 4;
      if (!ensure(header + len, deadline)) return std::nullopt;
      std::string payload = buffer_.substr(header, len);
      if (masked)
        for (size_t i = 0; i < payload.size(); ++i)
          payload[i] = char(payload[i] ^ buffer_[mask_at + (i % 4)]);
      buffer_.erase(0, header + len);

      if (opcode == 0x9) {
        send_frame(0xA, payload);
        continue;
      }
      if (opcode == 0xA) continue;
      if (opcode == 0x8) {
        send_frame(0x8, {});
        throw RendererError("websocket closed by peer");
      }
      message += payload;
      if (fin && (opcode != 0x0 || in_message)) return message;
      in_message = true;
    }
  }

 private:
  int fd_ = -1;
  std::string buffer_;
  std::mt19937 rng_{std::random_device{}()};

  void connect_socket(const std::string& host, int port, double timeout_s) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 ||
        !res)
      throw RendererError("browser unreachable: cannot resolve " + host);
    int fd = -1;
    for (addrinfo* a = res; a; a = a->ai_next) {
      fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) break;
      ::close(fd);
      fd = -1;
    }
    freeaddrinfo(res);
    if (fd < 0)
      throw RendererError("browser unreachable: cannot connect to " + host + ":" +
                          std::to_string(port));
    timeval tv{};
    tv.tv_sec = long(timeout_s);
    tv.tv_usec = long((timeout_s - tv.tv_sec) * 1e6);
    setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
    fd_ = fd;
  }

  void handshake(const std::string& host, int port, const std::string& path,
                 double timeout_s) {
    std::string key_bytes(16, '\0');
    for (auto& c : key_bytes) c = char(rng_() & 0xff);
    std::string key = base64_encode(key_bytes);
    std::string request = "GET " + path +
                          " HTTP/1.1\r\n"
                          "Host: " +
                          host + ":" + std::to_string(port) +
                          "\r\n"
                          "Upgrade: websocket\r\n"
                          "Connection: Upgrade\r\n"
                          "Sec-WebSocket-Key: " +
                          key +
                          "\r\n"
                          "Sec-WebSocket-Version: 13\r\n\r\n";
    write_all(request.data(), request.size());

    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(timeout_s));
    size_t end;
    while ((end = buffer_.find("\r\n\r\n")) == std::string::npos)
      if (!read_more(deadline)) throw RendererError("websocket handshake timeout");
    std::string head = buffer_.substr(0, end + 4);
    buffer_.erase(0, end + 4);
    if (head.find(" 101 ") == std::string::npos)
      throw RendererError("websocket upgrade refused: " +
                          head.substr(0, head.find("\r\n")));
    std::string expected = accept_key_for(key);
    if (head.find(expected) == std::string::npos)
      throw RendererError("websocket accept key mismatch");
  }

  void send_frame(uint8_t opcode, const std::string& payload) {
    std::string f;
    f.push_back(char(0x80 | opcode));
    if (payload.size() < 126) {
      f.push_back(char(0x80 | payload.size()));
    } else if (payload.size() <= 0xffff) {
      f.push_back(char(0x80 | 126));
      f.push_back(char((payload.size() >> 8) & 0xff));
      f.push_back(char(payload.size() & 0xff));
    } else {
      f.push_back(char(0x80 | 127));
      for (int i = 7; i >= 0; --i)
        f.push_back(char((uint64_t(payload.size()) >> (8 * i)) & 0xff));
    }
    uint8_t mask[4];
    for (auto& m : mask) m = uint8_t(rng_() & 0xff);
    f.append(reinterpret_cast<char*>(mask), 4);
    size_t at = f.size();
    f += payload;
    for (size_t i = 0; i < payload.size(); ++i) f[at + i] = char(f[at + i] ^ mask[i % 4]);
    write_all(f.data(), f.size());
  }

  void write_all(const void* data, size_t n) {
    const char* p = static_cast<const char*>(data);
    while (n > 0) {
      ssize_t w = ::send(fd_, p, n, MSG_NOSIGNAL);
      if (w <= 0) throw RendererError("websocket send failed");
      p += w;
      n -= size_t(w);
    }
  }

  bool ensure(size_t n, std::chrono::steady_clock::time_point deadline) {
    while (buffer_.size() < n)
      if (!read_more(deadline)) return false;
    return true;
  }

  bool read_more(std::chrono::steady_clock::time_point deadline) {
    auto left = std::chrono::duration<double>(deadline - std::chrono::steady_clock::now())
                    .count();
    if (left <= 0) return false;
    pollfd pfd{fd_, POLLIN, 0};
    int rv = ::poll(&pfd, 1, int(left * 1000) + 1);
    if (rv == 0) return false;
    if (rv < 0) throw RendererError("websocket poll failed");
    char chunk[16384];
    ssize_t r = ::recv(fd_, chunk, sizeof(chunk), 0);
    if (r <= 0) throw RendererError("websocket connection closed");
    buffer_.append(chunk, size_t(r));
    return true;
  }
};

}  // namespace webforge::ws
