#ifndef CHUNKFORGE_NETSTORE_NET_HPP
#define CHUNKFORGE_NETSTORE_NET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "chunkforge/netstore/frame.hpp"

namespace chunkforge::netstore {

// Thin RAII wrapper over a connected TCP stream socket.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    ~Socket() { close(); }
    Socket(Socket&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
    Socket& operator=(Socket&& o) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;

    static Socket connect(const std::string& host, std::uint16_t port);

    bool valid() const { return fd_ >= 0; }
    void send_all(std::span<const std::uint8_t> data);
    // false on clean EOF at a frame boundary
    bool recv_exact(std::uint8_t* out, std::size_t n);

    void send_frame(const Frame& frame);
    bool recv_frame(Frame& out);

    void close();

    std::uint64_t bytes_sent() const { return bytes_sent_; }
    std::uint64_t bytes_received() const { return bytes_received_; }

private:
    int fd_ = -1;
    std::uint64_t bytes_sent_ = 0;
    std::uint64_t bytes_received_ = 0;
};

class Listener {
public:
    // port 0 picks a free port; bound_port() reports the actual one
    explicit Listener(std::uint16_t port, const std::string& host = "0.0.0.0");
    ~Listener() { close(); }
    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;

    Socket accept();
    void close(); // unblocks accept()
    std::uint16_t bound_port() const { return port_; }

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

} // namespace chunkforge::netstore

#endif
