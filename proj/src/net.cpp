#include "chunkforge/netstore/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "chunkforge/castore/store.hpp"
#include "chunkforge/wire.hpp"

namespace chunkforge::netstore {

namespace {
[[noreturn]] void raise_errno(const std::string& what) {
    throw castore::TransportError(what + ": " + std::strerror(errno));
}
} // namespace

Socket& Socket::operator=(Socket&& o) noexcept {
    if (this != &o) {
        close();
        fd_ = o.fd_;
        bytes_sent_ = o.bytes_sent_;
        bytes_received_ = o.bytes_received_;
        o.fd_ = -1;
    }
    return *this;
}

Socket Socket::connect(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(port);
    if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &res) != 0 ||
        res == nullptr)
        throw castore::TransportError("cannot resolve " + host);

    int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (fd < 0) {
        ::freeaddrinfo(res);
        raise_errno("socket");
    }
    if (::connect(fd, res->ai_addr, res->ai_addrlen) != 0) {
        ::freeaddrinfo(res);
        ::close(fd);
        raise_errno("connect to " + host + ":" + service);
    }
    ::freeaddrinfo(res);
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return Socket(fd);
}

void Socket::send_all(std::span<const std::uint8_t> data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent,
                           MSG_NOSIGNAL);
        if (n <= 0) {
            if (n < 0 && errno == EINTR) continue;
            raise_errno("send");
        }
        sent += static_cast<std::size_t>(n);
    }
    bytes_sent_ += data.size();
}

bool Socket::recv_exact(std::uint8_t* out, std::size_t n) {
    std::size_t got = 0;
    while (got < n) {
        ssize_t r = ::recv(fd_, out + got, n - got, 0);
        if (r == 0) {
            if (got == 0) return false;
            throw castore::TransportError("connection closed mid-message");
        }
        if (r < 0) {
            if (errno == EINTR) continue;
            raise_errno("recv");
        }
        got += static_cast<std::size_t>(r);
    }
    bytes_received_ += n;
    return true;
}

void Socket::send_frame(const Frame& frame) {
    auto bytes = encode_frame(frame);
    send_all({bytes.data(), bytes.size()});
}

bool Socket::recv_frame(Frame& out) {
    std::uint8_t len_bytes[4];
    if (!recv_exact(len_bytes, 4)) return false;
    std::uint32_t total = 0;
    for (int i = 0; i < 4; ++i)
        total |= static_cast<std::uint32_t>(len_bytes[i]) << (8 * i);
    if (total < kFrameHeaderBytes ||
        total > kFrameHeaderBytes + kMaxPayloadBytes)
        throw wire::DecodeError("invalid frame length");

    std::vector<std::uint8_t> frame_bytes(total);
    std::memcpy(frame_bytes.data(), len_bytes, 4);
    if (!recv_exact(frame_bytes.data() + 4, total - 4))
        throw castore::TransportError("connection closed mid-frame");
    out = decode_frame({frame_bytes.data(), frame_bytes.size()});
    return true;
}

void Socket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

Listener::Listener(std::uint16_t port, const std::string& host) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) raise_errno("socket");
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
        addr.sin_addr.s_addr = INADDR_ANY;

    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
        raise_errno("bind");
    if (::listen(fd_, 64) != 0) raise_errno("listen");

    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

Socket Listener::accept() {
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) {
        if (errno == EINVAL || errno == EBADF)
            return Socket(); // listener closed
        raise_errno("accept");
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return Socket(fd);
}

void Listener::close() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

} // namespace chunkforge::netstore
