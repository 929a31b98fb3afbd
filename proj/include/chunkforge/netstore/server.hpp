#ifndef CHUNKFORGE_NETSTORE_SERVER_HPP
#define CHUNKFORGE_NETSTORE_SERVER_HPP

#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "chunkforge/castore/store.hpp"
#include "chunkforge/netstore/net.hpp"

namespace chunkforge::netstore {

// Thread-per-connection frame server; request handling is delegated to a
// dispatch function that maps one request frame to one response frame.
class FrameServer {
public:
    using Handler = std::function<Frame(const Frame&)>;

    FrameServer(std::uint16_t port, Handler handler);
    ~FrameServer();

    std::uint16_t port() const { return listener_.bound_port(); }
    void stop();

private:
    void accept_loop();
    void serve_connection(Socket sock);

    Listener listener_;
    Handler handler_;
    std::atomic<bool> stopping_{false};
    std::thread accept_thread_;
    std::mutex mu_;
    std::vector<std::thread> connections_;
};

// Storage node: PUT_BLOCK / GET_BLOCK / HAS_BLOCK over an in-memory
// content-addressed block store. Registers itself with the manager when a
// manager address is given.
class NodeServer {
public:
    struct Options {
        std::uint16_t port = 0;
        hashcore::SegmentedHashParams digest_params;
        bool verify_puts = true;
        std::uint64_t capacity_bytes = 0;
        std::string advertised_host = "127.0.0.1";
    };

    explicit NodeServer(Options opts);

    std::uint16_t port() const { return server_.port(); }
    castore::NodeAddress address() const {
        return {opts_.advertised_host, port()};
    }
    castore::MemoryBlockStore& store() { return store_; }

    void register_with(const castore::NodeAddress& manager);

private:
    Frame handle(const Frame& request);

    Options opts_;
    castore::MemoryBlockStore store_;
    FrameServer server_;
};

// Metadata manager: block-map CAS storage plus the node registry.
class ManagerServer {
public:
    explicit ManagerServer(std::uint16_t port = 0);

    std::uint16_t port() const { return server_.port(); }
    castore::MemoryMetadataService& service() { return meta_; }

private:
    Frame handle(const Frame& request);

    castore::MemoryMetadataService meta_;
    FrameServer server_;
};

} // namespace chunkforge::netstore

#endif
