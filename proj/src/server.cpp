#include "chunkforge/netstore/server.hpp"

#include "chunkforge/netstore/client.hpp"
#include "chunkforge/wire.hpp"

namespace chunkforge::netstore {

namespace {

Frame error_frame(std::uint64_t request_id, std::uint16_t code,
                  const std::string& message) {
    Frame f;
    f.opcode = op::kError;
    f.request_id = request_id;
    f.payload = payload_error(code, message);
    return f;
}

Frame ok_frame(const Frame& request, std::vector<std::uint8_t> payload = {}) {
    Frame f;
    f.opcode = request.opcode | op::kResponseBit;
    f.request_id = request.request_id;
    f.payload = std::move(payload);
    return f;
}

// runs the handler body and translates exceptions to wire errors
template <typename Fn>
Frame guarded(const Frame& request, Fn&& fn) {
    try {
        return fn();
    } catch (const castore::NotFoundError& e) {
        return error_frame(request.request_id, errc::kNotFound, e.what());
    } catch (const castore::ConflictError& e) {
        return error_frame(request.request_id, errc::kConflict, e.what());
    } catch (const castore::IntegrityError& e) {
        return error_frame(request.request_id, errc::kIntegrity, e.what());
    } catch (const castore::CapacityError& e) {
        return error_frame(request.request_id, errc::kCapacity, e.what());
    } catch (const std::exception& e) {
        return error_frame(request.request_id, errc::kMalformed, e.what());
    }
}

} // namespace

FrameServer::FrameServer(std::uint16_t port, Handler handler)
    : listener_(port), handler_(std::move(handler)) {
    accept_thread_ = std::thread([this] { accept_loop(); });
}

FrameServer::~FrameServer() { stop(); }

void FrameServer::stop() {
    bool expected = false;
    if (!stopping_.compare_exchange_strong(expected, true)) return;
    listener_.close();
    if (accept_thread_.joinable()) accept_thread_.join();
    std::lock_guard lock(mu_);
    for (auto& t : connections_)
        if (t.joinable()) t.join();
}

void FrameServer::accept_loop() {
    for (;;) {
        Socket sock = listener_.accept();
        if (!sock.valid()) return;
        std::lock_guard lock(mu_);
        if (stopping_) return;
        connections_.emplace_back(
            [this, s = std::move(sock)]() mutable { serve_connection(std::move(s)); });
    }
}

void FrameServer::serve_connection(Socket sock) {
    Frame request;
    try {
        // requests on one connection are processed in order
        while (!stopping_ && sock.recv_frame(request))
            sock.send_frame(handler_(request));
    } catch (const std::exception&) {
        // connection torn down; peer sees the closed socket
    }
}

NodeServer::NodeServer(Options opts)
    : opts_(opts),
      store_(opts.digest_params, opts.verify_puts, opts.capacity_bytes),
      server_(opts.port, [this](const Frame& f) { return handle(f); }) {}

Frame NodeServer::handle(const Frame& request) {
    return guarded(request, [&]() -> Frame {
        switch (request.opcode) {
        case op::kPutBlock: {
            auto req = parse_put_block(request.payload);
            store_.put_block(req.digest, {req.data.data(), req.data.size()});
            return ok_frame(request);
        }
        case op::kGetBlock: {
            auto digest = parse_digest(request.payload);
            return ok_frame(request, store_.get_block(digest));
        }
        case op::kHasBlock: {
            auto digest = parse_digest(request.payload);
            return ok_frame(request,
                            {store_.has_block(digest) ? std::uint8_t{1}
                                                      : std::uint8_t{0}});
        }
        default:
            return error_frame(request.request_id, errc::kMalformed,
                               "unsupported opcode on storage node");
        }
    });
}

void NodeServer::register_with(const castore::NodeAddress& manager) {
    ManagerClient client(manager);
    client.register_node(address());
}

ManagerServer::ManagerServer(std::uint16_t port)
    : server_(port, [this](const Frame& f) { return handle(f); }) {}

Frame ManagerServer::handle(const Frame& request) {
    return guarded(request, [&]() -> Frame {
        switch (request.opcode) {
        case op::kGetBlockMap: {
            auto file_id = parse_get_blockmap(request.payload);
            auto map = meta_.get_blockmap(file_id);
            if (!map) throw castore::NotFoundError("unknown file: " + file_id);
            return ok_frame(request, castore::serialize_blockmap(*map));
        }
        case op::kPutBlockMap: {
            auto req = parse_put_blockmap(request.payload);
            meta_.put_blockmap(req.map, req.expected_version);
            return ok_frame(request);
        }
        case op::kListNodes:
            return ok_frame(request, payload_node_list(meta_.list_nodes()));
        case op::kRegisterNode: {
            meta_.register_node(parse_register_node(request.payload));
            return ok_frame(request);
        }
        default:
            return error_frame(request.request_id, errc::kMalformed,
                               "unsupported opcode on manager");
        }
    });
}

} // namespace chunkforge::netstore
