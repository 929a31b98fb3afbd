#include "chunkforge/netstore/client.hpp"

namespace chunkforge::netstore {

Connection::Connection(const castore::NodeAddress& addr)
    : sock_(Socket::connect(addr.host, addr.port)) {}

Frame Connection::request(std::uint8_t opcode,
                          std::vector<std::uint8_t> payload) {
    std::lock_guard lock(mu_);
    Frame req;
    req.opcode = opcode;
    req.request_id = next_request_id_++;
    req.payload = std::move(payload);
    sock_.send_frame(req);

    Frame resp;
    if (!sock_.recv_frame(resp))
        throw castore::TransportError("connection closed by peer");
    if (resp.request_id != req.request_id)
        throw castore::TransportError("response id does not match request");
    if (resp.opcode == op::kError)
        throw_wire_error(parse_error(resp.payload));
    if (resp.opcode != (opcode | op::kResponseBit))
        throw castore::TransportError("unexpected response opcode");
    return resp;
}

std::uint64_t Connection::bytes_sent() const {
    std::lock_guard lock(mu_);
    return sock_.bytes_sent();
}

std::uint64_t Connection::bytes_received() const {
    std::lock_guard lock(mu_);
    return sock_.bytes_received();
}

RemoteBlockStore::RemoteBlockStore(const castore::NodeAddress& addr)
    : conn_(addr) {}

void RemoteBlockStore::put_block(const Digest& digest,
                                 hashcore::ByteView bytes) {
    conn_.request(op::kPutBlock, payload_put_block(digest, bytes));
    std::lock_guard lock(mu_);
    counters_.blocks_put++;
    counters_.data_bytes_put += bytes.size();
}

std::vector<std::uint8_t> RemoteBlockStore::get_block(const Digest& digest) {
    Frame resp = conn_.request(op::kGetBlock, payload_digest(digest));
    {
        std::lock_guard lock(mu_);
        counters_.blocks_fetched++;
        counters_.data_bytes_fetched += resp.payload.size();
    }
    return std::move(resp.payload);
}

bool RemoteBlockStore::has_block(const Digest& digest) {
    Frame resp = conn_.request(op::kHasBlock, payload_digest(digest));
    return !resp.payload.empty() && resp.payload[0] != 0;
}

castore::TransferCounters RemoteBlockStore::counters() const {
    std::lock_guard lock(mu_);
    return counters_;
}

ManagerClient::ManagerClient(const castore::NodeAddress& addr) : conn_(addr) {}

std::optional<castore::BlockMap>
ManagerClient::get_blockmap(const std::string& file_id) {
    try {
        Frame resp =
            conn_.request(op::kGetBlockMap, payload_get_blockmap(file_id));
        return castore::parse_blockmap(
            {resp.payload.data(), resp.payload.size()});
    } catch (const castore::NotFoundError&) {
        return std::nullopt;
    }
}

void ManagerClient::put_blockmap(const castore::BlockMap& map,
                                 std::optional<std::uint64_t> expected_prev) {
    conn_.request(op::kPutBlockMap, payload_put_blockmap(expected_prev, map));
}

std::vector<castore::NodeAddress> ManagerClient::list_nodes() {
    Frame resp = conn_.request(op::kListNodes, {});
    return parse_node_list({resp.payload.data(), resp.payload.size()});
}

void ManagerClient::register_node(const castore::NodeAddress& addr) {
    conn_.request(op::kRegisterNode, payload_register_node(addr));
}

RemoteStore connect_store(const castore::NodeAddress& manager_addr,
                          castore::StoreConfig cfg) {
    RemoteStore remote;
    remote.manager = std::make_unique<ManagerClient>(manager_addr);
    for (const auto& node : remote.manager->list_nodes())
        remote.nodes.push_back(std::make_shared<RemoteBlockStore>(node));
    remote.store = std::make_unique<castore::Store>(*remote.manager,
                                                    remote.nodes, cfg);
    return remote;
}

} // namespace chunkforge::netstore
