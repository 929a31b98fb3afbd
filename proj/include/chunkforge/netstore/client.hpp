#ifndef CHUNKFORGE_NETSTORE_CLIENT_HPP
#define CHUNKFORGE_NETSTORE_CLIENT_HPP

#include <memory>
#include <mutex>

#include "chunkforge/castore/store.hpp"
#include "chunkforge/netstore/net.hpp"

namespace chunkforge::netstore {

// One connection; request/response pairs are matched by request_id.
// Thread-safe: concurrent callers are serialized on the socket.
class Connection {
public:
    explicit Connection(const castore::NodeAddress& addr);

    Frame request(std::uint8_t opcode, std::vector<std::uint8_t> payload);

    std::uint64_t bytes_sent() const;
    std::uint64_t bytes_received() const;

private:
    mutable std::mutex mu_;
    Socket sock_;
    std::uint64_t next_request_id_ = 1;
};

// BlockStore over a storage-node connection. blocks_put/data_bytes_put count
// exactly the block payload bytes that crossed the wire.
class RemoteBlockStore : public castore::BlockStore {
public:
    explicit RemoteBlockStore(const castore::NodeAddress& addr);

    void put_block(const Digest& digest, hashcore::ByteView bytes) override;
    std::vector<std::uint8_t> get_block(const Digest& digest) override;
    bool has_block(const Digest& digest) override;
    castore::TransferCounters counters() const override;

private:
    Connection conn_;
    mutable std::mutex mu_;
    castore::TransferCounters counters_;
};

class ManagerClient : public castore::MetadataService {
public:
    explicit ManagerClient(const castore::NodeAddress& addr);

    std::optional<castore::BlockMap>
    get_blockmap(const std::string& file_id) override;
    void put_blockmap(const castore::BlockMap& map,
                      std::optional<std::uint64_t> expected_prev) override;
    std::vector<castore::NodeAddress> list_nodes() override;
    void register_node(const castore::NodeAddress& addr) override;

private:
    Connection conn_;
};

// Connects to the manager, discovers the registered storage nodes and builds
// a castore::Store over remote services.
struct RemoteStore {
    std::unique_ptr<ManagerClient> manager;
    std::vector<std::shared_ptr<castore::BlockStore>> nodes;
    std::unique_ptr<castore::Store> store;
};

RemoteStore connect_store(const castore::NodeAddress& manager_addr,
                          castore::StoreConfig cfg);

} // namespace chunkforge::netstore

#endif
