#include "doctest.h"

#include <stdexcept>
#include <cstring>

#include "test_util.hpp"

using namespace chunkforge;
using namespace chunkforge::hashcore;

namespace {

ByteView sv(const char* s) {
    return {reinterpret_cast<const std::uint8_t*>(s), std::strlen(s)};
}

} // namespace

TEST_CASE("md5 matches the RFC 1321 reference vectors") {
    CHECK(base_hash(sv(""), HashAlgorithm::md5).hex() ==
          "d41d8cd98f00b204e9800998ecf8427e");
    CHECK(base_hash(sv("a"), HashAlgorithm::md5).hex() ==
          "0cc175b9c0f1b6a831c399e269772661");
    CHECK(base_hash(sv("abc"), HashAlgorithm::md5).hex() ==
          "900150983cd24fb0d6963f7d28e17f72");
    CHECK(base_hash(sv("message digest"), HashAlgorithm::md5).hex() ==
          "f96b697d7cb7938d525a2f31aaf161d0");
    CHECK(base_hash(sv("abcdefghijklmnopqrstuvwxyz"), HashAlgorithm::md5)
              .hex() == "c3fcd3d76192e4007dfb496cca67e13b");
    CHECK(base_hash(
              sv("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789"),
              HashAlgorithm::md5)
              .hex() == "d174ab98d277d9f5a5611c2c9f419d9f");
    CHECK(base_hash(sv("1234567890123456789012345678901234567890123456789012"
                       "3456789012345678901234567890"),
                    HashAlgorithm::md5)
              .hex() == "57edf4a22be3c955ac49da2e2107b67a");
}

TEST_CASE("base_hash is deterministic and incremental updates agree") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        auto data = testutil::random_bytes(1 + rng() % 5000, rng);
        CHECK(base_hash(testutil::view(data), HashAlgorithm::md5) ==
              base_hash(testutil::view(data), HashAlgorithm::md5));

        Md5 ctx;
        std::size_t off = 0;
        while (off < data.size()) {
            std::size_t n = std::min<std::size_t>(1 + rng() % 100,
                                                  data.size() - off);
            ctx.update({data.data() + off, n});
            off += n;
        }
        auto sum = ctx.finish();
        CHECK(std::memcmp(sum.data(),
                          base_hash(testutil::view(data), HashAlgorithm::md5)
                              .bytes.data(),
                          16) == 0);
    }
}

TEST_CASE("direct_hash empty input hashes the empty concatenation") {
    SegmentedHashParams p;
    p.segment_size = 64;
    CHECK(direct_hash({}, p) == base_hash({}, HashAlgorithm::md5));
}

TEST_CASE("direct_hash abc with 1-byte segments") {
    SegmentedHashParams p;
    p.segment_size = 1;
    std::vector<std::uint8_t> concat;
    for (const char* s : {"a", "b", "c"}) {
        auto d = base_hash(sv(s), HashAlgorithm::md5);
        concat.insert(concat.end(), d.bytes.begin(),
                      d.bytes.begin() + d.len);
    }
    CHECK(direct_hash(sv("abc"), p) ==
          base_hash(testutil::view(concat), HashAlgorithm::md5));
}

TEST_CASE("direct_hash equals the reference construction and is partition "
          "invariant") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        auto data = testutil::random_bytes(rng() % 100000, rng);
        SegmentedHashParams p;
        p.segment_size = 1 + rng() % 9000;
        Digest expected = testutil::reference_segmented_hash(
            testutil::view(data), p.segment_size);
        for (unsigned workers : {1u, 2u, 8u})
            CHECK(direct_hash(testutil::view(data), p, workers) == expected);
    }
}

TEST_CASE("direct_hash rejects invalid params and unknown algorithms") {
    SegmentedHashParams p;
    p.segment_size = 0;
    CHECK_THROWS_AS(direct_hash({}, p), std::invalid_argument);
    CHECK_THROWS_AS(base_hash({}, static_cast<HashAlgorithm>(99)),
                    std::invalid_argument);
}

TEST_CASE("window_hashes basic shapes") {
    WindowHashParams p;
    p.window = 2;
    p.stride = 1;

    CHECK(window_hashes(sv("a"), p).empty()); // shorter than the window

    auto one = window_hashes(sv("ab"), p);
    REQUIRE(one.size() == 1);
    CHECK(one[0].offset == 0);

    auto three = window_hashes(sv("abcd"), p);
    REQUIRE(three.size() == 3);
    CHECK(three[0].digest == base_hash(sv("ab"), HashAlgorithm::md5));
    CHECK(three[1].digest == base_hash(sv("bc"), HashAlgorithm::md5));
    CHECK(three[2].digest == base_hash(sv("cd"), HashAlgorithm::md5));
}

TEST_CASE("window_hashes matches per-slice base_hash exhaustively") {
    std::mt19937_64 rng(13);
    auto data = testutil::random_bytes(4096, rng);
    for (std::size_t stride : {1, 3, 7}) {
        WindowHashParams p;
        p.window = 48;
        p.stride = stride;
        auto hashes = window_hashes(testutil::view(data), p, 4);
        const std::size_t expect_count =
            (data.size() - p.window) / p.stride + 1;
        REQUIRE(hashes.size() == expect_count);
        for (std::size_t k = 0; k < hashes.size(); ++k) {
            CHECK(hashes[k].offset == k * stride);
            CHECK(hashes[k].digest ==
                  base_hash({data.data() + hashes[k].offset, p.window},
                            HashAlgorithm::md5));
        }
    }
}

TEST_CASE("window_hashes is worker-count invariant") {
    std::mt19937_64 rng(17);
    auto data = testutil::random_bytes(20000, rng);
    WindowHashParams p;
    p.window = 32;
    p.stride = 5;
    auto a = window_hashes(testutil::view(data), p, 1);
    auto b = window_hashes(testutil::view(data), p, 8);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].offset == b[i].offset);
        CHECK(a[i].digest == b[i].digest);
    }
}

TEST_CASE("is_boundary edge cases") {
    Digest zero;
    zero.len = 16;
    CHECK(is_boundary(zero, 0, 0)); // empty mask matches everything
    CHECK(is_boundary(zero, 13, 0));
    CHECK(is_boundary(zero, 32, 0));

    Digest d = zero;
    d.bytes[0] = 1;
    CHECK_FALSE(is_boundary(d, 13, 0));
    CHECK(is_boundary(d, 13, 1));
    CHECK(is_boundary(d, 0, 0));
}

TEST_CASE("is_boundary frequency approximates 2^-b") {
    std::mt19937_64 rng(23);
    const unsigned bits = 13;
    const int samples = 1000000;
    int hits = 0;
    for (int i = 0; i < samples; ++i) {
        Digest d;
        d.len = 16;
        std::uint64_t v = rng();
        std::memcpy(d.bytes.data(), &v, 8);
        if (is_boundary(d, bits, 0)) ++hits;
    }
    const double expected = samples / 8192.0;
    CHECK(hits >= 0.7 * expected);
    CHECK(hits <= 1.3 * expected);
}
