#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "bevcomm/rng.hpp"
#include "bevcomm/wire.hpp"

using namespace bevcomm;

namespace {

// Every value is pushed through a float cast before it enters the message so
// the 32-bit wire format can represent it exactly and round trips compare
// bit-for-bit.
double f32_exact(double v) { return static_cast<double>(static_cast<float>(v)); }

Message random_message(Lcg64& rng) {
    const int h = static_cast<int>(rng.next_int(1, 6));
    const int w = static_cast<int>(rng.next_int(1, 6));
    const int d = static_cast<int>(rng.next_int(1, 8));
    const GridShape g{h, w, d, 1.0};

    std::vector<double> req(static_cast<std::size_t>(g.cell_count()));
    for (double& v : req) v = f32_exact(rng.next_unit());

    std::vector<SparseCell> cells;
    for (int i = 0; i < g.cell_count(); ++i) {
        if (rng.next_unit() < 0.4) {
            SparseCell c;
            c.index = static_cast<std::uint32_t>(i);
            c.values.resize(static_cast<std::size_t>(d));
            for (double& v : c.values) v = f32_exact(rng.next_uniform(-8.0, 8.0));
            cells.push_back(std::move(c));
        }
    }

    return Message{static_cast<std::uint32_t>(rng.next_int(0, 9)),
                   static_cast<std::uint32_t>(rng.next_int(0, 9)),
                   static_cast<std::uint32_t>(rng.next_int(0, 3)),
                   ScalarMap(g, std::move(req)), std::move(cells)};
}

Message sample_message() {
    const GridShape g{2, 3, 2, 1.0};
    std::vector<double> req(6, 0.25);
    std::vector<SparseCell> cells(3);
    cells[0] = SparseCell{1, {1.5, -2.0}};
    cells[1] = SparseCell{2, {0.0, 4.25}};
    cells[2] = SparseCell{5, {-0.5, 3.0}};
    return Message{7, 1, 2, ScalarMap(g, std::move(req)), std::move(cells)};
}

}  // namespace

TEST_CASE("communication volume is log2 of the feature payload bytes") {
    CHECK(comm_volume(256, 64) == doctest::Approx(16.0).epsilon(1e-9));
    CHECK(comm_volume(1, 2) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(comm_volume(0, 64) == 0.0);
    CHECK(comm_volume(0, 1) == 0.0);
}

TEST_CASE("volume report accounts for every byte of the stream") {
    const Message m = sample_message();
    const VolumeReport r = measure_message(m);
    CHECK(r.payload_cells == 3);
    CHECK(r.channels == 2);
    CHECK(r.feature_bytes == 3 * 2 * 4);
    CHECK(r.index_bytes == 3 * 4);
    CHECK(r.request_bytes == 6 * 4);
    // 8 bytes of magic+version, 7 u32 header fields, request floats, then
    // one (index + channels) record per cell.
    CHECK(r.total_bytes == 8 + 28 + 24 + 12 + 24);
    CHECK(r.volume_log2 == doctest::Approx(std::log2(24.0)).epsilon(1e-12));

    const std::vector<std::uint8_t> bytes = encode_message(m);
    CHECK(static_cast<std::int64_t>(bytes.size()) == r.total_bytes);
}

TEST_CASE("empty payload has zero volume but still carries the request") {
    const GridShape g{2, 2, 3, 1.0};
    const Message m{0, 1, 0, ScalarMap::constant(g, 0.5), {}};
    const VolumeReport r = measure_message(m);
    CHECK(r.feature_bytes == 0);
    CHECK(r.volume_log2 == 0.0);
    CHECK(r.request_bytes == 16);
    CHECK(r.total_bytes == 8 + 28 + 16);

    const Message back = decode_message(encode_message(m));
    CHECK(back == m);
    CHECK(back.cells.empty());
}

TEST_CASE("one thousand random messages round trip bit-exact") {
    Lcg64 rng(808);
    for (int trial = 0; trial < 1000; ++trial) {
        const Message m = random_message(rng);
        const std::vector<std::uint8_t> bytes = encode_message(m);
        const Message back = decode_message(bytes);
        CHECK(back == m);
        // Re-encoding the decoded message reproduces the exact stream.
        CHECK(encode_message(back) == bytes);
    }
}

TEST_CASE("encoder rejects malformed payloads") {
    const GridShape g{2, 3, 2, 1.0};
    const ScalarMap req = ScalarMap::constant(g, 0.5);

    // Index outside the grid.
    Message bad_index{0, 1, 0, req, {SparseCell{6, {0.0, 0.0}}}};
    CHECK_THROWS_AS(encode_message(bad_index), CodecError);

    // Indices not strictly increasing.
    Message bad_order{0, 1, 0, req, {SparseCell{2, {0.0, 0.0}}, SparseCell{1, {0.0, 0.0}}}};
    CHECK_THROWS_AS(encode_message(bad_order), CodecError);
    Message dup{0, 1, 0, req, {SparseCell{2, {0.0, 0.0}}, SparseCell{2, {0.0, 0.0}}}};
    CHECK_THROWS_AS(encode_message(dup), CodecError);

    // Wrong channel count in a record.
    Message bad_width{0, 1, 0, req, {SparseCell{0, {0.0}}}};
    CHECK_THROWS_AS(encode_message(bad_width), CodecError);

    // Non-finite feature value.
    Message bad_value{0, 1, 0, req, {SparseCell{0, {std::nan(""), 0.0}}}};
    CHECK_THROWS_AS(encode_message(bad_value), CodecError);
}

TEST_CASE("decoder pinpoints corrupt streams") {
    const Message m = sample_message();  // 2x3 grid, D=2, cells {1, 2, 5}
    const std::vector<std::uint8_t> good = encode_message(m);

    // Offsets: magic 0, version 4, sender 8, receiver 12, round 16,
    // height 20, width 24, channels 28, cell count 32, request 36..59,
    // first cell record at 60 (index, then two floats), second at 72.
    {
        std::vector<std::uint8_t> b = good;
        b[0] = 'X';
        CHECK_THROWS_WITH_AS(decode_message(b), "bad magic at byte 0; not a message stream",
                             CodecError);
    }
    {
        std::vector<std::uint8_t> b = good;
        b[4] = 9;
        CHECK_THROWS_AS(decode_message(b), CodecError);
    }
    {
        // Degenerate grid: zero channels.
        std::vector<std::uint8_t> b = good;
        b[28] = 0;
        CHECK_THROWS_AS(decode_message(b), CodecError);
    }
    {
        // Header claims more cells than the grid holds.
        std::vector<std::uint8_t> b = good;
        b[32] = 7;
        CHECK_THROWS_AS(decode_message(b), CodecError);
    }
    {
        // Request value outside [0, 1]: 1.5f is 0x3FC00000 little-endian.
        std::vector<std::uint8_t> b = good;
        b[36] = 0x00;
        b[37] = 0x00;
        b[38] = 0xC0;
        b[39] = 0x3F;
        CHECK_THROWS_AS(decode_message(b), CodecError);
    }
    {
        // Non-finite request value (quiet NaN 0x7FC00000).
        std::vector<std::uint8_t> b = good;
        b[36] = 0x00;
        b[37] = 0x00;
        b[38] = 0xC0;
        b[39] = 0x7F;
        CHECK_THROWS_AS(decode_message(b), CodecError);
    }
    {
        // Second cell index patched from 2 to 1: not strictly increasing.
        std::vector<std::uint8_t> b = good;
        b[72] = 1;
        CHECK_THROWS_AS(decode_message(b), CodecError);
    }
    {
        // Second cell index patched out of range.
        std::vector<std::uint8_t> b = good;
        b[72] = 200;
        CHECK_THROWS_AS(decode_message(b), CodecError);
    }
    {
        // Truncated mid-record.
        std::vector<std::uint8_t> b = good;
        b.pop_back();
        CHECK_THROWS_AS(decode_message(b), CodecError);
    }
    {
        // Trailing garbage after a well-formed message.
        std::vector<std::uint8_t> b = good;
        b.push_back(0);
        CHECK_THROWS_WITH_AS(decode_message(b),
                             ("trailing bytes after message payload at byte " +
                              std::to_string(good.size()))
                                 .c_str(),
                             CodecError);
    }
    {
        // Empty and tiny streams.
        CHECK_THROWS_AS(decode_message({}), CodecError);
        CHECK_THROWS_AS(decode_message({'B', 'C'}), CodecError);
    }

    // The pristine stream still decodes after all that patching.
    CHECK(decode_message(good) == m);
}
