#include "bevcomm/wire.hpp"

#include <cmath>
#include <cstring>
#include <string>

namespace bevcomm {

namespace {

constexpr std::uint8_t kMagic[4] = {'B', 'C', 'W', 'F'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

void put_f32(std::vector<std::uint8_t>& out, double v) {
    const float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(out, bits);
}

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::size_t pos() const { return pos_; }

    std::uint32_t u32(const char* what) {
        if (pos_ + 4 > bytes_.size()) {
            throw CodecError(std::string("message truncated reading ") + what + " at byte " +
                             std::to_string(pos_));
        }
        std::uint32_t v = static_cast<std::uint32_t>(bytes_[pos_]) |
                          (static_cast<std::uint32_t>(bytes_[pos_ + 1]) << 8) |
                          (static_cast<std::uint32_t>(bytes_[pos_ + 2]) << 16) |
                          (static_cast<std::uint32_t>(bytes_[pos_ + 3]) << 24);
        pos_ += 4;
        return v;
    }

    double f32(const char* what) {
        const std::size_t at = pos_;
        const std::uint32_t bits = u32(what);
        float f;
        std::memcpy(&f, &bits, 4);
        if (std::isnan(f) || std::isinf(f)) {
            throw CodecError(std::string("non-finite ") + what + " at byte " + std::to_string(at));
        }
        return static_cast<double>(f);
    }

    void expect_end() const {
        if (pos_ != bytes_.size()) {
            throw CodecError("trailing bytes after message payload at byte " + std::to_string(pos_));
        }
    }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

double comm_volume(int payload_cells, int channels) {
    if (payload_cells == 0) return 0.0;
    return std::log2(static_cast<double>(payload_cells) * channels * 4.0);
}

VolumeReport measure_message(const Message& m) {
    VolumeReport r;
    r.payload_cells = static_cast<int>(m.cells.size());
    r.channels = m.channels();
    r.feature_bytes = static_cast<std::int64_t>(r.payload_cells) * r.channels * 4;
    r.index_bytes = static_cast<std::int64_t>(r.payload_cells) * 4;
    r.request_bytes = static_cast<std::int64_t>(m.request.shape().cell_count()) * 4;
    r.total_bytes = 8 + 7 * 4 + r.request_bytes + r.index_bytes + r.feature_bytes;
    r.volume_log2 = comm_volume(r.payload_cells, r.channels);
    return r;
}

std::vector<std::uint8_t> encode_message(const Message& m) {
    const GridShape& g = m.request.shape();
    const std::uint32_t cell_count = static_cast<std::uint32_t>(g.cell_count());
    std::uint32_t prev_index = 0;
    bool first = true;
    for (const SparseCell& c : m.cells) {
        if (c.index >= cell_count) {
            throw CodecError("sparse cell index " + std::to_string(c.index) +
                             " outside the " + std::to_string(cell_count) + "-cell grid");
        }
        if (!first && c.index <= prev_index) {
            throw CodecError("sparse cell indices must be strictly increasing, saw " +
                             std::to_string(prev_index) + " then " + std::to_string(c.index));
        }
        if (c.values.size() != static_cast<std::size_t>(g.channels)) {
            throw CodecError("sparse cell " + std::to_string(c.index) + " carries " +
                             std::to_string(c.values.size()) + " values, expected " +
                             std::to_string(g.channels));
        }
        for (double v : c.values) {
            if (!std::isfinite(v)) {
                throw CodecError("sparse cell " + std::to_string(c.index) +
                                 " has a non-finite value");
            }
        }
        prev_index = c.index;
        first = false;
    }

    std::vector<std::uint8_t> out;
    out.reserve(36 + 4 * static_cast<std::size_t>(g.cell_count()) +
                m.cells.size() * (4 + 4 * static_cast<std::size_t>(g.channels)));
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, kVersion);
    put_u32(out, m.sender);
    put_u32(out, m.receiver);
    put_u32(out, m.round);
    put_u32(out, static_cast<std::uint32_t>(g.height));
    put_u32(out, static_cast<std::uint32_t>(g.width));
    put_u32(out, static_cast<std::uint32_t>(g.channels));
    put_u32(out, static_cast<std::uint32_t>(m.cells.size()));
    for (double v : m.request.values()) put_f32(out, v);
    for (const SparseCell& c : m.cells) {
        put_u32(out, c.index);
        for (double v : c.values) put_f32(out, v);
    }
    return out;
}

Message decode_message(const std::vector<std::uint8_t>& bytes) {
    Reader in(bytes);
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw CodecError("bad magic at byte 0; not a message stream");
    }
    in.u32("magic");
    const std::uint32_t version = in.u32("version");
    if (version != kVersion) {
        throw CodecError("unsupported message version " + std::to_string(version) + " at byte 4");
    }
    const std::uint32_t sender = in.u32("sender");
    const std::uint32_t receiver = in.u32("receiver");
    const std::uint32_t round = in.u32("round");
    const std::uint32_t height = in.u32("height");
    const std::uint32_t width = in.u32("width");
    const std::uint32_t channels = in.u32("channels");
    const std::uint32_t n = in.u32("cell count");
    if (height == 0 || width == 0 || channels == 0) {
        throw CodecError("degenerate grid " + std::to_string(height) + "x" +
                         std::to_string(width) + "x" + std::to_string(channels) +
                         " in header at byte 20");
    }
    const std::uint64_t cell_count = static_cast<std::uint64_t>(height) * width;
    if (n > cell_count) {
        throw CodecError("header claims " + std::to_string(n) + " cells on a " +
                         std::to_string(cell_count) + "-cell grid at byte 32");
    }

    std::vector<double> request(static_cast<std::size_t>(cell_count));
    for (std::size_t i = 0; i < request.size(); ++i) {
        const std::size_t at = in.pos();
        const double v = in.f32("request value");
        if (v < 0.0 || v > 1.0) {
            throw CodecError("request value outside [0, 1] at byte " + std::to_string(at));
        }
        request[i] = v;
    }

    std::vector<SparseCell> cells;
    cells.reserve(n);
    std::uint32_t prev_index = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::size_t at = in.pos();
        SparseCell c;
        c.index = in.u32("cell index");
        if (c.index >= cell_count) {
            throw CodecError("cell index " + std::to_string(c.index) + " out of range at byte " +
                             std::to_string(at));
        }
        if (i > 0 && c.index <= prev_index) {
            throw CodecError("cell indices not strictly increasing at byte " + std::to_string(at));
        }
        prev_index = c.index;
        c.values.resize(channels);
        for (std::uint32_t d = 0; d < channels; ++d) {
            c.values[d] = in.f32("feature value");
        }
        cells.push_back(std::move(c));
    }
    in.expect_end();

    GridShape g{static_cast<int>(height), static_cast<int>(width), static_cast<int>(channels), 1.0};
    Message m{sender, receiver, round, ScalarMap(g, std::move(request)), std::move(cells)};
    return m;
}

}  // namespace bevcomm
