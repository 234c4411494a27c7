#pragma once

#include <cstdint>
#include <vector>

#include "bevcomm/grid.hpp"

namespace bevcomm {

// Message codec. A message carries the sender's dense request map plus a
// sparse feature payload: the selected cells in strictly increasing
// flat-index order, each with its full channel vector. Values travel as
// little-endian 32-bit floats; everything else is little-endian u32.
//
// Layout: 4-byte magic "BCWF", u32 version, then a 7-field header
// (sender, receiver, round, height, width, channels, cell count), then
// height*width request floats, then one record per cell (u32 index +
// channels floats).

struct SparseCell {
    std::uint32_t index = 0;
    std::vector<double> values;

    bool operator==(const SparseCell& o) const { return index == o.index && values == o.values; }
};

struct Message {
    std::uint32_t sender = 0;
    std::uint32_t receiver = 0;
    std::uint32_t round = 0;
    ScalarMap request;  // shape().channels doubles as the payload channel count
    std::vector<SparseCell> cells;

    int channels() const { return request.shape().channels; }

    bool operator==(const Message& o) const {
        return sender == o.sender && receiver == o.receiver && round == o.round &&
               request == o.request && channels() == o.channels() && cells == o.cells;
    }
};

// Exact byte accounting for one message. Budget enforcement charges only
// feature_bytes; request maps and indices are logged but ride outside the
// configured feature budget.
struct VolumeReport {
    int payload_cells = 0;
    int channels = 0;
    std::int64_t feature_bytes = 0;  // payload_cells * channels * 4
    std::int64_t index_bytes = 0;    // payload_cells * 4
    std::int64_t request_bytes = 0;  // height * width * 4
    std::int64_t total_bytes = 0;    // full encoded stream size
    double volume_log2 = 0.0;        // log2(feature_bytes), 0 for empty payloads
};

// log2(n * d * 4) for n selected cells of d channels; an empty payload has
// zero volume by convention.
double comm_volume(int payload_cells, int channels);

VolumeReport measure_message(const Message& m);

std::vector<std::uint8_t> encode_message(const Message& m);
Message decode_message(const std::vector<std::uint8_t>& bytes);

}  // namespace bevcomm
