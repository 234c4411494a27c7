#include "bevcomm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bevcomm {

namespace {

std::string shape_str(const GridShape& s) {
    return std::to_string(s.height) + "x" + std::to_string(s.width) + "x" +
           std::to_string(s.channels);
}

void require_same_plane(const GridShape& a, const GridShape& b, const char* op) {
    if (!a.same_plane(b)) {
        throw DimensionError(std::string(op) + ": grid planes differ (" + shape_str(a) +
                             " vs " + shape_str(b) + ")");
    }
}

}  // namespace

void GridShape::validate() const {
    if (height < 1 || width < 1 || channels < 1) {
        throw DimensionError("grid shape must have positive extents, got " + shape_str(*this));
    }
    if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
        throw DimensionError("grid cell_size must be positive and finite");
    }
}

FeatureMap::FeatureMap(GridShape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
    shape_.validate();
    if (values_.size() != static_cast<std::size_t>(shape_.value_count())) {
        throw DimensionError("feature map expects " + std::to_string(shape_.value_count()) +
                             " values for shape " + shape_str(shape_) + ", got " +
                             std::to_string(values_.size()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw DimensionError("feature map values must be finite");
        }
    }
}

FeatureMap FeatureMap::zeros(GridShape shape) {
    shape.validate();
    return FeatureMap(shape, std::vector<double>(static_cast<std::size_t>(shape.value_count()), 0.0));
}

ScalarMap::ScalarMap(GridShape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
    shape_.validate();
    if (values_.size() != static_cast<std::size_t>(shape_.cell_count())) {
        throw DimensionError("scalar map expects " + std::to_string(shape_.cell_count()) +
                             " values for plane " + std::to_string(shape_.height) + "x" +
                             std::to_string(shape_.width) + ", got " +
                             std::to_string(values_.size()));
    }
    for (double v : values_) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DimensionError("scalar map values must lie in [0, 1]");
        }
    }
}

ScalarMap ScalarMap::constant(GridShape shape, double value) {
    shape.validate();
    return ScalarMap(shape, std::vector<double>(static_cast<std::size_t>(shape.cell_count()), value));
}

SelectionMask::SelectionMask(GridShape shape, std::vector<std::uint8_t> values)
    : shape_(shape), values_(std::move(values)) {
    shape_.validate();
    if (values_.size() != static_cast<std::size_t>(shape_.cell_count())) {
        throw DimensionError("selection mask expects " + std::to_string(shape_.cell_count()) +
                             " cells, got " + std::to_string(values_.size()));
    }
    for (std::uint8_t v : values_) {
        if (v > 1) {
            throw DimensionError("selection mask values must be 0 or 1");
        }
    }
}

SelectionMask SelectionMask::none(GridShape shape) {
    shape.validate();
    return SelectionMask(shape, std::vector<std::uint8_t>(static_cast<std::size_t>(shape.cell_count()), 0));
}

SelectionMask SelectionMask::all(GridShape shape) {
    shape.validate();
    return SelectionMask(shape, std::vector<std::uint8_t>(static_cast<std::size_t>(shape.cell_count()), 1));
}

int SelectionMask::popcount() const {
    int n = 0;
    for (std::uint8_t v : values_) n += v;
    return n;
}

bool SelectionMask::any() const {
    return std::any_of(values_.begin(), values_.end(), [](std::uint8_t v) { return v != 0; });
}

ScalarMap elementwise_mul(const ScalarMap& a, const ScalarMap& b) {
    require_same_plane(a.shape(), b.shape(), "elementwise_mul");
    std::vector<double> out(a.values().size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = a.values()[i] * b.values()[i];
    }
    return ScalarMap(a.shape(), std::move(out));
}

FeatureMap mask_apply(const SelectionMask& mask, const FeatureMap& f) {
    require_same_plane(mask.shape(), f.shape(), "mask_apply");
    const int d = f.shape().channels;
    std::vector<double> out(f.values().size(), 0.0);
    for (std::size_t cell = 0; cell < mask.values().size(); ++cell) {
        if (mask.values()[cell]) {
            const std::size_t base = cell * static_cast<std::size_t>(d);
            for (int c = 0; c < d; ++c) out[base + c] = f.values()[base + c];
        }
    }
    return FeatureMap(f.shape(), std::move(out));
}

}  // namespace bevcomm
