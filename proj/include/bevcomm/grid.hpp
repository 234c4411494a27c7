#pragma once

#include <cstdint>
#include <vector>

#include "bevcomm/errors.hpp"

namespace bevcomm {

// Dense bird's-eye-view grid primitives. All maps are row-major over
// (row, col) with the flat cell index h * width + w; feature maps add a
// trailing channel axis. Values are carried as 64-bit doubles internally and
// only narrowed to 32-bit floats at the wire boundary.
//
// The types validate on construction and expose read-only access; derived
// maps are produced by constructing new values, never by in-place mutation.

struct GridShape {
    int height = 0;
    int width = 0;
    int channels = 0;
    double cell_size = 1.0;  // meters per cell edge

    int cell_count() const { return height * width; }
    int value_count() const { return height * width * channels; }

    bool operator==(const GridShape& o) const {
        return height == o.height && width == o.width && channels == o.channels &&
               cell_size == o.cell_size;
    }
    bool operator!=(const GridShape& o) const { return !(*this == o); }

    void validate() const;
    bool same_plane(const GridShape& o) const {
        return height == o.height && width == o.width;
    }
};

// H x W x D map of per-cell feature vectors.
class FeatureMap {
public:
    FeatureMap(GridShape shape, std::vector<double> values);
    static FeatureMap zeros(GridShape shape);

    const GridShape& shape() const { return shape_; }
    const std::vector<double>& values() const { return values_; }

    double at(int h, int w, int d) const {
        return values_[static_cast<std::size_t>((h * shape_.width + w) * shape_.channels + d)];
    }

    bool operator==(const FeatureMap& o) const {
        return shape_ == o.shape_ && values_ == o.values_;
    }

private:
    GridShape shape_;
    std::vector<double> values_;
};

// H x W map of values in [0, 1]; used for confidence and request maps.
class ScalarMap {
public:
    ScalarMap(GridShape shape, std::vector<double> values);
    static ScalarMap constant(GridShape shape, double value);

    const GridShape& shape() const { return shape_; }
    const std::vector<double>& values() const { return values_; }

    double at(int h, int w) const {
        return values_[static_cast<std::size_t>(h * shape_.width + w)];
    }

    bool operator==(const ScalarMap& o) const {
        return shape_.same_plane(o.shape_) && values_ == o.values_;
    }

private:
    GridShape shape_;
    std::vector<double> values_;
};

// H x W binary cell-selection map.
class SelectionMask {
public:
    SelectionMask(GridShape shape, std::vector<std::uint8_t> values);
    static SelectionMask none(GridShape shape);
    static SelectionMask all(GridShape shape);

    const GridShape& shape() const { return shape_; }
    const std::vector<std::uint8_t>& values() const { return values_; }

    std::uint8_t at(int h, int w) const {
        return values_[static_cast<std::size_t>(h * shape_.width + w)];
    }

    int popcount() const;
    // True when at least one cell is selected; this is what promotes a
    // directed link to a graph edge after the first exchange.
    bool any() const;

    bool operator==(const SelectionMask& o) const {
        return shape_.same_plane(o.shape_) && values_ == o.values_;
    }

private:
    GridShape shape_;
    std::vector<std::uint8_t> values_;
};

// Per-cell product of two scalar maps.
ScalarMap elementwise_mul(const ScalarMap& a, const ScalarMap& b);

// Zeroes every channel of cells where the mask is 0; mask-1 cells pass
// through unchanged.
FeatureMap mask_apply(const SelectionMask& mask, const FeatureMap& f);

}  // namespace bevcomm
