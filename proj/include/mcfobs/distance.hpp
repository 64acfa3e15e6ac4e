#pragma once

#include "mcfobs/grid.hpp"

namespace mcfobs {

/// Magnitude bound for distance fields. A value of 0 selects the grid
/// diameter, i.e. effectively uncapped.
struct DistanceCap {
    double value = 0.0;

    double resolve(const Grid2& g) const;
};

/// Signed distance to a cell mask, negative inside. The interface is placed
/// halfway between inside and outside samples; samples within a few cells of
/// it get exact distances to that polyline, the rest come from first-order
/// fast sweeping. Empty mask gives +cap everywhere, full mask -cap.
ScalarField signed_distance(const RegionMask& mask, DistanceCap cap = {});

/// Signed distance to {field < 0}, keeping the sub-cell zero crossings of
/// `field`. Samples adjacent to the front keep field / |grad field| (or the
/// input value itself when the gradient is already within 25% of unit
/// length). Throws VanishedSet when the field has no sign change.
ScalarField redistance(const ScalarField& field, DistanceCap cap = {});

/// Morphological opening of the sample set by the disk of radius rho, with
/// exact Euclidean distance transforms on the sample lattice. Samples outside
/// the grid count as neither inside nor outside.
RegionMask open_with_balls(const RegionMask& mask, double rho);

/// Exact squared Euclidean distance (in cells squared) from every sample to
/// the nearest sample with `source` set; +inf when there is none.
std::vector<double> squared_distance_transform(const RegionMask& source);

}  // namespace mcfobs
