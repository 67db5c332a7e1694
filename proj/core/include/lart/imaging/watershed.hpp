#pragma once

#include "lart/imaging/raster.hpp"

namespace lart::imaging {

/// Marker-based priority flooding over 4-neighbors. Pixels leave the queue
/// in ascending edge magnitude (ties by scan index) and each unlabeled
/// neighbor takes the label of the pixel that enqueued it. Seeded pixels
/// keep their label; the result has no zero pixels.
/// Throws if the seed map is all zero or its size differs from `edges`.
LabelImage watershed(const EdgeMap& edges, const LabelImage& seeds);

}  // namespace lart::imaging
