#pragma once

// Shoebox image-source simulation with the direct arrival kept separate from
// the reflected field, so directional and scattering factors can later be
// applied to the direct path alone.

#include <span>
#include <vector>

#include "pszkit/geometry.hpp"

namespace pszkit {

struct DecomposedRir {
  std::vector<double> direct;     // exactly the order-0 arrival
  std::vector<double> reflected;  // image orders 1..max_image_order
  double sample_rate = 0.0;
};

// Point source to omnidirectional receiver.  Arrival amplitude is
// prod(reflectances) / (4 pi d); arrivals are placed with the shared
// fractional-delay kernel.  Image sources are enumerated in a fixed
// lexicographic order, so results are bit-reproducible.
DecomposedRir simulate_rir(const RoomSpec& room, const Vec3& source,
                           const Vec3& receiver, double speed_of_sound,
                           double sample_rate);

}  // namespace pszkit
