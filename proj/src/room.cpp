#include "pszkit/room.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pszkit/dsp.hpp"

namespace pszkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

double ipow(double b, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= b;
  return r;
}

void require_inside(const Vec3& p, const Vec3& dims, const char* what) {
  if (!(p.x > 0.0 && p.x < dims.x && p.y > 0.0 && p.y < dims.y && p.z > 0.0 &&
        p.z < dims.z))
    throw std::invalid_argument(std::string("simulate_rir: ") + what +
                                " lies outside the room");
}

}  // namespace

DecomposedRir simulate_rir(const RoomSpec& room, const Vec3& source,
                           const Vec3& receiver, double speed_of_sound,
                           double sample_rate) {
  room.validate();
  if (!(speed_of_sound > 0.0))
    throw std::invalid_argument("simulate_rir: speed_of_sound must be > 0");
  if (!(sample_rate > 0.0))
    throw std::invalid_argument("simulate_rir: sample_rate must be > 0");
  const Vec3& dims = room.dimensions;
  require_inside(source, dims, "source");
  require_inside(receiver, dims, "receiver");

  const double d_direct = distance(source, receiver);
  if (d_direct == 0.0)
    throw std::invalid_argument(
        "simulate_rir: source and receiver coincide");
  const double samples_per_meter = sample_rate / speed_of_sound;
  const int half = kFracDelayTaps / 2;
  if (d_direct * samples_per_meter + half >= room.rir_length)
    throw std::invalid_argument(
        "simulate_rir: rir_length " + std::to_string(room.rir_length) +
        " is too short to contain the direct arrival");

  DecomposedRir rir;
  rir.direct.assign(room.rir_length, 0.0);
  rir.reflected.assign(room.rir_length, 0.0);
  rir.sample_rate = sample_rate;

  // Reach of the buffer in meters (plus kernel margin) bounds the lattice.
  const double max_dist = (room.rir_length + half) / samples_per_meter;
  auto periods = [&](double len) {
    const int by_reach = static_cast<int>(std::ceil(max_dist / (2.0 * len))) + 1;
    const int by_order = room.max_image_order / 2 + 1;
    return std::min(by_reach, by_order);
  };
  const int nx = periods(dims.x);
  const int ny = periods(dims.y);
  const int nz = periods(dims.z);

  const auto& beta = room.reflectance;
  for (int mx = -nx; mx <= nx; ++mx)
    for (int my = -ny; my <= ny; ++my)
      for (int mz = -nz; mz <= nz; ++mz)
        for (int q = 0; q <= 1; ++q)
          for (int j = 0; j <= 1; ++j)
            for (int k = 0; k <= 1; ++k) {
              const int order = std::abs(2 * mx - q) + std::abs(2 * my - j) +
                                std::abs(2 * mz - k);
              if (order > room.max_image_order) continue;
              const Vec3 img{(1 - 2 * q) * source.x + 2.0 * mx * dims.x,
                             (1 - 2 * j) * source.y + 2.0 * my * dims.y,
                             (1 - 2 * k) * source.z + 2.0 * mz * dims.z};
              const double d = distance(img, receiver);
              const double delay = d * samples_per_meter;
              if (delay - half > room.rir_length - 1) continue;
              const double refl = ipow(beta[0], std::abs(mx - q)) *
                                  ipow(beta[1], std::abs(mx)) *
                                  ipow(beta[2], std::abs(my - j)) *
                                  ipow(beta[3], std::abs(my)) *
                                  ipow(beta[4], std::abs(mz - k)) *
                                  ipow(beta[5], std::abs(mz));
              const double amp = refl / (4.0 * kPi * d);
              add_fractional_impulse(
                  order == 0 ? std::span<double>(rir.direct)
                             : std::span<double>(rir.reflected),
                  delay, amp);
            }
  return rir;
}

}  // namespace pszkit
