#pragma once

// Scene description: shoebox room, loudspeaker array, listeners with
// sphere-mounted ear points, and the derived control-point geometry.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace pszkit {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const;
  Vec3 normalized() const;
};

double distance(const Vec3& a, const Vec3& b);

// Surface reflectances are per wall: {x=0, x=Lx, y=0, y=Ly, z=0, z=Lz}.
struct RoomSpec {
  Vec3 dimensions{6.0, 5.0, 3.0};
  std::array<double, 6> reflectance{0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  int max_image_order = 6;
  int rir_length = 12000;  // samples

  void validate() const;  // throws std::invalid_argument
};

enum class Band { woofer, tweeter, fullrange };

struct Loudspeaker {
  Vec3 position;
  Vec3 axis{0.0, 1.0, 0.0};  // unit main-axis direction
  double piston_radius = 0.05;
  Band band = Band::fullrange;
  double f_lo = 20.0;   // Hz, crossover band edges
  double f_hi = 20000.0;
  std::string fr_id;    // id for on-disk frequency-response lookups
};

enum class Ear { left = 0, right = 1 };

struct Listener {
  Vec3 head_center;
  double head_radius = 0.0875;
  double yaw = 0.0;           // radians, facing direction in the x-y plane
  int points_per_ear = 1;     // 1 => the ear point itself; >1 => ring
  double ring_radius = 0.01;  // meters, for points_per_ear > 1

  Vec3 facing() const;                  // unit vector (cos yaw, sin yaw, 0)
  Vec3 ear_direction(Ear e) const;      // unit vector from head center
  Vec3 ear_position(Ear e) const;       // on the sphere surface
};

// Identifies one evaluation/control location.
struct ControlPoint {
  std::size_t listener = 0;
  Ear ear = Ear::left;
  std::size_t point = 0;
  Vec3 position;
};

struct Scene {
  RoomSpec room;
  std::vector<Loudspeaker> speakers;
  std::vector<Listener> listeners;
  double speed_of_sound = 343.0;
  double sample_rate = 48000.0;

  void validate() const;         // throws std::invalid_argument
  std::uint64_t digest() const;  // FNV-1a over the geometric content
};

// Control points for one listener: for each ear, points_per_ear locations on
// the head sphere.  With points_per_ear == 1 the single point is the ear
// position itself; otherwise the points sit on a ring of ring_radius around
// the ear, in the plane tangent to the sphere at the ear, then projected
// back onto the sphere surface.  Deterministic order: ear-major, then point.
std::vector<ControlPoint> ear_control_points(const Listener& l,
                                             std::size_t listener_index);

// All listeners' points in (listener, ear, point) order.
std::vector<ControlPoint> scene_control_points(const Scene& s,
                                               int points_per_ear_override = 0);

// Angle (radians, in [0, pi]) between a speaker's main axis and the ray from
// the speaker to the given point.
double off_axis_angle(const Loudspeaker& spk, const Vec3& point);

// Angle (radians, in [0, pi]) at the listener's head center between the
// directions to the speaker and to the control point; the angular separation
// entering the sphere-scattering model.
double incidence_angle(const Listener& l, const Vec3& speaker_position,
                       const Vec3& control_point);

// Parameters for the stock two-row line-array scene used by the CLI and the
// end-to-end tests.
struct SceneParams {
  Vec3 room_dims{6.0, 5.0, 3.0};
  std::array<double, 6> reflectance{0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  int max_image_order = 6;
  double rir_seconds = 0.25;

  int n_woofers = 8;
  int n_tweeters = 16;
  double array_width = 1.2;      // edge-to-edge along x
  double row_separation = 0.1;   // vertical split between the rows
  double woofer_radius = 0.05;   // piston radii (meters)
  double tweeter_radius = 0.0125;
  double woofer_f_lo = 100.0, woofer_f_hi = 2000.0;
  double tweeter_f_lo = 2000.0, tweeter_f_hi = 20000.0;
  Vec3 array_center{3.0, 1.0, 1.5};

  double listener_offset = 0.5;    // +/- along x from the array center
  double listener_distance = 1.0;  // along y from the array plane
  double head_radius = 0.0875;
  int points_per_ear = 1;
  double ring_radius = 0.01;

  double speed_of_sound = 343.0;
  double sample_rate = 48000.0;
};

// Two listening zones in front of a woofer row and a tweeter row; listeners
// face the array center.  Speakers are ordered woofers first, then tweeters,
// left to right.
Scene make_scene(const SceneParams& p);
Scene default_scene();

}  // namespace pszkit
