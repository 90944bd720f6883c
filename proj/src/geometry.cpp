#include "pszkit/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace pszkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

void append_num(std::string& s, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g;", v);
  s += buf;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

bool inside_room(const Vec3& p, const Vec3& dims, double margin = 0.0) {
  return p.x > margin && p.x < dims.x - margin && p.y > margin &&
         p.y < dims.y - margin && p.z > margin && p.z < dims.z - margin;
}

}  // namespace

double Vec3::norm() const { return std::sqrt(dot(*this)); }

Vec3 Vec3::normalized() const {
  const double n = norm();
  if (n == 0.0) fail("Vec3::normalized: zero vector");
  return {x / n, y / n, z / n};
}

double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

void RoomSpec::validate() const {
  if (!(dimensions.x > 0.0) || !(dimensions.y > 0.0) || !(dimensions.z > 0.0))
    fail("RoomSpec: dimensions must be positive");
  for (double b : reflectance)
    if (!(b >= 0.0) || !(b <= 1.0))
      fail("RoomSpec: wall reflectance must lie in [0, 1], got " +
           std::to_string(b));
  if (max_image_order < 0) fail("RoomSpec: max_image_order must be >= 0");
  if (rir_length <= 0) fail("RoomSpec: rir_length must be positive");
}

Vec3 Listener::facing() const { return {std::cos(yaw), std::sin(yaw), 0.0}; }

Vec3 Listener::ear_direction(Ear e) const {
  // Left ear is 90 degrees counterclockwise (viewed from above) from facing.
  if (e == Ear::left) return {-std::sin(yaw), std::cos(yaw), 0.0};
  return {std::sin(yaw), -std::cos(yaw), 0.0};
}

Vec3 Listener::ear_position(Ear e) const {
  return head_center + ear_direction(e) * head_radius;
}

std::vector<ControlPoint> ear_control_points(const Listener& l,
                                             std::size_t listener_index) {
  if (l.points_per_ear < 1)
    fail("Listener: points_per_ear must be >= 1");
  if (l.points_per_ear > 1 &&
      (!(l.ring_radius > 0.0) || !(l.ring_radius < l.head_radius)))
    fail("Listener: ring_radius must lie in (0, head_radius) when "
         "points_per_ear > 1");
  std::vector<ControlPoint> pts;
  pts.reserve(2 * static_cast<std::size_t>(l.points_per_ear));
  for (Ear e : {Ear::left, Ear::right}) {
    const Vec3 u = l.ear_direction(e);
    const Vec3 ear = l.ear_position(e);
    if (l.points_per_ear == 1) {
      pts.push_back({listener_index, e, 0, ear});
      continue;
    }
    // Ring in the tangent plane at the ear, projected back to the sphere.
    const Vec3 t1{0.0, 0.0, 1.0};
    const Vec3 t2 = u.cross(t1);
    for (int i = 0; i < l.points_per_ear; ++i) {
      const double phi = 2.0 * kPi * i / l.points_per_ear;
      const Vec3 q =
          ear + (t1 * std::cos(phi) + t2 * std::sin(phi)) * l.ring_radius;
      const Vec3 on_sphere =
          l.head_center + (q - l.head_center).normalized() * l.head_radius;
      pts.push_back({listener_index, e, static_cast<std::size_t>(i), on_sphere});
    }
  }
  return pts;
}

std::vector<ControlPoint> scene_control_points(const Scene& s,
                                               int points_per_ear_override) {
  std::vector<ControlPoint> pts;
  for (std::size_t k = 0; k < s.listeners.size(); ++k) {
    Listener l = s.listeners[k];
    if (points_per_ear_override > 0) l.points_per_ear = points_per_ear_override;
    auto lp = ear_control_points(l, k);
    pts.insert(pts.end(), lp.begin(), lp.end());
  }
  return pts;
}

double off_axis_angle(const Loudspeaker& spk, const Vec3& point) {
  const Vec3 ray = point - spk.position;
  const double rn = ray.norm();
  if (rn == 0.0) fail("off_axis_angle: point coincides with the speaker");
  const double an = spk.axis.norm();
  if (an == 0.0) fail("off_axis_angle: speaker axis is the zero vector");
  double c = spk.axis.dot(ray) / (an * rn);
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return std::acos(c);
}

double incidence_angle(const Listener& l, const Vec3& speaker_position,
                       const Vec3& control_point) {
  const Vec3 to_spk = speaker_position - l.head_center;
  const Vec3 to_pt = control_point - l.head_center;
  const double ns = to_spk.norm();
  const double np = to_pt.norm();
  if (ns == 0.0) fail("incidence_angle: speaker at the head center");
  if (np == 0.0) fail("incidence_angle: control point at the head center");
  double c = to_spk.dot(to_pt) / (ns * np);
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return std::acos(c);
}

void Scene::validate() const {
  room.validate();
  if (!(speed_of_sound > 0.0)) fail("Scene: speed_of_sound must be positive");
  if (!(sample_rate > 0.0)) fail("Scene: sample_rate must be positive");
  if (speakers.empty()) fail("Scene: at least one loudspeaker is required");
  if (listeners.empty()) fail("Scene: at least one listener is required");
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    const Loudspeaker& spk = speakers[i];
    if (!inside_room(spk.position, room.dimensions))
      fail("Scene: loudspeaker " + std::to_string(i) +
           " lies outside the room");
    if (spk.axis.norm() == 0.0)
      fail("Scene: loudspeaker " + std::to_string(i) + " has a zero axis");
    if (!(spk.piston_radius > 0.0))
      fail("Scene: loudspeaker " + std::to_string(i) +
           " needs a positive piston radius");
    if (!(spk.f_lo >= 0.0) || !(spk.f_hi > spk.f_lo))
      fail("Scene: loudspeaker " + std::to_string(i) +
           " has an invalid band [f_lo, f_hi)");
  }
  for (std::size_t k = 0; k < listeners.size(); ++k) {
    const Listener& l = listeners[k];
    if (!(l.head_radius > 0.0))
      fail("Scene: listener " + std::to_string(k) +
           " needs a positive head radius");
    if (!inside_room(l.head_center, room.dimensions, l.head_radius))
      fail("Scene: listener " + std::to_string(k) +
           "'s head sphere intersects a wall");
    if (l.points_per_ear < 1)
      fail("Scene: listener " + std::to_string(k) +
           " needs points_per_ear >= 1");
    for (std::size_t i = 0; i < speakers.size(); ++i)
      if (distance(speakers[i].position, l.head_center) <= l.head_radius)
        fail("Scene: loudspeaker " + std::to_string(i) +
             " lies inside listener " + std::to_string(k) + "'s head sphere");
  }
}

std::uint64_t Scene::digest() const {
  std::string s;
  s.reserve(4096);
  append_num(s, room.dimensions.x);
  append_num(s, room.dimensions.y);
  append_num(s, room.dimensions.z);
  for (double b : room.reflectance) append_num(s, b);
  append_num(s, room.max_image_order);
  append_num(s, room.rir_length);
  append_num(s, speed_of_sound);
  append_num(s, sample_rate);
  append_num(s, static_cast<double>(speakers.size()));
  for (const Loudspeaker& spk : speakers) {
    append_num(s, spk.position.x);
    append_num(s, spk.position.y);
    append_num(s, spk.position.z);
    append_num(s, spk.axis.x);
    append_num(s, spk.axis.y);
    append_num(s, spk.axis.z);
    append_num(s, spk.piston_radius);
    append_num(s, static_cast<double>(spk.band));
    append_num(s, spk.f_lo);
    append_num(s, spk.f_hi);
    s += spk.fr_id;
    s += ';';
  }
  append_num(s, static_cast<double>(listeners.size()));
  for (const Listener& l : listeners) {
    append_num(s, l.head_center.x);
    append_num(s, l.head_center.y);
    append_num(s, l.head_center.z);
    append_num(s, l.head_radius);
    append_num(s, l.yaw);
    append_num(s, static_cast<double>(l.points_per_ear));
    append_num(s, l.ring_radius);
  }
  return fnv1a64(s);
}

Scene make_scene(const SceneParams& p) {
  Scene s;
  s.room.dimensions = p.room_dims;
  s.room.reflectance = p.reflectance;
  s.room.max_image_order = p.max_image_order;
  s.room.rir_length =
      static_cast<int>(std::lround(p.rir_seconds * p.sample_rate));
  s.speed_of_sound = p.speed_of_sound;
  s.sample_rate = p.sample_rate;

  auto add_row = [&s, &p](int n, double z, double radius, Band band,
                          double f_lo, double f_hi, const char* prefix) {
    for (int i = 0; i < n; ++i) {
      Loudspeaker spk;
      const double t = (n > 1) ? static_cast<double>(i) / (n - 1) : 0.5;
      spk.position = {p.array_center.x - 0.5 * p.array_width +
                          t * p.array_width,
                      p.array_center.y, z};
      spk.axis = {0.0, 1.0, 0.0};
      spk.piston_radius = radius;
      spk.band = band;
      spk.f_lo = f_lo;
      spk.f_hi = f_hi;
      char id[32];
      std::snprintf(id, sizeof(id), "%s%02d", prefix, i);
      spk.fr_id = id;
      s.speakers.push_back(spk);
    }
  };
  add_row(p.n_woofers, p.array_center.z - 0.5 * p.row_separation,
          p.woofer_radius, Band::woofer, p.woofer_f_lo, p.woofer_f_hi,
          "woofer");
  add_row(p.n_tweeters, p.array_center.z + 0.5 * p.row_separation,
          p.tweeter_radius, Band::tweeter, p.tweeter_f_lo, p.tweeter_f_hi,
          "tweeter");

  for (int k = 0; k < 2; ++k) {
    Listener l;
    const double sign = (k == 0) ? -1.0 : 1.0;
    l.head_center = {p.array_center.x + sign * p.listener_offset,
                     p.array_center.y + p.listener_distance, p.array_center.z};
    l.head_radius = p.head_radius;
    const Vec3 to_array = p.array_center - l.head_center;
    l.yaw = std::atan2(to_array.y, to_array.x);
    l.points_per_ear = p.points_per_ear;
    l.ring_radius = p.ring_radius;
    s.listeners.push_back(l);
  }
  s.validate();
  return s;
}

Scene default_scene() { return make_scene(SceneParams{}); }

}  // namespace pszkit
