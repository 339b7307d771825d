#include "mflab/serialize.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace mflab {
namespace io {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

TrajectoryData TrajectoryData::from(const nbody::Trajectory& traj) {
  TrajectoryData d;
  if (traj.size() == 0) return d;
  d.dim = traj.states[0].dim();
  d.weights = traj.states[0].intensities();
  d.times = traj.times;
  d.h_series = traj.hamiltonians;
  d.minsep_series = traj.min_separations;
  d.positions.reserve(traj.size());
  for (const auto& s : traj.states) d.positions.push_back(s.positions());
  return d;
}

TrajectoryData TrajectoryData::from(const meanfield::BlobTrajectory& traj) {
  TrajectoryData d;
  if (traj.size() == 0) return d;
  d.dim = traj.clouds[0].dim();
  d.weights = traj.clouds[0].weights();
  d.times = traj.times;
  d.h_series = traj.energies;
  d.minsep_series = traj.density_proxies;
  d.positions.reserve(traj.size());
  for (const auto& c : traj.clouds) d.positions.push_back(c.centers());
  return d;
}

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryData& data) {
  std::ofstream out(path, std::ios::binary);  // binary: no platform newline games
  if (!out) throw std::runtime_error("write_trajectory_csv: cannot open " + path.string());
  const std::size_t n = data.weights.size();
  out << "t,h,minsep";
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < data.dim; ++k) out << ",x" << i << "_" << k;
  out << "\n";
  for (std::size_t s = 0; s < data.times.size(); ++s) {
    out << format_double(data.times[s]) << "," << format_double(data.h_series[s]) << ","
        << format_double(data.minsep_series[s]);
    for (double x : data.positions[s]) out << "," << format_double(x);
    out << "\n";
  }
}

namespace {

void put_u32(std::ofstream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_u64(std::ofstream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void put_f64(std::ofstream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::ifstream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::ifstream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void write_trajectory_binary(const std::filesystem::path& path,
                             const TrajectoryData& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("write_trajectory_binary: cannot open " + path.string());
  out.write("MFL1", 4);
  put_u32(out, static_cast<std::uint32_t>(data.dim));
  put_u64(out, data.weights.size());
  put_u64(out, data.times.size());
  for (double w : data.weights) put_f64(out, w);
  for (std::size_t s = 0; s < data.times.size(); ++s) {
    put_f64(out, data.times[s]);
    put_f64(out, data.h_series[s]);
    put_f64(out, data.minsep_series[s]);
    for (double x : data.positions[s]) put_f64(out, x);
  }
}

TrajectoryData read_trajectory_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("read_trajectory_binary: cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, "MFL1", 4) != 0)
    throw std::runtime_error("read_trajectory_binary: bad magic");
  TrajectoryData d;
  d.dim = static_cast<int>(get_u32(in));
  std::uint64_t n = get_u64(in);
  std::uint64_t samples = get_u64(in);
  d.weights.resize(n);
  for (auto& w : d.weights) w = get_f64(in);
  d.times.resize(samples);
  d.h_series.resize(samples);
  d.minsep_series.resize(samples);
  d.positions.assign(samples, std::vector<double>(n * d.dim));
  for (std::uint64_t s = 0; s < samples; ++s) {
    d.times[s] = get_f64(in);
    d.h_series[s] = get_f64(in);
    d.minsep_series[s] = get_f64(in);
    for (auto& x : d.positions[s]) x = get_f64(in);
  }
  if (!in) throw std::runtime_error("read_trajectory_binary: truncated file");
  return d;
}

nlohmann::ordered_json to_json(const modenergy::ModulatedEnergyReport& report) {
  nlohmann::ordered_json j;
  j["f_n"] = report.f_n;
  j["f_n_avg"] = report.f_n_avg;
  j["pair_sum"] = report.pair_sum;
  j["mf_self"] = report.mf_self;
  j["cross"] = report.cross;
  j["method"] = report.method;
  j["eta_max"] = report.eta_max;
  return j;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = hex[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

}  // namespace io
}  // namespace mflab
