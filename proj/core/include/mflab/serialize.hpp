#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "mflab/meanfield.hpp"
#include "mflab/modenergy.hpp"
#include "mflab/nbody.hpp"

namespace mflab {
namespace io {

/// Shortest round-trip decimal form of a double (std::to_chars), the same
/// on every run, which is what makes the CSV outputs byte-reproducible.
std::string format_double(double v);

/// Common on-disk trajectory shape for particle and blob runs: per-particle
/// weights once, then one block per sample of (t, h, minsep, positions).
/// For blob runs h carries the cloud energy and minsep the sup-density
/// proxy.
struct TrajectoryData {
  int dim = 0;
  std::vector<double> weights;
  std::vector<double> times;
  std::vector<double> h_series;
  std::vector<double> minsep_series;
  std::vector<std::vector<double>> positions;  // one flattened block per sample

  static TrajectoryData from(const nbody::Trajectory& traj);
  static TrajectoryData from(const meanfield::BlobTrajectory& traj);
};

/// CSV: header, then one row per sample: t, h, minsep, flattened positions.
void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryData& data);

/// Binary: magic "MFL1", u32 dim, u64 N, u64 samples, weights, then the
/// sample blocks; all integers and IEEE doubles little-endian.
void write_trajectory_binary(const std::filesystem::path& path,
                             const TrajectoryData& data);
TrajectoryData read_trajectory_binary(const std::filesystem::path& path);

/// JSON form of a modulated-energy report; exactly the wire fields
/// f_n, f_n_avg, pair_sum, mf_self, cross, method, eta_max.
nlohmann::ordered_json to_json(const modenergy::ModulatedEnergyReport& report);

/// FNV-1a 64-bit content hash, hex-encoded; used for config fingerprints.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace io
}  // namespace mflab
