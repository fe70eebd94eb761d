#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace dse {

struct GppEntry {
  int freq_mhz = 0;
  double p_peak_ops_s = 0.0;
  double e_op_j = 0.0;
  double leak_w = 0.0;
  double area_mm2 = 0.0;
  bool operator==(const GppEntry&) const = default;
};

struct AccEntry {
  std::string task;
  int unroll = 1;
  double a_peak = 1.0;
  double e_op_j = 0.0;
  double leak_w = 0.0;
  double area_mm2 = 0.0;
  bool operator==(const AccEntry&) const = default;
};

struct NocEntry {
  int freq_mhz = 0;
  int width_b = 0;
  double e_byte_j = 0.0;
  double leak_w = 0.0;
  double area_mm2 = 0.0;
  bool operator==(const NocEntry&) const = default;
};

enum class MemKind { Dram, Sram };

struct MemEntry {
  MemKind kind = MemKind::Dram;
  int freq_mhz = 0;
  int width_b = 0;
  double e_byte_j = 0.0;
  double leak_w = 0.0;
  double area_mm2 = 0.0;
  bool operator==(const MemEntry&) const = default;
};

/// Power/performance/area lookup tables standing in for external estimation
/// tools. Accelerator entries are keyed by the task they were built for.
class IpDatabase {
 public:
  IpDatabase() = default;
  /// Validates uniqueness and monotonicity of a_peak in unroll.
  IpDatabase(std::vector<GppEntry> gpp, std::vector<AccEntry> acc, std::vector<NocEntry> noc,
             std::vector<MemEntry> mem);

  const std::vector<GppEntry>& gpp() const { return gpp_; }
  const std::vector<AccEntry>& acc() const { return acc_; }
  const std::vector<NocEntry>& noc() const { return noc_; }
  const std::vector<MemEntry>& mem() const { return mem_; }

  const GppEntry* find_gpp(int freq_mhz) const;
  /// Lowest-frequency GPP entry; accelerator peaks scale from it.
  const GppEntry& reference_gpp() const;
  /// Reference GPP peak scaled linearly to `freq_mhz`.
  double reference_peak(int freq_mhz) const;

  /// Entry with the largest unroll not exceeding `unroll`.
  const AccEntry* find_acc(const std::string& task, int unroll) const;
  bool has_acc(const std::string& task) const;
  /// Sorted distinct unroll factors available for a task.
  std::vector<int> unrolls_for(const std::string& task) const;

  const NocEntry* find_noc(int freq_mhz, int width_b) const;
  const MemEntry* find_mem(MemKind kind, int freq_mhz, int width_b) const;

  bool operator==(const IpDatabase& o) const {
    return gpp_ == o.gpp_ && acc_ == o.acc_ && noc_ == o.noc_ && mem_ == o.mem_;
  }

 private:
  std::vector<GppEntry> gpp_;
  std::vector<AccEntry> acc_;
  std::vector<NocEntry> noc_;
  std::vector<MemEntry> mem_;
};

const char* to_string(MemKind k);

class TaskGraph;

/// Database with entries for every ladder point and an accelerator for each
/// task of `workloads`; used by the synthetic experiment drivers and tests.
IpDatabase synth_database(const std::vector<TaskGraph>& workloads);

}  // namespace dse
