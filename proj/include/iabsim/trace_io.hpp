#pragma once

#include <filesystem>
#include <iosfwd>

#include "iabsim/net_model.hpp"

namespace iabsim {

// Line-oriented day trace:
//
//   #seed=<u64>
//   #cap_mb=<int>
//   #K=<int>
//   #bs=<int>
//   #ue=<int>
//   T <t>
//   L <link_id> <src> <dst> <weight:%.6f> <type>
//   S <slice_id> <band_demand:%.6f> <antenna_demand:%.6f>
//
// Values are quantized to six decimals at generation, so read(write(x)) == x.
struct TraceFile {
  ScenarioConfig scenario;
  DayTrace day;
};

void write_trace(std::ostream& os, const DayTrace& day, const ScenarioConfig& scenario);
void write_trace(const std::filesystem::path& path, const DayTrace& day,
                 const ScenarioConfig& scenario);

// Throws Error(Format) on malformed input.
TraceFile read_trace(std::istream& is);
TraceFile read_trace(const std::filesystem::path& path);

}  // namespace iabsim
