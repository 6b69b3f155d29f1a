#include "iabsim/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "iabsim/error.hpp"

namespace iabsim {
namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

[[noreturn]] void bad(std::size_t line_no, const std::string& msg) {
  throw Error(ErrorKind::Format, "trace line " + std::to_string(line_no) + ": " + msg);
}

template <typename T>
T parse_int(std::string_view tok, std::size_t line_no) {
  T v{};
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    bad(line_no, "expected integer, got '" + std::string(tok) + "'");
  return v;
}

double parse_real(const std::string& tok, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    bad(line_no, "expected real, got '" + tok + "'");
  }
  if (used != tok.size()) bad(line_no, "trailing characters in '" + tok + "'");
  return v;
}

std::vector<Node> make_nodes(const ScenarioConfig& sc) {
  std::vector<Node> nodes;
  nodes.push_back(Node{sc.donor(), NodeKind::Donor, sc.antennas_per_bs});
  for (int b = 1; b <= sc.base_stations; ++b)
    nodes.push_back(Node{sc.bs(b), NodeKind::BaseStation, sc.antennas_per_bs});
  for (int u = 1; u <= sc.user_equipment; ++u)
    nodes.push_back(Node{sc.ue(u), NodeKind::UserEquipment, 1});
  return nodes;
}

}  // namespace

void write_trace(std::ostream& os, const DayTrace& day, const ScenarioConfig& scenario) {
  os << "#seed=" << day.seed << '\n';
  os << "#cap_mb=" << static_cast<long long>(std::llround(scenario.bandwidth_cap_mb)) << '\n';
  os << "#K=" << scenario.antennas_per_bs << '\n';
  os << "#bs=" << scenario.base_stations << '\n';
  os << "#ue=" << scenario.user_equipment << '\n';
  for (std::size_t t = 0; t < day.snapshots.size(); ++t) {
    const auto& snap = day.snapshots[t];
    os << "T " << snap.interval_index << '\n';
    for (const auto& l : snap.links) {
      os << "L " << l.link_id << ' ' << l.src.index << ' ' << l.dst.index << ' ' << fixed6(l.weight)
         << ' ' << l.link_type << '\n';
    }
    if (t < day.slice_profiles.size()) {
      for (const auto& sp : day.slice_profiles[t]) {
        os << "S " << to_string(sp.slice_id) << ' ' << fixed6(sp.band_demand) << ' '
           << fixed6(sp.antenna_demand) << '\n';
      }
    }
  }
}

void write_trace(const std::filesystem::path& path, const DayTrace& day,
                 const ScenarioConfig& scenario) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  write_trace(os, day, scenario);
  if (!os) throw Error(ErrorKind::Io, "write to " + path.string() + " failed");
}

TraceFile read_trace(std::istream& is) {
  TraceFile out;
  auto& sc = out.scenario;
  bool have_seed = false;
  std::string line;
  std::size_t line_no = 0;
  std::vector<Node> nodes;
  std::size_t slice_slot = 0;

  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(1, eq - 1);
      const std::string_view val = std::string_view(line).substr(eq + 1);
      if (key == "seed") {
        out.day.seed = parse_int<std::uint64_t>(val, line_no);
        have_seed = true;
      } else if (key == "cap_mb") {
        sc.bandwidth_cap_mb = static_cast<double>(parse_int<long long>(val, line_no));
      } else if (key == "K") {
        sc.antennas_per_bs = parse_int<int>(val, line_no);
      } else if (key == "bs") {
        sc.base_stations = parse_int<int>(val, line_no);
      } else if (key == "ue") {
        sc.user_equipment = parse_int<int>(val, line_no);
      }
      continue;
    }

    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    std::vector<std::string> f;
    for (std::string tok; ls >> tok;) f.push_back(tok);

    if (tag == "T") {
      if (f.size() != 1) bad(line_no, "T expects 1 field");
      if (nodes.empty()) nodes = make_nodes(sc);
      TopologySnapshot snap;
      snap.interval_index = parse_int<int>(f[0], line_no);
      snap.nodes = nodes;
      out.day.snapshots.push_back(std::move(snap));
      out.day.slice_profiles.emplace_back();
      slice_slot = 0;
    } else if (tag == "L") {
      if (out.day.snapshots.empty()) bad(line_no, "L before any T");
      if (f.size() != 5) bad(line_no, "L expects 5 fields");
      LinkCandidate l;
      l.link_id = parse_int<int>(f[0], line_no);
      l.src = NodeId{parse_int<std::size_t>(f[1], line_no)};
      l.dst = NodeId{parse_int<std::size_t>(f[2], line_no)};
      l.weight = parse_real(f[3], line_no);
      l.link_type = parse_int<int>(f[4], line_no);
      out.day.snapshots.back().links.push_back(l);
    } else if (tag == "S") {
      if (out.day.snapshots.empty()) bad(line_no, "S before any T");
      if (f.size() != 3) bad(line_no, "S expects 3 fields");
      if (slice_slot >= static_cast<std::size_t>(kSliceCount)) bad(line_no, "too many S lines");
      SliceProfile sp;
      sp.interval_index = out.day.snapshots.back().interval_index;
      sp.bs = sc.bs(1);
      sp.slice_id = slice_from_string(f[0]);
      sp.band_demand = parse_real(f[1], line_no);
      sp.antenna_demand = parse_real(f[2], line_no);
      out.day.slice_profiles.back()[slice_slot++] = sp;
    } else {
      bad(line_no, "unknown record '" + tag + "'");
    }
  }
  if (!have_seed) throw Error(ErrorKind::Format, "trace has no #seed header");
  return out;
}

TraceFile read_trace(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return read_trace(is);
}

}  // namespace iabsim
