#include "iabsim/net_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "iabsim/error.hpp"

namespace iabsim {

std::string_view to_string(SliceId id) {
  switch (id) {
    case SliceId::eMBB: return "eMBB";
    case SliceId::uRLLC: return "uRLLC";
    case SliceId::eMTC: return "eMTC";
  }
  return "?";
}

SliceId slice_from_string(std::string_view name) {
  if (name == "eMBB") return SliceId::eMBB;
  if (name == "uRLLC") return SliceId::uRLLC;
  if (name == "eMTC") return SliceId::eMTC;
  throw Error(ErrorKind::Format, "unknown slice id '" + std::string(name) + "'");
}

bool ScheduleResult::is_active(int link_id) const {
  return std::binary_search(activated.begin(), activated.end(), link_id);
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::Config, msg); };
  if (base_stations < 1) fail("scenario needs at least one base station (BS1)");
  if (user_equipment < 0) fail("negative user equipment count");
  if (antennas_per_bs < 1) fail("antennas_per_bs (K) must be >= 1");
  if (!(bandwidth_cap_mb > 0.0)) fail("bandwidth cap must be positive");
  for (const auto& r : slice_band_mb) {
    if (!(r.lo_mb >= 0.0 && r.lo_mb <= r.hi_mb)) fail("slice band range must satisfy 0 <= lo <= hi");
    if (r.hi_mb > bandwidth_cap_mb) fail("slice band range exceeds the bandwidth cap");
  }
  if (antenna_demand_min < 0 || antenna_demand_min > antenna_demand_max)
    fail("antenna demand range must satisfy 0 <= min <= max");
  if (antenna_demand_max > antennas_per_bs) fail("antenna demand max exceeds K");
}

double quantize6(double x) { return std::round(x * 1e6) / 1e6; }

TopologySnapshot generate_snapshot(RandomStream& rng, const ScenarioConfig& config, int t) {
  TopologySnapshot snap;
  snap.interval_index = t;
  snap.nodes.reserve(static_cast<std::size_t>(config.node_count()));
  snap.nodes.push_back(Node{config.donor(), NodeKind::Donor, config.antennas_per_bs});
  for (int b = 1; b <= config.base_stations; ++b)
    snap.nodes.push_back(Node{config.bs(b), NodeKind::BaseStation, config.antennas_per_bs});
  for (int u = 1; u <= config.user_equipment; ++u)
    snap.nodes.push_back(Node{config.ue(u), NodeKind::UserEquipment, 1});

  // Access links first (UE1..UEn), then the BS1 hub links, then BS1-donor.
  auto add = [&snap](NodeId src, NodeId dst, double w, int type) {
    snap.links.push_back(LinkCandidate{static_cast<int>(snap.links.size()), src, dst, w, type});
  };
  for (int u = 1; u <= config.user_equipment; ++u) {
    const auto bs = static_cast<int>(rng.uniform_int(1, config.base_stations));
    add(config.ue(u), config.bs(bs), quantize6(rng.uniform01()), 1);
  }
  for (int b = 2; b <= config.base_stations; ++b)
    add(config.bs(1), config.bs(b), quantize6(rng.uniform01()), 0);
  add(config.bs(1), config.donor(), quantize6(rng.uniform01()), 0);
  return snap;
}

std::array<SliceProfile, kSliceCount> sample_slice_profiles(RandomStream& rng,
                                                            const ScenarioConfig& config,
                                                            int t) {
  std::array<SliceProfile, kSliceCount> out;
  for (std::size_t s = 0; s < kSliceOrder.size(); ++s) {
    const auto& range = config.slice_band_mb[s];
    const double raw_mb = rng.uniform(range.lo_mb, range.hi_mb);
    const auto raw_antennas = rng.uniform_int(config.antenna_demand_min, config.antenna_demand_max);
    out[s] = SliceProfile{
        t,
        config.bs(1),
        kSliceOrder[s],
        quantize6(raw_mb / config.bandwidth_cap_mb),
        quantize6(static_cast<double>(raw_antennas) / config.antennas_per_bs),
    };
  }
  return out;
}

DayTrace generate_day(std::uint64_t seed, const ScenarioConfig& config) {
  config.validate();
  RandomStream rng(seed);
  DayTrace day;
  day.seed = seed;
  day.snapshots.reserve(kIntervalsPerDay);
  day.slice_profiles.reserve(kIntervalsPerDay);
  for (int t = 0; t < kIntervalsPerDay; ++t) {
    day.snapshots.push_back(generate_snapshot(rng, config, t));
    day.slice_profiles.push_back(sample_slice_profiles(rng, config, t));
  }
  return day;
}

LoadProfile residual_load(const TopologySnapshot& snapshot, const ScheduleResult& schedule) {
  if (schedule.interval_index != snapshot.interval_index) {
    throw Error(ErrorKind::Consistency,
                "schedule for interval " + std::to_string(schedule.interval_index) +
                    " applied to snapshot " + std::to_string(snapshot.interval_index));
  }
  std::map<NodeId, double> incident_weight;
  std::map<NodeId, int> used;
  for (int id : schedule.activated) {
    if (id < 0 || static_cast<std::size_t>(id) >= snapshot.links.size() ||
        snapshot.links[static_cast<std::size_t>(id)].link_id != id) {
      throw Error(ErrorKind::Consistency,
                  "scheduled link " + std::to_string(id) + " not in snapshot");
    }
    const auto& link = snapshot.links[static_cast<std::size_t>(id)];
    incident_weight[link.src] += link.weight;
    incident_weight[link.dst] += link.weight;
    ++used[link.src];
    ++used[link.dst];
  }

  LoadProfile load;
  load.interval_index = snapshot.interval_index;
  for (const auto& node : snapshot.nodes) {
    if (node.kind != NodeKind::BaseStation) continue;
    const double band = std::clamp(incident_weight[node.id], 0.0, 1.0);
    const int budget = node.antenna_budget;
    const int u = std::min(used[node.id], budget);
    load.residual_band[node.id] = 1.0 - band;
    load.residual_antennas[node.id] = static_cast<double>(budget - u) / budget;
  }
  return load;
}

std::vector<std::string> validate_snapshot(const TopologySnapshot& snapshot) {
  std::vector<std::string> issues;
  auto report = [&issues](const std::string& s) { issues.push_back(s); };

  if (snapshot.interval_index < 0 || snapshot.interval_index >= kIntervalsPerDay)
    report("interval index " + std::to_string(snapshot.interval_index) + " outside [0, 95]");

  const std::size_t n = snapshot.nodes.size();
  std::vector<NodeId> base_stations;
  std::vector<NodeId> ues;
  bool has_donor = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = snapshot.nodes[i];
    if (node.id.index != i) report("node " + std::to_string(i) + " has mismatched id");
    if (node.antenna_budget < 1) report("node " + std::to_string(i) + " has antenna budget < 1");
    switch (node.kind) {
      case NodeKind::Donor: has_donor = true; break;
      case NodeKind::BaseStation: base_stations.push_back(node.id); break;
      case NodeKind::UserEquipment: ues.push_back(node.id); break;
    }
  }
  if (!has_donor) report("snapshot has no donor node");

  auto kind_of = [&](NodeId id) { return snapshot.nodes[id.index].kind; };
  auto link_name = [](const LinkCandidate& l) {
    std::ostringstream os;
    os << "link " << l.link_id << " (" << l.src.index << "->" << l.dst.index << ")";
    return os.str();
  };

  std::set<int> ids;
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  std::map<NodeId, int> ue_links;
  for (const auto& link : snapshot.links) {
    if (!ids.insert(link.link_id).second) report("duplicate link id " + std::to_string(link.link_id));
    if (!(link.weight >= 0.0 && link.weight <= 1.0)) report(link_name(link) + " weight outside [0, 1]");
    if (link.src == link.dst) report(link_name(link) + " is a self-loop");
    if (link.src.index >= n || link.dst.index >= n) {
      report(link_name(link) + " references an unknown node");
      continue;
    }
    const bool infra = kind_of(link.src) != NodeKind::UserEquipment &&
                       kind_of(link.dst) != NodeKind::UserEquipment;
    if (link.link_type != (infra ? 0 : 1)) report(link_name(link) + " has the wrong link type");
    pairs.insert(std::minmax(link.src.index, link.dst.index));
    if (kind_of(link.src) == NodeKind::UserEquipment) ++ue_links[link.src];
    if (kind_of(link.dst) == NodeKind::UserEquipment) ++ue_links[link.dst];
  }
  if (!ids.empty() && (*ids.begin() != 0 || *ids.rbegin() != static_cast<int>(ids.size()) - 1))
    report("link ids are not dense from 0");

  if (!base_stations.empty()) {
    const NodeId hub = base_stations.front();
    for (std::size_t j = 1; j < base_stations.size(); ++j) {
      if (!pairs.count(std::minmax(hub.index, base_stations[j].index)))
        report("missing hub link BS1-BS" + std::to_string(j + 1));
    }
    if (has_donor && !pairs.count(std::minmax(hub.index, std::size_t{0})))
      report("missing hub link BS1-Donor");
  }
  for (const auto& ue : ues) {
    const int c = ue_links[ue];
    if (c != 1)
      report("UE node " + std::to_string(ue.index) + " has " + std::to_string(c) +
             " association links (expected 1)");
  }
  return issues;
}

}  // namespace iabsim
