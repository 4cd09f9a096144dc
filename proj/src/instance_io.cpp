#include "vmc/instance_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace vmc {

using nlohmann::json;

namespace {

std::int64_t require_int(const json& obj, const char* field, const std::string& where) {
  if (!obj.is_object()) throw InstanceError(where + ": expected an object");
  auto it = obj.find(field);
  if (it == obj.end()) throw InstanceError(where + ": missing field \"" + field + "\"");
  if (!it->is_number_integer()) {
    throw InstanceError(where + "." + field + ": expected an integer");
  }
  return it->get<std::int64_t>();
}

const json& require_array(const json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end()) throw InstanceError(std::string("missing top-level field \"") + field + "\"");
  if (!it->is_array()) throw InstanceError(std::string(field) + ": expected an array");
  return *it;
}

json to_document(const Instance& inst, std::span<const HostId> hosts_of) {
  json doc;
  doc["hosts"] = json::array();
  for (const Host& h : inst.hosts()) {
    doc["hosts"].push_back({{"id", h.id}, {"cpu", h.capacity.cpu}, {"mem", h.capacity.mem}});
  }
  doc["flavors"] = json::array();
  for (const Flavor& f : inst.flavors()) {
    doc["flavors"].push_back({{"id", f.id}, {"cpu", f.demand.cpu}, {"mem", f.demand.mem}});
  }
  doc["vms"] = json::array();
  for (const Vm& v : inst.vms()) {
    doc["vms"].push_back({{"id", v.id}, {"flavor", v.flavor}, {"host", hosts_of[v.id]}});
  }
  return doc;
}

}  // namespace

Instance parse_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InstanceError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InstanceError("top level: expected an object");

  std::vector<Host> hosts;
  const json& jh = require_array(doc, "hosts");
  for (std::size_t i = 0; i < jh.size(); ++i) {
    const std::string where = "hosts[" + std::to_string(i) + "]";
    hosts.push_back({static_cast<HostId>(require_int(jh[i], "id", where)),
                     {require_int(jh[i], "cpu", where), require_int(jh[i], "mem", where)}});
  }

  std::vector<Flavor> flavors;
  const json& jf = require_array(doc, "flavors");
  for (std::size_t i = 0; i < jf.size(); ++i) {
    const std::string where = "flavors[" + std::to_string(i) + "]";
    flavors.push_back({static_cast<FlavorId>(require_int(jf[i], "id", where)),
                       {require_int(jf[i], "cpu", where), require_int(jf[i], "mem", where)}});
  }

  std::vector<Vm> vms;
  std::vector<HostId> initial;
  const json& jv = require_array(doc, "vms");
  for (std::size_t i = 0; i < jv.size(); ++i) {
    const std::string where = "vms[" + std::to_string(i) + "]";
    vms.push_back({static_cast<VmId>(require_int(jv[i], "id", where)),
                   static_cast<FlavorId>(require_int(jv[i], "flavor", where))});
    initial.push_back(static_cast<HostId>(require_int(jv[i], "host", where)));
  }
  return Instance(std::move(hosts), std::move(flavors), std::move(vms), std::move(initial));
}

Instance load_instance(const std::filesystem::path& path) {
  return parse_instance(read_text_file(path));
}

std::string instance_to_json(const Instance& inst) {
  return to_document(inst, inst.initial_hosts()).dump(1) + "\n";
}

std::string mapping_to_json(const Mapping& mu, const ObjectiveWeights& w) {
  if (!mu.is_total()) throw std::invalid_argument("mapping_to_json: mapping is not total");
  json doc = to_document(mu.instance(), mu.assignment());
  const Mapping initial = mu.instance().initial_mapping();
  const ObjectiveValue obj = objective(mu, initial, w);
  doc["summary"] = {{"active_hosts", mu.active_count()},
                    {"initial_active_hosts", initial.active_count()},
                    {"migrated_memory", migrated_memory(mu, initial)},
                    {"objective", obj.primary},
                    {"infinite_mph", w.infinite()},
                    {"feasible", mu.is_feasible()}};
  return doc.dump(1) + "\n";
}

Instance rebase(const Mapping& mu) {
  const Instance& inst = mu.instance();
  std::vector<Host> hosts(inst.hosts().begin(), inst.hosts().end());
  std::vector<Flavor> flavors(inst.flavors().begin(), inst.flavors().end());
  std::vector<Vm> vms(inst.vms().begin(), inst.vms().end());
  std::vector<HostId> hosts_of(mu.assignment().begin(), mu.assignment().end());
  return Instance(std::move(hosts), std::move(flavors), std::move(vms), std::move(hosts_of));
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace vmc
