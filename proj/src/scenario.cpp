#include "mpoi/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "mpoi/error.hpp"

namespace mpoi {

using json = nlohmann::json;

namespace {

struct Problems {
  std::vector<std::string> items;

  void add(std::string msg) { items.push_back(std::move(msg)); }
};

// Raised while walking the document; collected by the caller.
struct Bad {
  std::string msg;
};

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw Bad{where + ": missing \"" + key + "\""};
  return obj.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw Bad{where + ": expected a number"};
  return j.get<double>();
}

std::size_t count(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw Bad{where + ": expected a non-negative integer"};
  return j.get<std::size_t>();
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) throw Bad{where + ": expected a string"};
  return j.get<std::string>();
}

std::pair<std::size_t, std::size_t> line_column(std::string_view src, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < src.size(); ++i) {
    if (src[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

MarkovSystem parse_system(const json& js, std::size_t idx, Problems& problems, bool& ok) {
  const std::string where = "systems[" + std::to_string(idx) + "]";
  const std::string name = js.contains("name") ? text(js.at("name"), where + ".name") : "MS" + std::to_string(idx);
  const std::string at = "system '" + name + "'";
  SystemDraft draft(name);
  std::map<std::string, StateId> ids;
  const auto& states = member(js, "states", at);
  if (!states.is_array() || states.empty()) throw Bad{at + ": \"states\" must be a non-empty list"};
  for (const auto& s : states) {
    auto sname = text(s, at + ".states");
    if (ids.count(sname)) throw Bad{at + ": state '" + sname + "' declared twice"};
    ids.emplace(sname, draft.add_state(sname));
  }
  bool local_ok = true;
  auto lookup = [&](const json& j, const std::string& ctx) -> std::optional<StateId> {
    const auto sname = text(j, ctx);
    auto it = ids.find(sname);
    if (it == ids.end()) {
      problems.add(at + ": " + ctx + " names unknown state '" + sname + "'");
      local_ok = false;
      return std::nullopt;
    }
    return it->second;
  };

  if (auto s = lookup(member(js, "start", at), "start")) draft.start(*s);
  if (js.contains("edges")) {
    for (const auto& e : js.at("edges")) {
      if (!e.is_array() || e.size() != 3) throw Bad{at + ": every edge is [from, to, probability]"};
      auto from = lookup(e[0], "edge source");
      auto to = lookup(e[1], "edge target");
      const double p = number(e[2], at + ": edge probability");
      if (from && to) draft.edge(*from, *to, p);
    }
  }
  if (js.contains("prices")) {
    for (const auto& [k, v] : js.at("prices").items())
      if (auto s = lookup(json(k), "prices")) draft.price(*s, number(v, at + ": price of " + k));
  }
  for (const auto& [k, v] : member(js, "destinations", at).items()) {
    auto s = lookup(json(k), "destinations");
    if (!s) continue;
    if (v.is_null()) {
      draft.destination(*s);
    } else {
      draft.destination(*s, number(v, at + ": value of " + k));
    }
  }
  if (!local_ok) {
    ok = false;
    return constant_system(0.0);
  }
  const auto report = validate_system(draft);
  if (!report.ok()) {
    problems.add(at + ": " + report.to_string());
    ok = false;
    return constant_system(0.0);
  }
  return MarkovSystem::from_draft(draft);
}

std::size_t element_ref(const json& j, const std::vector<MarkovSystem>& systems, const std::string& ctx) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    for (std::size_t i = 0; i < systems.size(); ++i)
      if (systems[i].name() == name) return i;
    throw Bad{ctx + ": unknown system '" + name + "'"};
  }
  const std::size_t i = count(j, ctx);
  if (i >= systems.size()) throw Bad{ctx + ": element " + std::to_string(i) + " out of range"};
  return i;
}

std::vector<Edge> parse_edges(const json& c, std::size_t vertices, const std::string& ctx) {
  std::vector<Edge> edges;
  for (const auto& e : member(c, "edges", ctx)) {
    if (!e.is_array() || e.size() != 2) throw Bad{ctx + ": every edge is [u, v]"};
    const Edge edge{count(e[0], ctx), count(e[1], ctx)};
    if (edge.first >= vertices || edge.second >= vertices)
      throw Bad{ctx + ": edge endpoint beyond \"vertices\""};
    edges.push_back(edge);
  }
  return edges;
}

Matroid parse_matroid(const json& c, const std::vector<MarkovSystem>& systems) {
  const std::size_t n = systems.size();
  const auto kind = text(member(c, "kind", "constraint"), "constraint.kind");
  const std::string ctx = "constraint '" + kind + "'";
  if (kind == "uniform_matroid") return Matroid::uniform(n, count(member(c, "k", ctx), ctx + ".k"));
  if (kind == "partition_matroid") {
    const auto& parts = member(c, "parts", ctx);
    std::vector<std::size_t> part_of(n, n);
    for (std::size_t p = 0; p < parts.size(); ++p)
      for (const auto& e : parts[p]) {
        const std::size_t i = element_ref(e, systems, ctx + ".parts");
        if (part_of[i] != n) throw Bad{ctx + ": element " + std::to_string(i) + " in two parts"};
        part_of[i] = p;
      }
    for (std::size_t i = 0; i < n; ++i)
      if (part_of[i] == n) throw Bad{ctx + ": element " + std::to_string(i) + " in no part"};
    std::vector<std::size_t> caps;
    if (c.contains("capacities")) {
      for (const auto& v : c.at("capacities")) caps.push_back(count(v, ctx + ".capacities"));
    } else {
      caps.assign(parts.size(), 1);
    }
    if (caps.size() != parts.size()) throw Bad{ctx + ": one capacity per part expected"};
    return Matroid::partition(std::move(part_of), std::move(caps));
  }
  if (kind == "graphic_matroid") {
    const std::size_t v = count(member(c, "vertices", ctx), ctx + ".vertices");
    auto edges = parse_edges(c, v, ctx);
    if (edges.size() != n) throw Bad{ctx + ": one edge per system expected"};
    return Matroid::graphic(v, std::move(edges));
  }
  throw Bad{ctx + ": not a matroid kind"};
}

struct Constraint {
  std::optional<PackingOracle> packing;
  std::optional<CoveringOracle> covering;
};

Constraint parse_constraint(const json& c, const std::vector<MarkovSystem>& systems) {
  const auto kind = text(member(c, "kind", "constraint"), "constraint.kind");
  const std::string ctx = "constraint '" + kind + "'";
  const std::size_t n = systems.size();
  Constraint out;
  if (kind == "uniform_matroid" || kind == "partition_matroid" || kind == "graphic_matroid") {
    out.packing = PackingOracle::matroid(parse_matroid(c, systems));
  } else if (kind == "matching") {
    const std::size_t v = count(member(c, "vertices", ctx), ctx + ".vertices");
    auto edges = parse_edges(c, v, ctx);
    if (edges.size() != n) throw Bad{ctx + ": one edge per system expected"};
    out.packing = PackingOracle::matching(v, std::move(edges));
  } else if (kind == "k_system") {
    std::vector<Matroid> ms;
    for (const auto& m : member(c, "matroids", ctx)) ms.push_back(parse_matroid(m, systems));
    if (ms.empty()) throw Bad{ctx + ": needs at least one matroid"};
    out.packing = PackingOracle::k_system(std::move(ms));
  } else if (kind == "matroid_base") {
    out.covering = CoveringOracle::matroid_base(parse_matroid(member(c, "matroid", ctx), systems));
  } else if (kind == "set_cover") {
    const std::size_t universe = count(member(c, "universe", ctx), ctx + ".universe");
    const auto& sets = member(c, "sets", ctx);
    if (sets.size() != n) throw Bad{ctx + ": one set per system expected"};
    std::vector<std::vector<std::size_t>> items;
    for (const auto& s : sets) {
      std::vector<std::size_t> set;
      for (const auto& x : s) set.push_back(count(x, ctx + ".sets"));
      items.push_back(std::move(set));
    }
    out.covering = CoveringOracle::set_cover(universe, std::move(items));
  } else {
    throw Bad{ctx + ": unknown kind"};
  }
  return out;
}

std::size_t depth_of(const MarkovSystem& ms) {
  const auto c = classify(ms);
  return c.depth ? *c.depth : ms.state_count();
}

}  // namespace

Instance Scenario::instance() const {
  std::optional<MarginalValueFn> g;
  if (marginal_name)
    g = marginal_by_name(*marginal_name, packing ? &*packing : nullptr, covering ? &*covering : nullptr);
  if (packing) return Instance::packing(systems, *packing, objective, g);
  return Instance::covering(systems, *covering, objective, g);
}

std::size_t Scenario::system_index(std::string_view system_name) const {
  for (std::size_t i = 0; i < systems.size(); ++i)
    if (systems[i].name() == system_name) return i;
  throw Error(ErrorCode::invalid_argument, "no system named '" + std::string(system_name) + "'");
}

InputSize input_size(const Scenario& sc) {
  InputSize s;
  s.n = sc.systems.size();
  for (const auto& ms : sc.systems) {
    s.B = std::max(s.B, ms.max_abs_parameter());
    s.D = std::max(s.D, depth_of(ms));
  }
  s.k = sc.packing ? sc.packing->max_feasible_size() : s.n;
  s.bound = sc.input_bound.coefficient *
            std::pow(static_cast<double>(s.n * std::max<std::size_t>(s.k, 1) * std::max<std::size_t>(s.D, 1)),
                     sc.input_bound.degree);
  return s;
}

Scenario parse_scenario(std::string_view src) {
  json doc;
  try {
    doc = json::parse(src.begin(), src.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(src, e.byte);
    throw Error(ErrorCode::parse_error, "line " + std::to_string(line) + ", column " +
                                            std::to_string(col) + ": " + e.what());
  }

  Scenario sc;
  Problems problems;
  try {
    if (!doc.is_object()) throw Bad{"top level must be an object"};
    if (doc.contains("name")) sc.name = text(doc.at("name"), "name");
    if (doc.contains("description")) sc.description = text(doc.at("description"), "description");
    const auto& systems = member(doc, "systems", "scenario");
    if (!systems.is_array() || systems.empty()) throw Bad{"\"systems\" must be a non-empty list"};
    bool ok = true;
    for (std::size_t i = 0; i < systems.size(); ++i) {
      try {
        sc.systems.push_back(parse_system(systems[i], i, problems, ok));
      } catch (const Bad& b) {
        problems.add(b.msg);
        ok = false;
      }
    }
    for (std::size_t i = 0; i < sc.systems.size() && ok; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (sc.systems[i].name() == sc.systems[j].name())
          problems.add("system name '" + sc.systems[i].name() + "' used twice");
    if (!ok || !problems.items.empty()) throw Bad{};

    auto c = parse_constraint(member(doc, "constraint", "scenario"), sc.systems);
    sc.packing = std::move(c.packing);
    sc.covering = std::move(c.covering);
    const Sense implied = sc.packing ? Sense::utimax : Sense::dismin;
    sc.mode = implied;
    if (doc.contains("mode")) {
      const auto m = text(doc.at("mode"), "mode");
      if (m != "utimax" && m != "dismin") throw Bad{"mode must be \"utimax\" or \"dismin\""};
      if ((m == "utimax") != (implied == Sense::utimax))
        throw Bad{"mode '" + m + "' does not fit a " +
                  (sc.packing ? std::string("packing") : std::string("covering")) + " constraint"};
    }

    if (doc.contains("objective")) {
      const auto& o = doc.at("objective");
      const auto kind = o.is_object() ? text(member(o, "kind", "objective"), "objective.kind")
                                      : text(o, "objective");
      sc.objective_name = kind;
      if (kind == "additive") {
        sc.objective = SemiadditiveObjective::additive();
      } else if (kind == "set_cover") {
        if (!sc.covering || sc.covering->kind() != CoveringKind::set_cover)
          throw Bad{"objective 'set_cover' needs a set_cover constraint"};
        sc.objective = SemiadditiveObjective::set_cover_h(*sc.covering);
      } else if (kind == "custom_table") {
        std::map<std::uint64_t, double> table;
        for (const auto& entry : member(o, "h", "objective")) {
          if (!entry.is_array() || entry.size() != 2) throw Bad{"objective.h entries are [mask, value]"};
          table[entry[0].get<std::uint64_t>()] = number(entry[1], "objective.h");
        }
        sc.objective = SemiadditiveObjective::custom_table(std::move(table));
      } else {
        throw Bad{"unknown objective '" + kind + "'"};
      }
    }
    if (doc.contains("marginal_fn")) sc.marginal_name = text(doc.at("marginal_fn"), "marginal_fn");
    if (doc.contains("assumptions") && doc.at("assumptions").contains("input_bound")) {
      const auto& b = doc.at("assumptions").at("input_bound");
      if (b.contains("coefficient")) sc.input_bound.coefficient = number(b.at("coefficient"), "input_bound");
      if (b.contains("degree")) sc.input_bound.degree = number(b.at("degree"), "input_bound");
    }
    (void)sc.instance();
  } catch (const Bad& b) {
    if (!b.msg.empty()) problems.add(b.msg);
  } catch (const json::exception& e) {
    problems.add(e.what());
  } catch (const Error& e) {
    problems.add(e.what());
  }
  if (!problems.items.empty()) {
    std::string msg;
    for (const auto& p : problems.items) msg += (msg.empty() ? "" : "; ") + p;
    throw Error(ErrorCode::validation_error, msg);
  }

  const auto size = input_size(sc);
  if (size.B > size.bound) {
    std::ostringstream os;
    os << "AssumptionBViolated: B = " << size.B << " exceeds " << sc.input_bound.coefficient
       << " * (n k D)^" << sc.input_bound.degree << " = " << size.bound << " (n = " << size.n
       << ", k = " << size.k << ", D = " << size.D << ")";
    sc.warnings.push_back(os.str());
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto sc = parse_scenario(buf.str());
  if (sc.name.empty()) sc.name = path.stem().string();
  return sc;
}

}  // namespace mpoi
