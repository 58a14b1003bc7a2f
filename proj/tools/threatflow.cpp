/*
 * Copyright (c) 2026, The threatflow authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

// threatflow command line: validate | simulate | explore | paths | speculate |
// ingest | annotate | export | serve.
//
// Exit codes: 0 ok, 1 domain failure, 2 input/output or parse failure.

#include <csignal>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "threatflow/server.hpp"
#include "threatflow/threatflow.hpp"

namespace {

using namespace threatflow;

constexpr int kOk = 0;
constexpr int kDomain = 1;
constexpr int kInput = 2;

/// A net document (has "places") or a cloud configuration (has "users").
Net load_model(const std::string& path) {
  const Json j = read_json_file(path);
  if (j.is_object() && j.contains("places")) return net_from_json(j);
  if (j.is_object() && j.contains("users")) {
    const CloudConfig c = cloud_config_from_json(j);
    return build_cloud_net(c);
  }
  throw ParseError(path + ": neither a net (\"places\") nor a cloud configuration (\"users\")");
}

bool is_cloud(const Net& n) { return n.find_place("VM") && n.find_place("INT"); }

struct BoundFlags {
  Bounds bounds;
  int max_depth = 0;
  std::size_t max_nodes = 0;
  int max_tokens = 0;
  int workers = 0;

  void add(CLI::App* cmd) {
    cmd->add_option("--max-depth", max_depth, "Exploration depth bound")->check(CLI::PositiveNumber);
    cmd->add_option("--max-nodes", max_nodes, "Exploration node bound")->check(CLI::PositiveNumber);
    cmd->add_option("--max-tokens", max_tokens, "Tokens per place bound")->check(CLI::PositiveNumber);
    cmd->add_option("--workers", workers, "Exploration threads")->check(CLI::PositiveNumber);
  }

  Bounds apply(Bounds b) const {
    if (max_depth) b.max_depth = max_depth;
    if (max_nodes) b.max_nodes = max_nodes;
    if (max_tokens) b.max_tokens_per_place = max_tokens;
    if (workers) b.workers = workers;
    return b;
  }
};

int cmd_validate(const std::string& path, const BoundFlags& flags) {
  const Net net = load_model(path);
  const auto defects = validate_net(net);
  for (const auto& d : defects) std::cout << "defect: " << d.str() << "\n";
  if (!defects.empty()) return kDomain;
  const Engine engine(net);
  const auto g = explore(engine, engine.net().initial, flags.apply({}));
  std::size_t bad = 0;
  for (std::size_t i : g.dead_nodes()) {
    if (is_cloud(engine.net()) && engine.net().find_place("VM") && g.nodes[i].marking.empty("VM")) {
      std::cout << "dead marking without VM: " << g.nodes[i].marking.str() << "\n";
      ++bad;
    }
  }
  std::cout << net.name << ": " << g.nodes.size() << " markings, " << g.edges.size() << " firings, "
            << g.dead_nodes().size() << " dead" << (g.truncated ? ", truncated" : "") << "\n";
  if (bad) return kDomain;
  std::cout << "ok\n";
  return kOk;
}

int cmd_simulate(const std::string& path, std::uint64_t seed, std::size_t max_steps, const std::string& format) {
  const Net net = load_model(path);
  const Engine engine(net);
  const Trace t = simulate(engine, engine.net().initial, seed, max_steps);
  if (format == "json") {
    std::cout << dump_canonical(to_json(t));
    return kOk;
  }
  for (const auto& s : t.steps) std::cout << s.clock << "\t" << s.transition << "\t" << s.binding << "\n";
  std::cout << "final " << t.final_marking.str() << "\n";
  return kOk;
}

int cmd_explore(const std::string& path, const BoundFlags& flags, const std::string& format) {
  const Net net = load_model(path);
  const Engine engine(net);
  const auto g = explore(engine, engine.net().initial, flags.apply({}));
  if (format == "dot") {
    std::cout << graph_to_dot(g, net.name);
    return kOk;
  }
  Json dead = Json::array();
  for (std::size_t i : g.dead_nodes()) dead.push_back(to_json(g.nodes[i].marking));
  const Json j = {{"net", net.name},          {"nodes", g.nodes.size()}, {"edges", g.edges.size()},
                  {"truncated", g.truncated}, {"verified", verify_graph(engine, g)}, {"dead", dead}};
  if (format == "json") {
    std::cout << dump_canonical(j);
  } else {
    std::cout << net.name << ": " << g.nodes.size() << " markings, " << g.edges.size() << " firings, "
              << g.dead_nodes().size() << " dead" << (g.truncated ? ", truncated" : "") << "\n";
    for (std::size_t i : g.dead_nodes()) std::cout << "  dead: " << g.nodes[i].marking.str() << "\n";
  }
  return kOk;
}

Scenario scenario_with(const std::string& path, const BoundFlags& flags, const std::string& slicing) {
  Scenario s = load_scenario(path);
  s.options.bounds = flags.apply(s.options.bounds);
  if (!slicing.empty()) s.options.slicing = slicing_from(slicing);
  return s;
}

int cmd_paths(const std::string& path, const BoundFlags& flags, const std::string& slicing, const std::string& format,
              bool timing) {
  const RunReport r = run_scenario(scenario_with(path, flags, slicing));
  if (format == "dot") {
    std::cout << paths_to_dot(r.analysis.paths, r.scenario);
  } else if (format == "text") {
    std::cout << report_text(r, timing);
  } else {
    std::cout << dump_canonical(to_json(r, timing));
  }
  return kOk;
}

ScenarioDelta parse_delta(const std::vector<std::string>& toggles, const std::vector<std::string>& mitigations) {
  ScenarioDelta d;
  for (const auto& t : toggles) {
    const auto eq = t.rfind('=');
    const std::string state = eq == std::string::npos ? "" : t.substr(eq + 1);
    if (state != "on" && state != "off") throw ParseError("toggle '" + t + "' must look like ID=on or ID=off");
    d.toggles[t.substr(0, eq)] = state == "on";
  }
  d.mitigations = mitigations;
  return d;
}

int cmd_speculate(const std::string& path, const BoundFlags& flags, const std::string& slicing,
                  const std::vector<std::string>& toggles, const std::vector<std::string>& mitigations,
                  const std::string& format) {
  const Scenario s = scenario_with(path, flags, slicing);
  const Speculation spec = speculate(s, parse_delta(toggles, mitigations));
  if (format == "json") {
    std::cout << dump_canonical(to_json(spec));
  } else {
    std::cout << diff_text(spec.diff);
  }
  return kOk;
}

int cmd_ingest(const std::string& feed, const std::string& catalog_file, bool dry_run) {
  const ImportResult r = import_records(feed);
  for (const auto& e : r.errors) std::cerr << "malformed record " << e.id << ": " << e.reason << "\n";
  if (dry_run) {
    Json drafts = Json::array();
    for (const auto& d : r.drafts) drafts.push_back(to_json(d));
    std::cout << dump_canonical(drafts);
    return kOk;
  }
  const std::string path = catalog_path(catalog_file);
  Catalog c;
  if (std::filesystem::exists(path)) c = load_catalog(path);
  const std::size_t added = merge_drafts(c, r.drafts);
  save_catalog(path, c);
  std::cout << r.drafts.size() << " drafts read, " << added << " added to " << path << ", " << r.errors.size()
            << " malformed\n";
  return kOk;
}

int cmd_annotate(const std::string& id, const std::string& catalog_file, const std::string& cloud_file,
                 const Annotation& a) {
  const std::string path = catalog_path(catalog_file);
  Catalog c = load_catalog(path);
  const Net cloud = build_cloud_net(load_cloud_config(cloud_file));
  const ThreatDefinition t = annotate(c, id, a, cloud);
  save_catalog(path, c);
  std::cout << dump_canonical(to_json(t));
  return kOk;
}

int cmd_export(const std::string& path, const std::string& what, const BoundFlags& flags,
               const std::string& format) {
  const Json doc = read_json_file(path);
  const bool scenario = doc.is_object() && doc.contains("cloud");
  if (what == "paths") {
    if (!scenario) throw ParseError(path + " is not a scenario");
    return cmd_paths(path, flags, "", format == "json" ? "report" : "dot", false);
  }
  Net net;
  if (scenario) {
    const Scenario s = load_scenario(path);
    const ResolvedScenario r = resolve(s);
    net = attach(r.cloud, r.threats, r.links);
  } else {
    net = load_model(path);
  }
  if (what == "net") {
    std::cout << dump_canonical(net_to_json(format == "flat" ? flatten(net) : net));
    return kOk;
  }
  if (what == "graph") {
    const Engine engine(net);
    std::cout << graph_to_dot(explore(engine, engine.net().initial, flags.apply({})), net.name);
    return kOk;
  }
  throw ParseError("unknown export target '" + what + "'");
}

ApiServer* g_server = nullptr;

int cmd_serve(const std::string& host, int port, const std::string& scenarios, const std::string& catalog_file) {
  ServerOptions o;
  o.scenario_dir = scenarios;
  if (!catalog_file.empty()) o.catalog = catalog_file;
  ApiServer server(o);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  std::cerr << "serving " << scenarios << " on http://" << host << ":" << port << "\n";
  if (!server.listen(host, port)) {
    std::cerr << "cannot listen on " << host << ":" << port << "\n";
    return kDomain;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threat analysis over high-level Petri net models of a cloud"};
  app.require_subcommand(1);

  std::string model, scenario, format, slicing, feed, catalog_file = "catalog/threats.json";
  std::uint64_t seed = 0;
  std::size_t max_steps = 1000;
  bool timing = false, dry_run = false;
  BoundFlags flags;

  auto* validate = app.add_subcommand("validate", "Check a net or cloud configuration and its benign runs");
  validate->add_option("model", model, "Net or cloud configuration file")->required();
  flags.add(validate);

  auto* sim = app.add_subcommand("simulate", "Random run of a net");
  sim->add_option("model", model, "Net or cloud configuration file")->required();
  sim->add_option("--seed", seed, "Random seed");
  sim->add_option("--max-steps", max_steps, "Step limit");
  sim->add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}));

  auto* exp = app.add_subcommand("explore", "Bounded reachability graph of a net");
  exp->add_option("model", model, "Net or cloud configuration file")->required();
  exp->add_option("--format", format, "text | json | dot")->check(CLI::IsMember({"text", "json", "dot"}));
  flags.add(exp);

  auto* paths = app.add_subcommand("paths", "Attack paths of a scenario");
  paths->add_option("scenario", scenario, "Scenario file")->required();
  paths->add_option("--format", format, "report | text | dot")->check(CLI::IsMember({"report", "text", "dot"}));
  paths->add_option("--seed", seed, "Random seed (the enumeration itself is exhaustive)");
  paths->add_option("--slicing", slicing, "cone | none")->check(CLI::IsMember({"cone", "none"}));
  paths->add_flag("--timing", timing, "Include wall-clock time");
  flags.add(paths);

  std::vector<std::string> toggles, mitigations;
  auto* spec = app.add_subcommand("speculate", "Diff attack paths under hypothetical changes");
  spec->add_option("scenario", scenario, "Scenario file")->required();
  spec->add_option("--toggle", toggles, "ID=on|off")->take_all();
  spec->add_option("--mitigate", mitigations, "Mitigation name from the catalog")->take_all();
  spec->add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}));
  spec->add_option("--slicing", slicing, "cone | none")->check(CLI::IsMember({"cone", "none"}));
  flags.add(spec);

  auto* ingest = app.add_subcommand("ingest", "Import a vulnerability feed as draft threats");
  ingest->add_option("feed", feed, "Feed file (1.1 or 2.0 JSON)")->required();
  ingest->add_option("--catalog", catalog_file, "Catalog file (THREATFLOW_CATALOG overrides)");
  ingest->add_flag("--dry-run", dry_run, "Print drafts instead of saving");

  std::string id, cloud_file = "fixtures/paper-cloud.json";
  Annotation note;
  std::string place, action, consequence, service;
  std::vector<std::string> requires_list;
  auto* annot = app.add_subcommand("annotate", "Complete a catalog entry");
  annot->add_option("id", id, "Threat id")->required();
  annot->add_option("--place", place, "Target place");
  annot->add_option("--action", action, "Attacker action");
  annot->add_option("--consequence", consequence, "Consequence tag");
  annot->add_option("--service", service, "Service name");
  annot->add_option("--requires", requires_list, "Required consequence tags")->take_all();
  annot->add_option("--catalog", catalog_file, "Catalog file (THREATFLOW_CATALOG overrides)");
  annot->add_option("--cloud", cloud_file, "Cloud configuration used to check places");

  std::string what = "paths";
  auto* exportc = app.add_subcommand("export", "Write nets, graphs or path figures");
  exportc->add_option("input", model, "Scenario, net or cloud configuration file")->required();
  exportc->add_option("--what", what, "net | graph | paths")->check(CLI::IsMember({"net", "graph", "paths"}));
  exportc->add_option("--format", format, "json | flat | dot");
  flags.add(exportc);

  std::string host = "127.0.0.1", scenario_dir = "scenarios", serve_catalog;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "HTTP API");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port")->check(CLI::Range(0, 65535));
  serve->add_option("--scenarios", scenario_dir, "Scenario directory");
  serve->add_option("--catalog", serve_catalog, "Catalog listed by GET /threats");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (*validate) return cmd_validate(model, flags);
    if (*sim) return cmd_simulate(model, seed, max_steps, format.empty() ? "text" : format);
    if (*exp) return cmd_explore(model, flags, format.empty() ? "text" : format);
    if (*paths) return cmd_paths(scenario, flags, slicing, format.empty() ? "report" : format, timing);
    if (*spec) return cmd_speculate(scenario, flags, slicing, toggles, mitigations, format.empty() ? "text" : format);
    if (*ingest) return cmd_ingest(feed, catalog_file, dry_run);
    if (*annot) {
      if (!place.empty()) note.target_place = place;
      if (!action.empty()) note.action = action;
      if (!consequence.empty()) note.consequence = consequence;
      if (!service.empty()) note.service = service;
      if (!requires_list.empty()) note.requires_ = requires_list;
      return cmd_annotate(id, catalog_file, cloud_file, note);
    }
    if (*exportc) return cmd_export(model, what, flags, format.empty() ? "dot" : format);
    if (*serve) return cmd_serve(host, port, scenario_dir, serve_catalog);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  }
  return kOk;
}
