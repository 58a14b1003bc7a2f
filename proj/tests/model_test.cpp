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

#include <gtest/gtest.h>

#include <random>

#include "threatflow/threatflow.hpp"

using namespace threatflow;

namespace {

const std::string kRoot = THREATFLOW_SOURCE_DIR;

CloudConfig one_user(int requests = 1, bool migration = false) {
  CloudConfig c;
  c.users = {{"sm", "t1", 0}};
  c.quotas["sm"] = Quota{"small", 2048, 20};
  c.servers = {{"host-1", "dc-1", 1}, {"host-2", "dc-1", 1}};
  c.disk_images = {"img-b", "img-a"};
  c.mac_pool = {"m0", "m1", "m2"};
  c.ip_pool = {"10.0.0.1", "10.0.0.2", "10.0.0.3"};
  c.logins = {{"sm", "t1", 0}};
  for (int i = 0; i < requests; ++i) c.requests.push_back({"sm", "small", 1024, 10, i == 1, 0});
  c.migration.enabled = migration;
  return c;
}

Marking run_to_end(const Net& n, std::uint64_t seed = 0) {
  const Engine e(n);
  return simulate(e, e.net().initial, seed, 1000).final_marking;
}

ThreatDefinition simple_threat(const std::string& id, const std::string& place, const std::string& consequence) {
  ThreatDefinition t;
  t.id = id;
  t.service = "svc";
  t.target_place = place;
  t.issue = "flaw";
  t.action = "flaw";
  t.consequence = consequence;
  t.cia.c = Impact::Full;
  return t;
}

}  // namespace

TEST(CloudConfig, JsonRoundTripAndValidation) {
  const CloudConfig c = load_cloud_config(kRoot + "/fixtures/paper-cloud.json");
  EXPECT_EQ(c.users.size(), 1u);
  EXPECT_TRUE(c.migration.enabled);
  const CloudConfig again = cloud_config_from_json(to_json(c));
  EXPECT_EQ(to_json(again).dump(), to_json(c).dump());

  CloudConfig dup = one_user();
  dup.users.push_back({"sm", "other", 0});
  EXPECT_THROW(dup.validate(), InvalidConfig);
  CloudConfig no_quota = one_user();
  no_quota.quotas.clear();
  EXPECT_THROW(no_quota.validate(), InvalidConfig);
  CloudConfig no_pool = one_user();
  no_pool.mac_pool.clear();
  EXPECT_THROW(build_cloud_net(no_pool), InvalidConfig);
}

TEST(AbstractTs, TransitionNamesAreInputs) {
  const Net n = build_abstract_ts(false);
  EXPECT_TRUE(validate_net(n).empty());
  EXPECT_EQ(n.transitions.size(), 7u);
  EXPECT_EQ(n.find_transition("A.c")->name, "c");
  EXPECT_EQ(build_abstract_ts(true).transitions.size(), 9u);
}

TEST(Login, MatchingCredentialsGoOnline) {
  CloudConfig c = one_user();
  c.logins = {{"sm", "t1", 0}};
  const Net n = build_login_net(c);
  const Marking end = run_to_end(n);
  EXPECT_EQ(end.values("On_Usrs"), std::vector<Value>{Value::text("sm")});
  EXPECT_TRUE(end.empty("Log_Errs"));
}

TEST(Login, WrongPasswordOrOnlineUserFails) {
  CloudConfig c = one_user();
  c.logins = {{"sm", "nope", 0}};
  EXPECT_EQ(run_to_end(build_login_net(c)).size("Log_Errs"), 1);
  c.logins = {{"sm", "t1", 0}};
  c.online_users = {"sm"};
  const Marking end = run_to_end(build_login_net(c));
  EXPECT_EQ(end.size("Log_Errs"), 1);
  EXPECT_EQ(end.size("On_Usrs"), 1);
}

TEST(Login, DuplicateUsernamesRejected) {
  CloudConfig c = one_user();
  c.users.push_back({"sm", "x", 0});
  EXPECT_THROW(build_login_net(c), InvalidConfig);
}

TEST(CloudNet, ValidRequestEndsWithVm) {
  const Net n = build_cloud_net(one_user());
  EXPECT_TRUE(validate_net(n).empty());
  const Marking end = run_to_end(n);
  ASSERT_EQ(end.size("VM"), 1);
  const Value vm = end.values("VM")[0];
  EXPECT_EQ(vm.field("loc")->as_text(), "host-1");
  EXPECT_EQ(vm.field("di")->as_text(), "img-a");  // smallest image
  EXPECT_EQ(vm.field("ip")->as_text(), "10.0.0.1");
  EXPECT_EQ(vm.field("mac")->as_text(), "m0");
  EXPECT_EQ(vm.field("kind")->as_text(), "VM");
  const Value account = end.values("DB")[0];
  EXPECT_EQ(account.field("vms")->items().size(), 1u);
}

TEST(CloudNet, QuotaViolationIsRejected) {
  CloudConfig c = one_user();
  c.requests = {{"sm", "small", 4096, 10, false, 0}};
  const Marking end = run_to_end(build_cloud_net(c));
  EXPECT_TRUE(end.empty("VM"));
  EXPECT_EQ(end.size("VMErr"), 1);
}

TEST(CloudNet, StrictQuotaEqualityRejectsSmallerRequests) {
  CloudConfig c = one_user();
  c.strict_quota_equality = true;
  EXPECT_EQ(run_to_end(build_cloud_net(c)).size("VMErr"), 1);
  c.requests = {{"sm", "small", 2048, 20, false, 0}};
  EXPECT_EQ(run_to_end(build_cloud_net(c)).size("VM"), 1);
}

TEST(CloudNet, FirstFitFillsHostsInRankOrder) {
  const Marking end = run_to_end(build_cloud_net(one_user(2)), 7);
  ASSERT_EQ(end.size("VM"), 2);
  std::set<std::string> locs, kinds;
  for (const auto& v : end.values("VM")) {
    locs.insert(v.field("loc")->as_text());
    kinds.insert(v.field("kind")->as_text());
  }
  EXPECT_EQ(locs, (std::set<std::string>{"host-1", "host-2"}));
  EXPECT_EQ(kinds, (std::set<std::string>{"VM", "VM+Data"}));
}

TEST(CloudNet, ProviderMigrationMovesTheVm) {
  CloudConfig c = one_user(1, true);
  c.migration.at = 0;
  const Marking end = run_to_end(build_cloud_net(c));
  ASSERT_EQ(end.size("VM"), 1);
  EXPECT_EQ(end.values("VM")[0].field("loc")->as_text(), "host-2");
  EXPECT_TRUE(end.empty("MIGREQ"));
}

TEST(CloudNet, InjectionChecksPlaceAndType) {
  const Net n = build_cloud_net(one_user());
  Marking m = inject_request(n, n.initial, Credentials{"sm", "t1", 3});
  EXPECT_EQ(m.size("UI"), 2);
  EXPECT_THROW(inject(n, n.initial, "Nowhere", Value::text("x")), UnknownPlace);
  EXPECT_THROW(inject(n, n.initial, "UI", Value::text("x")), TypeMismatch);
  EXPECT_THROW(inject_request(n, n.initial, VmRequest{"sm", "small", -1, 1, false, 0}), TypeMismatch);
}

TEST(Threat, ValidationAndLabels) {
  ThreatDefinition t = simple_threat("CVE-1", "VM", "escalate");
  t.surface = {{"VM", {{"loc", Value::text("host-1")}}}};
  EXPECT_EQ(t.label(), "CVE-1@VM{loc=host-1}");
  EXPECT_NO_THROW(validate_threat(t));
  ThreatDefinition bad = t;
  bad.consequence = "explode";
  EXPECT_THROW(validate_threat(bad), InvalidThreat);
  bad = t;
  bad.cia = {};
  EXPECT_THROW(validate_threat(bad), InvalidThreat);
  const Net cloud = build_cloud_net(one_user());
  bad = t;
  bad.target_place = "XYZ";
  EXPECT_THROW(validate_threat(bad, &cloud), UnknownPlace);
  EXPECT_EQ(threat_from_json(to_json(t)), t);
  EXPECT_EQ(consequence_token("custom:retain-token"), "retain-token");
  EXPECT_TRUE(valid_consequence("custom:anything"));
}

TEST(Threat, SubnetExploitsWhenActionMatchesIssue) {
  const ThreatDefinition t = simple_threat("CVE-1", "VM", "read-data");
  const Net sub = build_threat_subnet(t);
  EXPECT_TRUE(validate_net(sub).empty());
  const Marking end = run_to_end(sub);
  EXPECT_EQ(end.values("Cons"), std::vector<Value>{Value::text("read-data")});

  ThreatDefinition wrong = t;
  wrong.action = "other";
  const Marking failed = run_to_end(build_threat_subnet(wrong));
  EXPECT_TRUE(failed.empty("Cons"));
  wrong.aliases = {"other"};
  EXPECT_EQ(run_to_end(build_threat_subnet(wrong)).size("Cons"), 1);
}

TEST(Threat, RequirementsViolatedByImpact) {
  ThreatDefinition t = simple_threat("CVE-2013-4222", "AS", "bypass-auth");
  const std::vector<SecurityRequirement> reqs{{Axis::Confidentiality, 1, {}}, {Axis::Availability, 2, {}}};
  const auto v = violated_requirements({achieved(t)}, reqs);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].requirement.axis, Axis::Confidentiality);
  EXPECT_FALSE(v[0].partial);

  t.cia = {};
  t.cia.a = Impact::Partial;
  const auto a = violated_requirements({achieved(t)}, {{Axis::Availability, 1, {}}});
  ASSERT_EQ(a.size(), 1u);
  EXPECT_TRUE(a[0].partial);
  EXPECT_TRUE(violated_requirements({achieved(t)}, {{Axis::Availability, 1, std::string("NET")}}).empty());
}

TEST(Attach, ThreatsBecomeSubmodulesFusedToTheCloud) {
  const Net cloud = build_cloud_net(one_user());
  ThreatDefinition a = simple_threat("A", "AS", "bypass-auth");
  ThreatDefinition b = simple_threat("B", "CA", "escalate");
  b.requires_ = {"bypass-auth"};
  const Net net = attach(cloud, {a, b}, {{"A", {{LinkEffect::Kind::Inject, "MIGREQ", Value::text("x"), ""}}}});
  EXPECT_TRUE(validate_net(net).empty());
  EXPECT_EQ(net.submodules.size(), 2u);
  const Net flat = flatten(net);
  EXPECT_TRUE(flat.find_transition("A/Exploit_S"));
  EXPECT_FALSE(flat.find_place("A/port:AS"));  // fused into AS
  EXPECT_EQ(threat_of("A/Exploit_S"), "A");
  EXPECT_EQ(threat_of("VM_S"), "");

  const Marking end = run_to_end(net, 3);
  std::set<std::string> by;
  for (const auto& v : end.values(kCapPlace)) by.insert(v.field("by")->as_text());
  EXPECT_EQ(by, (std::set<std::string>{"A", "B"}));
  EXPECT_EQ(end.values("MIGREQ"), std::vector<Value>{Value::text("x")});

  EXPECT_THROW(attach(cloud, {a}, {{"Z", {}}}), UnresolvedLink);
  EXPECT_THROW(attach(cloud, {a}, {{"A", {{LinkEffect::Kind::Inject, "VM", Value::text("x"), ""}}}}),
               UnresolvedLink);
}

TEST(Attach, UnmetRequirementBlocksExploit) {
  const Net cloud = build_cloud_net(one_user());
  ThreatDefinition b = simple_threat("B", "CA", "escalate");
  b.requires_ = {"bypass-auth"};
  const Marking end = run_to_end(attach(cloud, {b}, {}));
  EXPECT_TRUE(end.empty(kCapPlace));
  EXPECT_EQ(end.size("VM"), 1);
}

TEST(Catalog, RoundTripIsByteIdentical) {
  for (const char* f : {"/catalog/threats.json", "/fixtures/table4.json"}) {
    const std::string path = kRoot + f;
    const Catalog c = load_catalog(path);
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    EXPECT_EQ(dump_canonical(to_json(c)), text.str()) << f;
  }
}

TEST(Catalog, SharedEntriesAgree) {
  const Catalog all = load_catalog(kRoot + "/catalog/threats.json");
  const Catalog table = load_catalog(kRoot + "/fixtures/table4.json");
  EXPECT_EQ(table.threats.size(), 18u);
  for (const auto& t : table.threats) {
    const ThreatDefinition* other = all.find(t.id);
    ASSERT_TRUE(other) << t.id;
    EXPECT_EQ(*other, t);
  }
}

TEST(Catalog, RejectsDuplicatesAndBadVersions) {
  Json j = to_json(load_catalog(kRoot + "/fixtures/table4.json"));
  Json dup = j;
  dup["threats"].push_back(dup["threats"][0]);
  EXPECT_THROW(catalog_from_json(dup), InvalidThreat);
  Json old = j;
  old["schema_version"] = 0;
  EXPECT_THROW(catalog_from_json(old), ParseError);
}

TEST(Ingest, TableFeedGivesOneDraftPerRecord) {
  const ImportResult r = import_records(kRoot + "/fixtures/nvd-table4.json");
  const Json feed = read_json_file(kRoot + "/fixtures/nvd-table4.json");
  EXPECT_EQ(r.drafts.size(), feed["CVE_Items"].size());
  EXPECT_TRUE(r.errors.empty());
  const auto it = std::find_if(r.drafts.begin(), r.drafts.end(),
                               [](const ThreatDefinition& d) { return d.id == "CVE-2013-4222"; });
  ASSERT_NE(it, r.drafts.end());
  EXPECT_TRUE(it->draft);
  EXPECT_EQ(it->cia.c, Impact::Full);
  EXPECT_EQ(it->cia.i, Impact::None);
  EXPECT_TRUE(it->target_place.empty());
}

TEST(Ingest, ImpactsMatchTheCatalogFixture) {
  const ImportResult r = import_records(kRoot + "/fixtures/nvd-table4.json");
  const Catalog table = load_catalog(kRoot + "/fixtures/table4.json");
  for (const auto& d : r.drafts) {
    const ThreatDefinition* t = table.find(d.id);
    ASSERT_TRUE(t) << d.id;
    EXPECT_EQ(d.cia, t->cia) << d.id;
  }
}

TEST(Ingest, MalformedRecordsAreCollected) {
  const Json feed = Json::parse(R"({"CVE_Items": [
    {"cve": {"CVE_data_meta": {"ID": "CVE-13-1"}}},
    {"cve": {}},
    {"cve": {"CVE_data_meta": {"ID": "CVE-2020-12345"}, "description": {"description_data": [{"lang": "en", "value": "x"}]}},
     "impact": {"baseMetricV3": {"cvssV3": {"confidentialityImpact": "LOW", "integrityImpact": "HIGH"}},
                "baseMetricV2": {"cvssV2": {"confidentialityImpact": "COMPLETE"}}}}]})");
  const ImportResult r = import_records(feed);
  ASSERT_EQ(r.errors.size(), 2u);
  EXPECT_EQ(r.errors[0].id, "CVE-13-1");
  ASSERT_EQ(r.drafts.size(), 1u);
  EXPECT_EQ(r.drafts[0].cia.c, Impact::Partial);  // V3 preferred over V2
  EXPECT_EQ(r.drafts[0].cia.i, Impact::Full);
  EXPECT_EQ(r.drafts[0].cia.a, Impact::None);
  EXPECT_NE(std::find(r.drafts[0].review.begin(), r.drafts[0].review.end(), "cia.a"), r.drafts[0].review.end());
  EXPECT_THROW(import_records(Json::parse(R"({"items": []})")), ParseError);
}

TEST(Ingest, ApiTwoFeed) {
  const Json feed = Json::parse(R"({"vulnerabilities": [{"cve": {"id": "CVE-2016-5362",
    "descriptions": [{"lang": "es", "value": "y"}, {"lang": "en", "value": "spoofing"}],
    "metrics": {"cvssMetricV2": [{"cvssData": {"confidentialityImpact": "PARTIAL", "integrityImpact": "NONE",
                                               "availabilityImpact": "NONE"}}]}}}]})");
  const ImportResult r = import_records(feed);
  ASSERT_EQ(r.drafts.size(), 1u);
  EXPECT_EQ(r.drafts[0].issue, "spoofing");
  EXPECT_EQ(r.drafts[0].cia.c, Impact::Partial);
}

TEST(Annotate, CompletesDraftAndAudits) {
  Catalog c;
  merge_drafts(c, import_records(kRoot + "/fixtures/nvd-table4.json").drafts);
  const Net cloud = build_cloud_net(load_cloud_config(kRoot + "/fixtures/paper-cloud.json"));
  Annotation a;
  a.target_place = "AS";
  a.action = "request-token";
  a.consequence = "custom:retain-token";
  a.service = "keystone";
  const ThreatDefinition t = annotate(c, "CVE-2013-4222", a, cloud);
  EXPECT_FALSE(t.draft);
  EXPECT_EQ(t.target_place, "AS");
  EXPECT_EQ(run_to_end(build_threat_subnet(t)).size("Cons"), 1);  // action accepted as alias
  ASSERT_EQ(c.audit.size(), 1u);
  EXPECT_EQ(c.audit[0]["previous"]["draft"], true);

  Annotation again;
  again.target_place = "CA";
  annotate(c, "CVE-2013-4222", again, cloud);
  EXPECT_EQ(c.find("CVE-2013-4222")->target_place, "CA");
  ASSERT_EQ(c.audit.size(), 2u);
  EXPECT_EQ(c.audit[1]["previous"]["target_place"], "AS");

  Annotation nowhere;
  nowhere.target_place = "XYZ";
  EXPECT_THROW(annotate(c, "CVE-2013-4222", nowhere, cloud), UnknownPlace);
  EXPECT_THROW(annotate(c, "CVE-0000-0000", a, cloud), UnknownId);
  EXPECT_NO_THROW(catalog_from_json(to_json(c)));
}
