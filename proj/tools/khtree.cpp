// Copyright 2026 The khtree Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// khtree: servers, writer/reader clients, attester, benchmarks and attack
// demonstrations for the keyed hash tree store.

#include <algorithm>
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <ctime>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "kht/attester.hpp"
#include "kht/bench.hpp"
#include "kht/client.hpp"
#include "kht/net.hpp"
#include "kht/proof.hpp"

namespace {

using namespace kht;
using json = nlohmann::json;

enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kTransport = 3,
  kProtocol = 4,
  kWriterAbort = 5,
  kNotFound = 6,
  kAttackBase = 10,  // + AttackKind
};

struct Globals {
  std::string db_addr = "127.0.0.1:7400";
  std::string announce_addr = "127.0.0.1:7401";
  std::string keys_dir = "keys";
  std::string profile = "default";
  std::string output = "text";

  HashConfig cfg() const { return profile == "toy" ? HashConfig::toy_profile() : HashConfig::default_profile(); }
  bool records() const { return output == "records"; }
};

void emit(const Globals& g, const json& rec, const std::string& text) {
  if (g.records()) {
    std::cout << rec.dump() << "\n";
  } else {
    std::cout << text << "\n";
  }
}

Writer load_writer(const Globals& g, const std::string& id) {
  return Writer{id, Keypair::load(std::filesystem::path(g.keys_dir) / (id + ".sec"))};
}

int report_attack(const Globals& g, const std::string& key, const VerifiedReply& r) {
  emit(g, {{"event", "attack"}, {"key", key}, {"kind", to_string(r.attack)}, {"detail", r.detail}},
       std::string(to_string(r.attack)) + " detected: " + r.detail);
  return kAttackBase + static_cast<int>(r.attack);
}

int cmd_keygen(const Globals& g, const std::string& id) {
  std::filesystem::create_directories(g.keys_dir);
  const auto dir = std::filesystem::path(g.keys_dir);
  Keypair::generate().save(dir / (id + ".sec"), dir / (id + ".pub"));
  emit(g, {{"event", "keygen"}, {"writer", id}, {"dir", g.keys_dir}}, "wrote keys for " + id + " in " + g.keys_dir);
  return kOk;
}

volatile std::sig_atomic_t g_stop = 0;

void serve_until_signal(net::FrameServer& server) {
  std::signal(SIGINT, [](int) { g_stop = 1; });
  std::signal(SIGTERM, [](int) { g_stop = 1; });
  while (!g_stop) {
    timespec ts{0, 100'000'000};
    nanosleep(&ts, nullptr);
  }
  server.stop();
}

int cmd_db_serve(const Globals& g, const std::string& wal, bool no_sync) {
  Database::Options opts;
  if (!wal.empty()) opts.wal = wal;
  opts.sync = !no_sync;
  Database db(g.cfg(), opts);
  net::FrameServer server(net::Address::parse(g.db_addr), [&db](ByteView b) { return db.handle_body(b); });
  emit(g, {{"event", "listening"}, {"service", "db"}, {"port", server.port()}, {"entries", db.size()}},
       "db listening on port " + std::to_string(server.port()) + " (" + std::to_string(db.size()) + " entries)");
  std::cout.flush();
  serve_until_signal(server);
  return kOk;
}

int cmd_announce_serve(const Globals& g) {
  Announcement ann(KeyRing::load_dir(g.keys_dir));
  net::FrameServer server(net::Address::parse(g.announce_addr), [&ann](ByteView b) { return ann.handle_body(b); });
  emit(g, {{"event", "listening"}, {"service", "announce"}, {"port", server.port()}},
       "announcement service listening on port " + std::to_string(server.port()));
  std::cout.flush();
  serve_until_signal(server);
  return kOk;
}

int cmd_write(const Globals& g, const std::string& writer_id, const std::string& key,
              const std::optional<std::string>& data) {
  net::TcpEndpoint db(net::Address::parse(g.db_addr));
  net::TcpEndpoint ann(net::Address::parse(g.announce_addr));
  WriterSession session(g.cfg(), load_writer(g, writer_id), KeyRing::load_dir(g.keys_dir), db, ann);
  try {
    const auto cred = data ? session.put(to_bytes(key), to_bytes(*data)) : session.erase(to_bytes(key));
    emit(g,
         {{"event", data ? "put" : "delete"}, {"key", key}, {"seq", cred.seq}, {"root", cred.root.hex()}},
         std::string(data ? "stored" : "deleted") + " " + key + "; published seq " + std::to_string(cred.seq) +
             " root " + cred.root.hex());
    return kOk;
  } catch (const WriterAbort& e) {
    emit(g, {{"event", "abort"}, {"key", key}, {"reason", to_string(e.reason())}, {"detail", e.what()}},
         std::string("aborted (") + to_string(e.reason()) + "): " + e.what());
    return e.reason() == WriterAbort::Reason::AbsentKey ? kNotFound : kWriterAbort;
  }
}

int cmd_get(const Globals& g, const std::string& key) {
  net::TcpEndpoint db(net::Address::parse(g.db_addr));
  net::TcpEndpoint ann(net::Address::parse(g.announce_addr));
  ReaderSession reader(g.cfg(), KeyRing::load_dir(g.keys_dir), db, ann);
  const auto r = reader.get(to_bytes(key));
  switch (r.kind) {
    case VerifiedReply::Kind::Present:
      emit(g, {{"event", "get"}, {"key", key}, {"status", "VerifiedPresent"}, {"value", to_string(r.data)},
               {"author", r.author_id}},
           to_string(r.data) + "\nVERIFIED (author " + r.author_id + ")");
      return kOk;
    case VerifiedReply::Kind::Absent:
      emit(g, {{"event", "get"}, {"key", key}, {"status", "VerifiedAbsent"}}, "no such entry\nVERIFIED");
      return kOk;
    case VerifiedReply::Kind::Attack:
      return report_attack(g, key, r);
  }
  return kFailure;
}

int cmd_attest(const Globals& g, const std::string& query, const std::vector<std::string>& members) {
  const Attester att(g.cfg());
  KeySet s;
  for (const auto& m : members) s.insert(to_bytes(m));
  const Digest d = att.D(s);
  const PathProof p = att.P(s, to_bytes(query));
  const AttesterVerdict v = att.V(to_bytes(query), d, p);
  emit(g, {{"event", "attest"}, {"query", query}, {"members", members.size()}, {"digest", d.hex()},
           {"verdict", to_string(v)}, {"proof_bytes", encode_proof(p).size()}},
       std::string(to_string(v)) + " (digest " + d.hex() + ")");
  return v == AttesterVerdict::Error ? kFailure : kOk;
}

int cmd_bench(const Globals& g, const std::vector<std::size_t>& sizes, std::uint64_t seed) {
  for (const std::size_t n : sizes) {
    for (const auto& r : bench::bench_suite(n, g.cfg(), seed)) {
      if (g.records()) {
        std::cout << r.json() << "\n";
      } else {
        std::cout << r.profile << " n=" << r.n << " " << r.metric << " = " << r.value << "\n";
      }
    }
  }
  return kOk;
}

int cmd_attack_demo(const Globals& g, int attack) {
  const HashConfig cfg = g.cfg();
  std::array<std::uint8_t, 32> seed{};
  seed.fill(0x42);
  const Writer alice{"alice", Keypair::from_seed(seed)};
  KeyRing ring;
  ring.add(alice.id, alice.keys.public_key());

  Database honest(cfg);
  Announcement announcement(ring);
  LocalEndpoint<Database> db_ep(honest);
  LocalEndpoint<Announcement> ann_ep(announcement);
  WriterSession writer(cfg, alice, ring, db_ep, ann_ep);

  // keys with pairwise distinct leaf paths, so the toy profile works too
  std::vector<std::string> keys;
  std::vector<PathBits> used;
  for (int i = 0; keys.size() < 5; ++i) {
    const std::string k = "entry-" + std::to_string(i);
    const PathBits p = key_path(cfg, k);
    if (std::find(used.begin(), used.end(), p) != used.end()) continue;
    used.push_back(p);
    keys.push_back(k);
  }
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) writer.put(to_bytes(keys[i]), to_bytes("value of " + keys[i]));

  const std::string target = attack == 2 ? keys.back() : keys[0];
  MaliciousDb evil(honest, attack, to_bytes(target), 7);
  if (attack == 3) evil.set_relabel_source(to_bytes(keys[1]));
  if (attack == 4) {
    evil.capture_snapshot();
    writer.put(to_bytes(target), to_bytes("updated value of " + target));
  }

  emit(g, {{"event", "attack-demo"}, {"attack", attack}, {"target", target}},
       "simulating attack " + std::to_string(attack) + " on key " + target);
  ReaderSession reader(cfg, ring, evil, ann_ep);
  const auto r = reader.get(to_bytes(target));
  if (r.attack_detected()) return report_attack(g, target, r);
  emit(g, {{"event", "undetected"}, {"attack", attack}, {"status", r.str()}}, "attack NOT detected: " + r.str());
  return kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"keyed hash tree store: authenticated key-value database with verifiable absence"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--db-addr", g.db_addr, "database server host:port")->envname("KHT_DB_ADDR");
  app.add_option("--announce-addr", g.announce_addr, "announcement server host:port")->envname("KHT_ANNOUNCE_ADDR");
  app.add_option("--keys-dir", g.keys_dir, "directory of <writer>.pub / <writer>.sec files")->envname("KHT_KEYS_DIR");
  app.add_option("--profile", g.profile, "hash profile")
      ->check(CLI::IsMember({"default", "toy"}))
      ->envname("KHT_PROFILE");
  app.add_option("--output", g.output, "text or line-delimited JSON records")
      ->check(CLI::IsMember({"text", "records"}))
      ->envname("KHT_OUTPUT");

  std::string writer_id;
  std::string key;
  std::string data;

  auto* keygen = app.add_subcommand("keygen", "create a writer keypair");
  keygen->add_option("writer", writer_id)->required();

  std::string wal;
  bool no_sync = false;
  auto* db_serve = app.add_subcommand("db-serve", "run the database server");
  db_serve->add_option("--wal", wal, "replay log path (in-memory only when omitted)")->envname("KHT_WAL");
  db_serve->add_flag("--no-sync", no_sync, "skip fdatasync after each log append");

  auto* announce_serve = app.add_subcommand("announce-serve", "run the announcement server");

  auto* put = app.add_subcommand("put", "store an entry and publish the new credential");
  put->add_option("--writer", writer_id, "writer id")->required()->envname("KHT_WRITER");
  put->add_option("key", key)->required();
  put->add_option("data", data)->required();

  auto* del = app.add_subcommand("delete", "remove an entry and publish the new credential");
  del->add_option("--writer", writer_id, "writer id")->required()->envname("KHT_WRITER");
  del->add_option("key", key)->required();

  auto* get = app.add_subcommand("get", "fetch and verify an entry or its absence");
  get->add_option("key", key)->required();

  std::string query;
  std::vector<std::string> members;
  auto* attest = app.add_subcommand("attest", "membership attester over a key set");
  attest->add_option("query", query)->required();
  attest->add_option("members", members, "the key set");

  std::vector<std::size_t> sizes{1024, 4096};
  std::uint64_t seed = 1;
  auto* bench_cmd = app.add_subcommand("bench", "structural, cost and latency records");
  bench_cmd->add_option("--n", sizes, "entry counts")->delimiter(',');
  bench_cmd->add_option("--seed", seed, "key seed");

  int attack = 0;
  auto* demo = app.add_subcommand("attack-demo", "run one of the five database attacks against a reader");
  demo->add_option("attack", attack)->required()->check(CLI::Range(1, 5));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*keygen) return cmd_keygen(g, writer_id);
    if (*db_serve) return cmd_db_serve(g, wal, no_sync);
    if (*announce_serve) return cmd_announce_serve(g);
    if (*put) return cmd_write(g, writer_id, key, data);
    if (*del) return cmd_write(g, writer_id, key, std::nullopt);
    if (*get) return cmd_get(g, key);
    if (*attest) return cmd_attest(g, query, members);
    if (*bench_cmd) return cmd_bench(g, sizes, seed);
    if (*demo) return cmd_attack_demo(g, attack);
  } catch (const TransportError& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return kTransport;
  } catch (const wire::ProtocolError& e) {
    std::cerr << "protocol error (" << wire::to_string(e.status()) << "): " << e.what() << "\n";
    return kProtocol;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
