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

#include <functional>

#include "attack_harness.hpp"
#include "doctest.h"
#include "kht/proof.hpp"

using namespace kht;
using namespace kht::testing;
using wire::Status;

namespace {

const HashConfig kToy = HashConfig::toy_profile();
const HashConfig kDefault = HashConfig::default_profile();

/// Shared call counter for a pair of endpoints; one numbered call is tampered with.
struct Fault {
  enum class Mode { DropRequest, DropResponse, GarbleRequest, GarbleResponse };
  int target = -1;
  Mode mode = Mode::DropRequest;
  std::size_t flip = 0;
  int calls = 0;
};

class FaultyEndpoint : public Endpoint {
 public:
  FaultyEndpoint(Endpoint& inner, Fault& fault) : inner_(inner), fault_(fault) {}

  Bytes call(ByteView body) override {
    const bool hit = fault_.calls++ == fault_.target;
    if (!hit) return inner_.call(body);
    Bytes req(body.begin(), body.end());
    switch (fault_.mode) {
      case Fault::Mode::DropRequest:
        throw TransportError("request lost");
      case Fault::Mode::DropResponse:
        inner_.call(req);
        throw TransportError("response lost");
      case Fault::Mode::GarbleRequest:
        req[fault_.flip % req.size()] ^= 0x01;
        return inner_.call(req);
      case Fault::Mode::GarbleResponse: {
        Bytes resp = inner_.call(req);
        resp[fault_.flip % resp.size()] ^= 0x01;
        return resp;
      }
    }
    return {};
  }

 private:
  Endpoint& inner_;
  Fault& fault_;
};

/// Runs `hook` right before the wrapped endpoint forwards a PUBLISH.
class BeforePublish : public Endpoint {
 public:
  BeforePublish(Endpoint& inner, std::function<void()> hook) : inner_(inner), hook_(std::move(hook)) {}
  Bytes call(ByteView body) override {
    if (!body.empty() && body[0] == static_cast<std::uint8_t>(wire::Op::Publish) && hook_) hook_();
    return inner_.call(body);
  }

 private:
  Endpoint& inner_;
  std::function<void()> hook_;
};

}  // namespace

TEST_CASE("writer and reader round trip") {
  Deployment dep(kDefault, 1);
  auto writer = dep.writer_session();
  ReaderSession reader(kDefault, dep.ring, dep.db_ep, dep.ann_ep);

  CHECK(reader.get(to_bytes("www.example.org")).kind == VerifiedReply::Kind::Absent);
  const auto c1 = writer.put(to_bytes("www.example.org"), to_bytes("192.0.2.1"));
  CHECK(c1.seq == 1);
  CHECK(c1.root == dep.db.root());
  CHECK(dep.announcement.fetch() == c1);

  const auto r = reader.get(to_bytes("www.example.org"));
  CHECK(r.kind == VerifiedReply::Kind::Present);
  CHECK(r.data == to_bytes("192.0.2.1"));
  CHECK(r.author_id == dep.writer.id);
  CHECK(r.str() == "VerifiedPresent");

  CHECK(writer.put(to_bytes("www.example.org"), to_bytes("192.0.2.2")).seq == 2);
  CHECK(reader.get(to_bytes("www.example.org")).data == to_bytes("192.0.2.2"));
  const auto c3 = writer.erase(to_bytes("www.example.org"));
  CHECK(c3.seq == 3);
  CHECK(c3.root == EmptyTable(kDefault)[256]);
  CHECK(reader.get(to_bytes("www.example.org")).str() == "VerifiedAbsent");
}

TEST_CASE("bootstrap reads an empty slot as the genesis credential") {
  const EmptyTable empties(kToy);
  const auto g = genesis_credential(kToy, empties);
  CHECK(g.seq == 0);
  CHECK(g.root == empties[8]);
  Deployment dep(kToy, 2);
  ReaderSession reader(kToy, dep.ring, dep.db_ep, dep.ann_ep);
  CHECK(reader.get(to_bytes("x")).kind == VerifiedReply::Kind::Absent);
  CHECK(dep.writer_session().put(to_bytes("x"), to_bytes("y")).seq == 1);
}

TEST_CASE("deleting an absent key aborts before touching the database") {
  Deployment dep(kToy, 3);
  auto writer = dep.writer_session();
  writer.put(to_bytes("a"), to_bytes("1"));
  const Digest r = dep.db.root();
  try {
    writer.erase(to_bytes("missing"));
    FAIL("expected abort");
  } catch (const WriterAbort& e) {
    CHECK(e.reason() == WriterAbort::Reason::AbsentKey);
  }
  CHECK(dep.db.root() == r);
  CHECK(dep.announcement.fetch()->seq == 1);
}

TEST_CASE("a writer outside the key ring cannot publish") {
  Deployment dep(kToy, 4);
  const Writer stranger = Deployment::make_writer(99);
  WriterSession writer(kToy, stranger, dep.ring, dep.db_ep, dep.ann_ep);
  try {
    writer.put(to_bytes("a"), to_bytes("1"));
    FAIL("expected abort");
  } catch (const WriterAbort& e) {
    CAPTURE(e.what());
    CHECK(e.reason() == WriterAbort::Reason::PublishRejected);
    CHECK(e.status() == Status::RejectSig);
  }
  CHECK_FALSE(dep.announcement.fetch().has_value());
}

TEST_CASE("writer safety under fault injection at every pipeline step") {
  // calls per mutation: 0 fetch, 1 rootpath, 2 put/delete, 3 publish
  for (const HashConfig& cfg : {kToy, kDefault}) {
    for (int target = 0; target < 4; ++target) {
      for (const auto mode : {Fault::Mode::DropRequest, Fault::Mode::DropResponse, Fault::Mode::GarbleRequest,
                              Fault::Mode::GarbleResponse}) {
        for (std::size_t flip = 0; flip < 64; flip += 7) {
          Deployment dep(cfg, 5 + flip);
          auto setup = dep.writer_session();
          const auto keys = distinct_path_keys(cfg, 4, "f");
          for (const auto& k : keys) setup.put(k, to_bytes("v-" + to_string(k)));

          Fault fault{target, mode, flip, 0};
          FaultyEndpoint db(dep.db_ep, fault);
          FaultyEndpoint ann(dep.ann_ep, fault);
          WriterSession writer(cfg, dep.writer, dep.ring, db, ann);
          const auto before = dep.announcement.fetch();
          const bool erase = flip % 2 == 1;
          try {
            if (erase) {
              writer.erase(keys[1]);
            } else {
              writer.put(keys[2], to_bytes("changed"));
            }
          } catch (const std::exception&) {
          }
          const auto after = dep.announcement.fetch();
          CAPTURE(target);
          CAPTURE(static_cast<int>(mode));
          CAPTURE(flip);
          REQUIRE(after.has_value());
          if (after->seq != before->seq) {
            REQUIRE(after->seq > before->seq);
            REQUIRE(after->root == dep.db.root());
          } else {
            REQUIRE(*after == *before);
          }
        }
      }
    }
  }
}

TEST_CASE("a database that lies about the new root is caught before publishing") {
  Deployment dep(kToy, 6);
  auto setup = dep.writer_session();
  setup.put(to_bytes("a"), to_bytes("1"));
  // answers PUT with the root of a different value
  struct Liar : Endpoint {
    Deployment& d;
    explicit Liar(Deployment& dd) : d(dd) {}
    Bytes call(ByteView body) override {
      auto req = wire::decode_request(body);
      if (req.op == wire::Op::Put) req.value = sign_entry_value(req.key, to_bytes("other"), d.writer).encode();
      return d.db.handle_body(wire::encode_request(req));
    }
  } liar(dep);
  WriterSession writer(kToy, dep.writer, dep.ring, liar, dep.ann_ep);
  try {
    writer.put(to_bytes("b"), to_bytes("2"));
    FAIL("expected abort");
  } catch (const WriterAbort& e) {
    CHECK(e.reason() == WriterAbort::Reason::DbMisbehavior);
  }
  CHECK(dep.announcement.fetch()->seq == 1);
}

TEST_CASE("REJECT_STALE restarts the mutation from the newer credential") {
  Deployment dep(kToy, 7);
  auto setup = dep.writer_session();
  setup.put(to_bytes("a"), to_bytes("1"));
  int rivals = 0;
  // a rival publishes the database's current state just before each publish
  BeforePublish ann(dep.ann_ep, [&] {
    const auto cur = dep.announcement.fetch();
    if (rivals-- > 0) {
      REQUIRE(dep.announcement.publish(sign_credential(kToy, dep.db.root(), cur->seq + 1, dep.writer)) == Status::Ok);
    }
  });
  WriterSession writer(kToy, dep.writer, dep.ring, dep.db_ep, ann);

  rivals = 1;
  const auto c = writer.put(to_bytes("b"), to_bytes("2"));
  CHECK(c.seq == 3);  // setup 1, rival 2, retry 3
  CHECK(c.root == dep.db.root());

  rivals = 5;
  writer.set_max_attempts(3);
  try {
    writer.put(to_bytes("c"), to_bytes("3"));
    FAIL("expected abort");
  } catch (const WriterAbort& e) {
    CHECK(e.reason() == WriterAbort::Reason::PublishRejected);
  }
  CHECK(dep.announcement.fetch()->root == dep.db.root());
}

TEST_CASE("reader flags a forged credential") {
  Deployment dep(kToy, 8);
  dep.writer_session().put(to_bytes("a"), to_bytes("1"));
  struct ForgedSlot : Endpoint {
    HashConfig cfg;
    Bytes call(ByteView) override {
      StateCredential c = sign_credential(cfg, digest(cfg, "x"), 9, Deployment::make_writer(1234));
      wire::Response r;
      r.credential = c.encode();
      return wire::encode_response(wire::Op::Fetch, r);
    }
  } slot;
  slot.cfg = kToy;
  ReaderSession reader(kToy, dep.ring, dep.db_ep, slot);
  const auto r = reader.get(to_bytes("a"));
  CHECK(r.attack == AttackKind::BadCredential);
  CHECK(r.str() == "AttackDetected(BadCredential)");
}

TEST_CASE("reader flags a proof of the wrong length") {
  Deployment dep(kToy, 9);
  dep.writer_session().put(to_bytes("a"), to_bytes("1"));
  struct Short : Endpoint {
    Database& db;
    explicit Short(Database& d) : db(d) {}
    Bytes call(ByteView body) override {
      auto req = wire::decode_request(body);
      auto [reply, proof] = db.get(req.key);
      wire::Response r;
      r.value = reply.value;
      Bytes p = encode_proof(proof);
      p.pop_back();
      r.proof = p;
      return wire::encode_response(req.op, r);
    }
  } shortp(dep.db);
  ReaderSession reader(kToy, dep.ring, shortp, dep.ann_ep);
  CHECK(reader.get(to_bytes("a")).attack == AttackKind::BadProof);
}

TEST_CASE("every attack is detected and classified") {
  for (const HashConfig& cfg : {kToy, kDefault}) {
    for (int attack = 1; attack <= 5; ++attack) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto r = run_attack(cfg, attack, 1000 * static_cast<std::uint64_t>(attack) + seed);
        CAPTURE(cfg.path_height);
        CAPTURE(attack);
        CAPTURE(seed);
        CAPTURE(r.detail);
        REQUIRE(r.attack_detected());
        REQUIRE(r.attack == expected_kind(attack));
      }
    }
  }
}

TEST_CASE("honest traffic raises no alarms") {
  CHECK(honest_mismatches(kToy, 500, 1) == 0);
  CHECK(honest_mismatches(kDefault, 500, 2) == 0);
}

TEST_CASE("malicious db validates its configuration") {
  Database db(kToy);
  CHECK_THROWS_AS(MaliciousDb(db, 0, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(MaliciousDb(db, 6, {}, 1), std::invalid_argument);
}
