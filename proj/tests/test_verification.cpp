#include <doctest.h>

#include <algorithm>
#include <vector>

#include "fixtures.hpp"
#include "pol/verification.hpp"

using namespace pol;

TEST_SUITE("verification") {

TEST_CASE("select_stages") {
  auto all = select_stages(6, 6, Seed::from_u64(1));
  CHECK(all.stages == std::vector<std::size_t>{1, 2, 3, 4, 5, 6});
  auto a = select_stages(50, 7, Seed::from_u64(2));
  CHECK(a.stages.size() == 7);
  CHECK(std::is_sorted(a.stages.begin(), a.stages.end()));
  CHECK_THROWS(select_stages(5, 6, Seed::from_u64(2)));
  CHECK_THROWS(select_stages(5, 0, Seed::from_u64(2)));

  std::vector<int> hits(21, 0);
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    for (auto t : select_stages(20, 5, Seed::from_u64(70000 + i)).stages) ++hits[t];
  }
  for (int t = 1; t <= 20; ++t) CHECK(std::abs(hits[t] / double(n) - 0.25) < 0.02);
}

TEST_CASE("verify_basic") {
  auto p = test::small_problem();
  auto [cert, store] = generate_basic(p);
  auto req = select_stages(p.stages(), p.stages(), Seed::from_u64(4));
  auto revealed = reveal_stages(store, req);

  auto ok = verify_basic(p, cert, revealed, req);
  CHECK(ok.success);
  CHECK(ok.single_probes == p.stages());

  SUBCASE("tampered weights") {
    auto bad = revealed;
    bad[3].after[0] += 1e-9;
    auto v = verify_basic(p, cert, bad, req);
    CHECK_FALSE(v.success);
    CHECK(v.reason == FailReason::InvalidWeights);
    CHECK(v.failed_stage == 4u);
  }
  SUBCASE("tampered initial weights") {
    auto bad = revealed;
    bad[0].before[0] = 0.5;
    auto v = verify_basic(p, cert, bad, req);
    CHECK(v.reason == FailReason::InvalidWeights);
    CHECK(v.failed_stage == 1u);
  }
  SUBCASE("wrong seed") {
    auto [c2, s2] = generate_basic_cheating(
        p, CheatSpec{{6}, Disguise::AsNormal, Fabrication::SingleEpoch});
    auto v = verify_basic(p, c2, reveal_stages(s2, req), req);
    CHECK_FALSE(v.success);
    CHECK(v.reason == FailReason::ErrorInStage);
    CHECK(v.failed_stage == 6u);
    CHECK(v.D == 1);
  }
}

TEST_CASE("probe_stage_full") {
  auto p = test::small_problem();
  const double eta = 0.4;
  auto proof = generate_cheating(p, eta, Seed::from_u64(21),
                                 CheatSpec{{2}, Disguise::AsFlag, Fabrication::SingleEpoch});
  const auto& w = proof.checkpoints.checkpoints;

  for (std::size_t t = 1; t <= p.stages(); ++t) {
    auto v = stage_variant(proof.plan, t);
    for (bool coin : {false, true}) {
      auto verdict = probe_stage_full(p, w[t - 1], w[t], t, coin);
      if (t == 2) {
        // No designated seed reproduces a fabricated stage.
        CHECK(verdict.reported == (coin ? SeedVariant::F2 : SeedVariant::F1));
        CHECK(verdict.retrains == 2);
      } else if (v == SeedVariant::Normal) {
        CHECK(verdict.reported == SeedVariant::Normal);
        CHECK(verdict.retrains == 1);
      } else {
        CHECK(verdict.reported == v);
        CHECK(verdict.retrains == 2);
      }
    }
  }
}

TEST_CASE("verifier coin is balanced") {
  int ones = 0;
  for (int i = 0; i < 10000; ++i) ones += verifier_coin(Seed::from_u64(i), 3);
  CHECK(std::abs(ones / 10000.0 - 0.5) < 0.03);
}

TEST_CASE("full protocol honest run") {
  auto p = test::small_problem();
  const double eta = 0.4;
  auto proof = generate_full(p, eta, Seed::from_u64(5));
  for (int i = 0; i < 50; ++i) {
    auto v = run_full_protocol(p, proof, eta, 4, Seed::from_u64(300 + i));
    REQUIRE(v.success);
    std::vector<std::size_t> expect;
    for (auto t : v.t_ve) {
      if (stage_variant(proof.plan, t) != SeedVariant::Normal) expect.push_back(t);
    }
    CHECK(v.flags_found == expect);
    CHECK(v.u == expect.size());
    CHECK(v.cost() == doctest::Approx(4.0 + double(expect.size())));
    CHECK(verification_cost(v.single_probes, v.double_probes, 10.0, 10) ==
          doctest::Approx(4.0 + double(expect.size())));
  }
}

TEST_CASE("session ordering and commitment") {
  auto p = test::small_problem();
  const double eta = 0.4;
  auto proof = generate_full(p, eta, Seed::from_u64(5));

  ProtocolSession s(p, proof.certificate, eta);
  CHECK_THROWS_AS(s.post_verdicts(), ProtocolError);
  const auto& req = s.request_stages(3, Seed::from_u64(1));
  CHECK_THROWS_AS(s.request_stages(3, Seed::from_u64(1)), ProtocolError);
  s.reveal_weights(reveal_stages(proof.checkpoints, req));
  CHECK_THROWS_AS(s.reveal_flag_plan(proof.plan.sigma), ProtocolError);
  s.post_verdicts();

  auto forged = proof.plan.sigma;
  std::swap(forged[0], forged[1]);
  auto v = s.reveal_flag_plan(forged);
  CHECK_FALSE(v.success);
  CHECK(v.reason == FailReason::InvalidFlagCommitment);
  CHECK(s.finished());
  CHECK(s.transcript().back()["type"] == "verdict");
}

TEST_CASE("hash mismatch ends the session early") {
  auto p = test::small_problem();
  auto proof = generate_full(p, 0.4, Seed::from_u64(5));
  ProtocolSession s(p, proof.certificate, 0.4);
  const auto& req = s.request_stages(p.stages(), Seed::from_u64(1));
  auto revealed = reveal_stages(proof.checkpoints, req);
  revealed[2].after[1] = 42.0;
  s.reveal_weights(revealed);
  CHECK(s.post_verdicts().empty());
  CHECK(s.finished());
  CHECK(s.verdict().reason == FailReason::InvalidWeights);
  CHECK(s.verdict().failed_stage == 3u);
}

TEST_CASE("disguised cheats") {
  auto p = test::small_problem();
  const double eta = 0.4;
  auto as_normal = generate_cheating(p, eta, Seed::from_u64(6),
                                     CheatSpec{{5}, Disguise::AsNormal, Fabrication::SingleEpoch});
  auto as_flag = generate_cheating(p, eta, Seed::from_u64(6),
                                   CheatSpec{{5}, Disguise::AsFlag, Fabrication::SingleEpoch});
  int flag_caught = 0, trials = 0;
  for (int i = 0; i < 400; ++i) {
    Seed secret = Seed::from_u64(9000 + i);
    auto vn = run_full_protocol(p, as_normal, eta, p.stages(), secret);
    CHECK_FALSE(vn.success);
    CHECK(vn.reason == FailReason::ErrorInStage);
    CHECK(vn.failed_stage == 5u);
    auto vf = run_full_protocol(p, as_flag, eta, p.stages(), secret);
    ++trials;
    if (!vf.success) {
      ++flag_caught;
      CHECK(vf.reason == FailReason::ErrorInStage);
    }
  }
  CHECK(std::abs(flag_caught / double(trials) - 0.5) < 0.1);
}

TEST_CASE("verifier_reward") {
  CHECK(verifier_reward(3, 0, 100, 12) == 36);
  CHECK(verifier_reward(0, 1, 100, 12) == 100);
  CHECK(verifier_reward(2, 2, 100, 8) == 116);
  CHECK_THROWS(verifier_reward(-1, 0, 100, 8));
  CHECK(verification_cost(5, 0, 100, 20) == doctest::Approx(25.0));
  CHECK(verification_cost(0, 1, 7, 7) == doctest::Approx(2.0));
}

}  // TEST_SUITE
