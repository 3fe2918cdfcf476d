#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "kms/classify.hpp"
#include "kms/report.hpp"

namespace {

bool has_note(const std::vector<std::string>& notes, const std::string& needle) {
  return std::any_of(notes.begin(), notes.end(), [&](const std::string& n) {
    return n.find(needle) != std::string::npos;
  });
}

kms::GraphFamily two_disjoint_cycles() {
  return kms::GraphFamily::explicit_graph(kms::FiniteGraph::make(
      {"u0", "u1", "w0", "w1", "w2", "w3"},
      {{"u0>u1", "u0", "u1"},
       {"u1>u0", "u1", "u0"},
       {"w0>w1", "w0", "w1"},
       {"w1>w2", "w1", "w2"},
       {"w2>w3", "w2", "w3"},
       {"w3>w0", "w3", "w0"}}));
}

}  // namespace

TEST_SUITE("classify") {

TEST_CASE("rose lands in the singleton case") {
  auto rep = kms::classify(kms::GraphFamily::rose(2));
  CHECK(rep.weight_range == kms::WeightRange::singleton);
  CHECK(kms::to_string(rep.weight_range) == "singleton");
  CHECK(rep.weight_range_text.substr(0, 7) == "{0.6931");
  REQUIRE(rep.cofinal.has_value());
  CHECK(*rep.cofinal);
  REQUIRE(rep.beta0.has_value());
  CHECK(rep.beta0->value == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(rep.beta0->method == kms::Beta0Method::exact_closed_form);
  REQUIRE(rep.uniqueness_at_beta0.has_value());
  CHECK(*rep.uniqueness_at_beta0 == "unique-ray");
  REQUIRE(rep.recurrence_at_beta0.has_value());
  CHECK(rep.recurrence_at_beta0->divergent);

  REQUIRE(rep.samples.size() == 1);
  const auto& s = rep.samples.front();
  CHECK(s.beta == doctest::Approx(std::log(2.0)));
  CHECK(s.feasible);
  CHECK(s.ray_count == 1);
  CHECK(s.worst_residual < 1e-12);
  REQUIRE(s.state.has_value());
  CHECK(s.state->is_state);
  REQUIRE(s.factor.has_value());
  CHECK(s.factor->type == kms::FactorType::type_iii_lambda);
  CHECK(s.factor->lambda == doctest::Approx(0.5).epsilon(1e-14));

  CHECK(rep.d.d == 1);
  REQUIRE(rep.d_prime.exact.has_value());
  CHECK(*rep.d_prime.exact == 1);
}

TEST_CASE("ladder lands in the all-reals case") {
  auto rep = kms::classify(kms::GraphFamily::ladder());
  CHECK(rep.weight_range == kms::WeightRange::all_reals);
  CHECK(rep.weight_range_text == "all real beta");
  CHECK_FALSE(rep.beta0.has_value());
  CHECK_FALSE(rep.uniqueness_at_beta0.has_value());
  CHECK(has_note(rep.notes, "probes both signs"));
  CHECK(rep.state_range_text.substr(0, 13) == "beta < 0.4812");

  REQUIRE(rep.samples.size() == 3);
  CHECK(rep.samples[0].beta == doctest::Approx(-1.0));
  CHECK(rep.samples[1].beta == doctest::Approx(0.0));
  CHECK(rep.samples[2].beta == doctest::Approx(1.0));
  for (const auto& s : rep.samples) {
    CHECK(s.feasible);
    CHECK(s.ray_count == 1);
    CHECK(s.worst_residual < 1e-10);
  }
  CHECK(rep.samples[0].state->is_state);       // beta = -1 is below the threshold
  CHECK_FALSE(rep.samples[2].state->is_state); // beta = 1 is above it
  CHECK(rep.samples[0].factor->type == kms::FactorType::type_iii_lambda);
  CHECK(rep.samples[0].factor->lambda == doctest::Approx(std::exp(-1.0)));
  CHECK(rep.samples[1].factor->type == kms::FactorType::type_ii_infinity);
}

TEST_CASE("three-arm graph lands in the half-line case") {
  auto rep = kms::classify(kms::GraphFamily::arms(3));
  CHECK(rep.weight_range == kms::WeightRange::half_line);
  CHECK(rep.weight_range_text.substr(0, 7) == "[0.5138");
  CHECK(rep.weight_range_text.find("inf)") != std::string::npos);
  REQUIRE(rep.uniqueness_at_beta0.has_value());
  CHECK(*rep.uniqueness_at_beta0 == "unique-ray");
  CHECK(rep.state_range_text.find("all arms on the geometric floor") != std::string::npos);

  REQUIRE(rep.samples.size() == 3);
  CHECK(rep.samples[0].ray_count == 1);
  CHECK(rep.samples[0].state->is_state);
  CHECK(rep.samples[1].ray_count == 3);
  CHECK_FALSE(rep.samples[1].state->is_state);
  CHECK(rep.samples[1].note.find("no solution at this beta normalizes") != std::string::npos);
  for (const auto& s : rep.samples) {
    REQUIRE(s.factor.has_value());
    CHECK(s.factor->type == kms::FactorType::inconclusive);
    CHECK(s.factor->sandwich.find("1Z") != std::string::npos);
  }
}

TEST_CASE("symmetric lattice walk report carries the mgf data") {
  auto family = kms::GraphFamily::lattice_walk(kms::LatticeWalk::make(1, {{{1}, 1}, {{-1}, 1}}));
  kms::ClassifyOptions options;
  options.depth = 30;
  auto rep = kms::classify(family, options);

  CHECK(rep.weight_range == kms::WeightRange::half_line);
  REQUIRE(rep.mgf.has_value());
  CHECK(rep.mgf->beta0 == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  REQUIRE(rep.beta0.has_value());
  CHECK(rep.beta0->method == kms::Beta0Method::mgf_minimum);
  REQUIRE(rep.truncation_crosscheck.has_value());
  REQUIRE(rep.spectral_gap.has_value());
  CHECK(*rep.spectral_gap < 5e-3);
  REQUIRE(rep.uniqueness_at_beta0.has_value());
  CHECK(*rep.uniqueness_at_beta0 == "unique-ray");
  CHECK(has_note(rep.notes, "zero step drift"));
  CHECK(rep.state_range_text.find("never sum") != std::string::npos);

  REQUIRE(rep.samples.size() == 3);
  CHECK(rep.samples[0].note.find("zero drift") != std::string::npos);
  CHECK(rep.samples[2].note.find("one per side") != std::string::npos);
  for (const auto& s : rep.samples) {
    CHECK(s.feasible);
    REQUIRE(s.state.has_value());
    CHECK_FALSE(s.state->is_state);
  }
  const auto& warm = rep.samples[1];
  REQUIRE(warm.factor.has_value());
  CHECK(warm.factor->type == kms::FactorType::type_iii_lambda);
  CHECK(warm.factor->lambda == doctest::Approx(std::exp(-2.0 * warm.beta)).epsilon(1e-12));
}

TEST_CASE("graph failing cofinality is reported, not rejected") {
  auto rep = kms::classify(two_disjoint_cycles());
  REQUIRE(rep.cofinal.has_value());
  CHECK_FALSE(*rep.cofinal);
  CHECK(rep.weight_range == kms::WeightRange::undetermined);
  CHECK(rep.weight_range_text.find("cofinality") != std::string::npos);
  CHECK(has_note(rep.notes, "assumes a cofinal graph"));
  REQUIRE(rep.beta0.has_value());
  CHECK(rep.beta0->value == doctest::Approx(0.0));
  // The sampled vector at beta = 0 lives on a single cycle: a genuine
  // eigenvector even though the graph is not strongly connected.
  REQUIRE(rep.samples.size() == 1);
  CHECK(rep.samples[0].beta == doctest::Approx(0.0));
  CHECK(rep.samples[0].feasible);
  CHECK(rep.samples[0].worst_residual < 1e-9);
}

TEST_CASE("sharded sample evaluation is deterministic") {
  kms::ClassifyOptions serial;
  serial.jobs = 1;
  kms::ClassifyOptions sharded;
  sharded.jobs = 2;
  auto ladder = kms::GraphFamily::ladder();
  auto a = kms::to_json(kms::classify(ladder, serial)).dump(2);
  auto b = kms::to_json(kms::classify(ladder, sharded)).dump(2);
  CHECK(a == b);

  auto arms = kms::GraphFamily::arms(3);
  sharded.jobs = 3;
  CHECK(kms::to_json(kms::classify(arms, serial)).dump(2) ==
        kms::to_json(kms::classify(arms, sharded)).dump(2));
}

TEST_CASE("reports round-trip byte-identically through JSON") {
  auto rep = kms::classify(kms::GraphFamily::arms(3));
  auto first = kms::to_json(rep).dump(2);
  auto reparsed = kms::Json::parse(first).dump(2);
  CHECK(first == reparsed);

  auto ladder = kms::to_json(kms::classify(kms::GraphFamily::ladder())).dump(2);
  CHECK(ladder == kms::Json::parse(ladder).dump(2));
}

TEST_CASE("infinities serialize as strings") {
  auto inf = kms::json_number(std::numeric_limits<double>::infinity());
  REQUIRE(inf.is_string());
  CHECK(inf.get<std::string>() == "inf");
  auto ninf = kms::json_number(-std::numeric_limits<double>::infinity());
  CHECK(ninf.get<std::string>() == "-inf");
  CHECK(kms::json_number(2.5).is_number());
}

TEST_CASE("published quantities reproduce") {
  auto golden = kms::reproduce_examples();
  CHECK(golden.all_pass());
  CHECK(golden.rows.size() >= 18);
  for (const auto& row : golden.rows) {
    CAPTURE(row.example);
    CAPTURE(row.quantity);
    CHECK(row.pass);
    CHECK(std::abs(row.expected - row.actual) <= row.tol);
  }
  auto arms_row = std::find_if(golden.rows.begin(), golden.rows.end(), [](const kms::GoldenRow& r) {
    return r.example == "arms(3)" && r.quantity == "minimal inverse temperature";
  });
  REQUIRE(arms_row != golden.rows.end());
  CHECK(arms_row->actual == doctest::Approx(0.5138410019345337).epsilon(1e-6));
}

}  // TEST_SUITE
