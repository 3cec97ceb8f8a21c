#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "enn/enn.hpp"
#include "support.hpp"

using enn::Network;
using enn::Vector;

namespace {

Network sample_net(std::uint64_t seed) {
  return enn::init_network({enn::dct_layer(5, 6, 64), enn::dct_layer(1, 6, 64)}, 2, seed);
}

std::vector<double> all_energies(const Network& net) {
  std::vector<double> e;
  for (const enn::Layer& layer : net.layers)
    for (const enn::DctActivation& act : layer.dct)
      for (double f : act.coeffs) e.push_back(f * f);
  return e;
}

// brute-force: smallest energy value whose <=-count reaches the fraction
double threshold_oracle(const std::vector<double>& energies, double fraction) {
  double best = std::numeric_limits<double>::infinity();
  for (double candidate : energies) {
    std::size_t covered = 0;
    for (double e : energies) covered += e <= candidate ? 1 : 0;
    if (static_cast<double>(covered) >= fraction * static_cast<double>(energies.size()))
      best = std::min(best, candidate);
  }
  return best;
}

}  // namespace

TEST_CASE("null prune masks nothing on a dense network and keeps mse bitwise") {
  Network net = sample_net(5);
  const enn::Dataset data =
      enn::generate_problem(enn::problem_from_id(enn::ProblemId::p1), 300, 7);
  const double before = enn::evaluate_mse(net, data);
  const enn::PruneReport report = enn::prune_coefficients(net, 0.0, &data);
  REQUIRE(report.pruned == 0);
  REQUIRE(report.mse_before == before);
  REQUIRE(report.mse_after == before);
  REQUIRE(enn::evaluate_mse(net, data) == before);

  // an exactly-zero coefficient is the only thing a zero threshold removes
  Network with_zero = sample_net(5);
  with_zero.layers[0].dct[2].coeffs[4] = 0.0;
  const enn::PruneReport r2 = enn::prune_coefficients(with_zero, 0.0);
  REQUIRE(r2.pruned == 1);
  REQUIRE(with_zero.layers[0].dct[2].mask[4] == 0);
}

TEST_CASE("infinite threshold masks everything and zeroes the output") {
  Network net = sample_net(9);
  const enn::PruneReport report =
      enn::prune_coefficients(net, std::numeric_limits<double>::infinity());
  REQUIRE(report.pruned == report.total_coeffs);
  enn::Rng rng(3);
  for (int i = 0; i < 20; ++i)
    REQUIRE(enn::forward(net, oracle::random_input(rng, 2)) == 0.0);
}

TEST_CASE("prune threshold is honored exactly") {
  Network net = sample_net(11);
  const double rho = 0.05;
  Network pruned_net = net;
  const enn::PruneReport report = enn::prune_coefficients(pruned_net, rho);
  std::size_t expected = 0;
  for (double e : all_energies(net)) expected += e <= rho ? 1 : 0;
  REQUIRE(report.pruned == expected);
  std::size_t histogram_total = 0;
  for (const auto& row : report.per_layer_per_q)
    for (std::size_t c : row) histogram_total += c;
  REQUIRE(histogram_total == report.pruned);
}

TEST_CASE("pruned fraction is monotone in the threshold") {
  Network base = sample_net(13);
  std::size_t last = 0;
  for (double rho : {0.0, 0.01, 0.05, 0.1, 0.5, 2.0}) {
    Network net = base;
    const enn::PruneReport report = enn::prune_coefficients(net, rho);
    REQUIRE(report.pruned >= last);
    last = report.pruned;
  }
}

TEST_CASE("threshold_for_fraction endpoints and brute-force agreement") {
  Network net = sample_net(17);
  REQUIRE(enn::threshold_for_fraction(net, 0.0) == 0.0);
  {
    Network probe = net;
    REQUIRE(enn::prune_coefficients(probe, enn::threshold_for_fraction(net, 0.0)).pruned == 0);
  }

  const auto energies = all_energies(net);
  const double rho_all = enn::threshold_for_fraction(net, 1.0);
  REQUIRE(rho_all == *std::max_element(energies.begin(), energies.end()));

  for (double fraction : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    REQUIRE(enn::threshold_for_fraction(net, fraction) ==
            threshold_oracle(energies, fraction));
  }
  REQUIRE_THROWS_AS(enn::threshold_for_fraction(net, 1.5), std::invalid_argument);
}

TEST_CASE("threshold_for_fraction handles ties like the oracle") {
  Network net = sample_net(19);
  // duplicate a few energies on purpose
  net.layers[0].dct[0].coeffs = {0.5, 0.5, -0.5, 0.1, 0.1, 0.9};
  net.layers[0].dct[1].coeffs = {0.5, -0.1, 0.3, 0.3, 0.3, 0.9};
  const auto energies = all_energies(net);
  for (double fraction : {0.05, 0.2, 0.4, 0.6, 0.8, 0.95})
    REQUIRE(enn::threshold_for_fraction(net, fraction) ==
            threshold_oracle(energies, fraction));
}

TEST_CASE("per-activation grid mse increase from one pruned coefficient is F^2/2") {
  enn::Rng rng(23);
  const int n = 64;
  enn::DctActivation act = enn::make_dct_activation(6, n);
  for (double& c : act.coeffs) c = rng.uniform(-1.0, 1.0);
  for (int drop = 0; drop < 6; ++drop) {
    enn::DctActivation cut = act;
    cut.coeffs[drop] = 0.0;
    cut.mask[drop] = 0;
    double sse = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = enn::dct_eval(act, i + 1.0) - enn::dct_eval(cut, i + 1.0);
      sse += d * d;
    }
    const double mse_increase = sse / n;
    REQUIRE(std::abs(mse_increase - act.coeffs[drop] * act.coeffs[drop] / 2.0) < 1e-9);
  }
}

TEST_CASE("pruning permanence survives further training") {
  Network net = sample_net(29);
  enn::prune_coefficients(net, 0.02);
  std::vector<std::pair<std::size_t, std::size_t>> masked;
  for (std::size_t m = 0; m < net.layers[0].dct.size(); ++m)
    for (std::size_t qi = 0; qi < net.layers[0].dct[m].coeffs.size(); ++qi)
      if (!net.layers[0].dct[m].mask[qi]) masked.push_back({m, qi});
  REQUIRE_FALSE(masked.empty());

  const enn::Dataset data =
      enn::generate_problem(enn::problem_from_id(enn::ProblemId::p1), 500, 31);
  enn::TrainConfig cfg;
  cfg.epochs = 3;
  enn::train_classification(net, data, cfg);
  for (auto [m, qi] : masked) {
    REQUIRE(net.layers[0].dct[m].coeffs[qi] == 0.0);
    REQUIRE(net.layers[0].dct[m].mask[qi] == 0);
  }
}

TEST_CASE("coeff_distance basics") {
  const Vector f{0.3, -0.2, 0.9};
  REQUIRE(enn::coeff_distance(f, f) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(enn::coeff_distance(Vector{1.0, 0.0}, Vector{0.0, 2.0}) == 1.0);
  Vector neg = f;
  for (double& v : neg) v = -v;
  REQUIRE(enn::coeff_distance(f, neg) == Catch::Approx(2.0).margin(1e-15));
  REQUIRE_THROWS_AS(enn::coeff_distance(f, Vector{0.0, 0.0, 0.0}), std::domain_error);
  REQUIRE_THROWS_AS(enn::coeff_distance(f, Vector{1.0, 2.0}), std::invalid_argument);

  enn::Rng rng(37);
  for (int i = 0; i < 200; ++i) {
    const Vector a = oracle::random_input(rng, 6);
    const Vector b = oracle::random_input(rng, 6);
    const double d = enn::coeff_distance(a, b);
    REQUIRE(d >= 0.0);
    REQUIRE(d <= 2.0);
    REQUIRE(d == enn::coeff_distance(b, a));
  }
}

TEST_CASE("bump_angle basics and long-double oracle") {
  const Vector w{0.4, -0.8, 0.2};
  Vector scaled = w;
  for (double& v : scaled) v *= 3.0;
  REQUIRE(enn::bump_angle(w, scaled) == Catch::Approx(0.0).margin(1e-7));
  REQUIRE(enn::bump_angle(Vector{1.0, 0.0}, Vector{0.0, -5.0}) ==
          Catch::Approx(std::numbers::pi / 2.0).margin(1e-12));
  REQUIRE_THROWS_AS(enn::bump_angle(w, Vector{0.0, 0.0, 0.0}), std::domain_error);

  enn::Rng rng(41);
  for (int i = 0; i < 200; ++i) {
    const Vector a = oracle::random_input(rng, 5);
    const Vector b = oracle::random_input(rng, 5);
    long double d = 0.0L, n1 = 0.0L, n2 = 0.0L;
    for (std::size_t k = 0; k < a.size(); ++k) {
      d += static_cast<long double>(a[k]) * b[k];
      n1 += static_cast<long double>(a[k]) * a[k];
      n2 += static_cast<long double>(b[k]) * b[k];
    }
    const double want = static_cast<double>(acosl(d / (sqrtl(n1) * sqrtl(n2))));
    REQUIRE(std::abs(enn::bump_angle(a, b) - want) < 1e-9);

    const double k = 0.001 + rng.uniform01() * 10.0;
    Vector a_scaled = a;
    for (double& v : a_scaled) v *= k;
    REQUIRE(std::abs(enn::bump_angle(a, a_scaled)) < 1e-6);
  }
}

TEST_CASE("detect_redundant_bumps flags duplicates and skips orthogonal layers") {
  Network net = sample_net(43);
  // make neuron 3 an exact copy of neuron 1
  for (std::size_t i = 0; i < 2; ++i) net.layers[0].w(i, 3) = net.layers[0].w(i, 1);
  net.layers[0].b[3] = net.layers[0].b[1];
  net.layers[0].dct[3] = net.layers[0].dct[1];

  const enn::RedundancyReport report = enn::detect_redundant_bumps(net, 0.05, 0.2);
  bool found = false;
  for (const enn::RedundantPair& p : report.pairs)
    if (p.layer == 0 && p.m == 1 && p.m_other == 3) {
      found = true;
      REQUIRE(p.coeff_distance == Catch::Approx(0.0).margin(1e-12));
      REQUIRE(p.weight_angle == Catch::Approx(0.0).margin(1e-6));
    }
  REQUIRE(found);

  // orthogonal weight columns produce an empty report even with equal coeffs
  Network ortho = enn::init_network({enn::dct_layer(2, 6, 64), enn::dct_layer(1, 6, 64)}, 2, 3);
  ortho.layers[0].w(0, 0) = 1.0;
  ortho.layers[0].w(1, 0) = 0.0;
  ortho.layers[0].w(0, 1) = 0.0;
  ortho.layers[0].w(1, 1) = 1.0;
  ortho.layers[0].dct[1] = ortho.layers[0].dct[0];
  REQUIRE(enn::detect_redundant_bumps(ortho, 0.05, 0.2).pairs.empty());
}

TEST_CASE("detect_redundant_bumps agrees with an exhaustive pair scan") {
  Network net = enn::init_network({enn::dct_layer(20, 6, 512), enn::dct_layer(1, 6, 512)}, 2, 47);
  // nudge a few neurons into near-duplicates
  for (std::size_t i = 0; i < 2; ++i) {
    net.layers[0].w(i, 7) = net.layers[0].w(i, 2) * 1.001;
    net.layers[0].w(i, 15) = net.layers[0].w(i, 4) * 0.999;
  }
  net.layers[0].dct[7].coeffs = net.layers[0].dct[2].coeffs;
  net.layers[0].dct[15].coeffs = net.layers[0].dct[4].coeffs;

  const double dist_tol = 0.05, angle_tol = 10.0 * std::numbers::pi / 180.0;
  const enn::RedundancyReport report = enn::detect_redundant_bumps(net, dist_tol, angle_tol);

  std::vector<std::pair<std::size_t, std::size_t>> expected;
  const enn::Layer& layer = net.layers[0];
  for (std::size_t m = 0; m < 20; ++m)
    for (std::size_t m2 = m + 1; m2 < 20; ++m2) {
      const Vector wm{layer.w(0, m), layer.w(1, m)};
      const Vector wm2{layer.w(0, m2), layer.w(1, m2)};
      if (enn::coeff_distance(layer.dct[m].coeffs, layer.dct[m2].coeffs) < dist_tol &&
          enn::bump_angle(wm, wm2) < angle_tol)
        expected.push_back({m, m2});
    }
  REQUIRE(report.pairs.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    REQUIRE(report.pairs[i].m == expected[i].first);
    REQUIRE(report.pairs[i].m_other == expected[i].second);
  }
}

TEST_CASE("merging an exact duplicate leaves the function unchanged") {
  Network net = sample_net(53);
  for (std::size_t i = 0; i < 2; ++i) net.layers[0].w(i, 2) = net.layers[0].w(i, 0);
  net.layers[0].b[2] = net.layers[0].b[0];
  net.layers[0].dct[2] = net.layers[0].dct[0];

  const enn::RedundancyReport report = enn::detect_redundant_bumps(net, 0.05, 0.2);
  Network merged = enn::merge_redundant_neurons(net, report);
  REQUIRE(merged.layers[0].b.size() == 4);

  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c) {
      const Vector x{-1.0 + 2.0 * c / 63.0, -1.0 + 2.0 * r / 63.0};
      REQUIRE(std::abs(enn::forward(net, x) - enn::forward(merged, x)) < 1e-9);
    }
}

TEST_CASE("merge refuses pairs outside the report tolerances and the output layer") {
  Network net = sample_net(59);
  enn::RedundancyReport bogus;
  bogus.pairs.push_back(enn::RedundantPair{0, 0, 1, 1.0, std::numbers::pi / 2.0});
  REQUIRE_THROWS_AS(enn::merge_redundant_neurons(net, bogus), std::invalid_argument);

  enn::RedundancyReport output_pair;
  output_pair.pairs.push_back(enn::RedundantPair{1, 0, 0, 0.0, 0.0});
  REQUIRE_THROWS_AS(enn::merge_redundant_neurons(net, output_pair), std::invalid_argument);
}

TEST_CASE("overlapping merge pairs resolve greedily in report order") {
  Network net = sample_net(61);
  for (std::size_t j : {1UL, 2UL}) {
    for (std::size_t i = 0; i < 2; ++i) net.layers[0].w(i, j) = net.layers[0].w(i, 0);
    net.layers[0].b[j] = net.layers[0].b[0];
    net.layers[0].dct[j] = net.layers[0].dct[0];
  }
  enn::RedundancyReport report;
  report.pairs.push_back(enn::RedundantPair{0, 0, 1, 0.0, 0.0});
  report.pairs.push_back(enn::RedundantPair{0, 1, 2, 0.0, 0.0});  // 1 is already gone
  report.pairs.push_back(enn::RedundantPair{0, 0, 2, 0.0, 0.0});
  Network merged = enn::merge_redundant_neurons(net, report);
  REQUIRE(merged.layers[0].b.size() == 3);  // neurons 1 and 2 merged into 0
  REQUIRE(merged.layers[1].w.rows() == 3);

  for (int i = 0; i < 50; ++i) {
    enn::Rng rng(static_cast<std::uint64_t>(i) + 1);
    const Vector x = oracle::random_input(rng, 2);
    REQUIRE(std::abs(enn::forward(net, x) - enn::forward(merged, x)) < 1e-9);
  }
}

TEST_CASE("pruned_distribution accounting") {
  Network net = sample_net(67);
  Network untouched = net;
  const enn::PruneReport null_report = enn::prune_coefficients(untouched, 0.0);
  for (const auto& row : enn::pruned_distribution(null_report)) REQUIRE(row.count == 0);

  const enn::PruneReport report = enn::prune_coefficients(net, 0.05);
  std::size_t total = 0;
  for (const auto& row : enn::pruned_distribution(report)) {
    REQUIRE(row.frequency % 2 == 1);
    total += row.count;
  }
  REQUIRE(total == report.pruned);
}

TEST_CASE("layer_angle_distribution counts pairs") {
  Network two = enn::init_network({enn::dct_layer(2), enn::dct_layer(1)}, 2, 71);
  const enn::AngleHistogram single = enn::layer_angle_distribution(two, 0, 8);
  REQUIRE(single.total == 1);

  Network dup = enn::init_network({enn::dct_layer(4), enn::dct_layer(1)}, 2, 73);
  for (std::size_t j = 1; j < 4; ++j)
    for (std::size_t i = 0; i < 2; ++i) dup.layers[0].w(i, j) = dup.layers[0].w(i, 0);
  const enn::AngleHistogram hist = enn::layer_angle_distribution(dup, 0, 8);
  REQUIRE(hist.total == 6);
  REQUIRE(hist.counts[0] == 6);  // every pair at angle ~0
}

TEST_CASE("angles in a wide random layer concentrate near pi/2") {
  std::vector<enn::LayerSpec> spec{enn::dct_layer(256), enn::dct_layer(256),
                                   enn::dct_layer(1)};
  const Network net = enn::init_network(spec, 2, 79);
  const double mean = enn::mean_layer_angle(net, 1);  // 256-dimensional columns
  REQUIRE(std::abs(mean - std::numbers::pi / 2.0) < 0.1);
}
