#include "deltatrain/diagrams.hpp"

#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "helpers.hpp"

using namespace deltatrain;
using testutil::random_amplitudes;
using testutil::random_kernel_table;
using testutil::random_noise;
using testutil::table_kernel;

TEST_CASE("diagram counts for small trains") {
  CHECK(enumerate_diagrams(1).empty());
  CHECK(enumerate_diagrams(2).size() == 1);
  CHECK(enumerate_diagrams(3).size() == 4);
  CHECK(enumerate_diagrams(4).size() == 12);
  CHECK(enumerate_diagrams(5).size() == 33);
  CHECK(enumerate_diagrams(6).size() == 88);

  // the one two-node diagram is the single arc to the open time
  const auto two = enumerate_diagrams(2);
  CHECK(two[0].arcs() == std::vector<Arc>{{1, 2}});
  CHECK(!two[0].terminal_node());

  // of the four three-node diagrams, exactly two are single arcs rooted at
  // the first node (the direct f_1 contributions)
  const auto three = enumerate_diagrams(3);
  const auto rooted_single = std::count_if(
      three.begin(), three.end(), [](const Diagram& d) {
        return d.arcs().size() == 1 && d.start_index() == 1;
      });
  CHECK(rooted_single == 2);
}

TEST_CASE("enumeration is lexicographic and span-filtered") {
  const auto all = enumerate_diagrams(4);
  const auto key = [](const Diagram& d) {
    std::vector<std::pair<int, int>> v;
    for (const Arc& a : d.arcs()) v.emplace_back(a.source, a.target);
    return v;
  };
  CHECK(std::is_sorted(all.begin(), all.end(),
                       [&](const Diagram& a, const Diagram& b) {
                         return key(a) < key(b);
                       }));

  const auto nn = enumerate_diagrams(4, 1);
  for (const Diagram& d : nn)
    for (const Arc& a : d.arcs()) CHECK(a.target == a.source + 1);
  // nearest-neighbor chains of a 4-node train: {1-2}, {2-3}, {3-4},
  // {1-2,2-3}, {1-2,3-4}, {2-3,3-4}, {1-2,2-3,3-4}
  CHECK(nn.size() == 7);

  const auto wide = enumerate_diagrams(4, 3);
  CHECK(wide.size() == all.size());
}

TEST_CASE("diagram validation") {
  CHECK_THROWS_AS(Diagram({}), ConfigError);
  CHECK_THROWS_AS(Diagram({{2, 2}}), ConfigError);
  CHECK_THROWS_AS(Diagram({{3, 2}}), ConfigError);
  CHECK_THROWS_AS(Diagram({{0, 1}}), ConfigError);
  CHECK_THROWS_AS(Diagram({{1, 3}, {2, 4}}), ConfigError);
  CHECK_THROWS_AS(Diagram({{1, 3}}, 2), ConfigError);
  CHECK_NOTHROW(Diagram({{1, 3}, {3, 4}}, 4));
}

TEST_CASE("classification by arc span") {
  CHECK(classify(Diagram({{1, 2}, {2, 3}})) == DiagramClass::Markovian);
  CHECK(classify(Diagram({{1, 3}})) == DiagramClass::NonMarkovian);
  CHECK(classify(Diagram({{1, 2}, {2, 3}, {3, 4}})) == DiagramClass::Markovian);
  CHECK(classify(Diagram({{1, 2}, {2, 4}})) == DiagramClass::NonMarkovian);
}

namespace {

KernelSpec jc_like_kernel() {
  return KernelSpec(
      [](double t, double tp) {
        return complex{0.175 * std::exp(-1.0 * (t - tp)), 0.0};
      },
      1.0);
}

}  // namespace

TEST_CASE("two-node diagram weight equals the memory row entry") {
  const DeltaTrain tr(1.0, 2);
  const auto kern = jc_like_kernel();
  const auto prop = FreePropagator::first_order();
  const std::vector<complex> f{complex{0.7, -0.2}, complex{0.1, 0.4}};

  const auto diagrams = enumerate_diagrams(2);
  const complex w = weight(diagrams[0], 1.0, tr, kern, prop, f);
  const auto row = k_row(1.0, tr, kern, prop);
  CHECK(std::abs(w - row[0] * f[0]) < 1e-16);
}

TEST_CASE("degenerate weights") {
  const DeltaTrain tr(1.0, 3);
  const auto prop = FreePropagator::harmonic(1.2);
  const KernelSpec zero([](double, double) { return complex{0.0, 0.0}; });
  const std::vector<complex> f{complex{1, 0}, complex{2, 0}, complex{3, 0}};
  const std::vector<complex> zf(3, complex{0.0, 0.0});
  for (const Diagram& d : enumerate_diagrams(3)) {
    CHECK(weight(d, 1.0, tr, zero, prop, f) == complex{0.0, 0.0});
    CHECK(weight(d, 1.0, tr, jc_like_kernel(), prop, zf) == complex{0.0, 0.0});
  }
  // open-time step: a diagram whose last arc lands beyond t weighs nothing
  const Diagram late({{1, 3}});
  CHECK(weight(late, 0.5, tr, jc_like_kernel(), prop, f) == complex{0.0, 0.0});
}

TEST_CASE("node-terminated diagram weight") {
  const DeltaTrain tr(1.5, 3);
  const auto kern = jc_like_kernel();
  const auto prop = FreePropagator::first_order();
  const std::vector<complex> f{complex{0.5, 0.1}, complex{0, 0}, complex{0, 0}};
  const double delta = tr.spacing();
  const Diagram d({{1, 2}}, 3);
  const complex want = f[0] * (-delta * delta * kern.sigma(tr, 2, 1)) *
                       prop.green0(tr.node(3) - tr.node(2));
  CHECK(std::abs(weight(d, 99.0, tr, kern, prop, f) - want) < 1e-16);
}

TEST_CASE("restricted kernels zero exactly the wide-arc diagrams") {
  std::mt19937 rng(23);
  const DeltaTrain tr(2.0, 5);
  const auto kern = table_kernel(random_kernel_table(5, rng), tr.spacing());
  const auto restricted = kern.restricted(2);
  const auto prop = FreePropagator::first_order();
  std::vector<complex> f(5);
  for (auto& v : f) v = complex{1.0, 0.3};
  for (const Diagram& d : enumerate_diagrams(5)) {
    const bool wide = std::any_of(
        d.arcs().begin(), d.arcs().end(),
        [](const Arc& a) { return a.target - a.source > 2; });
    const complex w = weight(d, 2.0, tr, restricted, prop, f);
    if (wide)
      CHECK(w == complex{0.0, 0.0});
    else
      CHECK(std::abs(w) > 0.0);
  }
}

TEST_CASE("diagram sum reconstructs the solver") {
  std::mt19937 rng(29);
  for (int n = 2; n <= 6; ++n) {
    for (int trial = 0; trial < 4; ++trial) {
      const DeltaTrain tr(1.1 + 0.3 * trial, random_amplitudes(n, rng));
      const auto kern = table_kernel(random_kernel_table(n, rng), tr.spacing());
      const bool harmonic = (n + trial) % 2 == 0;
      const auto prop = harmonic ? FreePropagator::harmonic(1.4)
                                 : FreePropagator::first_order();
      std::vector<complex> ic{complex{0.6, -0.3}};
      if (harmonic) ic.push_back(complex{0.2, 0.5});
      const auto ns = NoiseSequence::from_xi(tr, random_noise(n, rng));
      for (double frac : {0.4, 1.0}) {
        const auto res = sum_check(frac * tr.duration(), tr, kern, ns, ic, prop);
        CHECK(res.abs_difference < 1e-10);
      }
    }
  }
}

TEST_CASE("free dynamics leave only the bare term") {
  const DeltaTrain tr(1.0, 4);
  const KernelSpec zero([](double, double) { return complex{0.0, 0.0}; });
  const auto prop = FreePropagator::harmonic(0.9);
  const std::vector<complex> ic{complex{0.4, 0.0}, complex{-0.1, 0.2}};
  const auto res = sum_check(1.0, tr, zero, NoiseSequence::zero(4), ic, prop);
  const complex ft = prop.free_solution(1.0, ic);
  CHECK(std::abs(res.diagram_sum - ft) < 1e-15);
  CHECK(std::abs(res.solver_value - ft) < 1e-15);
}

TEST_CASE("enumeration refuses oversized trains") {
  const DeltaTrain tr(1.0, 13);
  const std::vector<complex> ic{complex{1.0, 0.0}};
  CHECK_THROWS_AS(sum_check(1.0, tr, jc_like_kernel(), NoiseSequence::zero(13),
                            ic, FreePropagator::first_order()),
                  ConfigError);
  CHECK(enumerate_diagrams(12).size() == 28656);
}
