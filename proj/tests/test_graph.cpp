#include <doctest.h>

#include "consflow/errors.hpp"
#include "consflow/graph.hpp"
#include "consflow/tolerances.hpp"
#include "testutil.hpp"

using namespace consflow;

TEST_CASE("laplacian by definition") {
  CHECK(laplacian(generate(Topology::path, 3, 0)) ==
        DenseMatrix{{1, -1, 0}, {-1, 2, -1}, {0, -1, 1}});
  CHECK(laplacian(generate(Topology::complete, 2, 0)) ==
        DenseMatrix{{1, -1}, {-1, 1}});
  CHECK(laplacian(NetworkGraph(1)) == DenseMatrix{{0.0}});
}

TEST_CASE("connectivity") {
  CHECK(is_connected(generate(Topology::path, 4, 0)));
  CHECK_FALSE(is_connected(NetworkGraph(4, {{0, 1}, {2, 3}})));
  CHECK(is_connected(NetworkGraph(1)));
}

TEST_CASE("diameter") {
  CHECK(diameter(generate(Topology::path, 4, 0)) == 3);
  CHECK(diameter(generate(Topology::complete, 5, 0)) == 1);
  CHECK(diameter(generate(Topology::cycle, 6, 0)) == 3);
  CHECK_THROWS_WITH_AS(diameter(NetworkGraph(4, {{0, 1}, {2, 3}})),
                       doctest::Contains("disconnected"), Error);
}

TEST_CASE("lambda2 guards") {
  CHECK_THROWS_WITH_AS(lambda2(NetworkGraph(4, {{0, 1}, {2, 3}})),
                       doctest::Contains("disconnected"), Error);
  CHECK_THROWS_AS(lambda2(NetworkGraph(1)), Error);
}

TEST_CASE("lambda2 closed forms") {
  CHECK(lambda2(generate(Topology::complete, 2, 0)) == doctest::Approx(2.0));
  // K_n spectrum is {0, n, ..., n}.
  CHECK(lambda2(generate(Topology::complete, 3, 0)) == doctest::Approx(3.0));
  // Path-3 spectrum is {0, 1, 3} (roots of the characteristic polynomial).
  const NetworkGraph p3 = generate(Topology::path, 3, 0);
  CHECK(lambda2(p3) == doctest::Approx(1.0));
  CHECK(std::abs(testutil::char_poly_3(laplacian(p3), 1.0)) < 1e-12);
}

TEST_CASE("graph_report fields") {
  const GraphReport c4 = graph_report(generate(Topology::cycle, 4, 0));
  CHECK(c4.connected);
  CHECK(*c4.diameter == 2);
  CHECK(*c4.lambda2 == doctest::Approx(2.0));  // spectrum {0,2,2,4}
  CHECK(*c4.lower_bound == doctest::Approx(0.5));

  const GraphReport k2 = graph_report(generate(Topology::complete, 2, 0));
  CHECK(*k2.lambda2 == doctest::Approx(2.0));
  CHECK(*k2.lower_bound == doctest::Approx(2.0));  // bound tight here

  const GraphReport star = graph_report(generate(Topology::star, 4, 0));
  CHECK(star.connected);
  CHECK(*star.diameter == 2);
  CHECK(*star.lambda2 == doctest::Approx(1.0));

  const GraphReport lonely = graph_report(NetworkGraph(1));
  CHECK(lonely.connected);
  CHECK(*lonely.diameter == 0);
  CHECK_FALSE(lonely.lambda2.has_value());

  const GraphReport split = graph_report(NetworkGraph(4, {{0, 1}, {2, 3}}));
  CHECK_FALSE(split.connected);
  CHECK_FALSE(split.diameter.has_value());
}

TEST_CASE("generate: shapes and determinism") {
  const NetworkGraph p3 = generate(Topology::path, 3, 0);
  CHECK(p3.edges() == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}});
  CHECK(generate(Topology::complete, 4, 0).edge_count() == 6);
  CHECK(is_connected(generate(Topology::random_connected, 8, 42)));
  CHECK(generate(Topology::random_connected, 20, 7) ==
        generate(Topology::random_connected, 20, 7));
  CHECK_THROWS_AS(generate(Topology::path, 0, 0), Error);
  CHECK_THROWS_AS(generate(Topology::random_connected, 1, 0), Error);
}

TEST_CASE("graph construction rejects malformed edges") {
  CHECK_THROWS_AS(NetworkGraph(3, {{0, 0}}), Error);
  CHECK_THROWS_AS(NetworkGraph(3, {{0, 3}}), Error);
  CHECK_THROWS_AS(NetworkGraph(3, {{0, 1}, {1, 0}}), Error);  // either orientation
}

TEST_CASE("Laplacian spectrum properties across topologies") {
  const Topology all[] = {Topology::path, Topology::cycle, Topology::complete,
                          Topology::star, Topology::random_connected};
  for (Topology topo : all) {
    for (std::size_t n = 2; n <= 9; ++n) {
      const NetworkGraph g = generate(topo, n, 11 * n + 1);
      const DenseMatrix l = laplacian(g);

      // Row sums vanish.
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += l(i, j);
        CHECK(std::abs(s) < 1e-12);
      }

      const EigenResult eig = sym_eigen(l);
      CHECK(eig.values.front() >= -tol::laplacian_psd_slack);
      // Connected: zero eigenvalue is simple and its eigenvector is the
      // normalized ones direction.
      CHECK(eig.values[1] > tol::lambda2_positive);
      const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(n));
      double align = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        align = std::max(align, std::abs(std::abs(eig.vectors(r, 0)) - inv_sqrt));
      }
      CHECK(align <= tol::kernel_ones_align);

      const GraphReport report = graph_report(g);
      CHECK(*report.lower_bound <= *report.lambda2 + tol::lambda2_positive);
      CHECK(*report.lambda2 <= static_cast<double>(n) + tol::lambda2_upper_slack);
      const bool complete = g.edge_count() == n * (n - 1) / 2;
      const bool at_upper =
          std::abs(*report.lambda2 - static_cast<double>(n)) <= tol::lambda2_complete_eq;
      CHECK(at_upper == complete);
    }
  }
}
