#include <doctest.h>

#include <cmath>

#include "anchorlink/error.hpp"
#include "anchorlink/model.hpp"
#include "oracles.hpp"

using namespace anchorlink;

TEST_SUITE("model") {

TEST_CASE("aggregate_mean arithmetic, empty and identity cases") {
  Vec a(2), b(2);
  a << 1, 3;
  b << 3, 5;
  std::vector<Vec> vs{a, b};
  Vec mean = aggregate_mean(vs, 2);
  CHECK(mean[0] == doctest::Approx(2.0));
  CHECK(mean[1] == doctest::Approx(4.0));

  Vec empty_mean = aggregate_mean({}, 2);
  CHECK(empty_mean[0] == 0.0);
  CHECK(empty_mean[1] == 0.0);

  std::vector<Vec> single{a};
  CHECK(aggregate_mean(single, 2) == a);

  std::vector<Vec> ragged{a, Vec::Zero(3)};
  CHECK_THROWS_AS(aggregate_mean(ragged, 2), DataError);
}

TEST_CASE("aggregate_mean is permutation invariant") {
  RandomEngine rng(21);
  std::vector<Vec> vs;
  for (int i = 0; i < 6; ++i) {
    Vec v(3);
    for (int j = 0; j < 3; ++j) v[j] = rng.normal();
    vs.push_back(v);
  }
  Vec base = aggregate_mean(vs, 3);
  std::vector<Vec> shuffled{vs[3], vs[0], vs[5], vs[1], vs[4], vs[2]};
  Vec perm = aggregate_mean(shuffled, 3);
  CHECK((base - perm).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("layer_forward with zero weights gives the uniform unit vector") {
  const int d_out = 5;
  Mat w = Mat::Zero(d_out, 4);
  Vec b = Vec::Zero(d_out);
  Vec self(2), nbr(2);
  self << 0.3, -2.0;
  nbr << 1.0, 4.0;
  Vec h = layer_forward(self, nbr, w, b);
  REQUIRE(h.size() == d_out);
  for (int i = 0; i < d_out; ++i) {
    CHECK(h[i] == doctest::Approx(1.0 / std::sqrt(double(d_out))));
  }
  CHECK(h.norm() == doctest::Approx(1.0));
}

TEST_CASE("layer_forward equals normalize(sigmoid(W cat + b)) recomputed by hand") {
  RandomEngine rng(22);
  const int d_in = 3, d_out = 4;
  Mat w(d_out, 2 * d_in);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.normal();
  Vec b(d_out);
  for (int i = 0; i < d_out; ++i) b[i] = rng.normal();
  Vec self(d_in), nbr(d_in);
  for (int i = 0; i < d_in; ++i) {
    self[i] = rng.normal();
    nbr[i] = rng.normal();
  }

  Vec cat(2 * d_in);
  cat << self, nbr;
  Vec expect = w * cat + b;
  for (int i = 0; i < d_out; ++i) expect[i] = 1.0 / (1.0 + std::exp(-expect[i]));
  // 3-4-5 style renormalization
  expect /= expect.norm();

  Vec got = layer_forward(self, nbr, w, b);
  CHECK((got - expect).norm() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(got.norm() == doctest::Approx(1.0));
}

TEST_CASE("loss worked values and clamping") {
  CHECK(loss(std::vector<double>{0.9999999}, std::vector<int>{1}) ==
        doctest::Approx(0.0).epsilon(1e-6));
  CHECK(loss(std::vector<double>{0.5}, std::vector<int>{1}) ==
        doctest::Approx(std::log(2.0)));
  CHECK(loss(std::vector<double>{0.5, 0.5}, std::vector<int>{1, 0}) ==
        doctest::Approx(std::log(2.0)));
  // clamp keeps p = 0 and p = 1 finite
  CHECK(std::isfinite(loss(std::vector<double>{0.0, 1.0}, std::vector<int>{1, 0})));
  CHECK_THROWS_AS(loss({}, {}), UsageError);
}

TEST_CASE("init_params is bounded, seeded and shaped") {
  std::vector<int> dims{7, 5};
  ModelParams p = init_params(3, dims, true, 99);
  ModelParams q = init_params(3, dims, true, 99);
  ModelParams r = init_params(3, dims, true, 100);
  REQUIRE(p.hops() == 2);
  CHECK(p.input_dim() == 3);
  CHECK(p.embedding_dim() == 5);
  CHECK(p.layer_weights[0].rows() == 7);
  CHECK(p.layer_weights[0].cols() == 6);
  CHECK(p.layer_weights[1].cols() == 14);

  const double bound0 = std::sqrt(6.0 / (6 + 7));
  CHECK(p.layer_weights[0].cwiseAbs().maxCoeff() <= bound0);
  CHECK(p.layer_weights[0] == q.layer_weights[0]);
  CHECK(p.layer_weights[0] != r.layer_weights[0]);
  CHECK(p.layer_bias[0].isZero());
}

TEST_CASE("forward: isolated target with zero params gives p = 0.5") {
  Network source = oracle::make_network(1, {}, oracle::unit_attrs(1));
  Network target = oracle::make_network(1, {}, oracle::unit_attrs(1));
  MatchingGraphView view(source, target, ThetaKind::CosineScalar);

  ModelParams params;
  params.layer_weights.push_back(Mat::Zero(4, 2));
  params.layer_bias.push_back(Vec::Zero(4));
  params.head_weights = Vec::Zero(4);
  params.head_bias = 0.0;

  SamplingConfig cfg;
  cfg.hops = 1;
  cfg.fanouts = {2};
  RandomEngine rng(31);
  std::vector<MatchingNode> targets{{0, 0}};
  Batch batch = build_batch(targets, view, cfg, rng);
  ForwardResult out = forward(batch, params, view);
  REQUIRE(out.probabilities.size() == 1);
  CHECK(out.probabilities[0] == doctest::Approx(0.5));
  CHECK(out.embeddings.row(0).norm() == doctest::Approx(1.0));
}

TEST_CASE("forward is deterministic and feature-functional") {
  RandomEngine graph_rng(32);
  Network source = oracle::random_network(10, 0.4, 3, graph_rng);
  Network target = oracle::random_network(10, 0.4, 3, graph_rng);
  MatchingGraphView view(source, target, ThetaKind::Concat);

  SamplingConfig cfg;
  cfg.hops = 2;
  cfg.fanouts = {3, 2};
  ModelParams params = init_params(view.feature_dim(), std::vector<int>{6, 6}, true, 5);

  RandomEngine rng_a(33), rng_b(33);
  std::vector<MatchingNode> targets{{0, 0}, {1, 1}, {2, 3}};
  Batch a = build_batch(targets, view, cfg, rng_a);
  Batch b = build_batch(targets, view, cfg, rng_b);
  ForwardResult fa = forward(a, params, view);
  ForwardResult fb = forward(b, params, view);
  CHECK(fa.probabilities == fb.probabilities);  // bitwise identical
  CHECK(fa.embeddings == fb.embeddings);

  for (Eigen::Index i = 0; i < fa.probabilities.size(); ++i) {
    CHECK(fa.probabilities[i] > 0.0);
    CHECK(fa.probabilities[i] < 1.0);
    CHECK(fa.embeddings.row(i).norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("identical features and neighborhoods give identical embeddings") {
  // two isolated target-side candidates with the same attribute row
  std::vector<std::vector<double>> sattrs{{0.5, 1.0}};
  std::vector<std::vector<double>> tattrs{{0.5, 1.0}, {0.5, 1.0}};
  Network source(1, std::vector<std::pair<int, int>>{}, sattrs);
  Network target(2, std::vector<std::pair<int, int>>{}, tattrs);
  MatchingGraphView view(source, target, ThetaKind::Concat);

  SamplingConfig cfg;
  cfg.hops = 1;
  cfg.fanouts = {2};
  ModelParams params = init_params(view.feature_dim(), std::vector<int>{5}, true, 6);
  RandomEngine rng(34);
  std::vector<MatchingNode> targets{{0, 0}, {0, 1}};
  Batch batch = build_batch(targets, view, cfg, rng);
  ForwardResult out = forward(batch, params, view);
  CHECK((out.embeddings.row(0) - out.embeddings.row(1)).norm() ==
        doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("hop mismatch between batch and params is rejected") {
  Network source = oracle::make_network(2, {{0, 1}}, oracle::unit_attrs(2));
  Network target = oracle::make_network(2, {{0, 1}}, oracle::unit_attrs(2));
  MatchingGraphView view(source, target, ThetaKind::CosineScalar);
  SamplingConfig cfg;
  cfg.hops = 1;
  cfg.fanouts = {2};
  RandomEngine rng(35);
  std::vector<MatchingNode> targets{{0, 0}};
  Batch batch = build_batch(targets, view, cfg, rng);
  ModelParams params = init_params(1, std::vector<int>{4, 4}, true, 7);  // 2 hops
  CHECK_THROWS_AS(forward(batch, params, view), DataError);
}

}  // TEST_SUITE
