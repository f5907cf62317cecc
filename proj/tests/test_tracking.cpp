#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "subspace_oracle.hpp"
#include "salttex/error.hpp"
#include "salttex/fixtures.hpp"
#include "salttex/model_io.hpp"
#include "salttex/tensor_subspace.hpp"
#include "salttex/segmentation.hpp"
#include "salttex/tracking.hpp"

using namespace salttex;

namespace {

using oracle::basis_gap;
using oracle::oracle_residual;
using oracle::oracle_subspace;
using oracle::OracleModel;
using oracle::random_stack;
using oracle::to_eigen;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

// Stripes left of `boundary_col`, strong uniform chaos right of it.
Section flank_section(int boundary_col, std::uint64_t seed) {
  Image img(128, 128);
  for (int r = 0; r < 128; ++r)
    for (int c = 0; c < 128; ++c)
      img(r, c) = c < boundary_col ? stripe_value(r, 4) : chaos_value(seed, static_cast<std::uint64_t>(r * 128 + c), 1.0);
  return normalize_section(make_section(img));
}

Boundary vertical_line(int col) {
  Boundary b;
  b.closed = false;
  for (int r = 16; r < 112; ++r) b.points.push_back({col, r});
  return b;
}

// Direct 2x2 rule: a point stays when some 2x2 window holding it holds >= 2 points.
std::vector<Point> oracle_survivors(const Mask& m) {
  std::vector<Point> out;
  for (int r = 0; r < static_cast<int>(m.rows()); ++r)
    for (int c = 0; c < static_cast<int>(m.cols()); ++c) {
      if (!m(r, c)) continue;
      bool keep = false;
      for (int r0 = r - 1; r0 <= r; ++r0)
        for (int c0 = c - 1; c0 <= c; ++c0) {
          int count = 0;
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) count += m.contains(r0 + a, c0 + b) && m(r0 + a, c0 + b);
          keep = keep || count >= 2;
        }
      if (keep) out.push_back({c, r});
    }
  return out;
}

}  // namespace

TEST_SUITE("tracking") {
  TEST_CASE("mode bases and residuals match the unfolding oracle") {
    std::mt19937_64 rng(41);
    const std::array<int, 3> dims{15, 15, 5};
    double worst_basis = 0, worst_residual = 0;
    for (int trial = 0; trial < 10; ++trial) {
      const SliceStack s = random_stack(rng, 31, 31, 20);
      const SourceModel m = learn_subspace(s, dims, false);
      const OracleModel o = oracle_subspace(s, dims);
      worst_basis = std::max({worst_basis, basis_gap(m.u1, o.u1), basis_gap(m.u2, o.u2), basis_gap(m.u3, o.u3)});
      for (std::size_t k = 0; k < s.size(); ++k) {
        const double want = oracle_residual(o.centered[k], o.u1, o.u2);
        const double got = relative_residual(s[k], m);
        worst_residual = std::max(worst_residual, std::abs(got - want) / want);
      }
    }
    CHECK(worst_basis <= 1e-9);
    CHECK(worst_residual <= 1e-9);
  }

  TEST_CASE("full dimensions reconstruct exactly and bases are orthonormal") {
    std::mt19937_64 rng(42);
    const SliceStack s = random_stack(rng, 31, 31, 20);
    const SourceModel full = learn_subspace(s, {31, 31, 19}, false);
    for (const auto& x : s) CHECK(relative_residual(x, full) <= 1e-12);
    for (bool adjusted : {false, true}) {
      const SourceModel m = learn_subspace(s, {15, 15, 5}, adjusted);
      for (const Eigen::MatrixXd* u : {&m.u1, &m.u2, &m.u3}) {
        const Eigen::MatrixXd gram = u->transpose() * *u;
        CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <= 1e-10);
      }
    }
    const SourceModel v = learn_vector_subspace(s, 10);
    const Eigen::MatrixXd gram = v.v.transpose() * v.v;
    CHECK((gram - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() <= 1e-10);
  }

  TEST_CASE("residual ignores a constant offset and is 1 on the orthogonal complement") {
    std::mt19937_64 rng(43);
    const SliceStack s = random_stack(rng, 31, 31, 12);
    const SourceModel m = learn_subspace(s, {15, 15, 5}, false);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::MatrixXd x = random_stack(rng, 31, 31, 1)[0];
      const Eigen::MatrixXd shifted = x.array() + u(rng);
      CHECK(relative_residual(shifted, m) == doctest::Approx(relative_residual(x, m)).epsilon(1e-10));
    }
    const Eigen::MatrixXd r = random_stack(rng, 31, 31, 1)[0];
    const Eigen::MatrixXd outside = (Eigen::MatrixXd::Identity(31, 31) - m.u1 * m.u1.transpose()) * r;
    CHECK(projection_residual(outside, m) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(projection_residual(Eigen::MatrixXd::Zero(31, 31), m) == 0.0);
  }

  TEST_CASE("SNR ordering under isotropic noise is variance ordering") {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 12;
      const auto a = oracle::random_matrix(rng, n, n, -1, 1);
      Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(to_eigen(a)).householderQ();
      Eigen::VectorXd lambda(n);
      for (int i = 0; i < n; ++i) lambda(i) = 1.0 + 3.0 * i;  // well separated
      const Eigen::MatrixXd cov = q * lambda.asDiagonal() * q.transpose();
      const Eigen::MatrixXd noise = 0.37 * Eigen::MatrixXd::Identity(n, n);
      const Eigen::MatrixXd plain = top_eigenvectors(cov, 5);
      const Eigen::MatrixXd snr = snr_basis(cov, noise, 5);
      for (int c = 0; c < 5; ++c) CHECK(std::abs(plain.col(c).dot(snr.col(c))) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  TEST_CASE("median cleanup matches the direct 2x2 rule exhaustively") {
    int mismatches = 0;
    for (int bits = 0; bits < (1 << 16); ++bits) {
      Mask m(4, 4, 0);
      std::vector<Point> pts;
      for (int k = 0; k < 16; ++k)
        if (bits >> k & 1) {
          m(k / 4, k % 4) = 1;
          pts.push_back({k % 4, k / 4});
        }
      mismatches += median_survivors(pts, 4, 4, 2) != oracle_survivors(m);
    }
    CHECK(mismatches == 0);

    // isolated point never survives, 2x2 cluster always does
    CHECK(median_survivors({{3, 3}}, 8, 8, 2).empty());
    CHECK(median_survivors({{1, 1}, {5, 5}}, 8, 8, 2).empty());
    const std::vector<Point> block{{2, 2}, {3, 2}, {2, 3}, {3, 3}};
    CHECK(median_survivors(block, 8, 8, 2) == block);
    const std::vector<Point> corner{{6, 6}, {7, 6}, {6, 7}, {7, 7}};
    CHECK(median_survivors(corner, 8, 8, 2) == corner);
  }

  TEST_CASE("median filter anchored top-left") {
    Mask m(3, 3, 0);
    m(0, 0) = m(1, 1) = 1;
    const Mask f = median_filter_binary(m, 2);
    CHECK(f(0, 0) == 1);
    CHECK(f(1, 1) == 0);
    CHECK(f(0, 1) == 0);
  }

  TEST_CASE("reconnect closes a circle and rejects a radial outlier") {
    std::vector<Point> pts;
    for (int k = 0; k < 72; ++k) {
      const double a = k * 2 * M_PI / 72;
      pts.push_back({static_cast<int>(std::lround(50 + 20 * std::cos(a))), static_cast<int>(std::lround(50 + 20 * std::sin(a)))});
    }
    pts.push_back({50 + 45, 50});
    std::mt19937_64 rng(45);
    std::shuffle(pts.begin(), pts.end(), rng);
    ReconnectStats stats;
    const Boundary b = reconnect(pts, &stats);
    CHECK(stats.outliers == 1);
    for (std::size_t i = 0; i < b.points.size(); ++i) {
      const Point p = b.points[i], q = b.points[(i + 1) % b.points.size()];
      CHECK(std::max(std::abs(p.col - q.col), std::abs(p.row - q.row)) <= 1);
      CHECK(std::hypot(p.col - 50, p.row - 50) == doctest::Approx(20).epsilon(0.1));
    }
    CHECK(code_of([] { reconnect({{1, 1}, {2, 2}}); }) == ErrorCode::TooFewTrackedPoints);
  }

  TEST_CASE("normals are unit length and perpendicular to the chain") {
    const Boundary b = trace_boundary(disk_mask(64, 64, 32, 32, 20));
    const auto normals = boundary_normals(b);
    REQUIRE(normals.size() == b.size());
    for (const auto& n : normals) CHECK(std::hypot(n[0], n[1]) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("straight flank: a lateral shift is recovered") {
    TrackingConfig cfg;
    const Boundary ref = vertical_line(64);
    const SubspaceModel model = build_model(flank_section(64, 13), ref, cfg);
    CHECK(model.n_training == ref.size());
    for (int shift : {-2, 0, 2}) {
      const Section target = flank_section(64 + shift, 20 + static_cast<std::uint64_t>(shift + 2));
      const TrackedSection ts = track_section(model, ref, target, cfg);
      std::vector<int> cols;
      for (const Point& p : ts.boundary.points)
        if (p.row >= 24 && p.row < 104) cols.push_back(p.col);
      REQUIRE_FALSE(cols.empty());
      std::nth_element(cols.begin(), cols.begin() + cols.size() / 2, cols.end());
      CHECK(std::abs(cols[cols.size() / 2] - (64 + shift)) <= 1);
    }
  }

  TEST_CASE("tracking is deterministic and models round-trip") {
    TrackingConfig cfg;
    const Boundary ref = vertical_line(64);
    const SubspaceModel model = build_model(flank_section(64, 13), ref, cfg);
    const Section target = flank_section(66, 14);
    const TrackedSection a = track_section(model, ref, target, cfg);
    const TrackedSection b = track_section(model, ref, target, cfg);
    CHECK(a.boundary.points == b.boundary.points);
    CHECK(a.accepted == b.accepted);

    const SubspaceModel back = deserialize_model(serialize_model(model));
    CHECK(back.amp.u1 == model.amp.u1);
    CHECK(back.got.u2 == model.got.u2);
    CHECK(back.amp.mean == model.amp.mean);
    CHECK(back.feature_dims == model.feature_dims);
    CHECK(back.t_e == model.t_e);
    CHECK(track_section(back, ref, target, cfg).boundary.points == a.boundary.points);

    testing::TempDir dir;
    save_model(model, dir / "m.stxm");
    CHECK(serialize_model(load_model(dir / "m.stxm")) == serialize_model(model));

    TrackingConfig vec = cfg;
    vec.features = FeatureMode::Vector;
    const SubspaceModel vm = build_model(flank_section(64, 13), ref, vec);
    CHECK(vm.amp.vectorized());
    CHECK(serialize_model(deserialize_model(serialize_model(vm))) == serialize_model(vm));
  }

  TEST_CASE("too few patches") {
    TrackingConfig cfg;
    Boundary tiny;
    tiny.points = {{64, 60}, {64, 61}, {64, 62}};
    CHECK(code_of([&] { build_model(flank_section(64, 1), tiny, cfg); }) == ErrorCode::TooFewPatches);
    Boundary edge;
    for (int r = 0; r < 10; ++r) edge.points.push_back({2, r});  // no patch fits
    CHECK(code_of([&] { build_model(flank_section(64, 1), edge, cfg); }) == ErrorCode::TooFewPatches);
    cfg.patch_size = 30;
    CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::InvalidArgument);
  }
  TEST_CASE("patch tensors are plain windows in boundary order") {
    std::mt19937_64 rng(46);
    Section sec = normalize_section(make_section(testing::random_image(rng, 128, 128)));
    const AttributeMap g = got_map(sec);
    Boundary b;
    for (int k = 0; k < 40; ++k) b.points.push_back({20 + 2 * k, 30 + k});
    b.points.push_back(b.points[5]);  // duplicates are kept
    const TrackingConfig cfg;
    const PatchTensors t = build_patch_tensors(sec, g, b, cfg);
    REQUIRE(t.amp.size() == 41);
    for (std::size_t k = 0; k < t.amp.size(); ++k) {
      const Point p = b.points[k];
      for (int a = 0; a < 31; ++a)
        for (int c = 0; c < 31; ++c) {
          CHECK(t.amp[k](a, c) == sec.data(p.row - 15 + a, p.col - 15 + c));
          CHECK(t.got[k](a, c) == g.data(p.row - 15 + a, p.col - 15 + c));
        }
    }
    CHECK(t.amp[40] == t.amp[5]);
  }

  TEST_CASE("identical slices reconstruct exactly and the tie goes to boundary") {
    std::mt19937_64 rng(47);
    const Eigen::MatrixXd x = random_stack(rng, 31, 31, 1)[0];
    const SliceStack same(6, x);
    const SourceModel m = learn_subspace(same, {3, 3, 2}, false);
    for (const auto& s : same) CHECK(relative_residual(s, m) == 0.0);

    TrackingConfig cfg;
    cfg.feature_dims = {15, 15, 5};
    const SubspaceModel model = build_model(flank_section(64, 13), vertical_line(64), cfg);
    const Section target = flank_section(64, 9);
    const PatchPair pp = extract_patch_pair(target.data, got_map(target).data, {70, 64}, 31);
    SubspaceModel tie = model;
    tie.t_e = reconstruction_error(pp, model);
    CHECK(classify(pp, tie) == PatchClass::Boundary);
    tie.t_e = std::nextafter(tie.t_e, 0.0);
    CHECK(classify(pp, tie) == PatchClass::NonBoundary);
  }

  TEST_CASE("a structureless target loses its points under a calibrated T_e") {
    TrackingConfig cfg;
    cfg.t_e = 0.3;
    const Boundary ref = vertical_line(64);
    const SubspaceModel model = build_model(flank_section(64, 13), ref, cfg);
    Image noise(128, 128);
    for (int r = 0; r < 128; ++r)
      for (int c = 0; c < 128; ++c) noise(r, c) = chaos_value(99, static_cast<std::uint64_t>(r * 128 + c), 1.0);
    CHECK(code_of([&] { track_section(model, ref, make_section(noise), cfg); }) == ErrorCode::TooFewTrackedPoints);
  }

  TEST_CASE("track_volume rejects a reference outside the volume") {
    const TrackingVolume tv = make_tracking_volume();
    CHECK(code_of([&] { track_volume(tv.volume, Axis::Inline, 9, tv.truth[2], {}); }) == ErrorCode::IndexOutOfRange);
  }
}
