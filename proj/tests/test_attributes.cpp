#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "salttex/attributes.hpp"
#include "salttex/error.hpp"
#include "salttex/fixtures.hpp"
#include "salttex/segmentation.hpp"

using namespace salttex;

namespace {

Grid2<double> to_grid(const oracle::Matrix& m) {
  Grid2<double> g(m.size(), m[0].size());
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m[0].size(); ++c) g(r, c) = m[r][c];
  return g;
}

oracle::Matrix window_of(const Image& img, int r0, int c0, int side) {
  oracle::Matrix m = oracle::zeros(side, side);
  for (int a = 0; a < side; ++a)
    for (int b = 0; b < side; ++b) m[a][b] = img(r0 + a, c0 + b);
  return m;
}

// Straight from the definition: both window pairs, weighted sum, quadrature.
double naive_got(const Image& img, int i, int j, const GotConfig& cfg) {
  double gx = 0, gy = 0;
  for (std::size_t k = 0; k < cfg.scales.size(); ++k) {
    const int n = cfg.scales[k];
    const int side = 2 * n + 1;
    gx += cfg.weights[k] * oracle::dissimilarity(window_of(img, i - n, j - 2 * n, side),
                                                 window_of(img, i - n, j + 1, side));
    gy += cfg.weights[k] * oracle::dissimilarity(window_of(img, i - 2 * n, j - n, side),
                                                 window_of(img, i + 1, j - n, side));
  }
  return std::sqrt(gx * gx + gy * gy);
}

// Inertia tensor of the gradient scatter, eigenvalues through Jacobi.
double naive_directionality_term(const oracle::Matrix& w) {
  const int m = static_cast<int>(w.size());
  auto at = [&](int a, int b) { return w[std::clamp(a, 0, m - 1)][std::clamp(b, 0, m - 1)]; };
  std::vector<double> gx, gy;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      gx.push_back((at(a, b + 1) - at(a, b - 1)) / 2);
      gy.push_back((at(a + 1, b) - at(a - 1, b)) / 2);
    }
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < gx.size(); ++k) {
    mx += gx[k];
    my += gy[k];
  }
  mx /= gx.size();
  my /= gy.size();
  oracle::Matrix t = oracle::zeros(2, 2);
  for (std::size_t k = 0; k < gx.size(); ++k) {
    const double ex = gx[k] - mx, ey = gy[k] - my;
    t[0][0] += ey * ey;
    t[1][1] += ex * ex;
    t[0][1] -= ex * ey;
  }
  t[1][0] = t[0][1];
  auto [values, vecs] = oracle::jacobi_eigen(t);
  if (values[0] <= 1e-300) return 0.0;
  return 1.0 - std::max(0.0, values[1]) / values[0];
}

Section random_section(std::mt19937_64& rng, int rows, int cols) {
  return make_section(testing::random_image(rng, rows, cols, 0.0f, 1.0f));
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("attributes") {
  TEST_CASE("dissimilarity matches the double-DFT oracle") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> size(3, 11);
    double worst = 0;
    for (int trial = 0; trial < 500; ++trial) {
      const int n = size(rng);
      const auto a = oracle::random_matrix(rng, n, n, -1, 1);
      const auto b = oracle::random_matrix(rng, n, n, -1, 1);
      const double want = oracle::dissimilarity(a, b);
      const double got = dissimilarity(to_grid(a), to_grid(b));
      worst = std::max(worst, std::abs(got - want) / std::max(1e-300, std::abs(want)));
    }
    CHECK(worst <= 1e-9);
  }

  TEST_CASE("dissimilarity small example") {
    // |A - B| = 1 everywhere: inner DFT has a single coefficient 4, outer is
    // flat at 4, mean 4.
    CHECK(dissimilarity(Grid2<double>(2, 2, 0.0), Grid2<double>(2, 2, 1.0)) == doctest::Approx(4.0).epsilon(1e-12));
  }

  TEST_CASE("dissimilarity properties") {
    std::mt19937_64 rng(22);
    std::uniform_int_distribution<int> size(3, 11);
    for (int trial = 0; trial < 100; ++trial) {
      const int n = size(rng);
      const Grid2<double> a = to_grid(oracle::random_matrix(rng, n, n, -1, 1));
      const Grid2<double> b = to_grid(oracle::random_matrix(rng, n, n, -1, 1));
      const double ab = dissimilarity(a, b);
      CHECK(ab >= 0.0);
      CHECK(dissimilarity(b, a) == ab);
      CHECK(dissimilarity(a, a) == 0.0);
      // Scaling by a power of two is exact in every intermediate step.
      Grid2<double> a4 = a, b4 = b;
      for (double& x : a4.values()) x *= 4;
      for (double& x : b4.values()) x *= 4;
      CHECK(dissimilarity(a4, b4) == 4.0 * ab);
      // General positive factor: homogeneous up to rounding.
      Grid2<double> a3 = a, b3 = b;
      for (double& x : a3.values()) x *= 3.7;
      for (double& x : b3.values()) x *= 3.7;
      CHECK(dissimilarity(a3, b3) == doctest::Approx(3.7 * ab).epsilon(1e-12));
    }
  }

  TEST_CASE("GoT on a constant section is zero") {
    const Section s = make_section(Image(40, 40, 0.3f));
    const AttributeMap g = got_map(s);
    for (float v : g.data.values()) CHECK(v == 0.0f);
    CHECK(g.border_margin == 11);
  }

  TEST_CASE("GoT Gx peaks on a vertical texture boundary") {
    std::size_t hits = 0, rows_checked = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const int boundary = 24 + static_cast<int>(seed % 17);
      const Section s = make_two_texture_section(64, boundary, 1000 + seed);
      const GotComponents gc = got_components(s);
      const int m = gc.gx.border_margin;
      for (int r = m; r < 64 - m; ++r) {
        int best = m;
        for (int c = m; c < 64 - m; ++c)
          if (gc.gx.data(r, c) > gc.gx.data(r, best)) best = c;
        // the split sits between columns boundary-1 and boundary
        hits += std::abs(best - boundary) <= 1 || std::abs(best - (boundary - 1)) <= 1;
        ++rows_checked;
      }
    }
    CHECK(static_cast<double>(hits) >= 0.95 * static_cast<double>(rows_checked));
  }

  TEST_CASE("GoT matches a direct evaluation of the definition") {
    std::mt19937_64 rng(23);
    const Section s = random_section(rng, 17, 19);
    const GotConfig cfg = GotConfig::with_scales({1, 2});
    const AttributeMap g = got_map(s, cfg);
    CHECK(g.border_margin == 5);
    for (int i = 0; i < 17; ++i)
      for (int j = 0; j < 19; ++j) {
        if (!g.in_interior(i, j)) {
          CHECK(g.data(i, j) == 0.0f);
          continue;
        }
        CHECK(g.data(i, j) == doctest::Approx(naive_got(s.data, i, j, cfg)).epsilon(1e-6));
      }
  }

  TEST_CASE("GoT is invariant to a global offset") {
    std::mt19937_64 rng(24);
    std::uniform_int_distribution<int> q(0, 1024);
    Image img(30, 30);
    for (float& v : img.values()) v = static_cast<float>(q(rng)) / 1024.0f;  // dyadic, so +0.5 is exact
    Image shifted = img;
    for (float& v : shifted.values()) v += 0.5f;
    const GotConfig cfg = GotConfig::with_scales({1, 2, 3});
    CHECK(got_map(make_section(img), cfg).data == got_map(make_section(shifted), cfg).data);
  }

  TEST_CASE("directionality on horizontal stripes saturates") {
    Image img(40, 40);
    for (int r = 0; r < 40; ++r)
      for (int c = 0; c < 40; ++c) img(r, c) = stripe_value(r, 4);
    const AttributeMap d = directionality_map(make_section(img));
    CHECK(d.border_margin == 5);
    for (int r = 5; r < 35; ++r)
      for (int c = 5; c < 35; ++c) CHECK(d.data(r, c) == doctest::Approx(5.0).epsilon(1e-6));
  }

  TEST_CASE("directionality terms match the scatter-tensor oracle") {
    std::mt19937_64 rng(25);
    std::uniform_int_distribution<int> half(1, 5);
    for (int trial = 0; trial < 200; ++trial) {
      const int side = 2 * half(rng) + 1;
      const auto w = oracle::random_matrix(rng, side, side);
      const double t = directionality_term(to_grid(w));
      CHECK(t >= 0.0);
      CHECK(t <= 1.0);
      CHECK(t == doctest::Approx(naive_directionality_term(w)).epsilon(1e-9));
    }
    CHECK(directionality_term(Grid2<double>(5, 5, 2.0)) == 0.0);
  }

  TEST_CASE("directionality commutes with transposition") {
    std::mt19937_64 rng(26);
    const Section s = random_section(rng, 24, 31);
    const AttributeMap d = directionality_map(s);
    const AttributeMap dt = directionality_map(make_section(s.data.transposed()));
    for (std::size_t r = 0; r < s.rows(); ++r)
      for (std::size_t c = 0; c < s.cols(); ++c) CHECK(dt.data(c, r) == doctest::Approx(d.data(r, c)).epsilon(1e-5));
    for (float v : d.data.values()) {
      CHECK(v >= 0.0f);
      CHECK(v <= 5.0f + 1e-5f);
    }
  }

  TEST_CASE("GLCM contrast equals pair enumeration") {
    std::mt19937_64 rng(27);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const Section s = random_section(rng, 12, 12);
      const GlcmConfig cfg{trial % 2 ? 4 : 3, trial % 3 ? 16 : 8};
      const AttributeMap m = glcm_contrast_map(s, cfg);
      const Grid2<int> q = quantize_levels(s.data, cfg.n_levels);
      for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) {
          const float want = m.in_interior(i, j) ? static_cast<float>(oracle::glcm_contrast(
                                                       q.storage(), 12, cfg.n_levels, i, j, cfg.r_d))
                                                 : 0.0f;
          mismatches += m.data(i, j) != want;
        }
    }
    CHECK(mismatches == 0);
  }

  TEST_CASE("GLCM quantization and transpose property") {
    Image img(1, 4);
    img(0, 0) = 0.0f;
    img(0, 1) = 0.24f;
    img(0, 2) = 0.5f;
    img(0, 3) = 1.0f;
    const Grid2<int> q = quantize_levels(img, 4);
    CHECK(q(0, 0) == 0);
    CHECK(q(0, 1) == 0);
    CHECK(q(0, 2) == 2);
    CHECK(q(0, 3) == 3);

    // The four offset directions map onto themselves under transposition.
    std::mt19937_64 rng(28);
    const Section s = random_section(rng, 20, 20);
    const AttributeMap a = glcm_contrast_map(s);
    const AttributeMap b = glcm_contrast_map(make_section(s.data.transposed()));
    for (int r = 0; r < 20; ++r)
      for (int c = 0; c < 20; ++c) CHECK(b.data(c, r) == doctest::Approx(a.data(r, c)).epsilon(1e-6));
  }

  TEST_CASE("3D Sobel equals the 27-tap oracle") {
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<int> val(-50, 50);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 50; ++trial) {
      SeismicVolume v(5, 5, 5);
      for (float& x : v.data) x = static_cast<float>(val(rng));
      const SeismicVolume g = sobel3d_gradient(v);
      for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b)
          for (int c = 0; c < 5; ++c) {
            const bool edge = a == 0 || b == 0 || c == 0 || a == 4 || b == 4 || c == 4;
            const float want = edge ? 0.0f : static_cast<float>(oracle::sobel27(v.data, 5, 5, a, b, c));
            mismatches += g.at(a, b, c) != want;
          }
    }
    CHECK(mismatches == 0);
  }

  TEST_CASE("3D Sobel of a ramp") {
    SeismicVolume v(5, 6, 7);
    for (std::size_t il = 0; il < 5; ++il)
      for (std::size_t xl = 0; xl < 6; ++xl)
        for (std::size_t t = 0; t < 7; ++t) v.at(il, xl, t) = -3.0f * static_cast<float>(il);
    const SeismicVolume g = sobel3d_gradient(v);
    CHECK(g.at(2, 2, 2) == 96.0f);
    CHECK(g.at(0, 2, 2) == 0.0f);
    CHECK(code_of([] { sobel3d_gradient(SeismicVolume(2, 5, 5)); }) == ErrorCode::VolumeTooSmall);
  }

  TEST_CASE("2D Sobel") {
    Image img(6, 6);
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c) img(r, c) = static_cast<float>(c);
    const AttributeMap g = sobel2d_gradient(make_section(img));
    CHECK(g.data(2, 2) == 8.0f);
    CHECK(g.data(0, 3) == 0.0f);
    CHECK(g.border_margin == 1);
  }

  TEST_CASE("margins hold zero and tiny sections are rejected") {
    std::mt19937_64 rng(30);
    const Section s = random_section(rng, 30, 30);
    for (AttributeKind kind :
         {AttributeKind::Got, AttributeKind::Directionality, AttributeKind::GlcmContrast, AttributeKind::Gradient}) {
      const AttributeMap m = compute_attribute(s, kind);
      for (int r = 0; r < 30; ++r)
        for (int c = 0; c < 30; ++c) {
          if (!m.in_interior(r, c)) CHECK(m.data(r, c) == 0.0f);
          CHECK(m.data(r, c) >= 0.0f);
        }
    }
    CHECK(code_of([&] { got_map(random_section(rng, 20, 20)); }) == ErrorCode::SectionTooSmall);
    CHECK(code_of([&] { glcm_contrast_map(random_section(rng, 8, 8)); }) == ErrorCode::SectionTooSmall);
    CHECK(code_of([] { parse_attribute("nope"); }) == ErrorCode::InvalidArgument);
  }
}
