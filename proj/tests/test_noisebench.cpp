#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "salttex/error.hpp"
#include "salttex/evaluation.hpp"
#include "salttex/fixtures.hpp"
#include "salttex/noisebench.hpp"

using namespace salttex;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

Section normalized(Image img) {
  Section s = make_section(std::move(img));
  s.normalized = true;
  return s;
}

// Columns between the first sample reaching 10% and the first reaching 90%.
int transition_width(const Section& s, int row) {
  int lo = -1, hi = -1;
  for (int c = 0; c < static_cast<int>(s.cols()); ++c) {
    if (lo < 0 && s.data(row, c) >= 0.1f) lo = c;
    if (hi < 0 && s.data(row, c) >= 0.9f) hi = c;
  }
  return hi - lo;
}

std::size_t line_count(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST_SUITE("noisebench") {
  TEST_CASE("zero sigma is the identity") {
    std::mt19937_64 rng(61);
    const Section s = normalized(testing::random_image(rng, 32, 32));
    CHECK(add_gaussian_noise(s, 0.0, 5).data == s.data);
  }

  TEST_CASE("noise moments on a zero section") {
    const Section zero = normalized(Image(256, 256, 0.0f));
    const Section n = add_gaussian_noise(zero, 0.05, 1234);
    double sum = 0, sq = 0;
    for (float v : n.data.values()) sum += v;
    const double mean = sum / n.data.size();
    for (float v : n.data.values()) sq += (v - mean) * (v - mean);
    const double sd = std::sqrt(sq / n.data.size());
    CHECK(std::abs(mean) <= 4 * (0.05 / 256));
    CHECK(std::abs(sd - 0.05) <= 0.02 * 0.05);
    // not clipped
    CHECK(*std::min_element(n.data.values().begin(), n.data.values().end()) < 0.0f);
  }

  TEST_CASE("noise is reproducible and seed dependent") {
    const Section s = normalized(Image(40, 30, 0.5f));
    CHECK(add_gaussian_noise(s, 0.03, 7).data == add_gaussian_noise(s, 0.03, 7).data);
    CHECK_FALSE(add_gaussian_noise(s, 0.03, 7).data == add_gaussian_noise(s, 0.03, 8).data);
    // fixed generator: first outputs are pinned
    CHECK(splitmix64_at(0, 0) == 0xE220A8397B1DCDAFull);
    CHECK(gaussian_at(1, 0) == gaussian_at(1, 0));
    CHECK(code_of([] { add_gaussian_noise(make_section(Image(4, 4)), 0.1, 1); }) == ErrorCode::NotNormalized);
  }

  TEST_CASE("bilateral filter") {
    const Section flat = normalized(Image(20, 20, 0.7f));
    const Section smoothed = bilateral_filter(flat, {});
    for (float v : smoothed.data.values()) CHECK(v == doctest::Approx(0.7f).epsilon(1e-6));

    std::mt19937_64 rng(62);
    const Section r = normalized(testing::random_image(rng, 24, 24));
    const Section wide = bilateral_filter(r, {1.5, 1e6, 3});
    const Section blur = gaussian_blur(r, 1.5, 3);
    for (std::size_t k = 0; k < r.data.size(); ++k) CHECK(std::abs(wide.data.values()[k] - blur.data.values()[k]) <= 1e-6);

    Image step(16, 32);
    for (int row = 0; row < 16; ++row)
      for (int c = 0; c < 32; ++c) step(row, c) = c < 16 ? 0.0f : 1.0f;
    const Section edge = normalized(step);
    CHECK(transition_width(bilateral_filter(edge, {1.5, 0.1, 3}), 8) < transition_width(gaussian_blur(edge, 1.5, 3), 8));

    for (int trial = 0; trial < 20; ++trial) {
      const Section x = normalized(testing::random_image(rng, 16, 16, -2.0, 3.0));
      const auto [lo, hi] = std::minmax_element(x.data.values().begin(), x.data.values().end());
      const Section y = bilateral_filter(x, {2.0, 0.3, 2});
      for (float v : y.data.values()) {
        CHECK(v >= *lo);
        CHECK(v <= *hi);
      }
    }
  }

  TEST_CASE("sweep shape and clean baseline") {
    const DiskFixture fx = make_disk_fixture();
    NoiseSweepConfig cfg;
    cfg.sigmas = {0.0};
    cfg.repetitions = 2;
    const SweepReport clean = run_noise_sweep(fx.section, fx.truth, cfg, {AttributeKind::Got});
    REQUIRE(clean.cells.size() == 1);
    CHECK(clean.cells[0].n == 2);
    CHECK(clean.cells[0].mean_amd == clean.clean_amd[0]);
    CHECK(clean.cells[0].std_amd == 0.0);

    cfg.sigmas = {0.01, 0.05};
    cfg.repetitions = 1;
    const SweepReport r = run_noise_sweep(fx.section, fx.truth, cfg, {AttributeKind::Got, AttributeKind::GlcmContrast});
    CHECK(r.cells.size() == 4);
    CHECK(r.cells[0].sigma == 0.01);
    CHECK(r.cells[1].method == AttributeKind::GlcmContrast);
    for (const auto& c : r.cells) CHECK(c.n + c.failures == 1);

    testing::TempDir dir;
    write_sweep_csv(r, dir / "sweep.csv");
    write_sweep_detail_csv(r, dir / "detail.csv");
    CHECK(line_count(testing::slurp(dir / "sweep.csv")) == 5);
    CHECK(line_count(testing::slurp(dir / "detail.csv")) == 5);

    cfg.sigmas = {0.02, 0.01};
    CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::InvalidArgument);
  }
}
