#include "doctest.h"
#include "logtr/degradation.hpp"
#include "logtr/metrics.hpp"
#include "oracles.hpp"

using namespace logtr;

namespace {

Tensor image(Dims d, std::uint64_t seed) { return oracle::random_tensor(d, seed, 0.0, 255.0); }

// est = ref plus bounded perturbation, kept on a comparable range.
Tensor perturbed(const Tensor& ref, std::uint64_t seed, double amp) {
  Tensor e = ref;
  const Tensor n = oracle::random_tensor(ref.dims(), seed, -amp, amp);
  e += n;
  return e;
}

Tensor permute_bands(const Tensor& t, const std::vector<std::size_t>& perm) {
  Tensor out(t.dims());
  for (std::size_t i = 0; i < t.extent(0); ++i)
    for (std::size_t j = 0; j < t.extent(1); ++j)
      for (std::size_t b = 0; b < t.extent(2); ++b) out(i, j, b) = t(i, j, perm[b]);
  return out;
}

}  // namespace

TEST_CASE("PSNR closed forms and oracle") {
  const Tensor r = image({8, 8, 4}, 1);
  CHECK(std::isinf(psnr(r, r)));
  Tensor e = r;
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += (i % 2 == 0) ? 1.0 : -1.0;
  CHECK(psnr(r, e) == doctest::Approx(20.0 * std::log10(255.0)).epsilon(1e-12));
  CHECK(20.0 * std::log10(255.0) == doctest::Approx(48.1308).epsilon(1e-5));
  const Tensor p = perturbed(r, 2, 20.0);
  CHECK(std::abs(psnr(r, p) - oracle::psnr(r, p)) < 1e-10);
  CHECK_THROWS_AS(psnr(r, image({8, 8, 3}, 1)), ShapeError);
}

TEST_CASE("SSIM identity, inversion and oracle") {
  const Tensor r = image({16, 16, 2}, 3);
  CHECK(ssim(r, r) == doctest::Approx(1.0).epsilon(1e-12));
  Tensor inv = r;
  for (double& v : inv.data()) v = 255.0 - v;
  CHECK(ssim(r, inv) < 1.0);
  for (const Dims& d : {Dims{16, 16, 2}, Dims{23, 40, 1}, Dims{40, 17, 2}}) {
    const Tensor a = image(d, d[0] + d[1]);
    const Tensor b = perturbed(a, d[1], 40.0);
    CHECK(std::abs(ssim(a, b) - oracle::ssim(a, b)) < 1e-8);
  }
}

TEST_CASE("SSIM falls back to global statistics below the window size") {
  const Tensor r = image({8, 6, 2}, 4);
  const Tensor e = perturbed(r, 5, 10.0);
  const double c1 = std::pow(0.01 * 255, 2), c2 = std::pow(0.03 * 255, 2);
  double acc = 0.0;
  for (std::size_t b = 0; b < 2; ++b) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 6; ++j) {
        mx += r(i, j, b) / 48.0;
        my += e(i, j, b) / 48.0;
      }
    double vx = 0, vy = 0, cxy = 0;
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 6; ++j) {
        vx += std::pow(r(i, j, b) - mx, 2) / 48.0;
        vy += std::pow(e(i, j, b) - my, 2) / 48.0;
        cxy += (r(i, j, b) - mx) * (e(i, j, b) - my) / 48.0;
      }
    acc += ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
  }
  CHECK(std::abs(ssim(r, e) - acc / 2.0) < 1e-12);
}

TEST_CASE("ERGAS closed forms and oracle") {
  const Tensor r = image({8, 8, 4}, 6);
  CHECK(ergas(r, r, 4.0) == 0.0);
  Tensor single({8, 8, 1});
  for (std::size_t i = 0; i < single.size(); ++i) single[i] = 10.0 + static_cast<double>(i % 5);
  double m = 0.0;
  for (double v : single.data()) m += v / 64.0;
  Tensor shifted = single;
  for (double& v : shifted.data()) v += 2.0;
  CHECK(ergas(single, shifted, 4.0) == doctest::Approx(100.0 / 4.0 * 2.0 / m).epsilon(1e-12));
  const Tensor p = perturbed(r, 7, 15.0);
  CHECK(std::abs(ergas(r, p, 4.0) - oracle::ergas(r, p, 4.0)) < 1e-10);
  CHECK_THROWS_AS(ergas(Tensor({4, 4, 1}, 0.0), Tensor({4, 4, 1}, 1.0), 2.0), ValueError);
  CHECK_THROWS_AS(ergas(r, r, 0.5), ValueError);
}

TEST_CASE("SAM identity, colinearity and orthogonality are exact") {
  const Tensor r = image({8, 8, 5}, 8);
  CHECK(sam(r, r) == 0.0);
  CHECK(sam(r, r * 2.0) == 0.0);
  Tensor a({2, 1, 2}, 0.0), b({2, 1, 2}, 0.0);
  a(0, 0, 0) = 1.0;
  b(0, 0, 1) = 3.0;
  a(1, 0, 1) = 2.0;
  b(1, 0, 0) = 0.5;
  CHECK(sam(a, b) == 90.0);
  const Tensor p = perturbed(r, 9, 30.0);
  CHECK(std::abs(sam(r, p) - oracle::sam_degrees(r, p)) < 1e-9);
  CHECK(sam(r, p * 3.7) == doctest::Approx(sam(r, p)).epsilon(1e-12));
}

TEST_CASE("SAM skips zero spectra") {
  Tensor a({2, 1, 2}, 0.0), b({2, 1, 2}, 1.0);
  a(1, 0, 0) = 1.0;
  const SamResult s = sam_detail(a, b);
  CHECK(s.skipped == 1);
  CHECK(s.degrees == doctest::Approx(45.0));
  CHECK_THROWS_AS(sam(Tensor({2, 2, 3}, 0.0), b), ShapeError);
  CHECK_THROWS_AS(sam(Tensor({2, 1, 2}, 0.0), b), ValueError);
}

TEST_CASE("UIQI identity, noise and oracle") {
  const Tensor r = image({40, 40, 1}, 10);
  CHECK(uiqi(r, r) == doctest::Approx(1.0).epsilon(1e-12));
  const Tensor p = perturbed(r, 11, 50.0);
  CHECK(std::abs(uiqi(r, p) - oracle::uiqi(r, p, 32)) < 1e-8);
  const Tensor q = image({36, 33, 2}, 12);
  const Tensor qp = perturbed(q, 13, 80.0);
  CHECK(std::abs(uiqi(q, qp) - oracle::uiqi(q, qp, 32)) < 1e-8);

  const Tensor big = image({64, 64, 1}, 14);
  const Tensor noise = oracle::random_tensor({64, 64, 1}, 15, -1.0, 1.0);
  CHECK(std::abs(uiqi(big, noise)) < 0.1);
}

TEST_CASE("UIQI falls back to a single window and skips degenerate windows") {
  const Tensor r = image({10, 12, 1}, 16);
  const Tensor p = perturbed(r, 17, 30.0);
  double mx = 0, my = 0, vx = 0, vy = 0, cxy = 0;
  const double n = 120.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    mx += r[i] / n;
    my += p[i] / n;
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    vx += (r[i] - mx) * (r[i] - mx) / n;
    vy += (p[i] - my) * (p[i] - my) / n;
    cxy += (r[i] - mx) * (p[i] - my) / n;
  }
  CHECK(std::abs(uiqi(r, p) - 4 * cxy * mx * my / ((vx + vy) * (mx * mx + my * my))) < 1e-12);
  CHECK(std::abs(uiqi(r, p, 32) - uiqi_per_band(r, p, 100)[0]) < 1e-15);
  const Tensor flat({40, 40, 1}, 5.0);
  CHECK(std::isnan(uiqi(flat, flat)));
}

TEST_CASE("metrics are covariant under band permutation") {
  const Tensor r = image({33, 34, 4}, 18);
  const Tensor p = perturbed(r, 19, 25.0);
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  const Tensor rp = permute_bands(r, perm), pp = permute_bands(p, perm);
  const MetricsReport a = evaluate(r, p, 4.0), b = evaluate(rp, pp, 4.0);
  CHECK(a.psnr == doctest::Approx(b.psnr).epsilon(1e-12));
  CHECK(a.ssim == doctest::Approx(b.ssim).epsilon(1e-12));
  CHECK(a.ergas == doctest::Approx(b.ergas).epsilon(1e-12));
  CHECK(a.sam == doctest::Approx(b.sam).epsilon(1e-12));
  CHECK(a.uiqi == doctest::Approx(b.uiqi).epsilon(1e-12));
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(b.band_psnr[k] == doctest::Approx(a.band_psnr[perm[k]]).epsilon(1e-12));
    CHECK(b.band_uiqi[k] == doctest::Approx(a.band_uiqi[perm[k]]).epsilon(1e-12));
  }
}

TEST_CASE("added noise worsens PSNR and ERGAS") {
  const Tensor r = image({64, 64, 8}, 20);
  const Tensor p = perturbed(r, 21, 5.0);
  const Tensor pn = add_noise(p, 20.0, 22);
  CHECK(psnr(r, pn) < psnr(r, p));
  CHECK(ergas(r, pn, 4.0) > ergas(r, p, 4.0));
}

TEST_CASE("report invariants and rescaling") {
  const Tensor r = image({12, 12, 3}, 23);
  const MetricsReport same = evaluate(r, r, 2.0);
  CHECK(same.sam == 0.0);
  CHECK(same.ergas == 0.0);
  CHECK(same.band_psnr.size() == 3);
  const MetricsReport diff = evaluate(r, perturbed(r, 24, 1e-3), 2.0);
  CHECK(diff.sam > 0.0);
  CHECK(diff.ergas > 0.0);
  const Tensor s = rescale_to_255(Tensor({3}, std::vector<double>{-1.0, 0.0, 1.0}), -1.0, 1.0);
  CHECK(s.values() == std::vector<double>{0.0, 127.5, 255.0});
  CHECK_THROWS_AS(rescale_to_255(r, 1.0, 1.0), ValueError);
}
