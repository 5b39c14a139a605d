#include <doctest.h>

#include <set>

#include "simglyph/errors.hpp"
#include "simglyph/synthdata.hpp"

using namespace simglyph;
using synthdata::Motif;
using synthdata::PairSpec;

TEST_SUITE("synthdata") {

TEST_CASE("zero jitter: positive minus negative is exactly the motif") {
  PairSpec spec;
  spec.seed = 4;
  spec.jitter = 0;
  spec.samples_per_class = 1;
  spec.motif = Motif::bar(5, 3);
  spec.region = Rect{26, 26, 12, 12};
  const auto ds = synthdata::generate_pair(spec);
  REQUIRE(ds.positives.size() == 1);
  REQUIRE(ds.negatives.size() == 1);

  std::set<Point> diff;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      const bool p = ds.positives[0].at(x, y), n = ds.negatives[0].at(x, y);
      CHECK(!(n && !p));  // negatives never add pixels
      if (p && !n) diff.insert({x, y});
    }
  CHECK(diff.size() == 15);  // the 5x3 bar
  const Rect truth = ds.truth[0];
  CHECK(truth.w == 5);
  CHECK(truth.h == 3);
  for (const Point& p : diff) CHECK(rect_contains(truth, p.x, p.y));
}

TEST_CASE("identical seeds give bit-identical datasets") {
  const auto spec = PairSpec::random_spec(99);
  const auto a = synthdata::generate_pair(spec);
  const auto b = synthdata::generate_pair(spec);
  CHECK(a.positives == b.positives);
  CHECK(a.negatives == b.negatives);
  REQUIRE(a.truth.size() == b.truth.size());
  for (size_t i = 0; i < a.truth.size(); ++i) CHECK(a.truth[i] == b.truth[i]);

  auto other = spec;
  other.seed += 1;
  const auto c = synthdata::generate_pair(other);
  CHECK(a.positives != c.positives);
}

TEST_CASE("jittered ground truth stays inside the dilated region") {
  PairSpec spec;
  spec.seed = 21;
  spec.jitter = 4;
  spec.samples_per_class = 100;
  spec.motif = Motif::bar(6, 6);
  spec.region = Rect{24, 24, 16, 16};
  const auto ds = synthdata::generate_pair(spec);
  const Rect dilated = rect_dilate(spec.region, 4);
  for (const Rect& t : ds.truth) {
    CHECK(t.x >= dilated.x);
    CHECK(t.y >= dilated.y);
    CHECK(t.x + t.w <= dilated.x + dilated.w);
    CHECK(t.y + t.h <= dilated.y + dilated.h);
    CHECK(rect_iou(t, spec.region) > 0.0);
  }
}

TEST_CASE("negatives lack the motif; positives always carry it") {
  PairSpec spec;
  spec.seed = 8;
  spec.jitter = 2;
  spec.samples_per_class = 25;
  spec.motif = Motif::dot(2);
  spec.region = Rect{20, 28, 14, 14};
  const auto ds = synthdata::generate_pair(spec);

  // The scaffold margin is 2 pixels at the base position, so translations of
  // up to 2 never bring a negative stroke into the planted region itself.
  for (const auto& img : ds.negatives) {
    for (int y = spec.region.y; y < spec.region.y + spec.region.h; ++y)
      for (int x = spec.region.x; x < spec.region.x + spec.region.w; ++x)
        REQUIRE(img.at(x, y) == 0);
  }
  for (size_t i = 0; i < ds.positives.size(); ++i) {
    int motif_pixels = 0;
    const Rect& t = ds.truth[i];
    for (int y = t.y; y < t.y + t.h; ++y)
      for (int x = t.x; x < t.x + t.w; ++x) motif_pixels += ds.positives[i].at(x, y);
    CHECK(motif_pixels >= 13);  // the dot stamp covers the truth box
  }
}

TEST_CASE("infeasible jitter is rejected") {
  PairSpec spec;
  spec.region = Rect{0, 0, 10, 10};
  spec.motif = Motif::bar(8, 8);
  spec.jitter = 4;
  CHECK_THROWS_AS(spec.validate(), SpecError);

  PairSpec ok = PairSpec::random_spec(3);
  ok.validate();

  PairSpec big_motif = ok;
  big_motif.motif = Motif::bar(ok.region.w + 2, 4);
  CHECK_THROWS_AS(big_motif.validate(), SpecError);
}

TEST_CASE("spec text round trip") {
  auto spec = PairSpec::random_spec(17);
  spec.samples_per_class = 33;
  const auto parsed = PairSpec::parse_text(spec.to_text());
  CHECK(parsed.seed == spec.seed);
  CHECK(parsed.region == spec.region);
  CHECK(parsed.jitter == spec.jitter);
  CHECK(parsed.samples_per_class == 33);
  CHECK(parsed.motif.to_rows() == spec.motif.to_rows());
  CHECK(parsed.class_positive == spec.class_positive);
}

TEST_CASE("motif parsing validates its rows") {
  CHECK_THROWS_AS(Motif::parse_rows(""), SpecError);
  CHECK_THROWS_AS(Motif::parse_rows("11;1"), SpecError);
  CHECK_THROWS_AS(Motif::parse_rows("00;00"), SpecError);
  const auto m = Motif::parse_rows("110;011");
  CHECK(m.width == 3);
  CHECK(m.height == 2);
  CHECK(m.at(0, 0) == 1);
  CHECK(m.at(2, 0) == 0);
}

}  // TEST_SUITE
