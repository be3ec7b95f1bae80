#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "lrdet/eval.hpp"
#include "lrdet/rng.hpp"
#include "support/oracles.hpp"

using namespace lrdet;

namespace {

Box3D gt_at(double x, double y, double z, const std::string& cls = "object") {
  Box3D b;
  b.center = {x, y, z};
  b.size = {4.0, 2.0, 1.5};
  b.class_id = cls;
  return b;
}

Detection det_at(double confidence, double x, double y, double z,
                 const std::string& cls = "object") {
  Detection d;
  d.box = gt_at(x, y, z, cls);
  d.confidence = confidence;
  return d;
}

// random single-class micro-instance; confidences drawn from a small set so
// duplicate ranks are common
void random_instance(Rng& rng, std::vector<Box3D>& gt, std::vector<Detection>& dets) {
  gt.clear();
  dets.clear();
  const std::size_t n_gt = 1 + rng.uniform_index(10);
  const std::size_t n_det = rng.uniform_index(21);
  for (std::size_t i = 0; i < n_gt; ++i)
    gt.push_back(gt_at(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-1, 1)));
  for (std::size_t i = 0; i < n_det; ++i) {
    const double conf = (1 + rng.uniform_index(8)) / 8.0;
    dets.push_back(
        det_at(conf, rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-1, 1)));
  }
}

}  // namespace

TEST_CASE("recall grids") {
  const auto g100 = recall_grid_100();
  REQUIRE(g100.size() == 100);
  CHECK(g100.front() == 0.01);
  CHECK(g100.back() == 1.0);
  CHECK(g100[49] == 0.5);

  const auto g21 = recall_grid_21();
  REQUIRE(g21.size() == 21);
  CHECK(g21.front() == 0.0);
  CHECK(g21.back() == 1.0);
  CHECK(g21[10] == 0.5);
}

TEST_CASE("center_range metrics") {
  const Vec3 c{3.0, -4.0, 7.0};  // z never contributes
  CHECK(center_range(c, RangeMetric::kEuclideanXY) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(center_range(c, RangeMetric::kLinf) == 4.0);
}

TEST_CASE("eval config validation") {
  EvalConfig config;
  CHECK_NOTHROW(validate(config));

  config.distance_thresholds = {};
  CHECK_THROWS_AS(validate(config), Error);
  config.distance_thresholds = {1.0, 0.5};
  CHECK_THROWS_AS(validate(config), Error);
  config.distance_thresholds = {0.0, 1.0};
  CHECK_THROWS_AS(validate(config), Error);
  config.distance_thresholds = {0.5, 1.0};

  config.recall_grid = {};
  CHECK_THROWS_AS(validate(config), Error);
  config.recall_grid = {0.5, 0.4};
  CHECK_THROWS_AS(validate(config), Error);
  config.recall_grid = {0.5, 1.1};
  CHECK_THROWS_AS(validate(config), Error);
  config.recall_grid = recall_grid_21();

  config.eval_range = {100.0, 100.0};
  CHECK_THROWS_AS(validate(config), Error);
  config.eval_range = {-1.0, 100.0};
  CHECK_THROWS_AS(validate(config), Error);
}

TEST_CASE("matching: greedy by confidence, nearest unmatched gt") {
  // high-confidence detection takes the gt even though a closer, lower-ranked
  // detection wanted it
  const std::vector<Box3D> gt = {gt_at(0, 0, 0)};
  std::vector<Detection> dets = {det_at(0.9, 1.5, 0, 0), det_at(0.8, 0.1, 0, 0)};
  auto tp = match_detections(gt, dets, 2.0);
  CHECK(tp == std::vector<bool>{true, false});

  // nearest unmatched: the closer of two free gts wins
  const std::vector<Box3D> gt2 = {gt_at(0, 0, 0), gt_at(3, 0, 0)};
  dets = {det_at(0.9, 2.0, 0, 0)};
  tp = match_detections(gt2, dets, 4.0);
  CHECK(tp == std::vector<bool>{true});
  // ...and it took the nearer one: a second detection on gt index 1 still matches
  dets.push_back(det_at(0.5, 3.0, 0, 0));
  tp = match_detections(gt2, dets, 4.0);
  CHECK(tp == std::vector<bool>{true, true});

  // equidistant gts tie to the lowest index
  const std::vector<Box3D> gt3 = {gt_at(-1, 0, 0), gt_at(1, 0, 0)};
  dets = {det_at(0.9, 0, 0, 0), det_at(0.8, -1, 0, 0)};
  tp = match_detections(gt3, dets, 4.0);
  // first det takes gt 0; second det sits exactly on gt 0 but it is taken, so
  // it matches gt 1 at distance 2
  CHECK(tp == std::vector<bool>{true, true});

  // confidence ties rank by input order
  dets = {det_at(0.7, 5, 0, 0), det_at(0.7, 0.2, 0, 0)};
  tp = match_detections(gt, dets, 1.0);
  CHECK(tp == std::vector<bool>{false, true});

  // strict threshold: distance exactly at the threshold matches (<=)
  dets = {det_at(0.9, 2.0, 0, 0)};
  tp = match_detections(gt, dets, 2.0);
  CHECK(tp == std::vector<bool>{true});
  tp = match_detections(gt, dets, 1.999999);
  CHECK(tp == std::vector<bool>{false});
}

TEST_CASE("AP hand case: 0.5 at the tight threshold, 5/6 at the loose ones") {
  const std::vector<Box3D> gt = {gt_at(0, 0, 0), gt_at(10, 0, 0)};
  const std::vector<Detection> dets = {det_at(0.9, 0.3, 0, 0), det_at(0.8, 50, 0, 0),
                                       det_at(0.7, 10.6, 0, 0)};

  EvalConfig config;  // 100-point recall grid
  config.distance_thresholds = {0.5};
  CHECK(average_precision(gt, dets, config) == doctest::Approx(0.5).epsilon(1e-12));
  for (const double t : {1.0, 2.0, 4.0}) {
    config.distance_thresholds = {t};
    CHECK(average_precision(gt, dets, config) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  }

  config.distance_thresholds = {0.5, 1.0, 2.0, 4.0};
  CHECK(average_precision(gt, dets, config) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("AP equals the direct-transcription oracle on random instances") {
  Rng rng(61);
  int nonempty = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Box3D> gt;
    std::vector<Detection> dets;
    random_instance(rng, gt, dets);
    if (!dets.empty()) ++nonempty;

    for (const bool fine : {true, false}) {
      EvalConfig config;
      config.recall_grid = fine ? recall_grid_100() : recall_grid_21();
      const double got = average_precision(gt, dets, config);
      const double expected =
          oracle::average_precision(gt, dets, config.distance_thresholds, config.recall_grid);
      CAPTURE(trial);
      CAPTURE(fine);
      CHECK(got == doctest::Approx(expected).epsilon(1e-9));
      CHECK(got >= 0.0);
      CHECK(got <= 1.0);
    }
  }
  CHECK(nonempty > 250);  // the generator actually exercises detections
}

TEST_CASE("AP properties: trailing false positive is a no-op, trailing match helps") {
  Rng rng(62);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Box3D> gt;
    std::vector<Detection> dets;
    random_instance(rng, gt, dets);
    const double base = average_precision(gt, dets);

    // a far-away detection below every existing confidence adds operating
    // points with unchanged recall and lower precision: AP is exactly unchanged
    auto with_fp = dets;
    with_fp.push_back(det_at(0.001, 1e6, 1e6, 0));
    CHECK(average_precision(gt, with_fp) == base);

    // a fresh gt plus a trailing detection on it can only help
    auto gt2 = gt;
    gt2.push_back(gt_at(500, 500, 0));
    const double with_miss = average_precision(gt2, dets);
    auto with_tp = dets;
    with_tp.push_back(det_at(0.0005, 500, 500, 0));
    CHECK(average_precision(gt2, with_tp) >= with_miss);
  }
}

TEST_CASE("AP is monotone in the distance threshold") {
  Rng rng(63);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Box3D> gt;
    std::vector<Detection> dets;
    random_instance(rng, gt, dets);
    double prev = -1.0;
    for (const double t : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      EvalConfig config;
      config.distance_thresholds = {t};
      const double ap = average_precision(gt, dets, config);
      CAPTURE(trial);
      CAPTURE(t);
      CHECK(ap >= prev);
      prev = ap;
    }
  }
}

TEST_CASE("AP edge cases") {
  CHECK_THROWS_AS(average_precision({}, {det_at(0.9, 0, 0, 0)}), NoGroundTruth);
  CHECK(average_precision({gt_at(0, 0, 0)}, {}) == 0.0);

  // perfect single detection: AP 1 on the 100-grid
  CHECK(average_precision({gt_at(0, 0, 0)}, {det_at(0.9, 0, 0, 0)}) == 1.0);

  // the 21-grid includes recall 0, which any detection attains, so a perfect
  // detector still scores 1 and a pure false positive scores 0
  EvalConfig config;
  config.recall_grid = recall_grid_21();
  CHECK(average_precision({gt_at(0, 0, 0)}, {det_at(0.9, 0, 0, 0)}, config) == 1.0);
  CHECK(average_precision({gt_at(0, 0, 0)}, {det_at(0.9, 100, 0, 0)}, config) == 0.0);
}

TEST_CASE("mean_ap: per-class split and the classes that count") {
  std::vector<Box3D> gt = {gt_at(0, 0, 0, "car"), gt_at(20, 0, 0, "car"),
                           gt_at(40, 0, 0, "bike")};
  std::vector<Detection> dets = {
      det_at(0.9, 0, 0, 0, "car"), det_at(0.8, 20, 0, 0, "car"),
      det_at(0.95, 40, 0, 0, "ghost"),  // det-only class: ignored entirely
  };

  const EvalReport report = mean_ap(gt, dets);
  REQUIRE(report.per_class.size() == 2);
  REQUIRE(report.per_class.count("car") == 1);
  REQUIRE(report.per_class.count("bike") == 1);
  CHECK(report.per_class.count("ghost") == 0);

  CHECK(report.per_class.at("car").ap == 1.0);
  CHECK(report.per_class.at("car").num_gt == 2);
  CHECK(report.per_class.at("car").num_detections == 2);

  // gt-only class contributes AP 0 to the mean instead of being dropped
  CHECK(report.per_class.at("bike").ap == 0.0);
  CHECK(report.per_class.at("bike").num_detections == 0);
  REQUIRE(report.map.has_value());
  CHECK(*report.map == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("mean_ap: empty ground truth yields an empty report, not a throw") {
  const EvalReport report = mean_ap({}, {det_at(0.9, 0, 0, 0)});
  CHECK(report.per_class.empty());
  CHECK_FALSE(report.map.has_value());
}

TEST_CASE("mean_ap: closed eval range on the center range") {
  EvalConfig config;
  config.eval_range = {10.0, 20.0};

  std::vector<Box3D> gt = {
      gt_at(10, 0, 0),     // exactly lo: kept
      gt_at(20, 0, 0),     // exactly hi: kept
      gt_at(9.999, 0, 0),  // below: dropped
      gt_at(0, 20.001, 0)  // above: dropped
  };
  std::vector<Detection> dets = {det_at(0.9, 10, 0, 0), det_at(0.8, 20, 0, 0),
                                 det_at(0.7, 25, 0, 0)};
  const EvalReport report = mean_ap(gt, dets, config);
  REQUIRE(report.per_class.count("object") == 1);
  CHECK(report.per_class.at("object").num_gt == 2);
  CHECK(report.per_class.at("object").num_detections == 2);
  CHECK(report.per_class.at("object").ap == 1.0);

  // the metric decides membership: (15,15) has xy-range ~21.2 but linf 15
  gt = {gt_at(15, 15, 0)};
  dets = {det_at(0.9, 15, 15, 0)};
  CHECK_FALSE(mean_ap(gt, dets, config).map.has_value());
  config.range_metric = RangeMetric::kLinf;
  const EvalReport linf_report = mean_ap(gt, dets, config);
  REQUIRE(linf_report.map.has_value());
  CHECK(*linf_report.map == 1.0);
}

TEST_CASE("range_breakdown: bin membership and empty bins") {
  // default binning {0,50,100,150,200,250}; bin 1 is [50,100), bin 4 is [200,250]
  std::vector<Box3D> gt = {
      gt_at(10, 0, 0),   // bin 0
      gt_at(50, 0, 0),   // bin 1 (lower edge closed)
      gt_at(250, 0, 0),  // bin 4 (top edge closed)
      gt_at(260, 0, 0),  // outside every bin and outside the eval range
  };
  std::vector<Detection> dets = {det_at(0.9, 10, 0, 0), det_at(0.8, 50, 0, 0),
                                 det_at(0.7, 250, 0, 0)};

  const EvalReport report = range_breakdown(gt, dets);
  REQUIRE(report.bins.size() == 5);
  CHECK(report.bins[0].lo == 0.0);
  CHECK(report.bins[4].hi == 250.0);

  CHECK(report.per_class.at("object").num_gt == 3);  // the 260 m box is out of range
  REQUIRE(report.map.has_value());
  CHECK(*report.map == 1.0);

  for (const std::size_t b : {std::size_t{0}, std::size_t{1}, std::size_t{4}}) {
    REQUIRE(report.bins[b].map.has_value());
    CHECK(*report.bins[b].map == 1.0);
    CHECK(report.bins[b].per_class.at("object").num_gt == 1);
  }
  CHECK_FALSE(report.bins[2].map.has_value());
  CHECK_FALSE(report.bins[3].map.has_value());
  CHECK(report.bins[2].per_class.empty());
}

TEST_CASE("range_breakdown: bins partition the detections they score") {
  // a detection near a bin edge lands in exactly one bin
  std::vector<Box3D> gt = {gt_at(99.9, 0, 0), gt_at(100.0, 0, 0)};
  std::vector<Detection> dets = {det_at(0.9, 99.9, 0, 0), det_at(0.8, 100.0, 0, 0)};
  const EvalReport report = range_breakdown(gt, dets);
  CHECK(report.bins[1].per_class.at("object").num_gt == 1);
  CHECK(report.bins[1].per_class.at("object").num_detections == 1);
  CHECK(report.bins[2].per_class.at("object").num_gt == 1);
  CHECK(report.bins[2].per_class.at("object").num_detections == 1);
}

TEST_CASE("format_report renders one column per bin plus the overall range") {
  std::vector<Box3D> gt = {gt_at(10, 0, 0, "car"), gt_at(120, 0, 0, "bike")};
  std::vector<Detection> dets = {det_at(0.9, 10, 0, 0, "car")};
  const EvalReport report = range_breakdown(gt, dets);
  const std::string table = format_report(report);

  CHECK(table.find("mAP") != std::string::npos);
  CHECK(table.find("car") != std::string::npos);
  CHECK(table.find("bike") != std::string::npos);
  CHECK(table.find("0-250") != std::string::npos);
  CHECK(table.find("200-250") != std::string::npos);

  // every row has the same column count: overall + 5 bins
  std::size_t lines = 0;
  std::size_t start = 0;
  while (start < table.size()) {
    const std::size_t end = table.find('\n', start);
    const std::string line = table.substr(start, end - start);
    const std::size_t bars =
        static_cast<std::size_t>(std::count(line.begin(), line.end(), '|'));
    CHECK(bars == 6);
    ++lines;
    start = end + 1;
  }
  CHECK(lines == 4);  // header, mAP, bike, car
}
