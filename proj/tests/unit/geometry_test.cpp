#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "harness.hpp"
#include "oracles.hpp"
#include "stguide/geometry.hpp"
#include "stguide/image_io.hpp"

using namespace stguide;

namespace {

const CameraIntrinsics kSample(427.17, 427.17, 160.0, 120.0, 320, 240);

void expect_code(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << error_name(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace

TEST(Unproject, PrincipalPointMapsToOpticalAxis) {
  const Point3 p = unproject({kSample.cx(), kSample.cy()}, 2.0, kSample);
  EXPECT_EQ(p.x, 0.0);
  EXPECT_EQ(p.y, 0.0);
  EXPECT_EQ(p.z, 2.0);
  EXPECT_EQ(p.frame, Frame::kCamera);
}

TEST(Unproject, OneFocalLengthRightIsUnitX) {
  const Point3 p = unproject({kSample.cx() + 427.17, kSample.cy()}, 1.0, kSample);
  EXPECT_DOUBLE_EQ(p.x, 1.0);
  EXPECT_EQ(p.y, 0.0);
  EXPECT_EQ(p.z, 1.0);
}

TEST(Unproject, HandEvaluatedValue) {
  const Point3 p = unproject({100.5, 200.25}, 0.8, kSample);
  EXPECT_NEAR(p.x, -0.11143104618770044, 1e-15);
  EXPECT_NEAR(p.y, 0.15029145305147834, 1e-15);
  EXPECT_EQ(p.z, 0.8);
}

TEST(Unproject, RejectsInvalidDepth) {
  for (double z : {0.0, -1.0, std::nan(""), double(INFINITY)}) {
    expect_code(ErrorCode::kNonPositiveDepth, [&] { unproject({1, 1}, z, kSample); });
  }
}

TEST(Project, OpticalAxisAndHandValue) {
  const Pixel c = project({0, 0, 1}, kSample);
  EXPECT_EQ(c.u, kSample.cx());
  EXPECT_EQ(c.v, kSample.cy());
  const Pixel q = project({0.5, -0.25, 2.0}, kSample);
  EXPECT_NEAR(q.u, 266.7925, 1e-12);
  EXPECT_NEAR(q.v, 66.60375, 1e-12);
}

TEST(Project, BehindCamera) {
  expect_code(ErrorCode::kBehindCamera, [] { project({0, 0, 0}, kSample); });
  expect_code(ErrorCode::kBehindCamera, [] { project({0, 0, -1}, kSample); });
}

TEST(Project, RoundtripMatchesOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50, 370), z(0.1, 5);
  for (int i = 0; i < 1000; ++i) {
    const Pixel p{u(rng), u(rng)};
    const double d = z(rng);
    const Point3 c = unproject(p, d, kSample);
    const oracle::P3 o = oracle::unproject(p.u, p.v, d, 427.17, 427.17, 160, 120);
    EXPECT_NEAR(c.x, o.x, 1e-12);
    EXPECT_NEAR(c.y, o.y, 1e-12);
    const Pixel q = project(c, kSample);
    EXPECT_LT(std::hypot(q.u - p.u, q.v - p.v), 1e-6);
  }
}

TEST(RigidTransform, ComposeInverseAndWireOrder) {
  const RigidTransform a = RigidTransform::from_xyzw({0, 0, std::sin(0.3), std::cos(0.3)}, {1, 2, 3});
  const RigidTransform b = RigidTransform::from_xyzw({std::sin(0.2), 0, 0, std::cos(0.2)}, {-1, 0, 0.5});
  const Eigen::Vector3d p(0.3, -0.7, 1.1);
  EXPECT_TRUE(((a * b).apply(p) - a.apply(b.apply(p))).norm() < 1e-12);
  EXPECT_TRUE((a.inverse().apply(a.apply(p)) - p).norm() < 1e-12);
  const auto q = a.xyzw();
  EXPECT_NEAR(q[2], std::sin(0.3), 1e-15);
  EXPECT_NEAR(q[3], std::cos(0.3), 1e-15);
  const RigidTransform scaled = RigidTransform::from_xyzw({0, 0, 2 * std::sin(0.3), 2 * std::cos(0.3)}, {0, 0, 0});
  EXPECT_NEAR(scaled.rotation().norm(), 1.0, 1e-15);
  expect_code(ErrorCode::kInvalidArgument, [] { RigidTransform::from_xyzw({0, 0, 0, 0}, {0, 0, 0}); });
}

TEST(UnprojectMap, FiltersInvalidPixels) {
  DepthMap d(2, 2, 1, 1.0f);
  d.at(1, 0) = 0.0f;
  const CameraIntrinsics k(10, 10, 0.5, 0.5, 2, 2);
  const PointCloud cloud = unproject_map(d, nullptr, k);
  EXPECT_EQ(cloud.size(), 3u);
  EXPECT_FALSE(cloud.has_colors());
  EXPECT_EQ(unproject_map(DepthMap(2, 2), nullptr, k).size(), 0u);
  expect_code(ErrorCode::kDimensionMismatch, [&] { unproject_map(DepthMap(3, 3), nullptr, k); });
}

TEST(UnprojectMap, FrontoParallelPlaneAndColors) {
  const CameraIntrinsics k(50, 60, 3.5, 2.5, 8, 6);
  DepthMap d(8, 6, 1, 1.0f);
  RgbImage rgb = make_rgb(8, 6);
  rgb.at(7, 5, 2) = 99;
  const PointCloud cloud = unproject_map(d, &rgb, k);
  ASSERT_EQ(cloud.size(), 48u);
  ASSERT_TRUE(cloud.has_colors());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const int u = static_cast<int>(i % 8), v = static_cast<int>(i / 8);
    EXPECT_EQ(cloud.points[i].z, 1.0);
    EXPECT_NEAR(cloud.points[i].x, (u - 3.5) / 50.0, 1e-15);
    EXPECT_NEAR(cloud.points[i].y, (v - 2.5) / 60.0, 1e-15);
  }
  EXPECT_EQ(cloud.colors.back()[2], 99);
}

TEST(Normalize, ThousandScale) {
  EXPECT_EQ(normalize_thousand({0, 0}, 256, 256), (std::array<int, 2>{0, 0}));
  EXPECT_EQ(normalize_thousand({256, 256}, 256, 256), (std::array<int, 2>{1000, 1000}));
  EXPECT_EQ(normalize_thousand({128, 64}, 256, 256), (std::array<int, 2>{500, 250}));
  EXPECT_EQ(normalize_thousand({417, 170}, 848, 480), (std::array<int, 2>{492, 354}));
  const auto unit = normalize_unit({128, 64}, 256, 256);
  EXPECT_EQ(unit[0], 0.5);
  EXPECT_EQ(unit[1], 0.25);
  expect_code(ErrorCode::kOutOfBounds, [] { normalize_unit({257, 0}, 256, 256); });
  const Pixel back = denormalize_thousand({500, 250}, 256, 256);
  EXPECT_EQ(back.u, 128.0);
  EXPECT_EQ(back.v, 64.0);
}

TEST(SampleDepth, BilinearAndFallback) {
  DepthMap d(4, 4, 1, 0.0f);
  d.at(1, 1) = 1.0f;
  d.at(2, 1) = 2.0f;
  d.at(1, 2) = 1.0f;
  d.at(2, 2) = 2.0f;
  EXPECT_NEAR(*sample_depth(d, {1.25, 1.5}), 1.25, 1e-12);
  EXPECT_EQ(*sample_depth(d, {1, 1}), 1.0);
  // Lone valid corner: nearest-valid fallback.
  DepthMap lone(6, 6, 1, 0.0f);
  lone.at(4, 4) = 3.0f;
  EXPECT_EQ(*sample_depth(lone, {2.0, 2.0}), 3.0);
  DepthLookupOptions tight;
  tight.fallback_radius = 1.0;
  EXPECT_FALSE(sample_depth(lone, {1.0, 1.0}, tight).has_value());
  EXPECT_FALSE(sample_depth(DepthMap(3, 3), {1, 1}).has_value());
}

TEST(RasterIo, RoundTrips) {
  harness::TempDir tmp;
  RgbImage rgb = make_rgb(5, 3);
  for (std::size_t i = 0; i < rgb.data().size(); ++i) rgb.data()[i] = static_cast<std::uint8_t>(i * 7);
  io::write_rgb_png(tmp / "a.png", rgb);
  EXPECT_EQ(io::read_rgb_png(tmp / "a.png"), rgb);

  BinaryMask m(5, 3);
  m.at(2, 1) = 1;
  io::write_mask_png(tmp / "m.png", m);
  const BinaryMask back = io::read_mask_png(tmp / "m.png");
  EXPECT_NE(back.at(2, 1), 0);
  EXPECT_EQ(back.at(0, 0), 0);

  DepthMap d(5, 3, 1, 0.25f);
  d.at(0, 0) = 0.0f;
  d.at(4, 2) = 1.2345f;
  io::write_float_raster(tmp / "d.strf", d);
  EXPECT_EQ(io::read_depth(tmp / "d.strf"), d);
  io::write_depth(tmp / "d.png", d);
  const DepthMap mm = io::read_depth(tmp / "d.png");
  EXPECT_EQ(mm.at(0, 0), 0.0f);
  EXPECT_NEAR(mm.at(4, 2), 1.235, 1e-6);
  EXPECT_NEAR(mm.at(1, 1), 0.25, 1e-6);
  expect_code(ErrorCode::kIo, [&] { io::read_rgb_png(tmp / "missing.png"); });
}
