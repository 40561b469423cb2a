#include "markcut/registration.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <Eigen/Dense>
#include <json.hpp>

#include "markcut/image_io.h"
#include "markcut/morphology.h"

namespace markcut {

namespace {

struct Blob {
  Vec2 center;
  double area;
};

std::vector<Blob> find_square_blobs(const ColorImage& img, const DetectionOptions& opt) {
  Mask dark(img.width(), img.height(), 0);
  for (std::size_t i = 0; i < img.size(); ++i) {
    const Rgb c = img[i];
    dark[i] = 0.299 * c.r + 0.587 * c.g + 0.114 * c.b < opt.dark_luminance;
  }
  const auto comps = morph::label_components(dark, true);
  struct Acc { double n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0; };
  std::vector<Acc> acc(comps.count + 1);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      if (int l = comps.labels(x, y)) {
        Acc& a = acc[l];
        a.n += 1; a.sx += x; a.sy += y;
        a.sxx += double(x) * x; a.syy += double(y) * y; a.sxy += double(x) * y;
      }

  std::vector<Blob> blobs;
  for (int l = 1; l <= comps.count; ++l) {
    const Acc& a = acc[l];
    if (a.n < opt.min_area_px) continue;
    const double mx = a.sx / a.n, my = a.sy / a.n;
    const double cxx = a.sxx / a.n - mx * mx + 1.0 / 12, cyy = a.syy / a.n - my * my + 1.0 / 12;
    const double cxy = a.sxy / a.n - mx * my;
    const double tr = cxx + cyy, det = cxx * cyy - cxy * cxy;
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
    const double l1 = tr / 2 + disc, l2 = tr / 2 - disc;
    if (l2 <= 0 || l2 / l1 < 0.6) continue;
    // a filled square has area == 12 * sqrt(l1 * l2)
    const double fill = a.n / (12.0 * std::sqrt(l1 * l2));
    if (fill < 0.8 || fill > 1.25) continue;
    if (opt.border_band_px > 0) {
      const double edge = std::min({mx, my, img.width() - 1 - mx, img.height() - 1 - my});
      if (edge > opt.border_band_px) continue;
    }
    blobs.push_back({{mx, my}, a.n});
  }
  return blobs;
}

// Similarity mapping a->A, b->B in the complex-number sense.
struct Similarity {
  double re, im, tx, ty;
  bool mirror;
  Vec2 apply(Vec2 p) const {
    if (mirror) p.y = -p.y;
    return {re * p.x - im * p.y + tx, im * p.x + re * p.y + ty};
  }
};

Similarity similarity_from_pair(Vec2 a, Vec2 b, Vec2 A, Vec2 B, bool mirror) {
  if (mirror) { a.y = -a.y; b.y = -b.y; }
  const Vec2 d = b - a, D = B - A;
  const double den = dot(d, d);
  const double re = (d.x * D.x + d.y * D.y) / den;
  const double im = (d.x * D.y - d.y * D.x) / den;
  return {re, im, A.x - (re * a.x - im * a.y), A.y - (im * a.x + re * a.y), mirror};
}

}  // namespace

std::vector<Vec2> detect_fiducials(const ColorImage& color, const FiducialSpec& spec,
                                   const DetectionOptions& opt) {
  if (spec.count < 4) throw ArgumentError("fiducial count must be at least 4");
  if (static_cast<int>(spec.nominal_centers_mm.size()) != spec.count)
    throw ArgumentError("nominal center count does not match fiducial count");
  const std::vector<Blob> blobs = find_square_blobs(color, opt);
  if (static_cast<int>(blobs.size()) < spec.count)
    throw DetectionError(static_cast<int>(blobs.size()), spec.count);

  const auto& nominal = spec.nominal_centers_mm;
  std::size_t ia = 0, ib = 1;
  double best_span = -1;
  for (std::size_t i = 0; i < nominal.size(); ++i)
    for (std::size_t j = i + 1; j < nominal.size(); ++j)
      if (dist(nominal[i], nominal[j]) > best_span) {
        best_span = dist(nominal[i], nominal[j]);
        ia = i; ib = j;
      }

  double best_cost = std::numeric_limits<double>::infinity(), best_angle = 0;
  Similarity best{};
  for (std::size_t i = 0; i < blobs.size(); ++i) {
    for (std::size_t j = 0; j < blobs.size(); ++j) {
      if (i == j) continue;
      for (bool mirror : {false, true}) {
        const Similarity s = similarity_from_pair(nominal[ia], nominal[ib], blobs[i].center,
                                                  blobs[j].center, mirror);
        double cost = 0;
        for (Vec2 n : nominal) {
          const Vec2 m = s.apply(n);
          double dmin = std::numeric_limits<double>::infinity();
          for (const Blob& b : blobs) dmin = std::min(dmin, dist(m, b.center));
          cost += dmin * dmin;
        }
        const double angle = std::abs(std::atan2(s.im, s.re));
        const double tol = std::isinf(best_cost) ? 0.0 : 1e-6 * (1 + best_cost);
        if (cost < best_cost - tol || (std::abs(cost - best_cost) <= tol && angle < best_angle - 1e-9)) {
          best_cost = cost;
          best_angle = angle;
          best = s;
        }
      }
    }
  }

  // Greedy one-to-one assignment, closest pairs first.
  struct Pair { double d; std::size_t n, b; };
  std::vector<Pair> pairs;
  for (std::size_t n = 0; n < nominal.size(); ++n) {
    const Vec2 m = best.apply(nominal[n]);
    for (std::size_t b = 0; b < blobs.size(); ++b) pairs.push_back({dist(m, blobs[b].center), n, b});
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    return x.d != y.d ? x.d < y.d : (x.n != y.n ? x.n < y.n : x.b < y.b);
  });
  std::vector<int> assigned(nominal.size(), -1);
  std::vector<bool> used(blobs.size(), false);
  for (const Pair& p : pairs) {
    if (assigned[p.n] >= 0 || used[p.b]) continue;
    assigned[p.n] = static_cast<int>(p.b);
    used[p.b] = true;
  }
  std::vector<Vec2> out;
  for (int a : assigned) out.push_back(blobs[a].center);
  return out;
}

std::vector<Vec3> marker_points(const std::vector<Vec2>& centers, const DepthMap& depth,
                                const Intrinsics& k) {
  std::vector<Vec3> pts;
  for (Vec2 c : centers) {
    const int u0 = static_cast<int>(std::lround(c.x)), v0 = static_cast<int>(std::lround(c.y));
    std::vector<double> zs;
    for (int r = 1; r <= 4 && zs.empty(); ++r)
      for (int dv = -r; dv <= r; ++dv)
        for (int du = -r; du <= r; ++du)
          if (depth.valid.in_bounds(u0 + du, v0 + dv) && depth.valid(u0 + du, v0 + dv))
            zs.push_back(depth.depth_mm(u0 + du, v0 + dv));
    if (zs.empty()) throw DetectionError(static_cast<int>(pts.size()), static_cast<int>(centers.size()));
    std::nth_element(zs.begin(), zs.begin() + zs.size() / 2, zs.end());
    const double z = zs[zs.size() / 2];
    pts.push_back({(c.x - k.cx) * z / k.fx, (c.y - k.cy) * z / k.fy, z});
  }
  return pts;
}

FrameFit fit_workspace_frame(const std::vector<Vec3>& markers, const std::vector<Vec2>& nominal) {
  if (markers.size() != nominal.size()) throw ArgumentError("marker and nominal counts differ");
  if (markers.size() < 4) throw DegenerateGeometryError("need at least 4 markers");
  const std::size_t n = markers.size();

  Eigen::Vector3d pc = Eigen::Vector3d::Zero(), qc = Eigen::Vector3d::Zero();
  std::vector<Eigen::Vector3d> P(n), Q(n);
  for (std::size_t i = 0; i < n; ++i) {
    P[i] = {markers[i].x, markers[i].y, markers[i].z};
    Q[i] = {nominal[i].x, nominal[i].y, 0.0};
    pc += P[i];
    qc += Q[i];
  }
  pc /= double(n);
  qc /= double(n);

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero(), qcov = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    cov += (P[i] - pc) * (P[i] - pc).transpose();
    qcov += (Q[i] - qc) * (Q[i] - qc).transpose();
    H += (P[i] - pc) * (Q[i] - qc).transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Eigen::Vector3d ev = eig.eigenvalues();  // ascending
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> qeig(qcov);
  if (ev(2) <= 0 || ev(1) <= 1e-12 * ev(2) || qeig.eigenvalues()(1) <= 1e-12 * qeig.eigenvalues()(2))
    throw DegenerateGeometryError("marker points are collinear");

  FrameFit fit;
  Eigen::Vector3d normal = eig.eigenvectors().col(0);
  if (normal.dot(-pc) < 0) normal = -normal;
  fit.plane_normal = {normal.x(), normal.y(), normal.z()};
  fit.plane_rms_mm = std::sqrt(std::max(0.0, ev(0)) / double(n));

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d U = svd.matrixU(), V = svd.matrixV();
  Eigen::Matrix3d D = Eigen::Matrix3d::Identity();
  D(2, 2) = (V * U.transpose()).determinant() < 0 ? -1.0 : 1.0;
  const Eigen::Matrix3d R = V * D * U.transpose();
  fit.camera_to_workspace = {R, qc - R * pc};

  double sq = 0;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d w = R * P[i] + fit.camera_to_workspace.translation;
    sq += (w - Q[i]).squaredNorm();
    xmin = std::min(xmin, w.x()); xmax = std::max(xmax, w.x());
    ymin = std::min(ymin, w.y()); ymax = std::max(ymax, w.y());
  }
  fit.residual_rms_mm = std::sqrt(sq / double(n));

  const RigidTransform inv = fit.camera_to_workspace.inverse();
  fit.frame.origin = {inv.translation.x(), inv.translation.y(), inv.translation.z()};
  for (int a = 0; a < 3; ++a) fit.frame.axes[a] = {R(a, 0), R(a, 1), R(a, 2)};
  fit.frame.x_len = xmax - xmin;
  fit.frame.y_len = ymax - ymin;
  return fit;
}

double compression_ratio(double reference_extent, double measured_extent) {
  if (!(reference_extent > 0)) throw ArgumentError("reference extent must be positive");
  return (reference_extent - measured_extent) / reference_extent;
}

AlignmentReport evaluate_alignment(const std::vector<Vec2>& truth, const std::vector<Vec2>& measured,
                                   int rw, int rh) {
  if (truth.size() != measured.size()) throw ArgumentError("point list lengths differ");
  if (truth.empty()) throw ArgumentError("no alignment samples");
  if (rw < 1 || rh < 1) throw ArgumentError("heatmap raster must be nonempty");

  AlignmentReport r;
  r.truth = truth;
  double sq = 0;
  Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300}, mlo = lo, mhi = hi, centroid{0, 0};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const Vec2 e = measured[i] - truth[i];
    r.error_vectors.push_back(e);
    r.magnitudes.push_back(norm(e));
    r.max_error = std::max(r.max_error, norm(e));
    sq += dot(e, e);
    lo = {std::min(lo.x, truth[i].x), std::min(lo.y, truth[i].y)};
    hi = {std::max(hi.x, truth[i].x), std::max(hi.y, truth[i].y)};
    mlo = {std::min(mlo.x, measured[i].x), std::min(mlo.y, measured[i].y)};
    mhi = {std::max(mhi.x, measured[i].x), std::max(mhi.y, measured[i].y)};
    centroid = centroid + truth[i] * (1.0 / truth.size());
  }
  r.rms_error = std::sqrt(sq / truth.size());
  double best = 1e300;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (dist(truth[i], centroid) < best) {
      best = dist(truth[i], centroid);
      r.center_index = i;
    }
  r.center_error = r.magnitudes[r.center_index];
  if (hi.x > lo.x) r.compression_x = compression_ratio(hi.x - lo.x, mhi.x - mlo.x);
  if (hi.y > lo.y) r.compression_y = compression_ratio(hi.y - lo.y, mhi.y - mlo.y);

  // Inverse-distance-weighted heatmap over the truth bounding box.
  const double span = std::max({hi.x - lo.x, hi.y - lo.y, 1e-9});
  r.heatmap_resolution = std::max((hi.x - lo.x) / rw, (hi.y - lo.y) / rh);
  if (!(r.heatmap_resolution > 0)) r.heatmap_resolution = span;
  r.heatmap_origin_x = lo.x;
  r.heatmap_origin_y = lo.y;
  r.heatmap = RealRaster(rw, rh, 0.0);
  for (int y = 0; y < rh; ++y) {
    for (int x = 0; x < rw; ++x) {
      const Vec2 p{lo.x + (x + 0.5) * r.heatmap_resolution, lo.y + (y + 0.5) * r.heatmap_resolution};
      double wsum = 0, vsum = 0;
      bool exact = false;
      for (std::size_t i = 0; i < truth.size() && !exact; ++i) {
        const double d2 = dot(p - truth[i], p - truth[i]);
        if (d2 < 1e-18) {
          r.heatmap(x, y) = r.magnitudes[i];
          exact = true;
        } else {
          wsum += 1.0 / d2;
          vsum += r.magnitudes[i] / d2;
        }
      }
      if (!exact) r.heatmap(x, y) = vsum / wsum;
    }
  }
  return r;
}

std::string alignment_json(const AlignmentReport& r) {
  nlohmann::json j;
  j["max_error_mm"] = r.max_error;
  j["center_error_mm"] = r.center_error;
  j["center_index"] = r.center_index;
  j["rms_error_mm"] = r.rms_error;
  j["compression_x"] = r.compression_x;
  j["compression_y"] = r.compression_y;
  j["samples"] = nlohmann::json::array();
  for (std::size_t i = 0; i < r.truth.size(); ++i)
    j["samples"].push_back({{"x", r.truth[i].x}, {"y", r.truth[i].y},
                            {"dx", r.error_vectors[i].x}, {"dy", r.error_vectors[i].y},
                            {"magnitude", r.magnitudes[i]}});
  j["heatmap"] = {{"width", r.heatmap.width()}, {"height", r.heatmap.height()},
                  {"origin_mm", {r.heatmap_origin_x, r.heatmap_origin_y}},
                  {"resolution_mm", r.heatmap_resolution}, {"unit_mm", 0.001}};
  return j.dump(2);
}

void export_alignment(const AlignmentReport& r, const std::filesystem::path& dir, double scale) {
  std::filesystem::create_directories(dir);
  io::write_file(dir / "alignment.json", alignment_json(r) + "\n");
  DepthImage heat(r.heatmap.width(), r.heatmap.height());
  for (std::size_t i = 0; i < heat.size(); ++i)
    heat[i] = static_cast<std::uint16_t>(std::clamp(std::lround(r.heatmap[i] * 1000.0), 0L, 65535L));
  io::write_pgm16(dir / "heatmap.pgm", heat);
  std::string csv = "x,y,dx,dy\n";
  char line[160];
  for (std::size_t i = 0; i < r.truth.size(); ++i) {
    std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f,%.6f\n", r.truth[i].x, r.truth[i].y,
                  r.error_vectors[i].x * scale, r.error_vectors[i].y * scale);
    csv += line;
  }
  io::write_file(dir / "vectors.csv", csv);
}

}  // namespace markcut
