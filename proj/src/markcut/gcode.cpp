#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "markcut/error.h"
#include "markcut/toolpath.h"

namespace markcut {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string GCodeDocument::checksum_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(checksum));
  return buf;
}

namespace {

std::string fmt3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

// Feed and spindle words: whole numbers print bare ("F800").
std::string fmt_rate(double v) {
  std::string s = fmt3(v);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

GCodeDocument emit_gcode(const Trajectory& tr) {
  const ToolConfig& tool = tr.tool;
  tool.validate();
  check_trajectory(tr, std::numeric_limits<double>::infinity());
  std::string out;
  out.reserve(tr.moves.size() * 40 + 64);
  out += "G21\nG90\n";
  out += "M3 S" + fmt_rate(tool.spindle_rpm) + "\n";
  double feed = -1;
  for (const Move& m : tr.moves) {
    std::string xyz = "X" + fmt3(m.target.x) + " Y" + fmt3(m.target.y) + " Z" + fmt3(m.target.z - tr.surface_z);
    if (m.kind == MoveKind::kRapid) {
      out += "G0 " + xyz + "\n";
      continue;
    }
    double f = m.kind == MoveKind::kPlunge ? tool.plunge_mm_per_min : tool.feed_mm_per_min;
    out += "G1 " + xyz;
    if (f != feed) {
      out += " F" + fmt_rate(f);
      feed = f;
    }
    out += "\n";
  }
  out += "G0 Z" + fmt3(tool.safe_z_mm) + "\n";
  out += "M5\n";
  GCodeDocument doc;
  doc.text = std::move(out);
  doc.checksum = fnv1a64(doc.text);
  return doc;
}

Trajectory parse_gcode(const std::string& text, double surface_z, double safe_z_mm) {
  Trajectory tr;
  tr.surface_z = surface_z;
  tr.tool.safe_z_mm = safe_z_mm;
  const double safe = surface_z + safe_z_mm;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  int motion = -1;
  double feed = -1;
  bool have_xy = false, feed_seen = false, plunge_seen = false;
  Vec3 pos{0, 0, safe};
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line;
    bool paren = false;
    for (char c : raw) {
      if (paren) {
        if (c == ')') paren = false;
        continue;
      }
      if (c == '(') {
        paren = true;
        continue;
      }
      if (c == ';') break;
      line += c;
    }
    if (paren) throw ParseError(line_no, "unterminated comment");
    size_t i = 0;
    bool has_x = false, has_y = false, has_z = false;
    double x = 0, y = 0, z = 0;
    auto skip_ws = [&] {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    };
    while (true) {
      skip_ws();
      if (i >= line.size()) break;
      char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(line[i])));
      if (!std::isalpha(static_cast<unsigned char>(letter))) throw ParseError(line_no, "unexpected character '" + std::string(1, line[i]) + "'");
      ++i;
      skip_ws();
      const char* begin = line.c_str() + i;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) throw ParseError(line_no, std::string("missing value after ") + letter);
      if (!std::isfinite(v)) throw ParseError(line_no, "non-finite number");
      i += static_cast<size_t>(end - begin);
      switch (letter) {
        case 'G': {
          if (v == 0 || v == 1) {
            motion = static_cast<int>(v);
          } else if (v == 21 || v == 90) {
            // millimeters, absolute: the only supported modes
          } else {
            {
            char buf[32];
            std::snprintf(buf, sizeof buf, "G%g", v);
            throw ParseError(line_no, std::string("unsupported word ") + buf);
          }
          }
          break;
        }
        case 'M':
          if (v != 3 && v != 5 && v != 2 && v != 30) throw ParseError(line_no, "unsupported M word");
          break;
        case 'S':
          if (!(v > 0)) throw ParseError(line_no, "spindle speed must be positive");
          tr.tool.spindle_rpm = v;
          break;
        case 'F':
          if (!(v > 0)) throw ParseError(line_no, "feed rate must be positive");
          feed = v;
          break;
        case 'X': x = v; has_x = true; break;
        case 'Y': y = v; has_y = true; break;
        case 'Z': z = v; has_z = true; break;
        case 'N': break;
        default:
          throw ParseError(line_no, std::string("unsupported word ") + letter);
      }
    }
    if (!(has_x || has_y || has_z)) continue;
    if (motion < 0) throw ParseError(line_no, "coordinates without a motion mode");
    if (!have_xy && !(has_x && has_y)) {
      if (has_z) pos.z = z + surface_z;
      continue;
    }
    Vec3 target = pos;
    if (has_x) target.x = x;
    if (has_y) target.y = y;
    if (has_z) target.z = z + surface_z;
    have_xy = true;
    if (target == pos && !tr.moves.empty()) continue;
    MoveKind kind;
    if (motion == 0) {
      kind = MoveKind::kRapid;
    } else {
      if (feed <= 0) throw ParseError(line_no, "feed move before any F word");
      bool same_xy = target.x == pos.x && target.y == pos.y;
      if (target.z >= safe - 1e-9)
        kind = MoveKind::kRapid;
      else if (same_xy && target.z < pos.z)
        kind = MoveKind::kPlunge;
      else
        kind = MoveKind::kCut;
      if (kind == MoveKind::kCut && !feed_seen) {
        tr.tool.feed_mm_per_min = feed;
        feed_seen = true;
      }
      if (kind == MoveKind::kPlunge && !plunge_seen) {
        tr.tool.plunge_mm_per_min = feed;
        plunge_seen = true;
      }
    }
    tr.moves.push_back({kind, target});
    pos = target;
  }
  return tr;
}

}  // namespace markcut
