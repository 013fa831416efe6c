#include "frictio/load_path.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace frictio {

namespace {

VecX lerp(const VecX& a, const VecX& b, double alpha) {
  // exact at both ends
  return (1.0 - alpha) * a + alpha * b;
}

bool close(const VecX& a, const VecX& b) {
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

VecX vec_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ConfigError, "expected a numeric array");
  VecX v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  return v;
}

nlohmann::json vec_to_json(const VecX& v) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(v(k));
  return arr;
}

}  // namespace

double LoadHistory::level_crossing(double after, double level) const {
  const double S = horizon();
  if (variation(0.0, S) <= level) return S;
  double lo = after, hi = S;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (variation(0.0, mid) > level) hi = mid; else lo = mid;
  }
  return hi;
}

LoadPath::LoadPath(double horizon, std::vector<Segment> segments, std::vector<Jump> jumps,
                   std::vector<int> blocks)
    : horizon_(horizon), segments_(std::move(segments)), jumps_(std::move(jumps)),
      blocks_(std::move(blocks)) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw Error(ErrorCode::InvalidArgument, "load horizon must be positive and finite");
  }
  if (segments_.empty()) throw Error(ErrorCode::InvalidArgument, "load path has no segments");
  dim_ = static_cast<int>(segments_.front().f0.size());
  if (dim_ == 0) throw Error(ErrorCode::InvalidArgument, "load values are empty");
  if (blocks_.empty()) blocks_ = {dim_};
  if (std::accumulate(blocks_.begin(), blocks_.end(), 0) != dim_ ||
      std::any_of(blocks_.begin(), blocks_.end(), [](int b) { return b <= 0; })) {
    throw Error(ErrorCode::InvalidArgument, "norm blocks must be positive and sum to the dimension");
  }
  if (segments_.front().t0 != 0.0) throw Error(ErrorCode::InvalidArgument, "first segment must start at 0");
  if (segments_.back().t1 != horizon_) {
    throw Error(ErrorCode::InvalidArgument, "last segment must end at the horizon");
  }
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const auto& sg = segments_[k];
    if (!(sg.t0 < sg.t1)) throw Error(ErrorCode::InvalidArgument, "segment with t0 >= t1");
    if (sg.f0.size() != dim_ || sg.f1.size() != dim_) {
      throw Error(ErrorCode::InvalidArgument, "segment values have inconsistent dimension");
    }
    if (!sg.f0.allFinite() || !sg.f1.allFinite()) {
      throw Error(ErrorCode::InvalidArgument, "segment values must be finite");
    }
    if (k > 0 && segments_[k - 1].t1 != sg.t0) {
      throw Error(ErrorCode::InvalidArgument, "segments must tile [0, S] without gaps or overlap");
    }
  }
  std::sort(jumps_.begin(), jumps_.end(), [](const Jump& a, const Jump& b) { return a.t < b.t; });
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    const auto& jp = jumps_[k];
    if (!(jp.t > 0.0) || jp.t > horizon_) {
      throw Error(ErrorCode::InvalidArgument, "jump times must lie in (0, S]");
    }
    if (k > 0 && jumps_[k - 1].t == jp.t) throw Error(ErrorCode::InvalidArgument, "duplicate jump time");
    if (jp.left.size() != dim_ || jp.right.size() != dim_) {
      throw Error(ErrorCode::InvalidArgument, "jump values have inconsistent dimension");
    }
  }
  // continuity between segments unless a jump record bridges the boundary
  for (std::size_t k = 0; k + 1 < segments_.size(); ++k) {
    const double tau = segments_[k].t1;
    const Jump* jp = jump_at(tau);
    if (jp) {
      if (!close(jp->left, segments_[k].f1) || !close(jp->right, segments_[k + 1].f0)) {
        throw Error(ErrorCode::InvalidArgument, "jump record does not match adjacent segments");
      }
    } else if (!close(segments_[k].f1, segments_[k + 1].f0)) {
      std::ostringstream os;
      os << "discontinuity at s = " << tau << " without a jump record";
      throw Error(ErrorCode::InvalidArgument, os.str());
    }
  }
  for (const auto& jp : jumps_) {
    if (jp.t == horizon_) {
      if (!close(jp.left, segments_.back().f1)) {
        throw Error(ErrorCode::InvalidArgument, "terminal jump does not match last segment");
      }
      continue;
    }
    const bool at_boundary = std::any_of(segments_.begin(), segments_.end() - 1,
                                         [&](const Segment& sg) { return sg.t1 == jp.t; });
    if (!at_boundary) throw Error(ErrorCode::InvalidArgument, "jump time is not a segment boundary");
  }
}

LoadPath LoadPath::polyline(const std::vector<double>& times, const std::vector<VecX>& values,
                            std::vector<int> blocks) {
  if (times.size() < 2 || times.size() != values.size()) {
    throw Error(ErrorCode::InvalidArgument, "polyline needs matching times and values, at least two");
  }
  std::vector<Segment> segs;
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    segs.push_back({times[k], times[k + 1], values[k], values[k + 1]});
  }
  return LoadPath(times.back(), std::move(segs), {}, std::move(blocks));
}

LoadPath LoadPath::constant(double horizon, const VecX& value, std::vector<int> blocks) {
  return LoadPath(horizon, {{0.0, horizon, value, value}}, {}, std::move(blocks));
}

const LoadPath::Jump* LoadPath::jump_at(double s) const {
  auto it = std::lower_bound(jumps_.begin(), jumps_.end(), s,
                             [](const Jump& j, double x) { return j.t < x; });
  if (it != jumps_.end() && it->t == s) return &*it;
  return nullptr;
}

std::size_t LoadPath::segment_index(double s) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), s,
                             [](double x, const Segment& sg) { return x < sg.t0; });
  if (it == segments_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(segments_.begin(), it) - 1);
}

double LoadPath::norm(const VecX& v) const {
  double total = 0.0;
  Eigen::Index off = 0;
  for (int b : blocks_) {
    total += v.segment(off, b).norm();
    off += b;
  }
  return total;
}

VecX LoadPath::value(double s) const {
  if (!(s >= 0.0 && s <= horizon_)) {
    std::ostringstream os;
    os << "time " << s << " outside [0, " << horizon_ << "]";
    throw Error(ErrorCode::OutOfRange, os.str());
  }
  if (s == horizon_) {
    if (const Jump* jp = jump_at(s)) return jp->right;
    return segments_.back().f1;
  }
  const auto& sg = segments_[segment_index(s)];
  return lerp(sg.f0, sg.f1, (s - sg.t0) / (sg.t1 - sg.t0));
}

VecX LoadPath::left_value(double s) const {
  if (!(s >= 0.0 && s <= horizon_)) throw Error(ErrorCode::OutOfRange, "time outside [0, S]");
  if (s == 0.0) return segments_.front().f0;
  auto it = std::lower_bound(segments_.begin(), segments_.end(), s,
                             [](const Segment& sg, double x) { return sg.t1 < x; });
  if (it == segments_.end()) --it;
  return lerp(it->f0, it->f1, (s - it->t0) / (it->t1 - it->t0));
}

double LoadPath::variation(double s1, double s2) const {
  if (!(s1 >= 0.0 && s1 <= s2 && s2 <= horizon_)) {
    std::ostringstream os;
    os << "variation interval [" << s1 << ", " << s2 << "] outside [0, " << horizon_ << "]";
    throw Error(ErrorCode::OutOfRange, os.str());
  }
  double total = 0.0;
  for (const auto& sg : segments_) {
    if (sg.t1 <= s1) continue;
    if (sg.t0 >= s2) break;
    const double a = std::max(sg.t0, s1);
    const double b = std::min(sg.t1, s2);
    const double len = norm(sg.f1 - sg.f0);
    total += (a == sg.t0 && b == sg.t1) ? len : len * ((b - a) / (sg.t1 - sg.t0));
  }
  for (const auto& jp : jumps_) {
    if (jp.t > s1 && jp.t <= s2) total += norm(jp.right - jp.left);
  }
  return total;
}

double LoadPath::level_crossing(double after, double level) const {
  const double total = variation(0.0, horizon_);
  if (total - level <= 1e-12 * total) return horizon_;
  double V = 0.0;
  double crossing = horizon_;
  bool found = false;
  for (const auto& sg : segments_) {
    if (sg.t0 > 0.0) {
      if (const Jump* jp = jump_at(sg.t0)) V += norm(jp->right - jp->left);
      if (V > level) {
        crossing = sg.t0;
        found = true;
        break;
      }
    }
    const double len = norm(sg.f1 - sg.f0);
    if (V + len > level) {
      crossing = sg.t0 + (sg.t1 - sg.t0) * ((level - V) / len);
      crossing = std::clamp(crossing, sg.t0, sg.t1);
      found = true;
      break;
    }
    V += len;
  }
  if (!found) crossing = horizon_;
  if (crossing <= after) crossing = std::nextafter(after, horizon_);
  return crossing;
}

std::vector<double> LoadPath::breakpoints() const {
  std::vector<double> out;
  out.push_back(0.0);
  for (const auto& sg : segments_) out.push_back(sg.t1);
  for (const auto& jp : jumps_) out.push_back(jp.t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> LoadPath::jump_times() const {
  std::vector<double> out;
  for (const auto& jp : jumps_) out.push_back(jp.t);
  return out;
}

LoadPath LoadPath::mapped(const Eigen::MatrixXd& A, const VecX& b, std::vector<int> blocks) const {
  std::vector<Segment> segs;
  for (const auto& sg : segments_) segs.push_back({sg.t0, sg.t1, A * sg.f0 + b, A * sg.f1 + b});
  std::vector<Jump> jps;
  for (const auto& jp : jumps_) jps.push_back({jp.t, A * jp.left + b, A * jp.right + b});
  return LoadPath(horizon_, std::move(segs), std::move(jps), std::move(blocks));
}

nlohmann::json LoadPath::to_json() const {
  nlohmann::json j;
  j["horizon"] = horizon_;
  auto segs = nlohmann::json::array();
  for (const auto& sg : segments_) {
    segs.push_back({{"t0", sg.t0}, {"t1", sg.t1}, {"f0", vec_to_json(sg.f0)}, {"f1", vec_to_json(sg.f1)}});
  }
  j["segments"] = segs;
  auto jps = nlohmann::json::array();
  for (const auto& jp : jumps_) {
    jps.push_back({{"t", jp.t}, {"left", vec_to_json(jp.left)}, {"right", vec_to_json(jp.right)}});
  }
  j["jumps"] = jps;
  if (blocks_.size() > 1) j["blocks"] = blocks_;
  return j;
}

LoadPath LoadPath::from_json(const nlohmann::json& j) {
  try {
    std::vector<Segment> segs;
    for (const auto& s : j.at("segments")) {
      segs.push_back({s.at("t0").get<double>(), s.at("t1").get<double>(), vec_from_json(s.at("f0")),
                      vec_from_json(s.at("f1"))});
    }
    std::vector<Jump> jps;
    if (j.contains("jumps")) {
      for (const auto& s : j.at("jumps")) {
        jps.push_back({s.at("t").get<double>(), vec_from_json(s.at("left")), vec_from_json(s.at("right"))});
      }
    }
    std::vector<int> blocks;
    if (j.contains("blocks")) blocks = j.at("blocks").get<std::vector<int>>();
    return LoadPath(j.at("horizon").get<double>(), std::move(segs), std::move(jps), std::move(blocks));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("load path: ") + e.what());
  }
}

std::string LoadPath::dump() const { return to_json().dump(); }

Reparametrization Reparametrization::identity() {
  return {[](double s) { return s; }, [](double t) { return t; }};
}

Reparametrization Reparametrization::power(double p) {
  if (!(p > 0.0)) throw Error(ErrorCode::NonMonotoneReparam, "power reparametrization needs p > 0");
  if (p == 2.0) return {[](double s) { return s * s; }, [](double t) { return std::sqrt(t); }};
  return {[p](double s) { return std::pow(s, p); }, [p](double t) { return std::pow(t, 1.0 / p); }};
}

Reparametrization Reparametrization::scale(double c) {
  if (!(c > 0.0)) throw Error(ErrorCode::NonMonotoneReparam, "scale reparametrization needs c > 0");
  return {[c](double s) { return c * s; }, [c](double t) { return t / c; }};
}

ReparametrizedLoad::ReparametrizedLoad(std::shared_ptr<const LoadHistory> base,
                                       Reparametrization reparam)
    : base_(std::move(base)), reparam_(std::move(reparam)) {
  if (!base_) throw Error(ErrorCode::InvalidArgument, "null base load");
  if (!reparam_.forward) throw Error(ErrorCode::NonMonotoneReparam, "missing forward map");
  const double S = base_->horizon();
  if (reparam_.forward(0.0) != 0.0) throw Error(ErrorCode::NonMonotoneReparam, "reparametrization must fix 0");
  constexpr int kSamples = 1000;
  double prev = 0.0;
  for (int k = 1; k <= kSamples; ++k) {
    const double v = reparam_.forward(S * k / kSamples);
    if (!(v > prev) || !std::isfinite(v)) {
      throw Error(ErrorCode::NonMonotoneReparam, "reparametrization is not strictly increasing");
    }
    prev = v;
  }
  horizon_ = reparam_.forward(S);
  if (!reparam_.inverse) {
    auto fwd = reparam_.forward;
    reparam_.inverse = [fwd, S](double tau) {
      double lo = 0.0, hi = S;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (fwd(mid) > tau) hi = mid; else lo = mid;
      }
      return fwd(hi) <= tau ? hi : lo;
    };
  }
}

double ReparametrizedLoad::back(double tau) const {
  if (tau >= horizon_) return base_->horizon();
  if (tau <= 0.0) return 0.0;
  return std::clamp(reparam_.inverse(tau), 0.0, base_->horizon());
}

std::vector<double> ReparametrizedLoad::breakpoints() const {
  auto bp = base_->breakpoints();
  for (double& s : bp) {
    s = (s == base_->horizon()) ? horizon_ : reparam_.forward(s);
  }
  return bp;
}

std::vector<double> ReparametrizedLoad::jump_times() const {
  auto jt = base_->jump_times();
  for (double& s : jt) s = (s == base_->horizon()) ? horizon_ : reparam_.forward(s);
  return jt;
}

double ReparametrizedLoad::level_crossing(double after, double level) const {
  const double s = base_->level_crossing(back(after), level);
  if (s >= base_->horizon()) return horizon_;
  double tau = reparam_.forward(s);
  if (tau <= after) tau = std::nextafter(after, horizon_);
  return tau;
}

}  // namespace frictio
