#include "frictio/trajectory.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace frictio {

Interpolation interpolation_from_string(const std::string& name) {
  if (name == "piecewise-constant" || name == "constant") return Interpolation::PiecewiseConstant;
  if (name == "piecewise-affine" || name == "affine") return Interpolation::PiecewiseAffine;
  throw Error(ErrorCode::ConfigError, "unknown interpolation '" + name + "'");
}

const char* to_string(Interpolation interp) {
  return interp == Interpolation::PiecewiseConstant ? "piecewise-constant" : "piecewise-affine";
}

Trajectory::Trajectory(std::vector<double> times, std::vector<ContactState> states,
                       std::vector<JumpRecord> jumps, Interpolation interp)
    : times_(std::move(times)), states_(std::move(states)), jumps_(std::move(jumps)), interp_(interp) {
  if (times_.empty() || times_.size() != states_.size()) {
    throw Error(ErrorCode::InvalidArgument, "trajectory needs one state per breakpoint");
  }
  if (times_.front() != 0.0) throw Error(ErrorCode::InvalidArgument, "trajectory must start at s = 0");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "trajectory breakpoints must increase strictly");
    }
  }
  std::sort(jumps_.begin(), jumps_.end(),
            [](const JumpRecord& a, const JumpRecord& b) { return a.time < b.time; });
  jump_index_.assign(times_.size(), -1);
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    auto it = std::lower_bound(times_.begin(), times_.end(), jumps_[k].time);
    if (it == times_.end() || *it != jumps_[k].time) {
      throw Error(ErrorCode::InvalidArgument, "jump record time is not a breakpoint");
    }
    const auto i = static_cast<std::size_t>(std::distance(times_.begin(), it));
    if (i == 0) throw Error(ErrorCode::InvalidArgument, "jump record at s = 0");
    jump_index_[i] = static_cast<int>(k);
  }
}

const Trajectory::JumpRecord* Trajectory::jump_at_index(std::size_t i) const {
  if (i >= jump_index_.size() || jump_index_[i] < 0) return nullptr;
  return &jumps_[static_cast<std::size_t>(jump_index_[i])];
}

std::size_t Trajectory::index_at(double s) const {
  if (!(s >= 0.0 && s <= horizon())) throw Error(ErrorCode::OutOfRange, "time outside trajectory");
  auto it = std::upper_bound(times_.begin(), times_.end(), s);
  return static_cast<std::size_t>(std::distance(times_.begin(), it) - 1);
}

ContactState Trajectory::left_limit_at_index(std::size_t i) const {
  if (const JumpRecord* jr = jump_at_index(i)) return jr->left;
  if (i == 0) return states_[0];
  return interp_ == Interpolation::PiecewiseConstant ? states_[i - 1] : states_[i];
}

ContactState Trajectory::state_at(double s) const {
  const std::size_t i = index_at(s);
  if (interp_ == Interpolation::PiecewiseConstant || i + 1 == times_.size() || s == times_[i]) {
    return states_[i];
  }
  const ContactState a = states_[i];
  const ContactState b = left_limit_at_index(i + 1);
  const double alpha = (s - times_[i]) / (times_[i + 1] - times_[i]);
  return {(1.0 - alpha) * a.u + alpha * b.u, (1.0 - alpha) * a.t + alpha * b.t};
}

ContactState Trajectory::left_state_at(double s) const {
  const std::size_t i = index_at(s);
  if (s == times_[i]) return left_limit_at_index(i);
  return state_at(s);
}

namespace {

void write_row(std::ostream& os, double s, const ContactState& st, int flag) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", s, st.u(0), st.u(1), st.t(0),
                st.t(1), flag);
  os << buf;
}

}  // namespace

void Trajectory::write_csv(std::ostream& os) const {
  os << "s,u_n,u_t,t_n,t_t,is_jump_left_row\n";
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (const JumpRecord* jr = jump_at_index(i)) write_row(os, times_[i], jr->left, 1);
    write_row(os, times_[i], states_[i], 0);
  }
}

void Trajectory::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::ConfigError, "cannot write " + path);
  write_csv(os);
}

Trajectory Trajectory::read_csv(std::istream& is, Interpolation interp) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::ConfigError, "empty trajectory file");
  if (line.rfind("s,u_n,u_t,t_n,t_t", 0) != 0) {
    throw Error(ErrorCode::ConfigError, "trajectory header must be s,u_n,u_t,t_n,t_t,is_jump_left_row");
  }
  std::vector<double> times;
  std::vector<ContactState> states;
  std::vector<JumpRecord> jumps;
  std::optional<std::pair<double, ContactState>> pending_left;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (vals.size() != 6) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected 6 fields");
    }
    ContactState st{Vec2(vals[1], vals[2]), Vec2(vals[3], vals[4])};
    if (vals[5] != 0.0) {
      pending_left = std::make_pair(vals[0], st);
      continue;
    }
    if (pending_left) {
      if (pending_left->first != vals[0]) {
        throw Error(ErrorCode::ConfigError,
                    "line " + std::to_string(lineno) + ": jump left row not followed by its right row");
      }
      jumps.push_back({vals[0], pending_left->second, st});
      pending_left.reset();
    }
    times.push_back(vals[0]);
    states.push_back(st);
  }
  if (pending_left) {
    // a left row without its right partner is kept as a plain state
    times.push_back(pending_left->first);
    states.push_back(pending_left->second);
  }
  try {
    return Trajectory(std::move(times), std::move(states), std::move(jumps), interp);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
}

Trajectory Trajectory::read_csv(const std::string& path, Interpolation interp) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::ConfigError, "cannot open " + path);
  return read_csv(is, interp);
}

}  // namespace frictio
