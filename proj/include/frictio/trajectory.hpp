#pragma once

#include "frictio/core.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace frictio {

enum class Interpolation { PiecewiseConstant, PiecewiseAffine };

Interpolation interpolation_from_string(const std::string& name);
const char* to_string(Interpolation interp);

// Right-continuous state history: states[i] is the value at times[i] (and on
// [times[i], times[i+1]) for the piecewise-constant rule). A jump record at
// times[i] carries the left limit; its right limit is states[i].
class Trajectory {
 public:
  struct JumpRecord {
    double time;
    ContactState left, right;
  };

  Trajectory() = default;
  Trajectory(std::vector<double> times, std::vector<ContactState> states,
             std::vector<JumpRecord> jumps, Interpolation interp);

  const std::vector<double>& times() const { return times_; }
  const std::vector<ContactState>& states() const { return states_; }
  const std::vector<JumpRecord>& jumps() const { return jumps_; }
  Interpolation interpolation() const { return interp_; }
  void set_interpolation(Interpolation interp) { interp_ = interp; }
  double horizon() const { return times_.empty() ? 0.0 : times_.back(); }
  std::size_t size() const { return times_.size(); }

  // jump record at breakpoint i, or nullptr
  const JumpRecord* jump_at_index(std::size_t i) const;
  ContactState state_at(double s) const;
  ContactState left_state_at(double s) const;

  void write_csv(std::ostream& os) const;
  void write_csv(const std::string& path) const;
  static Trajectory read_csv(std::istream& is, Interpolation interp);
  static Trajectory read_csv(const std::string& path, Interpolation interp);

 private:
  std::size_t index_at(double s) const;
  ContactState left_limit_at_index(std::size_t i) const;

  std::vector<double> times_;
  std::vector<ContactState> states_;
  std::vector<JumpRecord> jumps_;
  std::vector<int> jump_index_;  // per breakpoint, -1 when no jump
  Interpolation interp_ = Interpolation::PiecewiseConstant;
};

}  // namespace frictio
