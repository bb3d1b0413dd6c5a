#pragma once

#include <array>
#include <chrono>
#include <iosfwd>
#include <string_view>

namespace zamr {

enum class Phase : int { Sweep, Slopes, Flux, Eos, Mark, Refine, Coarsen, Balance, Partition, Ghost, Io, Count };

std::string_view phase_name(Phase p);

/// Cumulative wall-clock seconds per phase. Phases never nest.
class ProfileReport {
 public:
  void add(Phase p, double seconds) { seconds_[static_cast<int>(p)] += seconds; }
  double seconds(Phase p) const { return seconds_[static_cast<int>(p)]; }
  double total() const;
  void merge(const ProfileReport& other);

  /// `phase,seconds,percent`, percent relative to `wall_seconds`.
  void write_csv(std::ostream& os, double wall_seconds) const;

 private:
  std::array<double, static_cast<int>(Phase::Count)> seconds_{};
};

class ScopedPhase {
 public:
  ScopedPhase(ProfileReport* report, Phase phase)
      : report_(report), phase_(phase), start_(std::chrono::steady_clock::now()) {}
  ~ScopedPhase() {
    if (report_) {
      report_->add(phase_, std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
    }
  }
  ScopedPhase(const ScopedPhase&) = delete;
  ScopedPhase& operator=(const ScopedPhase&) = delete;

 private:
  ProfileReport* report_;
  Phase phase_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace zamr
