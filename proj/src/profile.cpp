#include "zamr/profile.hpp"

#include <iomanip>
#include <ostream>

namespace zamr {

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::Sweep: return "sweep";
    case Phase::Slopes: return "slopes";
    case Phase::Flux: return "flux";
    case Phase::Eos: return "eos";
    case Phase::Mark: return "mark";
    case Phase::Refine: return "refine";
    case Phase::Coarsen: return "coarsen";
    case Phase::Balance: return "balance";
    case Phase::Partition: return "partition";
    case Phase::Ghost: return "ghost";
    case Phase::Io: return "io";
    case Phase::Count: break;
  }
  return "unknown";
}

double ProfileReport::total() const {
  double s = 0.0;
  for (double v : seconds_) s += v;
  return s;
}

void ProfileReport::merge(const ProfileReport& other) {
  for (std::size_t k = 0; k < seconds_.size(); ++k) seconds_[k] += other.seconds_[k];
}

void ProfileReport::write_csv(std::ostream& os, double wall_seconds) const {
  os << "phase,seconds,percent\n";
  for (int k = 0; k < static_cast<int>(Phase::Count); ++k) {
    const double s = seconds_[k];
    const double pct = wall_seconds > 0.0 ? 100.0 * s / wall_seconds : 0.0;
    os << phase_name(static_cast<Phase>(k)) << ',' << std::setprecision(9) << s << ',' << std::setprecision(6) << pct
       << '\n';
  }
}

}  // namespace zamr
