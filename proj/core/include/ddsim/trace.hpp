#pragma once

#include <string>
#include <vector>

namespace ddsim {

struct TracePoint {
  double time = 0;         // s
  double correlation = 0;  // in [-1, 1]
  double std_error = 0;
};

/// Time series of correlation values for one state/sequence pair.
struct CorrelationTrace {
  std::string state;
  std::string sequence;
  std::vector<TracePoint> points;
};

}  // namespace ddsim
