#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hdt/analysis.hpp"
#include "hdt/engine.hpp"

namespace hdt {

struct NamedCurve {
  std::string prefix;  // metric names become "<prefix>:tvd" etc.; empty for bare names
  const AggregatedCurve* curve = nullptr;
};

/// "step,cost,metric,mean,stderr" rows, one per snapshot and metric, after
/// '#' comment lines.
void write_curve_csv(std::ostream& out, const std::vector<std::string>& comments,
                     const std::vector<NamedCurve>& curves);

/// Long-format "matrix,row,col,value" after a single '#' metadata line.
void write_matrix_csv(std::ostream& out, const std::string& metadata,
                      const std::vector<std::pair<std::string, Matrix>>& matrices);

/// "t,x0,x1,...,lyapunov" rows.
void write_trajectory_csv(std::ostream& out, const std::vector<std::string>& comments,
                          const OdeTrajectory& t, const Vector& mu, double alpha);

}  // namespace hdt
