#include "hdt/report.hpp"

#include <ostream>

#include "hdt/config.hpp"

namespace hdt {

namespace {

void comment_lines(std::ostream& out, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
}

}  // namespace

void write_curve_csv(std::ostream& out, const std::vector<std::string>& comments,
                     const std::vector<NamedCurve>& curves) {
  comment_lines(out, comments);
  out << "step,cost,metric,mean,stderr\n";
  for (const auto& named : curves) {
    const std::string p = named.prefix.empty() ? "" : named.prefix + ":";
    for (const auto& row : named.curve->rows) {
      const std::string head = format_double(row.step) + "," + format_double(row.cost) + ",";
      out << head << p << "tvd," << format_double(row.tvd.mean) << ',' << format_double(row.tvd.std_error) << '\n';
      out << head << p << "estimate," << format_double(row.estimate.mean) << ','
          << format_double(row.estimate.std_error) << '\n';
      if (row.nrmse) {
        out << head << p << "nrmse," << format_double(row.nrmse->value) << ','
            << format_double(row.nrmse->std_error) << '\n';
      }
    }
  }
}

void write_matrix_csv(std::ostream& out, const std::string& metadata,
                      const std::vector<std::pair<std::string, Matrix>>& matrices) {
  out << "# " << metadata << '\n';
  out << "matrix,row,col,value\n";
  for (const auto& [name, m] : matrices) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        out << name << ',' << r << ',' << c << ',' << format_double(m(r, c)) << '\n';
      }
    }
  }
}

void write_trajectory_csv(std::ostream& out, const std::vector<std::string>& comments,
                          const OdeTrajectory& t, const Vector& mu, double alpha) {
  comment_lines(out, comments);
  out << 't';
  for (Eigen::Index i = 0; i < mu.size(); ++i) out << ",x" << i;
  out << ",lyapunov\n";
  for (std::size_t s = 0; s < t.points.size(); ++s) {
    out << format_double(t.step * static_cast<double>(s));
    for (Eigen::Index i = 0; i < mu.size(); ++i) out << ',' << format_double(t.points[s](i));
    out << ',' << format_double(lyapunov(mu, alpha, t.points[s])) << '\n';
  }
}

}  // namespace hdt
