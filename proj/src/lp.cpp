#include "sdpi/lp.hpp"

#include <vector>

#include "sdpi/common.hpp"

namespace sdpi {
namespace {

constexpr std::string_view kModule = "lp";

// Tableau layout: rows 0..m-1 are constraints, row m is the objective
// (reduced costs); the last column is the right-hand side.
class Tableau {
 public:
  Tableau(Eigen::MatrixXd t, std::vector<Eigen::Index> basis, const LpOptions& options)
      : t_(std::move(t)), basis_(std::move(basis)), options_(options) {}

  Eigen::MatrixXd& table() { return t_; }
  std::vector<Eigen::Index>& basis() { return basis_; }
  int pivots() const { return pivots_; }

  void pivot(Eigen::Index row, Eigen::Index col) {
    t_.row(row) /= t_(row, col);
    for (Eigen::Index r = 0; r < t_.rows(); ++r) {
      if (r == row) continue;
      const double factor = t_(r, col);
      if (factor != 0.0) t_.row(r) -= factor * t_.row(row);
    }
    basis_[row] = col;
    ++pivots_;
  }

  /// Runs Bland's rule over columns [0, allowed). Returns the final status.
  LpStatus run(Eigen::Index allowed) {
    const Eigen::Index m = t_.rows() - 1;
    const Eigen::Index rhs = t_.cols() - 1;
    while (true) {
      if (pivots_ >= options_.max_pivots) return LpStatus::IterationLimit;
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (t_(m, j) < -options_.pivot_tolerance) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::Optimal;
      Eigen::Index leave = -1;
      double best_ratio = 0.0;
      for (Eigen::Index r = 0; r < m; ++r) {
        if (t_(r, enter) <= options_.pivot_tolerance) continue;
        const double ratio = t_(r, rhs) / t_(r, enter);
        if (leave < 0 || ratio < best_ratio - 1e-15 ||
            (ratio <= best_ratio + 1e-15 && basis_[r] < basis_[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave < 0) return LpStatus::Unbounded;
      pivot(leave, enter);
    }
  }

 private:
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
  const LpOptions& options_;
  int pivots_ = 0;
};

}  // namespace

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "OPTIMAL";
    case LpStatus::Infeasible: return "INFEASIBLE";
    case LpStatus::Unbounded: return "UNBOUNDED";
    case LpStatus::IterationLimit: return "ITERATION_LIMIT";
  }
  return "UNKNOWN";
}

LpResult solve_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                  const LpOptions& options) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m || c.size() != n) throw Error(kModule, "dimension mismatch");

  // Phase one: artificials n..n+m-1 on every row.
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  std::vector<Eigen::Index> basis(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const double sign = b[r] < 0.0 ? -1.0 : 1.0;
    t.block(r, 0, 1, n) = sign * a.row(r);
    t(r, n + r) = 1.0;
    t(r, n + m) = sign * b[r];
    basis[r] = n + r;
  }
  for (Eigen::Index r = 0; r < m; ++r) t.row(m) -= t.row(r);
  for (Eigen::Index r = 0; r < m; ++r) t(m, n + r) = 0.0;

  Tableau tab(std::move(t), std::move(basis), options);
  LpResult result;
  const LpStatus phase1 = tab.run(n + m);
  result.pivots = tab.pivots();
  if (phase1 == LpStatus::IterationLimit) {
    result.status = phase1;
    return result;
  }
  if (-tab.table()(m, n + m) > options.feasibility_tolerance) {
    result.status = LpStatus::Infeasible;
    return result;
  }

  // Drive artificials out of the basis; rows where that is impossible are redundant.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index r = 0; r < m; ++r) {
    if (tab.basis()[r] < n) {
      keep.push_back(r);
      continue;
    }
    Eigen::Index col = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(tab.table()(r, j)) > 1e-9) {
        col = j;
        break;
      }
    }
    if (col >= 0) {
      tab.pivot(r, col);
      keep.push_back(r);
    }
  }

  // Phase two on the kept rows, artificial columns dropped.
  const auto rows = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd t2 = Eigen::MatrixXd::Zero(rows + 1, n + 1);
  std::vector<Eigen::Index> basis2(rows);
  for (Eigen::Index k = 0; k < rows; ++k) {
    t2.block(k, 0, 1, n) = tab.table().block(keep[k], 0, 1, n);
    t2(k, n) = tab.table()(keep[k], n + m);
    basis2[k] = tab.basis()[keep[k]];
  }
  t2.block(rows, 0, 1, n) = c.transpose();
  for (Eigen::Index k = 0; k < rows; ++k) t2.row(rows) -= c[basis2[k]] * t2.row(k);

  Tableau tab2(std::move(t2), std::move(basis2), options);
  result.status = tab2.run(n);
  result.pivots += tab2.pivots();
  result.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < rows; ++k) result.x[tab2.basis()[k]] = std::max(tab2.table()(k, n), 0.0);
  result.objective = c.dot(result.x);
  return result;
}

}  // namespace sdpi
