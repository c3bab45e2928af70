#include "tirs/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace tirs::lp {
namespace {

using Column = std::vector<std::pair<std::size_t, double>>;

class Simplex {
 public:
  Simplex(const Problem& p, const Options& opts) : opts_(opts), structural_(p.columns) {
    const std::size_t m = p.rows.size();
    m_ = m;
    rhs_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    columns_.assign(p.columns, {});
    cost_.assign(p.cost.begin(), p.cost.end());
    cost_.resize(p.columns, 0.0);

    std::vector<double> sign(m, 1.0);
    for (std::size_t i = 0; i < m; ++i) {
      const Row& row = p.rows[i];
      if (row.rhs < 0.0) sign[i] = -1.0;
      rhs_[static_cast<Eigen::Index>(i)] = sign[i] * row.rhs;
      for (auto [col, a] : row.terms)
        if (a != 0.0) columns_[col].emplace_back(i, sign[i] * a);
    }
    // Merge duplicate (row, column) entries.
    for (auto& col : columns_) {
      std::sort(col.begin(), col.end());
      Column merged;
      for (auto [r, a] : col) {
        if (!merged.empty() && merged.back().first == r)
          merged.back().second += a;
        else
          merged.emplace_back(r, a);
      }
      std::erase_if(merged, [](const auto& e) { return e.second == 0.0; });
      col = std::move(merged);
    }

    basis_.assign(m, kNone);
    // Slacks for inequality rows.
    for (std::size_t i = 0; i < m; ++i) {
      if (p.rows[i].sense != Sense::LessEqual) continue;
      const std::size_t j = columns_.size();
      columns_.push_back({{i, sign[i]}});
      cost_.push_back(0.0);
      if (sign[i] > 0.0) basis_[i] = j;
    }
    // Crash: a structural column that is a positive unit column of the row.
    std::vector<char> used(columns_.size(), 0);
    for (std::size_t j = 0; j < structural_; ++j) {
      const Column& col = columns_[j];
      if (col.size() != 1 || col[0].second <= 0.0) continue;
      const std::size_t i = col[0].first;
      if (basis_[i] != kNone || used[j]) continue;
      basis_[i] = j;
      used[j] = 1;
    }
    first_artificial_ = columns_.size();
    for (std::size_t i = 0; i < m; ++i) {
      if (basis_[i] != kNone) continue;
      basis_[i] = columns_.size();
      columns_.push_back({{i, 1.0}});
      cost_.push_back(0.0);
    }
    basic_.assign(columns_.size(), 0);
    for (std::size_t j : basis_) basic_[j] = 1;
  }

  Result run() {
    Result res;
    const std::size_t n = columns_.size();
    limit_ = opts_.max_iterations ? opts_.max_iterations : 50 * (m_ + n) + 1000;
    refactor();

    bool need_phase1 = false;
    for (std::size_t i = 0; i < m_; ++i)
      if (is_artificial(basis_[i]) && x_[static_cast<Eigen::Index>(i)] > opts_.tolerance)
        need_phase1 = true;

    if (need_phase1) {
      std::vector<double> phase1(n, 0.0);
      for (std::size_t j = first_artificial_; j < n; ++j) phase1[j] = 1.0;
      const Status s = iterate(phase1, /*phase_two=*/false);
      if (s == Status::IterationLimit) return finish(res, s);
      double infeas = 0.0;
      for (std::size_t i = 0; i < m_; ++i)
        if (is_artificial(basis_[i])) infeas += x_[static_cast<Eigen::Index>(i)];
      if (infeas > 1e-7) return finish(res, Status::Infeasible);
    }
    const Status s = iterate(cost_, /*phase_two=*/true);
    return finish(res, s);
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  bool is_artificial(std::size_t j) const { return j >= first_artificial_; }

  Result& finish(Result& res, Status s) {
    res.status = s;
    res.iterations = iterations_;
    res.x.assign(structural_, 0.0);
    res.objective = 0.0;
    if (s == Status::Optimal) {
      for (std::size_t i = 0; i < m_; ++i)
        if (basis_[i] < structural_)
          res.x[basis_[i]] = std::max(0.0, x_[static_cast<Eigen::Index>(i)]);
      for (std::size_t j = 0; j < structural_; ++j) res.objective += cost_[j] * res.x[j];
    }
    return res;
  }

  void refactor() {
    const auto m = static_cast<Eigen::Index>(m_);
    if (m == 0) {
      x_ = Eigen::VectorXd();
      binv_ = Eigen::MatrixXd();
      return;
    }
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < m_; ++i)
      for (auto [r, a] : columns_[basis_[i]])
        b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = a;
    binv_ = b.partialPivLu().inverse();
    x_ = binv_ * rhs_;
    for (Eigen::Index i = 0; i < m; ++i)
      if (x_[i] < 0.0 && x_[i] > -1e-9) x_[i] = 0.0;
    since_refactor_ = 0;
  }

  Eigen::VectorXd duals(const std::vector<double>& cost) const {
    Eigen::VectorXd cb(static_cast<Eigen::Index>(m_));
    for (std::size_t i = 0; i < m_; ++i) cb[static_cast<Eigen::Index>(i)] = cost[basis_[i]];
    return binv_.transpose() * cb;
  }

  double reduced_cost(const std::vector<double>& cost, const Eigen::VectorXd& y,
                      std::size_t j) const {
    double d = cost[j];
    for (auto [r, a] : columns_[j]) d -= y[static_cast<Eigen::Index>(r)] * a;
    return d;
  }

  Status iterate(const std::vector<double>& cost, bool phase_two) {
    const double tol = opts_.tolerance;
    const std::size_t n = columns_.size();
    Eigen::VectorXd y = duals(cost);
    Eigen::VectorXd alpha(static_cast<Eigen::Index>(m_));
    std::size_t degenerate_run = 0;
    while (true) {
      if (iterations_ >= limit_) return Status::IterationLimit;
      const bool bland = degenerate_run > 50;

      std::size_t enter = kNone;
      double best = -tol;
      for (std::size_t j = 0; j < n; ++j) {
        if (basic_[j] || is_artificial(j)) continue;
        const double d = reduced_cost(cost, y, j);
        if (d < best) {
          best = d;
          enter = j;
          if (bland) break;
        }
      }
      if (enter == kNone) return Status::Optimal;

      alpha.setZero();
      for (auto [r, a] : columns_[enter]) alpha += binv_.col(static_cast<Eigen::Index>(r)) * a;

      std::size_t leave = kNone;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = alpha[static_cast<Eigen::Index>(i)];
        double r;
        if (phase_two && is_artificial(basis_[i])) {
          if (std::abs(a) <= tol) continue;
          r = 0.0;
        } else {
          if (a <= tol) continue;
          r = std::max(0.0, x_[static_cast<Eigen::Index>(i)]) / a;
        }
        bool take = false;
        if (leave == kNone || r < ratio - 1e-12) {
          take = true;
        } else if (r <= ratio + 1e-12) {
          if (bland)
            take = basis_[i] < basis_[leave];
          else
            take = std::abs(a) > std::abs(alpha[static_cast<Eigen::Index>(leave)]);
        }
        if (take) {
          leave = i;
          ratio = r;
        }
      }
      if (leave == kNone) return Status::Unbounded;

      pivot(enter, leave, alpha, ratio);
      ++iterations_;
      degenerate_run = ratio <= tol ? degenerate_run + 1 : 0;

      if (++since_refactor_ >= opts_.refactor_interval) {
        refactor();
        y = duals(cost);
      } else {
        // y' = y + d_q * (row `leave` of the updated inverse)
        y += best * binv_.row(static_cast<Eigen::Index>(leave)).transpose();
      }
    }
  }

  void pivot(std::size_t enter, std::size_t leave, const Eigen::VectorXd& alpha, double theta) {
    const auto r = static_cast<Eigen::Index>(leave);
    x_ -= theta * alpha;
    x_[r] = theta;
    for (Eigen::Index i = 0; i < x_.size(); ++i)
      if (x_[i] < 0.0 && x_[i] > -1e-9) x_[i] = 0.0;
    const double pivot_value = alpha[r];
    binv_.row(r) /= pivot_value;
    Eigen::VectorXd col = alpha;
    col[r] = 0.0;
    binv_.noalias() -= col * binv_.row(r);
    basic_[basis_[leave]] = 0;
    basis_[leave] = enter;
    basic_[enter] = 1;
  }

  Options opts_;
  std::size_t structural_;
  std::size_t m_ = 0;
  std::vector<Column> columns_;
  std::vector<double> cost_;
  Eigen::VectorXd rhs_;
  std::vector<std::size_t> basis_;
  std::vector<char> basic_;
  std::size_t first_artificial_ = 0;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd x_;
  std::size_t iterations_ = 0;
  std::size_t limit_ = 0;
  std::size_t since_refactor_ = 0;
};

}  // namespace

Result solve(const Problem& p, const Options& opts) {
  return Simplex(p, opts).run();
}

}  // namespace tirs::lp
