#include "sdpi/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "sdpi/optimize.hpp"
#include "sdpi/sampling.hpp"

namespace sdpi {
namespace {

constexpr std::string_view kModule = "contraction";
constexpr Index kDenseSvdLimit = 64;

// diag(p)^{1/2} W diag(W^T p)^{-1/2} restricted to supp(p) x supp(W^T p).
struct NormalizedJoint {
  Eigen::MatrixXd b;
  std::vector<Index> inputs;
  std::vector<Index> outputs;
  Eigen::VectorXd p;  // restricted input law
  Eigen::VectorXd q;  // restricted output law
};

NormalizedJoint normalized_joint(const Eigen::MatrixXd& w, const Eigen::VectorXd& p) {
  NormalizedJoint nj;
  for (Index x = 0; x < p.size(); ++x) {
    if (p[x] > 0.0) nj.inputs.push_back(x);
  }
  const Eigen::VectorXd out = w.transpose() * p;
  for (Index y = 0; y < out.size(); ++y) {
    if (out[y] > 0.0) nj.outputs.push_back(y);
  }
  const Index rows = static_cast<Index>(nj.inputs.size());
  const Index cols = static_cast<Index>(nj.outputs.size());
  nj.p.resize(rows);
  nj.q.resize(cols);
  for (Index i = 0; i < rows; ++i) nj.p[i] = p[nj.inputs[i]];
  for (Index j = 0; j < cols; ++j) nj.q[j] = out[nj.outputs[j]];
  nj.b.resize(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const double sp = std::sqrt(nj.p[i]);
    for (Index j = 0; j < cols; ++j) {
      nj.b(i, j) = sp * w(nj.inputs[i], nj.outputs[j]) / std::sqrt(nj.q[j]);
    }
  }
  return nj;
}

// Largest eigenpair of a PSD matrix after removing the known top direction.
double deflated_power_iteration(const Eigen::MatrixXd& gram, const Eigen::VectorXd& top,
                                Eigen::VectorXd& vec) {
  const Index n = gram.rows();
  const Eigen::VectorXd unit_top = top.normalized();
  vec = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0);
  vec -= unit_top * unit_top.dot(vec);
  if (vec.norm() == 0.0) {
    vec.setZero();
    return 0.0;
  }
  vec.normalize();
  double lambda = 0.0;
  for (int iter = 0; iter < 100000; ++iter) {
    Eigen::VectorXd next = gram * vec;
    next -= unit_top * unit_top.dot(next);
    const double norm = next.norm();
    if (norm == 0.0) return 0.0;
    next /= norm;
    const double updated = next.dot(gram * next);
    const bool done = std::abs(updated - lambda) <= 1e-12 * std::max(1.0, std::abs(updated)) &&
                      (next - vec).norm() < 1e-9;
    vec = std::move(next);
    lambda = updated;
    if (done) break;
  }
  return std::max(lambda, 0.0);
}

// Second singular value of a normalized joint matrix, optionally with its
// left/right singular vectors.
double second_singular_value(const NormalizedJoint& nj, Eigen::VectorXd* u, Eigen::VectorXd* v) {
  const Eigen::MatrixXd& b = nj.b;
  if (std::min(b.rows(), b.cols()) < 2) {
    if (u != nullptr) *u = Eigen::VectorXd::Zero(b.rows());
    if (v != nullptr) *v = Eigen::VectorXd::Zero(b.cols());
    return 0.0;
  }
  if (b.rows() <= kDenseSvdLimit && b.cols() <= kDenseSvdLimit) {
    if (u == nullptr && v == nullptr) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
      return svd.singularValues()[1];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (u != nullptr) *u = svd.matrixU().col(1);
    if (v != nullptr) *v = svd.matrixV().col(1);
    return svd.singularValues()[1];
  }
  // Top singular pair is (sqrt(p), sqrt(q)) with value 1.
  Eigen::VectorXd vec;
  double sigma = 0.0;
  if (b.cols() <= b.rows()) {
    const double lambda = deflated_power_iteration(b.transpose() * b, nj.q.cwiseSqrt(), vec);
    sigma = std::sqrt(lambda);
    if (v != nullptr) *v = vec;
    if (u != nullptr) *u = sigma > 0.0 ? Eigen::VectorXd(b * vec / sigma) : Eigen::VectorXd::Zero(b.rows());
  } else {
    const double lambda = deflated_power_iteration(b * b.transpose(), nj.p.cwiseSqrt(), vec);
    sigma = std::sqrt(lambda);
    if (u != nullptr) *u = vec;
    if (v != nullptr) *v = sigma > 0.0 ? Eigen::VectorXd(b.transpose() * vec / sigma) : Eigen::VectorXd::Zero(b.cols());
  }
  return sigma;
}

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

// Enumerates all compositions of `mesh` into `parts` non-negative integers.
template <typename Visit>
void for_each_grid_point(Index parts, int mesh, Visit&& visit) {
  std::vector<int> counts(parts, 0);
  Eigen::VectorXd point(parts);
  auto recurse = [&](auto&& self, Index slot, int remaining) -> void {
    if (slot == parts - 1) {
      counts[slot] = remaining;
      for (Index i = 0; i < parts; ++i) point[i] = static_cast<double>(counts[i]) / mesh;
      visit(point);
      return;
    }
    for (int c = remaining; c >= 0; --c) {
      counts[slot] = c;
      self(self, slot + 1, remaining - c);
    }
  };
  recurse(recurse, 0, mesh);
}

double binomial_count(Index n, Index k) {
  double result = 1.0;
  for (Index i = 1; i <= k; ++i) result = result * static_cast<double>(n - k + i) / static_cast<double>(i);
  return result;
}

struct AscentResult {
  Eigen::VectorXd p;
  double value = 0.0;
  bool converged = false;
};

// Projected gradient ascent of eta_chi2_at on the face spanned by supp(start).
AscentResult ascend(const Channel& w, const Eigen::VectorXd& start, const EtaOptions& options) {
  AscentResult result{start, 0.0, false};
  Eigen::VectorXd gradient;
  double value = eta_chi2_at_with_gradient(w, result.p, gradient);
  double step = 0.1;
  for (int iter = 0; iter < options.max_ascent_iterations; ++iter) {
    std::vector<Index> face;
    for (Index x = 0; x < result.p.size(); ++x) {
      if (result.p[x] > 0.0) face.push_back(x);
    }
    if (face.size() < 2) break;
    Eigen::VectorXd tangent = Eigen::VectorXd::Zero(result.p.size());
    double mean = 0.0;
    for (Index x : face) mean += gradient[x];
    mean /= static_cast<double>(face.size());
    for (Index x : face) tangent[x] = gradient[x] - mean;
    const double norm = tangent.norm();
    if (norm < options.gradient_tolerance) {
      result.converged = true;
      break;
    }
    bool accepted = false;
    step = std::min(step * 2.0, 1.0);
    while (step * norm > 1e-16) {
      Eigen::VectorXd face_point(face.size());
      for (std::size_t k = 0; k < face.size(); ++k) {
        face_point[k] = result.p[face[k]] + step * tangent[face[k]];
      }
      face_point = project_to_simplex(face_point);
      Eigen::VectorXd candidate = Eigen::VectorXd::Zero(result.p.size());
      for (std::size_t k = 0; k < face.size(); ++k) candidate[face[k]] = face_point[k];
      if ((candidate.array() > 0.0).count() >= 2) {
        Eigen::VectorXd candidate_gradient;
        const double candidate_value = eta_chi2_at_with_gradient(w, candidate, candidate_gradient);
        if (candidate_value > value) {
          result.p = std::move(candidate);
          value = candidate_value;
          gradient = std::move(candidate_gradient);
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No ascent direction left at machine precision: a stationary point.
      result.converged = true;
      break;
    }
  }
  result.value = value;
  return result;
}

}  // namespace

const char* to_string(EtaMethod method) {
  switch (method) {
    case EtaMethod::DobrushinExact: return "DOBRUSHIN_EXACT";
    case EtaMethod::SpectralSup: return "SPECTRAL_SUP";
    case EtaMethod::LeCamBinaryExact: return "LECAM_BINARY_EXACT";
    case EtaMethod::GridLowerBound: return "GRID_LOWER_BOUND";
  }
  return "UNKNOWN";
}

double eta_tv(const Channel& w) {
  const Eigen::MatrixXd& m = w.matrix();
  double best = 0.0;
  for (Index a = 0; a < m.rows(); ++a) {
    for (Index b = a + 1; b < m.rows(); ++b) {
      best = std::max(best, 0.5 * (m.row(a) - m.row(b)).cwiseAbs().sum());
    }
  }
  return clamp_unit(best);
}

double eta_chi2_at(const Channel& w, const Distribution& p) {
  if (p.size() != w.input_size()) throw Error(kModule, "input distribution size does not match channel");
  if (p.is_point_mass()) throw Error(kModule, "input distribution is a point mass");
  const NormalizedJoint nj = normalized_joint(w.matrix(), p.probs());
  const double sigma = second_singular_value(nj, nullptr, nullptr);
  return clamp_unit(sigma * sigma);
}

double eta_chi2_at_with_gradient(const Channel& w, const Eigen::VectorXd& p,
                                 Eigen::VectorXd& gradient) {
  const NormalizedJoint nj = normalized_joint(w.matrix(), p);
  if (nj.inputs.size() < 2) throw Error(kModule, "input distribution is a point mass");
  Eigen::VectorXd u, v;
  const double sigma = second_singular_value(nj, &u, &v);
  const double value = sigma * sigma;
  gradient = Eigen::VectorXd::Zero(p.size());
  // d sigma^2 / d p_k = sigma^2 (u_k^2 / p_k - sum_j W_kj v_j^2 / q_j).
  Eigen::VectorXd weighted(nj.outputs.size());
  for (std::size_t j = 0; j < nj.outputs.size(); ++j) weighted[j] = v[j] * v[j] / nj.q[j];
  for (std::size_t i = 0; i < nj.inputs.size(); ++i) {
    const Index x = nj.inputs[i];
    double back = 0.0;
    for (std::size_t j = 0; j < nj.outputs.size(); ++j) back += w(x, nj.outputs[j]) * weighted[j];
    gradient[x] = value * (u[i] * u[i] / nj.p[i] - back);
  }
  return clamp_unit(value);
}

double lecam_sup(const Distribution& p, const Distribution& q, double* argmax_beta,
                 bool* unimodal) {
  if (p.size() != q.size()) throw Error(kModule, "Le Cam rows have different alphabets");
  constexpr double kEps = 1e-9;
  auto profile = [&](double beta) {
    return divergence_raw(DivergenceKind::lecam(beta), p.probs(), q.probs());
  };

  auto scan = [&](int points, std::vector<double>& betas, std::vector<double>& values) {
    betas.resize(points);
    values.resize(points);
    for (int i = 0; i < points; ++i) {
      betas[i] = kEps + (1.0 - 2.0 * kEps) * i / (points - 1);
      values[i] = profile(betas[i]);
    }
  };

  std::vector<double> betas, values;
  scan(1001, betas, values);
  std::size_t best = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
  const double slack = 1e-14 * std::max(1.0, values[best]);
  bool is_unimodal = true;
  for (std::size_t i = 1; i <= best; ++i) {
    if (values[i] + slack < values[i - 1]) is_unimodal = false;
  }
  for (std::size_t i = best + 1; i < values.size(); ++i) {
    if (values[i] > values[i - 1] + slack) is_unimodal = false;
  }
  if (!is_unimodal) {
    scan(10000, betas, values);
    best = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
  }
  const double lo = betas[best == 0 ? 0 : best - 1];
  const double hi = betas[std::min(best + 1, betas.size() - 1)];
  double refined = values[best];
  double beta_star = betas[best];
  if (hi > lo) {
    double found = 0.0;
    const double x = golden_section_max(profile, lo, hi, 1e-12, &found);
    if (found > refined) {
      refined = found;
      beta_star = x;
    }
  }
  if (argmax_beta != nullptr) *argmax_beta = beta_star;
  if (unimodal != nullptr) *unimodal = is_unimodal;
  return clamp_unit(refined);
}

EtaReport eta_kl(const Channel& w, const EtaOptions& options) {
  EtaReport report;
  report.eta_tv = eta_tv(w);
  report.eta_kl_upper = report.eta_tv;
  const Index n = w.input_size();

  if (n == 1) {
    report.eta_kl = report.eta_chi2_sup = 0.0;
    report.eta_kl_upper = 0.0;
    report.method = EtaMethod::LeCamBinaryExact;
    report.kl_certified = true;
    report.argmax_input = Eigen::VectorXd::Ones(1);
    return report;
  }

  if (n == 2) {
    double beta = 0.5;
    bool unimodal = true;
    const double value = lecam_sup(w.row(0), w.row(1), &beta, &unimodal);
    report.eta_kl = report.eta_chi2_sup = value;
    report.eta_kl_upper = value;
    report.method = EtaMethod::LeCamBinaryExact;
    report.kl_certified = true;
    report.lecam_unimodal = unimodal;
    report.argmax_input.resize(2);
    report.argmax_input << beta, 1.0 - beta;
    return report;
  }

  // Candidate inputs: the full simplex grid when affordable, else random
  // interior and boundary-biased draws.
  const double work = static_cast<double>(w.input_size()) * static_cast<double>(w.output_size()) *
                      static_cast<double>(std::min(w.input_size(), w.output_size()));
  const double grid_count = binomial_count(options.grid_mesh + n - 1, n - 1);
  struct Candidate {
    double value;
    Eigen::VectorXd p;
  };
  std::vector<Candidate> pool;
  const auto keep = static_cast<std::size_t>(std::max(1, options.starts));
  auto offer = [&](const Eigen::VectorXd& point) {
    if ((point.array() > 0.0).count() < 2) return;
    const double value = eta_chi2_at(w, Distribution::normalized(point));
    if (pool.size() < keep || value > pool.back().value) {
      pool.push_back({value, point});
      std::stable_sort(pool.begin(), pool.end(),
                       [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
      if (pool.size() > keep) pool.pop_back();
    }
  };

  if (grid_count <= static_cast<double>(options.max_grid_points) &&
      grid_count * work <= options.grid_work_budget) {
    for_each_grid_point(n, options.grid_mesh, offer);
  } else {
    const auto budget = static_cast<Index>(std::max(
        200.0, std::min(static_cast<double>(options.max_grid_points), options.grid_work_budget / work)));
    Rng rng(split_seed(options.seed, 0));
    offer(Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
    for (Index k = 0; k < budget; ++k) offer(sample_dirichlet(n, k % 2 == 0 ? 1.0 : 0.1, rng));
  }

  report.method = EtaMethod::GridLowerBound;
  double best = pool.empty() ? 0.0 : pool.front().value;
  report.argmax_input = pool.empty() ? Eigen::VectorXd::Constant(n, 1.0 / n) : pool.front().p;
  for (const Candidate& start : pool) {
    const AscentResult ascent = ascend(w, start.p, options);
    if (ascent.value > best) {
      best = ascent.value;
      report.argmax_input = ascent.p;
      report.method = ascent.converged ? EtaMethod::SpectralSup : EtaMethod::GridLowerBound;
    }
  }
  // Re-evaluate serially at the reported maximizer.
  best = eta_chi2_at(w, Distribution::normalized(report.argmax_input));
  report.eta_kl = report.eta_chi2_sup = best;
  report.kl_certified = best >= report.eta_tv - 1e-12;
  return report;
}

double eta_kl_certified_upper(const Channel& w) {
  if (w.input_size() <= 2) return eta_kl(w).eta_kl;
  return eta_tv(w);
}

KlFixedInputBounds eta_kl_upper_bounds(const Channel& w, const Distribution& q) {
  KlFixedInputBounds bounds;
  bounds.lower = eta_chi2_at(w, q);
  const double min_mass = q.min_mass();
  if (min_mass > 0.0) bounds.upper = std::min(1.0, bounds.lower / min_mass);
  return bounds;
}

bool is_contractive(const Channel& w, const Distribution& p) {
  if (p.size() != w.input_size()) throw Error(kModule, "input distribution size does not match channel");
  const Index nx = w.input_size();
  const Index ny = w.output_size();
  std::vector<Index> parent(nx + ny);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Index a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  std::vector<bool> present(nx + ny, false);
  for (Index x = 0; x < nx; ++x) {
    if (p[x] <= 0.0) continue;
    present[x] = true;
    for (Index y = 0; y < ny; ++y) {
      if (w(x, y) <= 0.0) continue;
      present[nx + y] = true;
      parent[find(x)] = find(nx + y);
    }
  }
  Index root = -1;
  for (Index node = 0; node < nx + ny; ++node) {
    if (!present[node]) continue;
    const Index r = find(node);
    if (root == -1) {
      root = r;
    } else if (r != root) {
      return false;
    }
  }
  return true;
}

double eta_f_ratio_oracle(const Channel& w, const DivergenceKind& kind, const Distribution& q,
                          int trials, std::uint64_t seed) {
  if (q.size() != w.input_size()) throw Error(kModule, "reference distribution size does not match channel");
  if (q.is_point_mass()) throw Error(kModule, "reference distribution is a point mass");
  const Eigen::MatrixXd& m = w.matrix();
  const Eigen::VectorXd wq = m.transpose() * q.probs();

  // Divergences other than TV are infinite off supp(q); sample on it.
  std::vector<Index> coords;
  for (Index x = 0; x < q.size(); ++x) {
    if (kind.tag == DivergenceKind::Tag::TV || q[x] > 0.0) coords.push_back(x);
  }
  const auto dim = static_cast<Index>(coords.size());
  auto embed = [&](const Eigen::VectorXd& local) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(q.size());
    for (Index k = 0; k < dim; ++k) full[coords[k]] = local[k];
    return full;
  };
  // Both divergences are taken from the same difference vector so that the
  // ratio stays honest when P is very close to q.
  // Rounding leaves sum(d) ~ 1e-16, which is not small next to a KL of
  // 1e-14 once the linear term is subtracted; remove it along q.
  auto ratio = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd d = p - q.probs();
    d -= d.sum() * q.probs();
    const double below = divergence_from_difference(kind, q.probs(), d);
    if (!(below > 1e-14) || !std::isfinite(below)) return 0.0;
    const double above = divergence_from_difference(kind, wq, m.transpose() * d);
    if (!std::isfinite(above)) return 0.0;
    return above / below;
  };

  Rng rng(split_seed(seed, 0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd local_q(dim);
  for (Index k = 0; k < dim; ++k) local_q[k] = q[coords[k]];

  constexpr std::size_t kRefine = 5;
  struct Sample {
    double value;
    Eigen::VectorXd p;
  };
  std::vector<Sample> top;
  Sample best_local{-1.0, Eigen::VectorXd()};  // p holds the direction r
  auto offer = [&](const Eigen::VectorXd& local) {
    const Eigen::VectorXd p = embed(local);
    const double value = ratio(p);
    if (top.size() < kRefine || value > top.back().value) {
      top.push_back({value, local});
      std::stable_sort(top.begin(), top.end(), [](const Sample& a, const Sample& b) { return a.value > b.value; });
      if (top.size() > kRefine) top.pop_back();
    }
  };

  for (int t = 0; t < trials; ++t) {
    switch (t % 5) {
      case 0:
      case 1:
        offer(sample_dirichlet(dim, 1.0, rng));
        break;
      case 2:
      case 3:
        offer(sample_dirichlet(dim, 0.1, rng));
        break;
      default: {
        // Small perturbations of q, where the ratio tends to its chi^2 limit.
        const double eps = std::pow(10.0, -3.0 + 2.5 * unit(rng));
        const Eigen::VectorXd r = sample_dirichlet(dim, 1.0, rng);
        const Eigen::VectorXd p = (1.0 - eps) * local_q + eps * r;
        offer(p);
        const double value = ratio(embed(p));
        if (value > best_local.value) best_local = {value, r};
        break;
      }
    }
  }

  double best = top.empty() ? 0.0 : top.front().value;
  NelderMeadOptions nm;
  nm.max_evaluations = 400 * static_cast<int>(dim);
  nm.initial_step = 0.1;
  for (const Sample& s : top) {
    const Eigen::VectorXd z0 = s.p.array().max(1e-300).log().matrix();
    const auto objective = [&](const Eigen::VectorXd& z) { return -ratio(embed(softmax(z))); };
    const NelderMeadResult r = nelder_mead(objective, z0, nm);
    best = std::max(best, -r.value);
  }
  // Near q only the direction matters; search it at a fixed small step.
  if (best_local.p.size() > 0) {
    constexpr double kEps = 1e-4;
    const Eigen::VectorXd z0 = best_local.p.array().max(1e-300).log().matrix();
    const auto objective = [&](const Eigen::VectorXd& z) {
      return -ratio(embed((1.0 - kEps) * local_q + kEps * softmax(z)));
    };
    best = std::max(best, -nelder_mead(objective, z0, nm).value);
  }
  return best;
}

HellingerSandwich hellinger_sandwich_check(const Channel& w) {
  if (w.input_size() != 2) throw Error(kModule, "Hellinger sandwich needs a binary-input channel");
  HellingerSandwich s;
  const Distribution p = w.row(0);
  const Distribution q = w.row(1);
  s.hellinger_sq = divergence(DivergenceKind::hellinger_sq(), p, q);
  s.eta = lecam_sup(p, q);
  s.lower = s.hellinger_sq / 2.0;
  const double affinity = 1.0 - s.hellinger_sq / 2.0;
  s.upper = 1.0 - affinity * affinity;
  s.literal_upper = s.hellinger_sq - s.hellinger_sq * s.hellinger_sq / 2.0;
  s.literal_upper_holds = s.eta <= s.literal_upper + 1e-9;
  const double h2 = s.hellinger_sq / 2.0;
  s.normalized_upper = h2 - h2 * h2 / 2.0;
  s.normalized_upper_holds = s.eta <= s.normalized_upper + 1e-9;
  if (s.eta < s.lower - 1e-9 || s.eta > s.upper + 1e-9) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "Hellinger sandwich violated: " << s.lower << " <= " << s.eta << " <= " << s.upper;
    throw Error(kModule, msg.str());
  }
  return s;
}

}  // namespace sdpi
