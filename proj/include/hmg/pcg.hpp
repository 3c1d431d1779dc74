#ifndef HMG_PCG_HPP
#define HMG_PCG_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hmg/dense.hpp"
#include "hmg/error.hpp"
#include "hmg/symmetric_eigen.hpp"

namespace hmg
{

/// y = A x for vectors of a fixed length.
using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

enum class SolveStatus
{
  converged,
  diverged,      // residual grew past the divergence threshold, or breakdown
  max_iter,      // iteration cap reached without convergence
};

inline std::string_view to_string(SolveStatus s)
{
  switch (s)
  {
    case SolveStatus::converged: return "converged";
    case SolveStatus::diverged: return "diverged";
    case SolveStatus::max_iter: return "max-iter";
  }
  return "?";
}

struct SolveReport
{
  int iterations = 0;
  bool converged = false;
  SolveStatus status = SolveStatus::max_iter;
  std::vector<double> residual_history;  // ||r_k||_2, entry 0 is the initial residual
  long long fine_matvecs = 0;
  double cost_model_flops = 0.0;
  double wall_time = 0.0;
  std::string note;
};

struct IterationControl
{
  double rel_tol = 1e-8;
  int max_iter = 200;
  double divergence_factor = 10.0;
};

/// Preconditioned conjugate gradients. `precond` may be empty (identity). The returned
/// report counts one operator application per iteration in `fine_matvecs` (plus one for
/// the initial residual). Throws Errc::breakdown when (p, Ap) <= 0.
inline SolveReport pcg(const LinearMap &op, const LinearMap &precond, std::span<const double> f,
                       std::span<double> u, const IterationControl &ctl = {})
{
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = f.size();
  require(u.size() == n, Errc::shape_mismatch, "pcg vector size mismatch");
  SolveReport rep;
  std::vector<double> r(n), z(n), p(n), h(n);
  op(u, h);
  rep.fine_matvecs = 1;
  for (std::size_t i = 0; i < n; ++i)
  {
    r[i] = f[i] - h[i];
  }
  const double r0 = norm2(r);
  rep.residual_history.push_back(r0);
  if (r0 == 0.0)
  {
    rep.converged = true;
    rep.status = SolveStatus::converged;
    return rep;
  }
  auto apply_m = [&](std::span<const double> in, std::span<double> out)
  {
    if (precond)
    {
      precond(in, out);
    }
    else
    {
      std::copy(in.begin(), in.end(), out.begin());
    }
  };
  apply_m(r, z);
  p = z;
  double rho_r = dot(z, r);
  for (int k = 1; k <= ctl.max_iter; ++k)
  {
    op(p, h);
    ++rep.fine_matvecs;
    const double ph = dot(p, h);
    if (!(ph > 0.0))
    {
      throw Error(Errc::breakdown,
                  "(p, Ap) = " + std::to_string(ph) + " at iteration " + std::to_string(k));
    }
    const double alpha = rho_r / ph;
    axpy(alpha, p, u);
    axpy(-alpha, h, r);
    const double rn = norm2(r);
    rep.residual_history.push_back(rn);
    rep.iterations = k;
    if (rn <= ctl.rel_tol * r0)
    {
      rep.converged = true;
      rep.status = SolveStatus::converged;
      break;
    }
    if (!(rn <= ctl.divergence_factor * r0))
    {
      rep.status = SolveStatus::diverged;
      break;
    }
    apply_m(r, z);
    const double rho_new = dot(z, r);
    const double beta = rho_new / rho_r;
    rho_r = rho_new;
    for (std::size_t i = 0; i < n; ++i)
    {
      p[i] = z[i] + beta * p[i];
    }
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

/// Deterministic uniform samples in [-1, 1) from a 64-bit Mersenne twister. The mapping
/// from engine output is written out so results do not depend on the standard library's
/// distribution implementation.
inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed)
{
  std::mt19937_64 gen(seed);
  std::vector<double> v(n);
  for (auto &x : v)
  {
    x = 2.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53 - 1.0;
  }
  return v;
}

/// Largest Ritz value of D^{-1/2} A D^{-1/2} after `iters` Lanczos steps from a random
/// start vector. Entries with mask[i] != 0 are excluded from the Krylov space (identity
/// boundary rows).
inline double estimate_lambda_max(const LinearMap &op, std::span<const double> diag,
                                  std::span<const std::uint8_t> mask = {}, int iters = 10,
                                  std::uint64_t seed = 42)
{
  const std::size_t n = diag.size();
  std::vector<double> dinv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    require(diag[i] > 0.0, Errc::configuration, "diagonal must be positive");
    dinv_sqrt[i] = 1.0 / std::sqrt(diag[i]);
  }
  auto masked = [&](std::size_t i) { return !mask.empty() && mask[i]; };
  std::vector<double> v = random_vector(n, seed);
  for (std::size_t i = 0; i < n; ++i)
  {
    if (masked(i))
    {
      v[i] = 0.0;
    }
  }
  const double nv = norm2(v);
  require(nv > 0.0, Errc::seed, "Lanczos start vector is zero");
  for (auto &x : v)
  {
    x /= nv;
  }
  std::vector<double> v_prev(n, 0.0), w(n), tmp(n);
  std::vector<double> alpha, beta;
  double beta_prev = 0.0;
  for (int j = 0; j < iters; ++j)
  {
    for (std::size_t i = 0; i < n; ++i)
    {
      tmp[i] = dinv_sqrt[i] * v[i];
    }
    op(tmp, w);
    for (std::size_t i = 0; i < n; ++i)
    {
      w[i] = masked(i) ? 0.0 : dinv_sqrt[i] * w[i];
    }
    const double a = dot(w, v);
    alpha.push_back(a);
    for (std::size_t i = 0; i < n; ++i)
    {
      w[i] -= a * v[i] + beta_prev * v_prev[i];
    }
    const double b = norm2(w);
    if (b <= 1e-12 * std::max(std::abs(a), 1e-300) || j + 1 == iters)
    {
      break;
    }
    beta.push_back(b);
    beta_prev = b;
    v_prev.swap(v);
    for (std::size_t i = 0; i < n; ++i)
    {
      v[i] = w[i] / b;
    }
  }
  const std::size_t k = alpha.size();
  Matrix t(k, k);
  for (std::size_t i = 0; i < k; ++i)
  {
    t(i, i) = alpha[i];
    if (i + 1 < k)
    {
      t(i, i + 1) = beta[i];
      t(i + 1, i) = beta[i];
    }
  }
  return dense_symmetric_eig(t).values.back();
}

}  // namespace hmg

#endif  // HMG_PCG_HPP
