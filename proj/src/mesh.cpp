#include "motslab/mesh.hpp"

#include <map>
#include <mutex>
#include <tuple>

namespace motslab::surface {

namespace detail {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

void legendre_table(int lmax, double x, std::vector<double>& q) {
  const int size = (lmax + 1) * (lmax + 2) / 2;
  q.assign(size, 0.0);
  auto at = [lmax](int l, int m) { return l * (l + 1) / 2 + m; };
  const double sx = std::sqrt(std::max(0.0, 1.0 - x * x));
  q[at(0, 0)] = std::sqrt(1.0 / (4.0 * kPi));
  for (int m = 1; m <= lmax; ++m)
    q[at(m, m)] = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * sx * q[at(m - 1, m - 1)];
  for (int m = 0; m < lmax; ++m)
    q[at(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * q[at(m, m)];
  for (int m = 0; m <= lmax; ++m) {
    for (int l = m + 2; l <= lmax; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      const double b = std::sqrt(((l - 1.0) * (l - 1.0) - double(m) * m) /
                                 (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      q[at(l, m)] = a * (x * q[at(l - 1, m)] - b * q[at(l - 2, m)]);
    }
  }
}

void legendre_theta_deriv_table(int lmax, double x, double sin_theta,
                                const std::vector<double>& q,
                                std::vector<double>& dq) {
  dq.assign(q.size(), 0.0);
  auto at = [lmax](int l, int m) { return l * (l + 1) / 2 + m; };
  for (int m = 0; m <= lmax; ++m) {
    for (int l = m; l <= lmax; ++l) {
      // sin(theta) dQ_lm/dtheta = l x Q_lm - eps_lm Q_{l-1,m},
      // eps_lm = sqrt((l^2 - m^2)(2l+1)/(2l-1)).
      double t = l * x * q[at(l, m)];
      if (l > m) {
        const double eps = std::sqrt((double(l) * l - double(m) * m) *
                                     (2.0 * l + 1.0) / (2.0 * l - 1.0));
        t -= eps * q[at(l - 1, m)];
      }
      dq[at(l, m)] = t / sin_theta;
    }
  }
}

Eigen::MatrixXd fourier_diff_matrix(int n, double p) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  const double scale = 2.0 * kPi / p;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      const int dj = j - k;
      const double sign = (dj % 2 == 0) ? 1.0 : -1.0;
      if (n % 2 == 0) {
        d(j, k) = scale * 0.5 * sign / std::tan(kPi * dj / n);
      } else {
        d(j, k) = scale * 0.5 * sign / std::sin(kPi * dj / n);
      }
    }
  }
  return d;
}

}  // namespace detail

namespace {

// Real spherical-harmonic basis bookkeeping: for m = 0 one function per l,
// for m > 0 a cos and a sin branch.
struct SphBasis {
  int lmax, mmax;
  struct Entry {
    int l, m;
    bool sine;
  };
  std::vector<Entry> entries;
  explicit SphBasis(int lmax_, int mmax_) : lmax(lmax_), mmax(mmax_) {
    for (int m = 0; m <= mmax; ++m)
      for (int l = std::max(m, 0); l <= lmax; ++l) {
        if (m == 0) {
          entries.push_back({l, 0, false});
        } else {
          entries.push_back({l, m, false});
          entries.push_back({l, m, true});
        }
      }
  }
  int size() const { return int(entries.size()); }
};

void build_sphere(SurfaceMesh& mesh) {
  const int nt = mesh.n1, np = mesh.n2, n = nt * np;
  std::vector<double> gx, gw;
  detail::gauss_legendre(nt, gx, gw);

  mesh.u1.resize(n);
  mesh.u2.resize(n);
  mesh.quad_weights.resize(n);
  mesh.sin_theta.resize(n);
  mesh.cos_theta.resize(n);
  mesh.nhat = make_vec_field(n);
  mesh.theta_hat = make_vec_field(n);
  mesh.phi_hat = make_vec_field(n);

  const double dphi = 2.0 * kPi / np;
  for (int i = 0; i < nt; ++i) {
    // ascending x = cos(theta) gives descending theta; store theta ascending
    const double x = gx[nt - 1 - i];
    const double theta = std::acos(x);
    const double st = std::sqrt(1.0 - x * x);
    for (int j = 0; j < np; ++j) {
      const Eigen::Index k = Eigen::Index(i) * np + j;
      const double phi = j * dphi;
      mesh.u1[k] = theta;
      mesh.u2[k] = phi;
      mesh.quad_weights[k] = gw[nt - 1 - i] * dphi;
      const double cp = std::cos(phi), sp = std::sin(phi);
      mesh.sin_theta[k] = st;
      mesh.cos_theta[k] = x;
      vec_set(mesh.nhat, k, Vec3(st * cp, st * sp, x));
      vec_set(mesh.theta_hat, k, Vec3(x * cp, x * sp, -st));
      vec_set(mesh.phi_hat, k, Vec3(-sp, cp, 0.0));
    }
  }

  // Band: nt Gauss-Legendre points integrate the analysis inner products
  // exactly for l <= nt - 1; longitude resolves |m| <= np/2 - 1.
  const int lmax = nt - 1;
  const int mmax = std::min(lmax, np / 2 - 1);
  mesh.band_limit = lmax;
  SphBasis basis(lmax, mmax);
  const int ns = basis.size();

  Eigen::MatrixXd value(n, ns), dtheta(n, ns);
  std::vector<double> q, dq;
  for (int i = 0; i < nt; ++i) {
    const Eigen::Index k0 = Eigen::Index(i) * np;
    const double x = mesh.cos_theta[k0];
    const double st = mesh.sin_theta[k0];
    detail::legendre_table(lmax, x, q);
    detail::legendre_theta_deriv_table(lmax, x, st, q, dq);
    auto at = [lmax](int l, int m) { return l * (l + 1) / 2 + m; };
    for (int j = 0; j < np; ++j) {
      const Eigen::Index k = k0 + j;
      const double phi = mesh.u2[k];
      for (int b = 0; b < ns; ++b) {
        const auto& e = basis.entries[b];
        const double ang =
            e.m == 0 ? 1.0
                     : std::sqrt(2.0) * (e.sine ? std::sin(e.m * phi)
                                               : std::cos(e.m * phi));
        value(k, b) = q[at(e.l, e.m)] * ang;
        dtheta(k, b) = dq[at(e.l, e.m)] * ang;
      }
    }
  }

  mesh.synthesis = value;
  mesh.analysis = value.transpose() * mesh.quad_weights.matrix().asDiagonal();
  mesh.spectral_dim = ns;

  // d/dtheta through the harmonic transform; d/dphi ring-by-ring Fourier.
  Eigen::MatrixXd d_theta = dtheta * mesh.analysis;
  Eigen::MatrixXd d_phi = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd df = detail::fourier_diff_matrix(np, 2.0 * kPi);
  for (int i = 0; i < nt; ++i)
    d_phi.block(Eigen::Index(i) * np, Eigen::Index(i) * np, np, np) = df;

  mesh.frame_dim = 3;
  for (int a = 0; a < 3; ++a) {
    Eigen::VectorXd jt(n), jp(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      jt[k] = mesh.theta_hat[a][k];
      jp[k] = mesh.phi_hat[a][k] / mesh.sin_theta[k];
    }
    mesh.dframe[a] = jt.asDiagonal() * d_theta + jp.asDiagonal() * d_phi;
  }
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b)
      mesh.dframe2[sym_index(a, b)] =
          0.5 * (mesh.dframe[a] * mesh.dframe[b] +
                 mesh.dframe[b] * mesh.dframe[a]);
}

void build_torus(SurfaceMesh& mesh) {
  const int n1 = mesh.n1, n2 = mesh.n2, n = n1 * n2;
  const double p1 = mesh.periods[0], p2 = mesh.periods[1];
  mesh.u1.resize(n);
  mesh.u2.resize(n);
  mesh.quad_weights.resize(n);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      const Eigen::Index k = Eigen::Index(i) * n2 + j;
      mesh.u1[k] = i * p1 / n1;
      mesh.u2[k] = j * p2 / n2;
      mesh.quad_weights[k] = (p1 / n1) * (p2 / n2);
    }

  const Eigen::MatrixXd d1 = detail::fourier_diff_matrix(n1, p1);
  const Eigen::MatrixXd d2 = detail::fourier_diff_matrix(n2, p2);
  Eigen::MatrixXd D1 = Eigen::MatrixXd::Zero(n, n), D2 = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n1; ++i)
    for (int ip = 0; ip < n1; ++ip)
      for (int j = 0; j < n2; ++j)
        D1(Eigen::Index(i) * n2 + j, Eigen::Index(ip) * n2 + j) = d1(i, ip);
  for (int i = 0; i < n1; ++i)
    D2.block(Eigen::Index(i) * n2, Eigen::Index(i) * n2, n2, n2) = d2;

  mesh.frame_dim = 2;
  mesh.band_limit = std::min((n1 - 1) / 2, (n2 - 1) / 2);
  mesh.dframe[0] = D1;
  mesh.dframe[1] = D2;
  mesh.dframe[2] = Eigen::MatrixXd();
  for (int a = 0; a < 2; ++a)
    for (int b = a; b < 2; ++b)
      mesh.dframe2[sym_index(a, b)] =
          0.5 * (mesh.dframe[a] * mesh.dframe[b] +
                 mesh.dframe[b] * mesh.dframe[a]);

  // Nyquist-free orthonormal trigonometric products
  auto modes_1d = [](int nn, double p, const Field& u) {
    std::vector<Field> fns;
    fns.push_back(Field::Constant(u.size(), 1.0 / std::sqrt(p)));
    const int kmax = (nn - 1) / 2;
    for (int k = 1; k <= kmax; ++k) {
      const Field arg = 2.0 * kPi * k / p * u;
      fns.push_back(std::sqrt(2.0 / p) * arg.cos());
      fns.push_back(std::sqrt(2.0 / p) * arg.sin());
    }
    return fns;
  };
  const auto f1 = modes_1d(n1, p1, mesh.u1);
  const auto f2 = modes_1d(n2, p2, mesh.u2);
  mesh.spectral_dim = int(f1.size() * f2.size());
  mesh.synthesis.resize(n, mesh.spectral_dim);
  int col = 0;
  for (const auto& a : f1)
    for (const auto& b : f2) mesh.synthesis.col(col++) = (a * b).matrix();
  mesh.analysis =
      mesh.synthesis.transpose() * mesh.quad_weights.matrix().asDiagonal();
}

}  // namespace

Field SurfaceMesh::random_band_limited(std::mt19937_64& rng, int lmax,
                                       double amplitude) const {
  std::normal_distribution<double> dist(0.0, 1.0);
  if (topology == Topology::sphere) {
    lmax = std::min(lmax, band_limit);
    SphBasis basis(band_limit, std::min(band_limit, n2 / 2 - 1));
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(basis.size());
    for (int b = 0; b < basis.size(); ++b) {
      const int l = basis.entries[b].l;
      if (l <= lmax && l > 0)
        coeffs[b] = amplitude * dist(rng) / (1.0 + double(l) * l);
    }
    return (synthesis * coeffs).array();
  }
  // torus: low-wavenumber trigonometric polynomial
  Field f = Field::Zero(num_nodes);
  lmax = std::min(lmax, band_limit);
  for (int k1 = 0; k1 <= lmax; ++k1) {
    for (int k2 = -lmax; k2 <= lmax; ++k2) {
      if (k1 == 0 && k2 <= 0) continue;
      const double sc = amplitude / (1.0 + k1 * k1 + k2 * k2);
      const double ac = sc * dist(rng), as = sc * dist(rng);
      const Field arg = 2.0 * kPi * (k1 * u1 / periods[0] + k2 * u2 / periods[1]);
      f += ac * arg.cos() + as * arg.sin();
    }
  }
  return f;
}

Field SurfaceMesh::coord_partial(int which, const Field& f) const {
  if (topology == Topology::torus) return apply_dframe(which, f);
  // d/dtheta = theta_hat . Dframe, d/dphi = sin(theta) phi_hat . Dframe
  Field out = Field::Zero(num_nodes);
  for (int a = 0; a < 3; ++a) {
    const Field df = apply_dframe(a, f);
    if (which == 0)
      out += theta_hat[a] * df;
    else
      out += sin_theta * phi_hat[a] * df;
  }
  return out;
}

std::shared_ptr<const SurfaceMesh> build_mesh(Topology topology, int n1, int n2,
                                              double period1, double period2) {
  if (topology == Topology::sphere && (n1 < 8 || n2 < 16))
    throw std::invalid_argument("sphere mesh resolution below minimum 8x16");
  if (topology == Topology::torus && (n1 < 8 || n2 < 8))
    throw std::invalid_argument("torus mesh resolution below minimum 8x8");
  if (topology == Topology::torus && (period1 <= 0.0 || period2 <= 0.0))
    throw std::invalid_argument("torus periods must be positive");

  using Key = std::tuple<int, int, int, double, double>;
  static std::map<Key, std::shared_ptr<const SurfaceMesh>> cache;
  const Key key{int(topology), n1, n2,
                topology == Topology::torus ? period1 : 0.0,
                topology == Topology::torus ? period2 : 0.0};
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  auto mesh = std::make_shared<SurfaceMesh>();
  mesh->topology = topology;
  mesh->n1 = n1;
  mesh->n2 = n2;
  mesh->num_nodes = n1 * n2;
  mesh->periods[0] = period1;
  mesh->periods[1] = period2;
  if (topology == Topology::sphere)
    build_sphere(*mesh);
  else
    build_torus(*mesh);
  cache[key] = mesh;
  return mesh;
}

}  // namespace motslab::surface
