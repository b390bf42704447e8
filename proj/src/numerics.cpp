#include "maxlrt/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <vector>

namespace maxlrt {

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

namespace {

template <std::size_t N>
double horner(const std::array<double, N>& c, double x) {
  double acc = 0;
  for (std::size_t i = N; i-- > 0;) acc = acc * x + c[i];
  return acc;
}

// Wichura (1988), algorithm AS 241, PPND16.
constexpr std::array<double, 8> kA{3.387132872796366608,  133.14166789178437745, 1971.5909503065514427,
                                   13731.693765509461125, 45921.953931549871457, 67265.770927008700853,
                                   33430.575583588128105, 2509.0809287301226727};
constexpr std::array<double, 8> kB{1.0,                   42.313330701600911252, 687.1870074920579083,
                                   5394.1960214247511077, 21213.794301586595867, 39307.89580009271061,
                                   28729.085735721942674, 5226.495278852545925};
constexpr std::array<double, 8> kC{1.42343711074968357734,   4.6303378461565452959,   5.7694972214606914055,
                                   3.64784832476320460504,   1.27045825245236838258,  0.24178072517745061177,
                                   0.0227238449892691845833, 7.7454501427834140764e-4};
constexpr std::array<double, 8> kD{1.0,
                                   2.05319162663775882187,
                                   1.6763848301838038494,
                                   0.68976733498510000455,
                                   0.14810397642748007459,
                                   0.0151986665636164571966,
                                   5.475938084995344946e-4,
                                   1.05075007164441684324e-9};
constexpr std::array<double, 8> kE{6.6579046435011037772,    5.4637849111641143699,
                                   1.7848265399172913358,    0.29656057182850489123,
                                   0.026532189526576123093,  0.0012426609473880784386,
                                   2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr std::array<double, 8> kF{1.0,
                                   0.59983220655588793769,
                                   0.13692988092273580531,
                                   0.0148753612908506148525,
                                   7.868691311456132591e-4,
                                   1.8463183175100546818e-5,
                                   1.4215117583164458887e-7,
                                   2.04426310338993978564e-15};

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner(kA, r) / horner(kB, r);
  }
  double r = std::sqrt(-std::log(q < 0 ? p : 1.0 - p));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = horner(kC, r) / horner(kD, r);
  } else {
    r -= 5.0;
    value = horner(kE, r) / horner(kF, r);
  }
  return q < 0 ? -value : value;
}

double chisq_sf(double x, int df) {
  if (df < 1) throw DomainError("chisq_sf: degrees of freedom must be >= 1");
  if (!(x >= 0.0)) throw DomainError("chisq_sf: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;

  const double half = 0.5 * x;
  if (df % 2 == 0) {
    // exp(-x/2) * sum_{i < df/2} (x/2)^i / i!
    double term = std::exp(-half);
    double sum = term;
    for (int i = 1; i < df / 2; ++i) {
      term *= half / i;
      sum += term;
    }
    return std::min(1.0, sum);
  }
  // 2 Phi_bar(sqrt x) + sqrt(2/pi) exp(-x/2) sum_{i=1}^{(df-1)/2} x^{i-1/2} / (1*3*...*(2i-1))
  const double root = std::sqrt(x);
  double sum = 0;
  double term = root;
  for (int i = 1; i <= (df - 1) / 2; ++i) {
    if (i > 1) term *= x / (2 * i - 1);
    sum += term;
  }
  const double tail = 2.0 * normal_sf(root) + std::sqrt(2.0 / std::numbers::pi) * std::exp(-half) * sum;
  return std::min(1.0, tail);
}

double brownian_sup_sf(double q) {
  if (!(q > 0.0)) throw DomainError("brownian_sup_sf: q must be > 0");
  if (std::isinf(q)) return 0.0;
  constexpr double kTruncate = 1e-12;

  if (q >= 1.0) {
    // Reflection series: 4 sum_{k>=1} (-1)^{k+1} Phi_bar((2k-1) q).
    double sum = 0;
    for (int k = 1;; ++k) {
      const double term = normal_sf((2 * k - 1) * q);
      sum += (k % 2 == 1) ? term : -term;
      if (term < kTruncate) break;
    }
    return std::clamp(4.0 * sum, 0.0, 1.0);
  }

  // 1 - (4/pi) sum_{k>=0} (-1)^k / (2k+1) exp(-pi^2 (2k+1)^2 / (8 q^2)).
  const double scale = std::numbers::pi * std::numbers::pi / (8.0 * q * q);
  double sum = 0;
  for (int k = 0;; ++k) {
    const double odd = 2 * k + 1;
    const double term = std::exp(-scale * odd * odd) / odd;
    sum += (k % 2 == 0) ? term : -term;
    if (term < kTruncate) break;
  }
  return std::clamp(1.0 - 4.0 / std::numbers::pi * sum, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<double, 8> kXgk{0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                     0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                     0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                     0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                     0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                     0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                     0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

double checked(const ScalarFunction& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) throw NumericError("integrate: non-finite integrand value");
  return v;
}

Segment gauss_kronrod(const ScalarFunction& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = checked(f, center);
  double kronrod = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double pair = checked(f, center - dx) + checked(f, center + dx);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

double integrate(const ScalarFunction& f, double a, double b, double tol) {
  if (!(a <= b)) throw DomainError("integrate: requires a <= b");
  if (a == b) return 0.0;
  constexpr int kMaxSegments = 4000;

  std::priority_queue<Segment> heap;
  Segment first = gauss_kronrod(f, a, b);
  double total = first.value;
  double error = first.error;
  heap.push(first);
  while (error > tol) {
    if (static_cast<int>(heap.size()) >= kMaxSegments)
      throw NumericError("integrate: tolerance not reached within subdivision limit");
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) break;  // interval below double resolution
    const Segment left = gauss_kronrod(f, worst.a, mid);
    const Segment right = gauss_kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

double find_root(const ScalarFunction& f, double lo, double hi, double tol) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb)) throw NumericError("find_root: non-finite endpoint value");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) throw BracketError("find_root: no sign change on the bracket");

  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < 200; ++iter) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      // secant / inverse quadratic step
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
    if (!std::isfinite(fb)) throw NumericError("find_root: non-finite function value");
  }
  throw NumericError("find_root: iteration limit reached");
}

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

bool is_correlation_matrix(const Matrix& corr, double tol) {
  if (corr.rows() != corr.cols() || corr.rows() == 0) return false;
  if (!corr.allFinite() || !is_symmetric(corr, tol)) return false;
  if ((corr.diagonal().array() - 1.0).abs().maxCoeff() > tol) return false;
  if (corr.cwiseAbs().maxCoeff() > 1.0 + tol) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(corr, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tol * std::max(1.0, eig.eigenvalues().maxCoeff());
}

Matrix covariance_to_correlation(const Matrix& sigma) {
  const Vector sd = sigma.diagonal().array().sqrt();
  if (!(sigma.diagonal().array() > 0).all()) throw DegenerateDataError("covariance has a non-positive variance");
  Matrix corr = sd.cwiseInverse().asDiagonal() * sigma * sd.cwiseInverse().asDiagonal();
  corr = corr.cwiseMax(-1.0).cwiseMin(1.0);
  corr.diagonal().setOnes();
  return corr;
}

// ---------------------------------------------------------------------------
// Multivariate normal rectangle probabilities
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<int, 24> kPrimes{2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                      41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

// One coordinate of the sequential conditioning: all rows whose last
// nonzero factor column is `column`.
struct Constraint {
  int row;       // original coordinate
  double coef;   // factor entry at the leading column
};

class SeparatedIntegrand {
 public:
  SeparatedIntegrand(Matrix factor, std::vector<std::vector<Constraint>> groups, const Vector& lower,
                     const Vector& upper)
      : factor_(std::move(factor)), groups_(std::move(groups)), lower_(lower), upper_(upper),
        y_(groups_.size(), 0.0) {}

  int dims() const { return static_cast<int>(groups_.size()) - 1; }

  double operator()(const double* w) {
    double prob = 1.0;
    const int r = static_cast<int>(groups_.size());
    for (int j = 0; j < r; ++j) {
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      for (const Constraint& c : groups_[j]) {
        double s = 0;
        for (int l = 0; l < j; ++l) s += factor_(c.row, l) * y_[l];
        double a = (lower_[c.row] - s) / c.coef;
        double b = (upper_[c.row] - s) / c.coef;
        if (c.coef < 0) std::swap(a, b);
        lo = std::max(lo, a);
        hi = std::min(hi, b);
      }
      if (!(hi > lo)) return 0.0;

      // Work in whichever tail keeps the interval mass accurate.
      const bool upper_tail = lo > 0;
      const double pl = upper_tail ? normal_sf(lo) : normal_cdf(lo);
      const double ph = upper_tail ? normal_sf(hi) : normal_cdf(hi);
      const double mass = std::abs(ph - pl);
      if (mass <= 0) return 0.0;
      prob *= mass;
      if (j + 1 < r) {
        constexpr double kTiny = 1e-300;
        double u = pl + w[j] * (ph - pl);
        u = std::clamp(u, kTiny, 1.0 - 1e-16);
        y_[j] = upper_tail ? -normal_quantile(u) : normal_quantile(u);
        y_[j] = std::clamp(y_[j], lo, hi);
      }
    }
    return prob;
  }

 private:
  Matrix factor_;
  std::vector<std::vector<Constraint>> groups_;
  Vector lower_, upper_;
  std::vector<double> y_;
};

}  // namespace

MvnEstimate mvn_rect_prob(const Matrix& corr, const Vector& lower, const Vector& upper, RngStream rng,
                          const MvnOptions& options) {
  const Eigen::Index m = corr.rows();
  if (m == 0 || corr.cols() != m || lower.size() != m || upper.size() != m)
    throw MatrixError("mvn_rect_prob: dimension mismatch");
  for (Eigen::Index i = 0; i < m; ++i)
    if (!(lower[i] < upper[i])) throw DomainError("mvn_rect_prob: requires lower < upper componentwise");
  if (!is_correlation_matrix(corr)) throw MatrixError("mvn_rect_prob: not a valid correlation matrix");

  // Cholesky with full diagonal pivoting on the updated Schur complement, so
  // that dependent coordinates come last and rank deficiency shows up as a
  // tail of negligible pivots.
  Matrix work = corr;
  Eigen::VectorXi perm = Eigen::VectorXi::LinSpaced(m, 0, static_cast<int>(m - 1));
  Matrix lower_factor = Matrix::Zero(m, m);  // rows in pivot order
  int rank = 0;
  double first_pivot = 0;
  for (Eigen::Index k = 0; k < m; ++k) {
    Eigen::Index best = k;
    for (Eigen::Index i = k + 1; i < m; ++i)
      if (work(i, i) > work(best, best)) best = i;
    if (best != k) {
      work.row(k).swap(work.row(best));
      work.col(k).swap(work.col(best));
      lower_factor.row(k).swap(lower_factor.row(best));
      std::swap(perm[k], perm[best]);
    }
    const double pivot = work(k, k);
    if (k == 0) first_pivot = pivot;
    if (!(pivot > 1e-10 * first_pivot)) break;
    const double root = std::sqrt(pivot);
    lower_factor(k, k) = root;
    for (Eigen::Index i = k + 1; i < m; ++i) lower_factor(i, k) = work(i, k) / root;
    for (Eigen::Index i = k + 1; i < m; ++i)
      for (Eigen::Index j = k + 1; j <= i; ++j) {
        work(i, j) -= lower_factor(i, k) * lower_factor(j, k);
        work(j, i) = work(i, j);
      }
    ++rank;
  }

  // factor(i, j): coefficient of y_j in coordinate i, i.e. Z = factor * y.
  Matrix factor = Matrix::Zero(m, rank);
  for (Eigen::Index k = 0; k < m; ++k)
    for (int j = 0; j < rank && j <= k; ++j) factor(perm[k], j) = lower_factor(k, j);

  if ((factor * factor.transpose() - corr).cwiseAbs().maxCoeff() > 1e-8)
    throw MatrixError("mvn_rect_prob: correlation matrix is not positive semidefinite");

  std::vector<std::vector<Constraint>> groups(rank);
  for (Eigen::Index k = 0; k < m; ++k) {
    const int row = perm[k];
    int lead = -1;
    for (int j = std::min<int>(static_cast<int>(k), rank - 1); j >= 0; --j) {
      if (std::abs(factor(row, j)) > 1e-10) {
        lead = j;
        break;
      }
    }
    if (lead < 0) {
      // Zero-variance coordinate: the constraint holds surely or never.
      if (!(lower[row] <= 0 && 0 <= upper[row])) return {0.0, 0.0, 0};
      continue;
    }
    groups[lead].push_back({row, factor(row, lead)});
  }

  SeparatedIntegrand integrand(std::move(factor), std::move(groups), lower, upper);
  const int dims = integrand.dims();
  if (dims == 0) return {std::clamp(integrand(nullptr), 0.0, 1.0), 0.0, 1};
  if (dims > static_cast<int>(kPrimes.size())) throw DomainError("mvn_rect_prob: dimension too large");

  // Randomly shifted Richtmyer lattice with baker's transform and antithetics.
  std::vector<double> generator(dims);
  for (int j = 0; j < dims; ++j) {
    const double root = std::sqrt(static_cast<double>(kPrimes[j]));
    generator[j] = root - std::floor(root);
  }
  const int shifts = std::max(2, options.n_shifts);
  std::vector<std::vector<double>> shift(shifts, std::vector<double>(dims));
  for (auto& s : shift)
    for (double& v : s) v = rng.uniform();

  std::vector<double> sums(shifts, 0.0);
  std::vector<double> point(dims), mirror(dims);
  long per_shift = 0;
  long batch = 64;
  MvnEstimate est;
  while (true) {
    for (int s = 0; s < shifts; ++s) {
      for (long i = per_shift + 1; i <= per_shift + batch; ++i) {
        for (int j = 0; j < dims; ++j) {
          double x = static_cast<double>(i) * generator[j] + shift[s][j];
          x -= std::floor(x);
          point[j] = std::abs(2.0 * x - 1.0);
          mirror[j] = 1.0 - point[j];
        }
        sums[s] += 0.5 * (integrand(point.data()) + integrand(mirror.data()));
      }
    }
    per_shift += batch;

    double mean = 0;
    for (double v : sums) mean += v / per_shift;
    mean /= shifts;
    double var = 0;
    for (double v : sums) var += (v / per_shift - mean) * (v / per_shift - mean);
    var /= static_cast<double>(shifts) * (shifts - 1);

    est.probability = std::clamp(mean, 0.0, 1.0);
    est.std_error = std::sqrt(var);
    est.n_points = 2L * shifts * per_shift;
    if (est.std_error <= options.abs_tol) break;
    if (2L * shifts * (per_shift + per_shift) > options.max_points) break;
    batch = per_shift;
  }
  return est;
}

}  // namespace maxlrt
