#include "qtcap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qtcap {

namespace {

// Nodes and weights of the 15-point Kronrod extension of the 7-point Gauss
// rule (QUADPACK dqk15). Even entries of xgk are the Gauss nodes.
constexpr double xgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double wgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Segment {
  double a, b;
  double value;
  double error;
};

}  // namespace

IntegrationResult gauss_kronrod_15(const std::function<double(double)>& f,
                                   double a, double b) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double uflow = std::numeric_limits<double>::min();

  const double center = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double dhlgth = std::abs(hlgth);

  const double fc = f(center);
  double resg = fc * wg[3];
  double resk = fc * wgk[7];
  double resabs = std::abs(resk);
  double fv1[7], fv2[7];

  for (int j = 0; j < 7; ++j) {
    const double absc = hlgth * xgk[j];
    fv1[j] = f(center - absc);
    fv2[j] = f(center + absc);
    const double fsum = fv1[j] + fv2[j];
    if (j % 2 == 1) resg += wg[j / 2] * fsum;  // xgk[1],xgk[3],xgk[5] are Gauss nodes
    resk += wgk[j] * fsum;
    resabs += wgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
  }

  const double reskh = resk * 0.5;
  double resasc = wgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += wgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

  IntegrationResult r;
  r.value = resk * hlgth;
  resabs *= dhlgth;
  resasc *= dhlgth;
  double err = std::abs((resk - resg) * hlgth);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > uflow / (50.0 * eps)) err = std::max(eps * 50.0 * resabs, err);
  r.abs_error = err;
  r.evaluations = 15;
  r.converged = true;
  return r;
}

IntegrationResult integrate_adaptive(const std::function<double(double)>& f,
                                     double a, double b,
                                     double rel_tol, double abs_tol,
                                     int max_intervals,
                                     const std::vector<double>& breakpoints) {
  IntegrationResult out;
  if (!(a < b)) return out;  // empty or inverted range integrates to zero

  std::vector<double> knots;
  knots.push_back(a);
  for (double x : breakpoints)
    if (x > a && x < b) knots.push_back(x);
  knots.push_back(b);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  std::vector<Segment> segs;
  for (size_t i = 0; i + 1 < knots.size(); ++i) {
    IntegrationResult g = gauss_kronrod_15(f, knots[i], knots[i + 1]);
    segs.push_back({knots[i], knots[i + 1], g.value, g.abs_error});
    out.evaluations += g.evaluations;
  }

  const double eps = std::numeric_limits<double>::epsilon();
  while (true) {
    double total = 0.0, err = 0.0;
    for (const Segment& s : segs) {
      total += s.value;
      err += s.error;
    }
    if (err <= std::max(abs_tol, rel_tol * std::abs(total))) {
      out.value = total;
      out.abs_error = err;
      out.converged = true;
      return out;
    }
    if ((int)segs.size() >= max_intervals) {
      out.value = total;
      out.abs_error = err;
      out.converged = false;
      return out;
    }

    // refine the interval with the largest error that is still splittable
    size_t worst = segs.size();
    double worst_err = 0.0;
    for (size_t i = 0; i < segs.size(); ++i) {
      const Segment& s = segs[i];
      const double mid = 0.5 * (s.a + s.b);
      if (mid <= s.a || mid >= s.b) continue;  // width at rounding floor
      if (s.error > worst_err) {
        worst_err = s.error;
        worst = i;
      }
    }
    if (worst == segs.size()) {  // nothing splittable left
      out.value = total;
      out.abs_error = err;
      out.converged = err <= std::max(abs_tol, rel_tol * std::abs(total)) ||
                      err <= 100.0 * eps * std::abs(total);
      return out;
    }

    const Segment s = segs[worst];
    const double mid = 0.5 * (s.a + s.b);
    IntegrationResult left = gauss_kronrod_15(f, s.a, mid);
    IntegrationResult right = gauss_kronrod_15(f, mid, s.b);
    out.evaluations += left.evaluations + right.evaluations;
    segs[worst] = {s.a, mid, left.value, left.abs_error};
    segs.push_back({mid, s.b, right.value, right.abs_error});
  }
}

}  // namespace qtcap
