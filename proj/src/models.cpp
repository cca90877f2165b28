#include "wbcol/models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wbcol {

namespace {
constexpr double kPi = std::numbers::pi;
const double kExpNorm = std::exp(1.0) - std::exp(-1.0);
}  // namespace

Bathymetry bathymetry_from_string(const std::string& id) {
  if (id == "flat") return Bathymetry::flat;
  if (id == "linear" || id == "identity") return Bathymetry::linear;
  if (id == "bump") return Bathymetry::bump;
  if (id == "exp_cosine") return Bathymetry::exp_cosine;
  throw std::invalid_argument("unknown bathymetry: " + id);
}

std::string to_string(Bathymetry b) {
  switch (b) {
    case Bathymetry::flat: return "flat";
    case Bathymetry::linear: return "linear";
    case Bathymetry::bump: return "bump";
    case Bathymetry::exp_cosine: return "exp_cosine";
  }
  return "?";
}

double geometry_value(Bathymetry b, double x) {
  switch (b) {
    case Bathymetry::flat: return 0.0;
    case Bathymetry::linear: return x;
    case Bathymetry::bump:
      if (x >= 1.3 && x <= 1.7) return -0.25 * (1.0 + std::cos(5.0 * kPi * (x + 0.5)));
      return 0.0;
    case Bathymetry::exp_cosine:
      return 1.0 - 0.5 * (std::exp(std::cos(4.0 * kPi * x)) - std::exp(-1.0)) / kExpNorm;
  }
  return 0.0;
}

double geometry_dx(Bathymetry b, double x) {
  switch (b) {
    case Bathymetry::flat: return 0.0;
    case Bathymetry::linear: return 1.0;
    case Bathymetry::bump:
      if (x >= 1.3 && x <= 1.7) return 1.25 * kPi * std::sin(5.0 * kPi * (x + 0.5));
      return 0.0;
    case Bathymetry::exp_cosine:
      return 2.0 * kPi * std::sin(4.0 * kPi * x) * std::exp(std::cos(4.0 * kPi * x)) / kExpNorm;
  }
  return 0.0;
}

double geometry_dxx(Bathymetry b, double x) {
  switch (b) {
    case Bathymetry::flat: return 0.0;
    case Bathymetry::linear: return 0.0;
    case Bathymetry::bump:
      if (x >= 1.3 && x <= 1.7)
        return 6.25 * kPi * kPi * std::cos(5.0 * kPi * (x + 0.5));
      return 0.0;
    case Bathymetry::exp_cosine: {
      const double c = std::cos(4.0 * kPi * x);
      const double s = std::sin(4.0 * kPi * x);
      return 8.0 * kPi * kPi * (c - s * s) * std::exp(c) / kExpNorm;
    }
  }
  return 0.0;
}

StateVec BalanceLawModel::stationary_rhs(double x, const StateVec& u) const {
  StateVec g = source(u);
  g *= geometry_deriv(x);
  return g;
}

// ---- shallow water -------------------------------------------------------

StateVec ShallowWaterModel::flux(const StateVec& u) const {
  const double h = u[0], q = u[1];
  return {q, q * q / h + 0.5 * g_ * h * h};
}

SmallMat ShallowWaterModel::flux_jacobian(const StateVec& u) const {
  const double h = u[0], q = u[1], vel = q / h;
  SmallMat j(2);
  j(0, 0) = 0.0;
  j(0, 1) = 1.0;
  j(1, 0) = g_ * h - vel * vel;
  j(1, 1) = 2.0 * vel;
  return j;
}

double ShallowWaterModel::spectral_radius(const StateVec& u) const {
  return std::fabs(u[1] / u[0]) + std::sqrt(g_ * u[0]);
}

void ShallowWaterModel::eigen_decompose(const StateVec& u, std::array<double, 3>& lambda,
                                        SmallMat& rv) const {
  const double vel = u[1] / u[0];
  const double c = std::sqrt(g_ * u[0]);
  lambda[0] = vel - c;
  lambda[1] = vel + c;
  rv = SmallMat(2);
  rv(0, 0) = 1.0;
  rv(1, 0) = vel - c;
  rv(0, 1) = 1.0;
  rv(1, 1) = vel + c;
}

std::optional<StateVec> ShallowWaterModel::critical_slope(double x, const StateVec& u,
                                                          int trend_sign,
                                                          double crest_window) const {
  // A smooth stationary solution can only pass through criticality at an
  // interior minimum of H; elsewhere the stage system has no admissible
  // solution and the caller must give up on this local problem.
  const double hxx = geometry_deriv2(x);
  const double hx = geometry_deriv(x);
  if (!(hxx > 0.0) || std::fabs(hx) > 2.0 * hxx * crest_window) return std::nullopt;

  const double q = u[1];
  // without an explicit hint the branch follows the flow: a smooth
  // stationary solution crossing criticality over a crest has its depth
  // decreasing in the flow direction
  int branch = trend_sign;
  if (branch == 0) branch = q > 0.0 ? -1 : (q < 0.0 ? 1 : 0);
  if (branch == 0) return std::nullopt;

  const double mag = std::sqrt(std::cbrt(q * q) * hxx / (3.0 * std::cbrt(g_)));
  hits_.fetch_add(1);
  StateVec k(2);
  k[0] = branch > 0 ? mag : -mag;
  k[1] = 0.0;
  return k;
}

StateVec ShallowWaterManningModel::stationary_rhs(double x, const StateVec& u) const {
  StateVec g = ShallowWaterModel::stationary_rhs(x, u);
  g[1] += friction(u);
  return g;
}

// ---- Euler with gravity ---------------------------------------------------

StateVec EulerGravityModel::flux(const StateVec& u) const {
  const double rho = u[0], q = u[1], en = u[2];
  const double vel = q / rho;
  const double p = pressure(u);
  return {q, q * vel + p, vel * (en + p)};
}

SmallMat EulerGravityModel::flux_jacobian(const StateVec& u) const {
  const double rho = u[0], q = u[1], en = u[2];
  const double vel = q / rho;
  const double g1 = gamma_ - 1.0;
  SmallMat j(3);
  j(0, 0) = 0.0;
  j(0, 1) = 1.0;
  j(0, 2) = 0.0;
  j(1, 0) = 0.5 * (gamma_ - 3.0) * vel * vel;
  j(1, 1) = (3.0 - gamma_) * vel;
  j(1, 2) = g1;
  j(2, 0) = g1 * vel * vel * vel - gamma_ * vel * en / rho;
  j(2, 1) = gamma_ * en / rho - 1.5 * g1 * vel * vel;
  j(2, 2) = gamma_ * vel;
  return j;
}

double EulerGravityModel::spectral_radius(const StateVec& u) const {
  return std::fabs(u[1] / u[0]) + sound_speed(u);
}

void EulerGravityModel::eigen_decompose(const StateVec& u, std::array<double, 3>& lambda,
                                        SmallMat& rv) const {
  const double rho = u[0];
  const double vel = u[1] / rho;
  const double c = sound_speed(u);
  const double enthalpy = (u[2] + pressure(u)) / rho;
  lambda[0] = vel - c;
  lambda[1] = vel;
  lambda[2] = vel + c;
  rv = SmallMat(3);
  rv(0, 0) = 1.0;
  rv(1, 0) = vel - c;
  rv(2, 0) = enthalpy - vel * c;
  rv(0, 1) = 1.0;
  rv(1, 1) = vel;
  rv(2, 1) = 0.5 * vel * vel;
  rv(0, 2) = 1.0;
  rv(1, 2) = vel + c;
  rv(2, 2) = enthalpy + vel * c;
}

StateVec EulerGravityModel::reduced_stationary_slope(double x, const StateVec& u) const {
  const double rho = u[0];
  const double vel = u[1] / rho;
  const double c2 = gamma_ * pressure(u) / rho;
  const double d = c2 - vel * vel;
  const double hx = geometry_deriv(x);
  StateVec s(3);
  s[0] = -rho / d * hx;
  s[1] = 0.0;
  s[2] = -rho / (gamma_ - 1.0) * (1.0 + 0.5 * (3.0 - gamma_) * vel * vel / d) * hx;
  return s;
}

// ---- factories ------------------------------------------------------------

ModelPtr linear_transport_model() { return std::make_shared<LinearTransportModel>(); }
ModelPtr burgers_exp_model() { return std::make_shared<BurgersExpModel>(); }
ModelPtr burgers_sin_model() { return std::make_shared<BurgersSinModel>(); }

ModelPtr shallow_water_model(double g, Bathymetry bathy) {
  if (!(g > 0.0)) throw std::invalid_argument("shallow_water_model: g must be positive");
  return std::make_shared<ShallowWaterModel>(g, bathy);
}

ModelPtr shallow_water_manning_model(double g, double k, double eta, Bathymetry bathy) {
  if (!(g > 0.0)) throw std::invalid_argument("shallow_water_manning_model: g must be positive");
  return std::make_shared<ShallowWaterManningModel>(g, k, eta, bathy);
}

ModelPtr euler_gravity_model(double gamma) {
  if (!(gamma > 1.0)) throw std::invalid_argument("euler_gravity_model: gamma must exceed 1");
  return std::make_shared<EulerGravityModel>(gamma);
}

}  // namespace wbcol
