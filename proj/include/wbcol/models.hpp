#pragma once

#include <atomic>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wbcol/state.hpp"

namespace wbcol {

// Geometry profiles H(x) with analytic first and second derivatives. The
// critical-slope formula needs H_xx, so numerical differentiation is out.
enum class Bathymetry { flat, linear, bump, exp_cosine };

Bathymetry bathymetry_from_string(const std::string& id);
std::string to_string(Bathymetry b);

double geometry_value(Bathymetry b, double x);
double geometry_dx(Bathymetry b, double x);
double geometry_dxx(Bathymetry b, double x);

// Descriptor for one system U_t + f(U)_x = S(U) H_x (plus, for Manning
// friction, an extra position-independent momentum sink folded into the
// stationary right-hand side g(x, U)). Instances are immutable; every method
// is a pure function of its arguments, so models can be shared across
// threads. The resonance counter is telemetry only.
class BalanceLawModel {
 public:
  virtual ~BalanceLawModel() = default;

  virtual int n_vars() const = 0;
  virtual std::string name() const = 0;
  virtual std::vector<std::string> component_names() const = 0;

  virtual StateVec flux(const StateVec& u) const = 0;
  virtual SmallMat flux_jacobian(const StateVec& u) const = 0;
  virtual StateVec source(const StateVec& u) const = 0;  // S(U)

  virtual Bathymetry geometry_id() const = 0;
  double geometry(double x) const { return geometry_value(geometry_id(), x); }
  double geometry_deriv(double x) const { return geometry_dx(geometry_id(), x); }
  double geometry_deriv2(double x) const { return geometry_dxx(geometry_id(), x); }

  // Full stationary right-hand side g(x, U); the collocation solvers and the
  // source quadrature consume only this. Default S(U) * H_x(x).
  virtual StateVec stationary_rhs(double x, const StateVec& u) const;

  virtual double spectral_radius(const StateVec& u) const = 0;
  virtual bool admissible(const StateVec& u) const { return u.finite(); }

  // Characteristic structure of Df(U): eigenvalues and the matrix of right
  // eigenvectors (columns). Used by the boundary treatment to split
  // deviations from the equilibrium into incoming/outgoing waves.
  virtual void eigen_decompose(const StateVec& u, std::array<double, 3>& lambda,
                               SmallMat& right_vectors) const = 0;

  // Resonance policy. resonance_indicator measures the distance to the
  // nearest sonic state (|Fr-1| for shallow water, +inf when the model has
  // no policy); critical_slope returns the admissible slope at a sonic
  // state near an interior minimum of H, or nothing when no smooth
  // stationary solution passes through. trend_sign is the sign of
  // d(component 0)/dx inferred by the caller from neighbouring data.
  virtual double resonance_indicator(const StateVec& /*u*/) const {
    return std::numeric_limits<double>::infinity();
  }
  bool near_critical(const StateVec& u, double tol) const {
    return resonance_indicator(u) < tol;
  }
  virtual std::optional<StateVec> critical_slope(double /*x*/, const StateVec& /*u*/,
                                                 int /*trend_sign*/,
                                                 double /*crest_window*/) const {
    return std::nullopt;
  }
  virtual long resonance_activations() const { return 0; }
  virtual void reset_resonance_counter() const {}
};

using ModelPtr = std::shared_ptr<const BalanceLawModel>;

// u_t + u_x = u, H(x) = x. Stationary family C e^x.
class LinearTransportModel final : public BalanceLawModel {
 public:
  int n_vars() const override { return 1; }
  std::string name() const override { return "linear_transport"; }
  std::vector<std::string> component_names() const override { return {"u"}; }
  StateVec flux(const StateVec& u) const override { return u; }
  SmallMat flux_jacobian(const StateVec&) const override {
    SmallMat j(1);
    j(0, 0) = 1.0;
    return j;
  }
  StateVec source(const StateVec& u) const override { return u; }
  Bathymetry geometry_id() const override { return Bathymetry::linear; }
  double spectral_radius(const StateVec&) const override { return 1.0; }
  void eigen_decompose(const StateVec&, std::array<double, 3>& lambda,
                       SmallMat& rv) const override {
    lambda[0] = 1.0;
    rv = SmallMat(1);
    rv(0, 0) = 1.0;
  }

  // u(x) through (x0, u0)
  static double stationary_through(double x0, double u0, double x) {
    return u0 * std::exp(x - x0);
  }
};

// u_t + (u^2/2)_x = u^2, H(x) = x. Stationary family C e^x.
class BurgersExpModel final : public BalanceLawModel {
 public:
  int n_vars() const override { return 1; }
  std::string name() const override { return "burgers_exp"; }
  std::vector<std::string> component_names() const override { return {"u"}; }
  StateVec flux(const StateVec& u) const override { return {0.5 * u[0] * u[0]}; }
  SmallMat flux_jacobian(const StateVec& u) const override {
    SmallMat j(1);
    j(0, 0) = u[0];
    return j;
  }
  StateVec source(const StateVec& u) const override { return {u[0] * u[0]}; }
  Bathymetry geometry_id() const override { return Bathymetry::linear; }
  double spectral_radius(const StateVec& u) const override { return std::fabs(u[0]); }
  void eigen_decompose(const StateVec& u, std::array<double, 3>& lambda,
                       SmallMat& rv) const override {
    lambda[0] = u[0];
    rv = SmallMat(1);
    rv(0, 0) = 1.0;
  }

  static double stationary_through(double x0, double u0, double x) {
    return u0 * std::exp(x - x0);
  }
};

// u_t + (u^2/2)_x = sin(u), H(x) = x. No closed-form stationary solutions.
class BurgersSinModel final : public BalanceLawModel {
 public:
  int n_vars() const override { return 1; }
  std::string name() const override { return "burgers_sin"; }
  std::vector<std::string> component_names() const override { return {"u"}; }
  StateVec flux(const StateVec& u) const override { return {0.5 * u[0] * u[0]}; }
  SmallMat flux_jacobian(const StateVec& u) const override {
    SmallMat j(1);
    j(0, 0) = u[0];
    return j;
  }
  StateVec source(const StateVec& u) const override { return {std::sin(u[0])}; }
  Bathymetry geometry_id() const override { return Bathymetry::linear; }
  double spectral_radius(const StateVec& u) const override { return std::fabs(u[0]); }
  void eigen_decompose(const StateVec& u, std::array<double, 3>& lambda,
                       SmallMat& rv) const override {
    lambda[0] = u[0];
    rv = SmallMat(1);
    rv(0, 0) = 1.0;
  }
};

// Shallow water, U = (h, q), f = (q, q^2/h + g h^2/2), S = (0, g h).
class ShallowWaterModel : public BalanceLawModel {
 public:
  ShallowWaterModel(double g, Bathymetry bathy) : g_(g), bathy_(bathy) {}

  int n_vars() const override { return 2; }
  std::string name() const override { return "shallow_water"; }
  std::vector<std::string> component_names() const override { return {"h", "q"}; }
  StateVec flux(const StateVec& u) const override;
  SmallMat flux_jacobian(const StateVec& u) const override;
  StateVec source(const StateVec& u) const override { return {0.0, g_ * u[0]}; }
  Bathymetry geometry_id() const override { return bathy_; }
  double spectral_radius(const StateVec& u) const override;
  bool admissible(const StateVec& u) const override { return u.finite() && u[0] > 0.0; }
  void eigen_decompose(const StateVec& u, std::array<double, 3>& lambda,
                       SmallMat& rv) const override;

  double resonance_indicator(const StateVec& u) const override {
    return std::fabs(froude(u) - 1.0);
  }
  std::optional<StateVec> critical_slope(double x, const StateVec& u, int trend_sign,
                                         double crest_window) const override;
  long resonance_activations() const override { return hits_.load(); }
  void reset_resonance_counter() const override { hits_.store(0); }

  double gravity() const { return g_; }
  double froude(const StateVec& u) const {
    return std::fabs(u[1] / u[0]) / std::sqrt(g_ * u[0]);
  }
  // h at which the flow with discharge q is critical
  double critical_height(double q) const { return std::cbrt(q * q / g_); }

 private:
  double g_;
  Bathymetry bathy_;
  mutable std::atomic<long> hits_{0};
};

// Shallow water with the Manning sink -k q|q| / h^eta in the momentum
// equation. The sink is not of the S(U) H_x form, so it lives in the
// stationary right-hand side.
class ShallowWaterManningModel final : public ShallowWaterModel {
 public:
  ShallowWaterManningModel(double g, double k, double eta, Bathymetry bathy)
      : ShallowWaterModel(g, bathy), k_(k), eta_(eta) {}

  std::string name() const override { return "shallow_water_manning"; }
  StateVec stationary_rhs(double x, const StateVec& u) const override;

  double manning_k() const { return k_; }
  double manning_eta() const { return eta_; }
  // momentum sink value -k q|q| / h^eta
  double friction(const StateVec& u) const {
    return -k_ * u[1] * std::fabs(u[1]) / std::pow(u[0], eta_);
  }

 private:
  double k_;
  double eta_;
};

// Compressible Euler with gravity, U = (rho, q, E), ideal gas EoS.
// S = (0, -rho, -rho u); with H(x) = x this matches the momentum/energy
// sinks -rho H_x, -rho u H_x.
class EulerGravityModel final : public BalanceLawModel {
 public:
  explicit EulerGravityModel(double gamma) : gamma_(gamma) {}

  int n_vars() const override { return 3; }
  std::string name() const override { return "euler_gravity"; }
  std::vector<std::string> component_names() const override { return {"rho", "q", "E"}; }
  StateVec flux(const StateVec& u) const override;
  SmallMat flux_jacobian(const StateVec& u) const override;
  StateVec source(const StateVec& u) const override {
    return {0.0, -u[0], -u[1]};
  }
  Bathymetry geometry_id() const override { return Bathymetry::linear; }
  double spectral_radius(const StateVec& u) const override;
  bool admissible(const StateVec& u) const override {
    return u.finite() && u[0] > 0.0 && pressure(u) > 0.0;
  }
  void eigen_decompose(const StateVec& u, std::array<double, 3>& lambda,
                       SmallMat& rv) const override;

  double adiabatic_gamma() const { return gamma_; }
  double pressure(const StateVec& u) const {
    return (gamma_ - 1.0) * (u[2] - 0.5 * u[1] * u[1] / u[0]);
  }
  double sound_speed(const StateVec& u) const {
    return std::sqrt(gamma_ * pressure(u) / u[0]);
  }
  // Reduced stationary slope (d rho/dx, d E/dx) for regular solutions with
  // q constant; cross-checks the full 3x3 stage solve in tests.
  StateVec reduced_stationary_slope(double x, const StateVec& u) const;

 private:
  double gamma_;
};

ModelPtr linear_transport_model();
ModelPtr burgers_exp_model();
ModelPtr burgers_sin_model();
ModelPtr shallow_water_model(double g = 9.81, Bathymetry bathy = Bathymetry::bump);
ModelPtr shallow_water_manning_model(double g = 9.81, double k = 1.0,
                                     double eta = 7.0 / 3.0,
                                     Bathymetry bathy = Bathymetry::flat);
ModelPtr euler_gravity_model(double gamma = 1.5);

}  // namespace wbcol
