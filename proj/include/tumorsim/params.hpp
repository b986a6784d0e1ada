#pragma once

namespace tumorsim {

/// Rate constants of the coupled normal-cell / tumor-cell / drug model.
///
/// Tumor inhibition by normal cells is not modelled (that coupling is fixed
/// at zero), so it has no field here. `lambda` and `c_lambda` are derived by
/// validate_params and should not be set by hand.
struct ModelParams {
  double r_N = 0.0;      ///< normal-cell influx
  double mu_N = 0.0;     ///< normal-cell mortality
  double beta_1 = 0.0;   ///< tumor-on-normal interaction
  double r_A = 0.0;      ///< tumor growth rate
  double k_A = 1.0;      ///< tumor carrying capacity
  double mu_A = 0.0;     ///< tumor natural mortality
  double eps_A = 0.0;    ///< tumor apoptosis rate
  double alpha_N = 0.0;  ///< drug cytotoxicity on normal cells
  double alpha_A = 0.0;  ///< drug cytotoxicity on tumor cells
  double gamma_N = 0.0;  ///< drug absorption by normal cells
  double gamma_A = 0.0;  ///< drug absorption by tumor cells
  double mu = 0.0;       ///< drug infusion rate on the vessel region
  double tau = 1.0;      ///< drug clearance rate
  double sigma = 1.0;    ///< drug diffusion coefficient
  double T = 1.0;        ///< final time

  double lambda = 0.0;    ///< r_A - (mu_A + eps_A)
  double c_lambda = 1.0;  ///< max(1, exp(lambda * T))

  bool operator==(const ModelParams&) const = default;
};

/// Checks the admissible parameter set and fills in the derived fields.
/// Throws Error(NonPositive) when tau, k_A, sigma or T is not positive and
/// Error(NegativeRate) when any rate is negative.
ModelParams validate_params(ModelParams raw);

struct Equilibrium {
  double N2 = 0.0;
  double A2 = 0.0;
};

/// Untreated equilibrium (N2, A2, D = 0) of the spatially homogeneous model.
/// A2 is clamped at zero when the net tumor growth rate is negative.
Equilibrium equilibrium_no_treatment(const ModelParams& p);

/// mu / tau: the drug concentration can never exceed this value.
double drug_ceiling(const ModelParams& p);

}  // namespace tumorsim
