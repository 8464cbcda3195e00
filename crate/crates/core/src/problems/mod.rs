//! Concrete problem families: log-det and tr-det problems on `𝒫ⁿ₊₊`, the
//! Rosenbrock split on the plane and box-constrained Fréchet variance
//! maximization.

mod frechet;
mod logdet;
mod rosenbrock;

pub use frechet::{
    box_linear_subproblem, box_objective, feasibility_safeguard, frechet_dcproblem,
    frechet_instance_from_data, frechet_linear_oracle, frechet_subproblem_matrix,
    frechet_subproblem_matrix_alt, random_frechet_instance, random_spd, safeguard_schedule,
    FrechetBoxProblem, FrechetInstanceSpec,
};
pub use logdet::{
    logdet_dcproblem, logdet_subproblem, trdet_dcproblem, trdet_subproblem, DetProfile,
    LogDetProblem, SpdCost, SpdGrad, TrDetProblem,
};
pub use rosenbrock::{rosenbrock_dcproblem, rosenbrock_subproblem, RosenbrockProblem};
