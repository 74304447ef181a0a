//! The parallel asymmetric kernel, its random-number realization, and the
//! sequential Metropolis baseline.

mod field;
mod glauber;
mod hamiltonian;
mod params;
mod pca;

pub use field::{derive_seed, RandomField};
pub use glauber::{
    glauber_acceptance, glauber_step, glauber_tunneling_time, glauber_update, ising_energy, GlauberSampler,
};
pub use hamiltonian::{
    log_z_sigma, log_z_sigma_site_product, pair_hamiltonian, pair_hamiltonian_dual, transition_log_prob,
    weak_symmetry_exponents, ExponentTriple,
};
pub use params::{PcaParameters, Regime};
pub use pca::{classify_event, local_prob, pca_step, PcaKernel, StepTally, UpdateClass, UpdateEvent};
