//! Natural reductivity, the geodesic orbit property and geodesic orbit families.

pub mod family;
pub mod go;
pub mod natred;

pub use family::{generate_super_adapted, go_family, go_family_system, phi_roots};
pub use go::{classify_go, classify_go_eigen, GoCertificate, GoResult};
pub use natred::{classify_natred, solve_case_c, CaseCSolution, NatRedResult, NatRedVerdict};
