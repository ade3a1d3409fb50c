//! Desk-scale numerics for the semilinear Ornstein-Uhlenbeck equation
//!
//! ```text
//! Δw - ½⟨x, ∇w⟩ - λ/(p-1)·w + |w|^{p-1} w = 0   on ℝⁿ
//! ```
//!
//! The crate provides, in order of dependency:
//!
//! * [`kummer`] — the confluent hypergeometric function `M(a, b, ξ)`, its
//!   derivatives, transformations, large-`ξ` behaviour and positive roots;
//! * [`numerics`] — adaptive quadrature, root bracketing and an embedded
//!   Runge-Kutta stepper shared by the higher layers;
//! * [`fields`] — the radial test fields `σ_μ`, `Q_μ`, `ψ_μ`, `∇·Φ_μ` and the
//!   quadratic-form coefficients `I_μ`, `J_μ`, `Π_λ` built from Kummer
//!   functions against the Gaussian weight `ρ = e^{-r²/4}`;
//! * [`regime`] — definiteness classification of the matrix field `A` over
//!   `(n, p, λ)`, asymptotic sign table and Sturmian root ordering;
//! * [`shooting`] — radial shooting from the origin probing for bounded
//!   nonconstant profiles;
//! * [`verify`] — numerical verification of the Rellich-Pohozaev integral
//!   identities, the Giga-Kohn multiplier identities, the spherical averaging
//!   formula and the boundary-term decay.

pub mod fields;
pub mod kummer;
pub mod numerics;
pub mod regime;
pub mod shooting;
pub mod verify;

pub use fields::{FieldProfile, ProblemParams};
pub use kummer::{KummerArgs, RootList};
pub use numerics::{OdeSpec, QuadratureSpec};
pub use regime::{Classification, RegimeReport, SturmMarkers};
pub use shooting::{Outcome, ShootResult};
pub use verify::{IdentityResidual, NonlinearityPair};

