//! Hyperelliptic curves of genus 2 and 3 from their period matrices.
//!
//! The crate evaluates Riemann theta functions with characteristics, builds
//! Jacobian Nullwerte, and uses them to recover symmetric models
//! `Y² = X^{2g+1} + G₁X^{2g} + ⋯ ± X` of hyperelliptic curves from a normalized
//! period matrix. Around that pipeline sit the supporting pieces: symmetric
//! invariants of branch sets, period matrices of real-rooted curves, the
//! Igusa–Clebsch forward and inverse maps in genus 2, and numerical checks of
//! the Thomae / Rosenhain / Frobenius / Jacobi identity family.

pub mod algebra;
pub mod identities;
pub mod igusa;
pub mod linalg;
pub mod mpoly;
pub mod num;
pub mod periods;
pub mod reconstruct;
pub mod symcurve;
pub mod theta;
