//! Exact polynomial and rational-function arithmetic over Q.

mod gcd;
mod laurent;
mod poly;
mod rational;
mod var;

pub use gcd::{content_in, gcd, lcm};
pub use laurent::{laurent_normal_form, LaurentPolynomial};
pub use poly::{q, q_frac, render_q, Monomial, Poly, Q};
pub use rational::{common_denominator, RationalFunction, RF};
pub use var::{is_parameter_name, Var, PARAMETERS};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CasError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("substitution makes the denominator vanish identically")]
    SubstitutionPole,
    #[error("denominator vanishes at the evaluation point")]
    EvaluationPole,
    #[error("variable {0} has no value at the evaluation point")]
    UnboundVariable(String),
    #[error("not a Laurent polynomial in {var}: denominator {denominator}")]
    NotLaurent { var: String, denominator: String },
}
