use super::poly::{Monomial, Poly};
use super::rational::RF;
use super::var::Var;
use super::CasError;
use std::collections::BTreeMap;
use std::fmt;

/// f = (sum of c_m * v^m) / unit, with unit a product of allowed denominators.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPolynomial {
    pub var: Var,
    pub unit: Poly,
    pub coeffs: BTreeMap<i32, RF>,
}

impl LaurentPolynomial {
    pub fn zero(var: Var) -> LaurentPolynomial {
        LaurentPolynomial {
            var,
            unit: Poly::one(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coefficient(&self, m: i32) -> RF {
        self.coeffs.get(&m).cloned().unwrap_or_else(RF::zero)
    }

    /// Re-sum the expansion into a rational function.
    pub fn to_rational(&self) -> RF {
        let v = RF::var(self.var);
        let mut acc = RF::zero();
        for (m, c) in &self.coeffs {
            let p = v.powi(*m).expect("variable is nonzero");
            acc = &acc + &(c * &p);
        }
        acc.div_poly(&self.unit).expect("unit is nonzero")
    }
}

impl fmt::Debug for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .rev()
            .map(|(m, c)| format!("({})*{}^{}", c, self.var, m))
            .collect();
        if parts.is_empty() {
            write!(f, "0")?;
        } else {
            write!(f, "{}", parts.join(" + "))?;
        }
        if !self.unit.is_one() {
            write!(f, " / ({})", self.unit)?;
        }
        Ok(())
    }
}

pub fn laurent_normal_form(
    f: &RF,
    v: Var,
    allowed_denominators: &[Poly],
) -> Result<LaurentPolynomial, CasError> {
    if f.is_zero() {
        return Ok(LaurentPolynomial::zero(v));
    }
    let mut den = f.denominator().clone();
    let mut unit = Poly::one();
    for a in allowed_denominators {
        if a.is_constant() {
            continue;
        }
        while let Some(rest) = den.exact_div(a) {
            if den.is_constant() {
                break;
            }
            den = rest;
            unit = &unit * a;
        }
    }
    let k = den.min_degree_in(v);
    let rest = den
        .div_monomial(&Monomial::var(v, k))
        .expect("minimal power divides");
    if rest.contains_var(v) {
        return Err(CasError::NotLaurent {
            var: v.name().to_string(),
            denominator: f.denominator().render(),
        });
    }
    let rest_inv = RF::from_poly(rest).inv()?;
    let mut coeffs = BTreeMap::new();
    for (e, c) in f.numerator().coefficients_in(v).into_iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        coeffs.insert(e as i32 - k as i32, &RF::from_poly(c) * &rest_inv);
    }
    Ok(LaurentPolynomial {
        var: v,
        unit: if unit.is_one() { Poly::one() } else { unit },
        coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_pole() {
        let x3 = Var::new("x3");
        let a1 = RF::var(Var::new("a1"));
        let f = (&RF::one() + &(&a1 * &RF::var(x3)))
            .checked_div(&RF::var(x3))
            .unwrap();
        let l = laurent_normal_form(&f, x3, &[]).unwrap();
        assert_eq!(l.coefficient(-1), RF::one());
        assert_eq!(l.coefficient(0), a1);
        assert_eq!(l.coeffs.len(), 2);
        assert_eq!(l.to_rational(), f);
    }

    #[test]
    fn binomial_expansion() {
        let x2 = Var::new("x2");
        let t = RF::var(Var::new("t"));
        let f = (&RF::var(x2) - &t).pow(2).checked_div(&RF::var(x2)).unwrap();
        let l = laurent_normal_form(&f, x2, &[]).unwrap();
        assert_eq!(l.coefficient(1), RF::one());
        assert_eq!(l.coefficient(0), &RF::int(-2) * &t);
        assert_eq!(l.coefficient(-1), t.pow(2));
    }

    #[test]
    fn allowed_denominator_passthrough() {
        let x10 = Var::new("x10");
        let u = &Poly::one() + &Poly::var(x10);
        let f = RF::from_poly(u.clone()).inv().unwrap();
        let l = laurent_normal_form(&f, x10, std::slice::from_ref(&u)).unwrap();
        assert_eq!(l.coefficient(0), RF::one());
        assert_eq!(l.unit, u);
        assert!(matches!(
            laurent_normal_form(&f, x10, &[]),
            Err(CasError::NotLaurent { .. })
        ));
    }
}
