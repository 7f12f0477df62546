use super::gcd::{gcd, lcm};
use super::poly::{Monomial, Poly, Q};
use super::var::Var;
use super::CasError;
use num_traits::{One, Zero};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Reduced quotient of polynomials with a monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

pub type RF = RationalFunction;

impl RationalFunction {
    pub fn zero() -> RF {
        RF {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> RF {
        RF::from_poly(Poly::one())
    }

    pub fn int(n: i64) -> RF {
        RF::from_poly(Poly::int(n))
    }

    pub fn constant(c: Q) -> RF {
        RF::from_poly(Poly::constant(c))
    }

    pub fn var(v: Var) -> RF {
        RF::from_poly(Poly::var(v))
    }

    pub fn from_poly(p: Poly) -> RF {
        RF {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn new(num: Poly, den: Poly) -> Result<RF, CasError> {
        if den.is_zero() {
            return Err(CasError::DivisionByZero);
        }
        Ok(RF::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> RF {
        if num.is_zero() {
            return RF::zero();
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (
                    num.exact_div(&g).expect("gcd divides numerator"),
                    den.exact_div(&g).expect("gcd divides denominator"),
                )
            }
        };
        let lc = den.leading_coefficient();
        if lc.is_one() {
            RF { num, den }
        } else {
            let inv = lc.recip();
            RF {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.num.contains_var(v) || self.den.contains_var(v)
    }

    pub fn scale(&self, c: &Q) -> RF {
        if c.is_zero() {
            return RF::zero();
        }
        RF {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<RF, CasError> {
        if self.is_zero() {
            return Err(CasError::DivisionByZero);
        }
        Ok(RF::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &RF) -> Result<RF, CasError> {
        if other.is_zero() {
            return Err(CasError::DivisionByZero);
        }
        Ok(self * &other.inv()?)
    }

    pub fn div_poly(&self, p: &Poly) -> Result<RF, CasError> {
        if p.is_zero() {
            return Err(CasError::DivisionByZero);
        }
        Ok(RF::normalized(self.num.clone(), &self.den * p))
    }

    pub fn mul_poly(&self, p: &Poly) -> RF {
        RF::normalized(&self.num * p, self.den.clone())
    }

    pub fn pow(&self, e: u32) -> RF {
        RF {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    pub fn powi(&self, e: i32) -> Result<RF, CasError> {
        if e >= 0 {
            Ok(self.pow(e as u32))
        } else {
            Ok(self.inv()?.pow((-e) as u32))
        }
    }

    pub fn derivative(&self, v: Var) -> RF {
        if self.den.is_one() {
            return RF::from_poly(self.num.derivative(v));
        }
        let dn = self.num.derivative(v);
        let dd = self.den.derivative(v);
        if dd.is_zero() {
            return RF::normalized(dn, self.den.clone());
        }
        let top = &(&dn * &self.den) - &(&self.num * &dd);
        RF::normalized(top, self.den.pow(2))
    }

    /// Simultaneous substitution of variables by rational functions.
    pub fn substitute(&self, bindings: &HashMap<Var, RF>) -> Result<RF, CasError> {
        let num = substitute_poly(&self.num, bindings);
        let den = substitute_poly(&self.den, bindings);
        if den.0.is_zero() {
            return Err(CasError::SubstitutionPole);
        }
        let n = &num.0 * &den.1;
        let d = &num.1 * &den.0;
        Ok(RF::normalized(n, d))
    }

    pub fn substitute_one(&self, v: Var, value: &RF) -> Result<RF, CasError> {
        let mut b = HashMap::new();
        b.insert(v, value.clone());
        self.substitute(&b)
    }

    /// Partial evaluation at rational values.
    pub fn specialize(&self, point: &HashMap<Var, Q>) -> Result<RF, CasError> {
        let den = self.den.specialize(point);
        if den.is_zero() {
            return Err(CasError::EvaluationPole);
        }
        Ok(RF::normalized(self.num.specialize(point), den))
    }

    pub fn evaluate(&self, point: &HashMap<Var, Q>) -> Result<Q, CasError> {
        for v in self.vars() {
            if !point.contains_key(&v) {
                return Err(CasError::UnboundVariable(v.name().to_string()));
            }
        }
        let d = self.den.specialize(point).constant_term();
        if d.is_zero() {
            return Err(CasError::EvaluationPole);
        }
        Ok(self.num.specialize(point).constant_term() / d)
    }

    /// Canonical string: numerator, or (numerator)/(denominator).
    pub fn render(&self) -> String {
        if self.den.is_one() {
            return self.num.render();
        }
        let n = {
            let s = self.num.render();
            if self.num.len() == 1 && !s.contains(' ') {
                s
            } else {
                format!("({})", s)
            }
        };
        let d = {
            let s = self.den.render();
            if self.den.len() == 1 && !s.contains('*') {
                s
            } else {
                format!("({})", s)
            }
        };
        format!("{}/{}", n, d)
    }
}

// Returns (numerator, denominator) of the substituted polynomial.
fn substitute_poly(p: &Poly, bindings: &HashMap<Var, RF>) -> (Poly, Poly) {
    let bound: Vec<Var> = p
        .vars()
        .into_iter()
        .filter(|v| bindings.contains_key(v))
        .collect();
    if bound.is_empty() {
        return (p.clone(), Poly::one());
    }
    let mut num_pows: HashMap<Var, Vec<Poly>> = HashMap::new();
    let mut den_pows: HashMap<Var, Vec<Poly>> = HashMap::new();
    let mut common = Poly::one();
    for &v in &bound {
        let d = p.degree_in(v) as usize;
        let f = &bindings[&v];
        let mut np = vec![Poly::one()];
        let mut dp = vec![Poly::one()];
        for i in 1..=d {
            let a = &np[i - 1] * f.numerator();
            np.push(a);
            let b = &dp[i - 1] * f.denominator();
            dp.push(b);
        }
        common = &common * &dp[d];
        num_pows.insert(v, np);
        den_pows.insert(v, dp);
    }
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let mut acc = Poly::one();
        let mut free = Vec::new();
        for &(v, e) in m.pairs() {
            match num_pows.get(&v) {
                Some(np) => acc = &acc * &np[e as usize],
                None => free.push((v, e)),
            }
        }
        for &v in &bound {
            let d = p.degree_in(v) as usize;
            let e = m.exponent(v) as usize;
            if d > e {
                acc = &acc * &den_pows[&v][d - e];
            }
        }
        let term = acc.mul_monomial(&Monomial::from_pairs(free), c);
        out = &out + &term;
    }
    (out, common)
}

impl Default for RationalFunction {
    fn default() -> RF {
        RF::zero()
    }
}

impl From<Poly> for RationalFunction {
    fn from(p: Poly) -> RF {
        RF::from_poly(p)
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl<'a> Add<&'a RF> for &'a RF {
    type Output = RF;
    fn add(self, rhs: &RF) -> RF {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RF::normalized(&self.num + &rhs.num, self.den.clone());
        }
        if self.den.is_one() {
            return RF::normalized(&(&self.num * &rhs.den) + &rhs.num, rhs.den.clone());
        }
        if rhs.den.is_one() {
            return RF::normalized(&self.num + &(&rhs.num * &self.den), self.den.clone());
        }
        let g = gcd(&self.den, &rhs.den);
        let a = self.den.exact_div(&g).expect("gcd divides");
        let b = rhs.den.exact_div(&g).expect("gcd divides");
        let num = &(&self.num * &b) + &(&rhs.num * &a);
        RF::normalized(num, &a * &rhs.den)
    }
}

impl<'a> Sub<&'a RF> for &'a RF {
    type Output = RF;
    fn sub(self, rhs: &RF) -> RF {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RF> for &'a RF {
    type Output = RF;
    fn mul(self, rhs: &RF) -> RF {
        if self.is_zero() || rhs.is_zero() {
            return RF::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RF::from_poly(&self.num * &rhs.num);
        }
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let n1 = self.num.exact_div(&g1).expect("gcd divides");
        let d2 = rhs.den.exact_div(&g1).expect("gcd divides");
        let n2 = rhs.num.exact_div(&g2).expect("gcd divides");
        let d1 = self.den.exact_div(&g2).expect("gcd divides");
        let num = &n1 * &n2;
        let den = &d1 * &d2;
        let lc = den.leading_coefficient();
        if lc.is_one() {
            RF { num, den }
        } else {
            let inv = lc.recip();
            RF {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }
}

impl Neg for &RF {
    type Output = RF;
    fn neg(self) -> RF {
        RF {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Add for RF {
    type Output = RF;
    fn add(self, rhs: RF) -> RF {
        &self + &rhs
    }
}

impl Sub for RF {
    type Output = RF;
    fn sub(self, rhs: RF) -> RF {
        &self - &rhs
    }
}

impl Mul for RF {
    type Output = RF;
    fn mul(self, rhs: RF) -> RF {
        &self * &rhs
    }
}

impl Neg for RF {
    type Output = RF;
    fn neg(self) -> RF {
        -&self
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a, I: IntoIterator<Item = &'a RF>>(fs: I) -> Poly {
    let mut l = Poly::one();
    for f in fs {
        if !f.den.is_one() && l != f.den {
            l = lcm(&l, &f.den);
        }
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cas::poly::q;

    fn v(name: &str) -> RF {
        RF::var(Var::new(name))
    }

    #[test]
    fn common_denominator_sum() {
        let x = v("x");
        let y = v("y");
        let a = x.checked_div(&y).unwrap();
        let b = RF::one().checked_div(&y).unwrap();
        let s = &a + &b;
        assert_eq!(s, (&x + &RF::one()).checked_div(&y).unwrap());
        assert_eq!(s.render(), "(x + 1)/y");
    }

    #[test]
    fn cancellation() {
        let x = v("x");
        let a = &(&x * &x) - &RF::one();
        let b = &x - &RF::one();
        assert_eq!(a.checked_div(&b).unwrap(), &x + &RF::one());
    }

    #[test]
    fn inverse_product() {
        let s = &v("a1") + &v("y2");
        assert!((&s * &s.inv().unwrap()).is_one());
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(
            RF::one().checked_div(&RF::zero()),
            Err(CasError::DivisionByZero)
        );
    }

    #[test]
    fn derivatives() {
        let x = v("x");
        let y = v("y");
        let xv = Var::new("x");
        assert_eq!((&(&x * &x) * &y).derivative(xv), &(&RF::int(2) * &x) * &y);
        let inv = x.inv().unwrap();
        assert_eq!(inv.derivative(xv), -&(&x * &x).inv().unwrap());
        let a1 = v("a1");
        let x2 = v("x2");
        let y2 = v("y2");
        let f = (&x2 * &y2).checked_div(&(&a1 + &y2)).unwrap();
        let expected = (&x2 * &a1).checked_div(&(&a1 + &y2).pow(2)).unwrap();
        assert_eq!(f.derivative(Var::new("y2")), expected);
    }

    #[test]
    fn substitution() {
        let x0 = Var::new("x0");
        let y0 = Var::new("y0");
        let x1 = v("x1");
        let y1 = v("y1");
        let f = &RF::var(x0) * &RF::var(y0);
        let mut b = HashMap::new();
        b.insert(x0, &(&x1 * &x1) * &y1);
        b.insert(y0, x1.inv().unwrap());
        assert_eq!(f.substitute(&b).unwrap(), &x1 * &y1);
        let t = v("t");
        assert_eq!(t.substitute(&b).unwrap(), t);
    }

    #[test]
    fn substitution_pole() {
        let x = Var::new("x");
        let f = RF::var(x).inv().unwrap();
        let r = f.substitute_one(x, &RF::zero());
        assert_eq!(r, Err(CasError::SubstitutionPole));
    }

    #[test]
    fn evaluation() {
        let x = Var::new("x");
        let y = Var::new("y");
        let f = (&RF::var(x) + &RF::one()).checked_div(&RF::var(y)).unwrap();
        let mut p = HashMap::new();
        p.insert(x, q(1));
        p.insert(y, q(2));
        assert_eq!(f.evaluate(&p).unwrap(), q(1));
        let t = Var::new("t");
        let mt = -&RF::var(t);
        let det = (&mt.pow(2) - &RF::one()).pow(2).checked_div(&mt.pow(2)).unwrap();
        let mut p = HashMap::new();
        p.insert(t, q(2));
        assert_eq!(det.evaluate(&p).unwrap(), crate::cas::poly::q_frac(9, 4));
    }

    #[test]
    fn evaluation_pole() {
        let t = Var::new("t");
        let num = Poly::var(t);
        let den = &Poly::var(t) - &Poly::var(t);
        assert_eq!(RF::new(num, den), Err(CasError::DivisionByZero));
        let f = RF::var(t).inv().unwrap();
        let mut p = HashMap::new();
        p.insert(t, q(0));
        assert_eq!(f.evaluate(&p), Err(CasError::EvaluationPole));
    }
}
