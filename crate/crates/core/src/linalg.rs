//! Dense exact linear algebra over Q and over the rational function field.

use crate::cas::{Q, RF};
use num_traits::{One, Zero};

pub trait Scalar: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// Division by a nonzero element.
    fn div(&self, other: &Self) -> Self;
    /// Smaller is preferred as a pivot.
    fn weight(&self) -> usize;
}

impl Scalar for Q {
    fn zero() -> Q {
        <Q as Zero>::zero()
    }
    fn one() -> Q {
        <Q as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Q) -> Q {
        self + o
    }
    fn sub(&self, o: &Q) -> Q {
        self - o
    }
    fn mul(&self, o: &Q) -> Q {
        self * o
    }
    fn div(&self, o: &Q) -> Q {
        self / o
    }
    fn weight(&self) -> usize {
        (self.numer().bits() + self.denom().bits()) as usize
    }
}

impl Scalar for RF {
    fn zero() -> RF {
        RF::zero()
    }
    fn one() -> RF {
        RF::one()
    }
    fn is_zero(&self) -> bool {
        RF::is_zero(self)
    }
    fn add(&self, o: &RF) -> RF {
        self + o
    }
    fn sub(&self, o: &RF) -> RF {
        self - o
    }
    fn mul(&self, o: &RF) -> RF {
        self * o
    }
    fn div(&self, o: &RF) -> RF {
        self.checked_div(o).expect("division by nonzero pivot")
    }
    fn weight(&self) -> usize {
        self.numerator().len() + self.denominator().len()
    }
}

/// Reduced row echelon form. Returns the pivot columns.
pub fn rref<T: Scalar>(m: &mut [Vec<T>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let best = (r..rows)
            .filter(|&i| !m[i][c].is_zero())
            .min_by_key(|&i| m[i][c].weight());
        let p = match best {
            Some(p) => p,
            None => continue,
        };
        m.swap(r, p);
        let inv = T::one().div(&m[r][c]);
        for j in c..cols {
            if !m[r][j].is_zero() {
                m[r][j] = m[r][j].mul(&inv);
            }
        }
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in c..cols {
                if !m[r][j].is_zero() {
                    let d = f.mul(&m[r][j]);
                    m[i][j] = m[i][j].sub(&d);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<T: Scalar>(m: &[Vec<T>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

/// Basis of the right kernel {v : m v = 0}.
pub fn kernel<T: Scalar>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![T::zero(); cols];
        v[free] = T::one();
        for (r, &pc) in pivots.iter().enumerate() {
            if !a[r][free].is_zero() {
                v[pc] = T::zero().sub(&a[r][free]);
            }
        }
        basis.push(v);
    }
    basis
}

/// Determinant by elimination with exact division.
pub fn determinant<T: Scalar>(m: &[Vec<T>]) -> T {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = T::one();
    for c in 0..n {
        let best = (c..n)
            .filter(|&i| !a[i][c].is_zero())
            .min_by_key(|&i| a[i][c].weight());
        let p = match best {
            Some(p) => p,
            None => return T::zero(),
        };
        if p != c {
            a.swap(p, c);
            det = T::zero().sub(&det);
        }
        det = det.mul(&a[c][c]);
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].div(&a[c][c]);
            for j in c..n {
                if !a[c][j].is_zero() {
                    let d = f.mul(&a[c][j]);
                    a[i][j] = a[i][j].sub(&d);
                }
            }
        }
    }
    det
}

/// Fraction-free Bareiss elimination. Each division is exact.
pub fn bareiss_determinant<T: Scalar>(m: &[Vec<T>]) -> T {
    let n = m.len();
    if n == 0 {
        return T::one();
    }
    let mut a = m.to_vec();
    let mut sign = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(p, k);
                    sign = !sign;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let x = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = x.div(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        T::zero().sub(&d)
    } else {
        d
    }
}

pub fn mat_vec<T: Scalar>(m: &[Vec<T>], v: &[T]) -> Vec<T> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(T::zero(), |acc, (a, b)| acc.add(&a.mul(b)))
        })
        .collect()
}

pub fn to_q(m: &[Vec<i64>]) -> Vec<Vec<Q>> {
    m.iter()
        .map(|r| r.iter().map(|&x| crate::cas::q(x)).collect())
        .collect()
}

/// Scale a rational vector to coprime integers with a positive first nonzero entry.
pub fn primitive_integer_vector(v: &[Q]) -> Vec<num_bigint::BigInt> {
    use num_integer::Integer;
    use num_traits::Signed;
    let mut den = num_bigint::BigInt::one();
    for x in v {
        den = den.lcm(x.denom());
    }
    let ints: Vec<num_bigint::BigInt> = v.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    let mut g = num_bigint::BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return ints;
    }
    let sign = ints
        .iter()
        .find(|x| !x.is_zero())
        .map(|x| if x.is_negative() { -1 } else { 1 })
        .unwrap_or(1);
    ints.iter().map(|x| x / &g * sign).collect()
}
