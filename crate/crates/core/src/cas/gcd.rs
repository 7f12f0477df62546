use super::poly::Poly;
use super::var::Var;
use std::collections::BTreeSet;

/// Monic greatest common divisor over Q. gcd(0, 0) = 0.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mono = ma.gcd(&mb);
    if a.is_monomial() || b.is_monomial() {
        return Poly::term(num_traits::One::one(), mono);
    }
    let a = a.div_monomial(&ma).expect("monomial content divides");
    let b = b.div_monomial(&mb).expect("monomial content divides");
    let g = gcd_primitive(&a, &b);
    g.mul_monomial(&mono, &num_traits::One::one()).monic()
}

pub fn lcm(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero();
    }
    let g = gcd(a, b);
    let q = a.exact_div(&g).expect("gcd divides");
    (&q * b).monic()
}

// Inputs have no monomial factor.
fn gcd_primitive(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.total_degree() >= b.total_degree() {
        if a.exact_div(b).is_some() {
            return b.monic();
        }
    } else if b.exact_div(a).is_some() {
        return a.monic();
    }
    let va = a.vars();
    let vb = b.vars();
    let mut a = a.clone();
    let mut b = b.clone();
    for v in va.difference(&vb) {
        a = content_in(&a, *v);
        if a.is_constant() {
            return Poly::one();
        }
    }
    for v in vb.difference(&va) {
        b = content_in(&b, *v);
        if b.is_constant() {
            return Poly::one();
        }
    }
    let common: BTreeSet<Var> = a.vars().intersection(&b.vars()).copied().collect();
    let x = match common
        .iter()
        .min_by_key(|v| (a.degree_in(**v).max(b.degree_in(**v)), **v))
    {
        Some(v) => *v,
        None => return Poly::one(),
    };
    let ca = content_in(&a, x);
    let cb = content_in(&b, x);
    let pa = a.exact_div(&ca).expect("content divides");
    let pb = b.exact_div(&cb).expect("content divides");
    let c = gcd(&ca, &cb);
    if images_coprime(&pa, &pb, x) {
        return c.monic();
    }
    let g = prs_gcd(&pa, &pb, x);
    (&c * &g).monic()
}

/// Specialize every variable but x at a few integer points. Coprime images with
/// nonvanishing leading coefficients prove the gcd has degree 0 in x.
fn images_coprime(a: &Poly, b: &Poly, x: Var) -> bool {
    let others: Vec<Var> = a.vars().union(&b.vars()).copied().filter(|v| *v != x).collect();
    let (la, lb) = (a.coefficients_in(x), b.coefficients_in(x));
    let (la, lb) = (la.last().unwrap(), lb.last().unwrap());
    for attempt in 0..3i64 {
        let point: std::collections::HashMap<Var, crate::cas::Q> = others
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, crate::cas::q(3 + 7 * i as i64 + 11 * attempt)))
            .collect();
        if la.specialize(&point).is_zero() || lb.specialize(&point).is_zero() {
            continue;
        }
        let g = univariate_gcd(a.specialize(&point), b.specialize(&point), x);
        return g.degree_in(x) == 0;
    }
    false
}

fn univariate_gcd(mut a: Poly, mut b: Poly, x: Var) -> Poly {
    while !b.is_zero() {
        let r = univariate_rem(&a, &b, x);
        a = b;
        b = r;
    }
    a.monic()
}

fn univariate_rem(a: &Poly, b: &Poly, x: Var) -> Poly {
    let mut r = a.coefficients_in(x);
    let bc = b.coefficients_in(x);
    let db = bc.len() - 1;
    let lb = bc[db].constant_value().expect("univariate");
    while r.len() > db {
        let dr = r.len() - 1;
        let f = r[dr].constant_value().expect("univariate") / &lb;
        for (i, c) in bc.iter().enumerate() {
            r[i + dr - db] = &r[i + dr - db] - &c.scale(&f);
        }
        r.pop();
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    Poly::from_coefficients_in(x, &r)
}

/// gcd of the coefficients of `p` viewed as a polynomial in `v`.
pub fn content_in(p: &Poly, v: Var) -> Poly {
    let coeffs = p.coefficients_in(v);
    let mut g = Poly::zero();
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        g = gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn primitive_in(p: &Poly, v: Var) -> Poly {
    if p.is_zero() {
        return Poly::zero();
    }
    let c = content_in(p, v);
    p.exact_div(&c).expect("content divides")
}

/// lc(b)^(deg a - deg b + 1) * a mod b, coefficients listed by degree.
fn prem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r: Vec<Poly> = a.to_vec();
    let mut steps = 0;
    let total = a.len() - db;
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = &*c * lb;
        }
        for (i, bc) in b.iter().enumerate() {
            let t = &lr * bc;
            r[i + shift] = &r[i + shift] - &t;
        }
        steps += 1;
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    if steps < total {
        let f = lb.pow((total - steps) as u32);
        for c in r.iter_mut() {
            *c = &*c * &f;
        }
    }
    r
}

// Subresultant remainder sequence in `x` for inputs primitive in `x`.
fn prs_gcd(a: &Poly, b: &Poly, x: Var) -> Poly {
    let (mut f, mut g) = if a.degree_in(x) >= b.degree_in(x) {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    let mut lead = Poly::one();
    let mut h = Poly::one();
    loop {
        if g.is_zero() {
            return primitive_in(&f, x).monic();
        }
        if g.degree_in(x) == 0 {
            return Poly::one();
        }
        let delta = f.degree_in(x) - g.degree_in(x);
        let r = prem(&f.coefficients_in(x), &g.coefficients_in(x));
        let r = Poly::from_coefficients_in(x, &r);
        if r.is_zero() {
            return primitive_in(&g, x).monic();
        }
        let divisor = &lead * &h.pow(delta);
        let next = r.exact_div(&divisor).expect("subresultant division is exact");
        f = g;
        g = next;
        lead = f.coefficients_in(x).pop().unwrap();
        h = if delta == 0 {
            h
        } else if delta == 1 {
            lead.clone()
        } else {
            lead.pow(delta).exact_div(&h.pow(delta - 1)).expect("exact")
        };
    }
}
