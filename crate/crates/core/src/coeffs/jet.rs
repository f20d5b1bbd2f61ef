//! Truncated Taylor jets for analytic derivatives of mollifier profiles.

use std::ops::{Add, Mul, Neg, Sub};

/// Number of stored Taylor coefficients; derivatives up to order `JET_LEN - 1`.
pub const JET_LEN: usize = 6;

/// Taylor coefficients `c[k] = f^(k)(t0) / k!` of a function at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet(pub [f64; JET_LEN]);

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = v;
        Jet(c)
    }

    /// The identity function expanded at `t`.
    pub fn variable(t: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = t;
        c[1] = 1.0;
        Jet(c)
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// k-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.0[k] * fact
    }

    pub fn scale(self, s: f64) -> Self {
        Jet(self.0.map(|c| c * s))
    }

    pub fn recip(self) -> Self {
        let a = self.0;
        let mut b = [0.0; JET_LEN];
        b[0] = 1.0 / a[0];
        for k in 1..JET_LEN {
            let s: f64 = (1..=k).map(|j| a[j] * b[k - j]).sum();
            b[k] = -s * b[0];
        }
        Jet(b)
    }

    pub fn exp(self) -> Self {
        let a = self.0;
        let mut e = [0.0; JET_LEN];
        e[0] = a[0].exp();
        for k in 1..JET_LEN {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Jet(e)
    }

    pub fn ln(self) -> Self {
        let a = self.0;
        let mut l = [0.0; JET_LEN];
        l[0] = a[0].ln();
        for k in 1..JET_LEN {
            let s: f64 = (1..k).map(|j| j as f64 * l[j] * a[k - j]).sum();
            l[k] = (a[k] - s / k as f64) / a[0];
        }
        Jet(l)
    }

    /// `self^p` for a jet with positive value.
    pub fn powf(self, p: f64) -> Self {
        (self.ln().scale(p)).exp()
    }

    pub fn sin_cos(self) -> (Self, Self) {
        let a = self.0;
        let mut s = [0.0; JET_LEN];
        let mut c = [0.0; JET_LEN];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for k in 1..JET_LEN {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                ss += j as f64 * a[j] * c[k - j];
                cc += j as f64 * a[j] * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = -cc / k as f64;
        }
        (Jet(s), Jet(c))
    }

    /// `sin(x)/x` evaluated on a jet, using the power series near zero.
    pub fn sinc(self) -> Self {
        if self.0[0].abs() < 0.5 {
            let x2 = self * self;
            // Horner on sum (-1)^n x^{2n} / (2n+1)!
            let mut acc = Jet::constant(0.0);
            for n in (0..14).rev() {
                let fact: f64 = (1..=(2 * n + 1)).map(|i| i as f64).product();
                let coef = if n % 2 == 0 { 1.0 } else { -1.0 } / fact;
                acc = acc * x2 + Jet::constant(coef);
            }
            acc
        } else {
            self.sin_cos().0 * self.recip()
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut c = self.0;
        for (x, y) in c.iter_mut().zip(o.0) {
            *x += y;
        }
        Jet(c)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for (i, ci) in c.iter_mut().enumerate() {
            *ci = (0..=i).map(|j| self.0[j] * o.0[i - j]).sum();
        }
        Jet(c)
    }
}
