//! Complex embeddings of the ring attached to a binary cubic form.

use crate::error::{Error, Result};
use crate::form::{discriminant, BinaryCubicForm};
use crate::roots;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

pub const DEFAULT_PRECISION: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct EmbeddingData {
    pub form: [f64; 4],
    /// Roots of f(x,1); the real root(s) first, a complex pair as (z, conj z).
    pub roots: [Complex64; 3],
    /// Certified absolute error radius of each root.
    pub radius: [f64; 3],
    pub omega: [Complex64; 3],
    pub theta: [Complex64; 3],
    pub signature: u8,
    pub disc: f64,
}

impl EmbeddingData {
    /// Error bound for sums of products of at most two basis images.
    fn image_error(&self) -> f64 {
        let [a, b, _, _] = self.form;
        let mut e = 0.0f64;
        for j in 0..3 {
            let z = self.roots[j].norm();
            let dom = a.abs() * self.radius[j];
            let dth = (2.0 * a.abs() * z + b.abs()) * self.radius[j];
            let mo = self.omega[j].norm();
            let mt = self.theta[j].norm();
            e += 2.0 * (mo + mt + dom + dth) * (dom + dth) + 8.0 * f64::EPSILON * (mo + mt + 1.0).powi(2);
        }
        e
    }

    /// Checks the five trace identities within the propagated error bound and
    /// returns the worst ratio of observed error to the bound.
    pub fn check_trace_identities(&self) -> f64 {
        let [a, b, c, d] = self.form;
        let sum = |v: &dyn Fn(usize) -> Complex64| (0..3).map(v).sum::<Complex64>();
        let tol = self.image_error() * 4.0 + 1e-300;
        let checks = [
            (sum(&|j| self.omega[j]), -b),
            (sum(&|j| self.theta[j]), c),
            (sum(&|j| self.omega[j] * self.omega[j]), b * b - 2.0 * a * c),
            (sum(&|j| self.theta[j] * self.theta[j]), c * c - 2.0 * b * d),
            (sum(&|j| self.omega[j] * self.theta[j]), -3.0 * a * d),
        ];
        checks
            .iter()
            .map(|(got, want)| (got - Complex64::new(*want, 0.0)).norm() / tol)
            .fold(0.0, f64::max)
    }

    /// Relative error of a⁴ ∏(ξ_j − ξ_k)² against the exact discriminant.
    pub fn disc_product_error(&self) -> f64 {
        let a = self.form[0];
        let r = self.roots;
        let prod = (r[0] - r[1]) * (r[0] - r[2]) * (r[1] - r[2]);
        let v = a.powi(4) * (prod * prod).re;
        (v - self.disc).abs() / self.disc.abs()
    }
}

/// Embeddings of ⟨ω, θ⟩ through the roots of f(x,1).
pub fn embeddings(f: &BinaryCubicForm, target_precision: f64) -> Result<EmbeddingData> {
    if f.a.is_zero() {
        return Err(Error::ZeroLeading);
    }
    let disc_exact = discriminant(f);
    if disc_exact.is_zero() {
        return Err(Error::ZeroDiscriminant);
    }
    let signature = if disc_exact.is_positive() { 0 } else { 1 };
    let form = f.to_f64();
    let disc = disc_exact.to_f64().unwrap_or(f64::NAN);
    embeddings_real(form, disc, signature, target_precision)
}

/// Same as [`embeddings`] for real coefficients with known discriminant sign.
pub fn embeddings_real(form: [f64; 4], disc: f64, signature: u8, target_precision: f64) -> Result<EmbeddingData> {
    let [a, b, c, d] = form;
    if a == 0.0 {
        return Err(Error::ZeroLeading);
    }
    let p = [d, c, b, a];
    let roots = if signature == 0 {
        let r = roots::cubic_real_roots(a, b, c, d);
        if r.len() != 3 {
            return Err(Error::NotCertified { radius: f64::INFINITY, target: target_precision });
        }
        [Complex64::new(r[0], 0.0), Complex64::new(r[1], 0.0), Complex64::new(r[2], 0.0)]
    } else {
        let z = roots::cubic_roots(a, b, c, d);
        if z[1].im == 0.0 {
            return Err(Error::NotCertified { radius: f64::INFINITY, target: target_precision });
        }
        z
    };
    let mut radius = [0.0; 3];
    for j in 0..3 {
        let r = roots::error_radius(&p, roots[j]);
        let rel = r / roots[j].norm().max(1.0);
        if !(rel <= target_precision) {
            return Err(Error::NotCertified { radius: rel, target: target_precision });
        }
        radius[j] = r;
    }
    let omega = roots.map(|z| z * a);
    let theta = roots.map(|z| z * z * a + z * b + c);
    Ok(EmbeddingData { form, roots, radius, omega, theta, signature, disc })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plastic_field() {
        let e = embeddings(&BinaryCubicForm::new(1, 0, -1, -1), DEFAULT_PRECISION).unwrap();
        assert_eq!(e.signature, 1);
        assert!((e.roots[0].re - 1.324_717_957).abs() < 1e-9);
        assert!(e.omega.iter().sum::<Complex64>().norm() < 1e-14);
        assert!(e.check_trace_identities() <= 1.0);
        assert!(e.disc_product_error() < 1e-12);
    }

    #[test]
    fn cyclic_field() {
        let e = embeddings(&BinaryCubicForm::new(1, 1, -2, -1), DEFAULT_PRECISION).unwrap();
        assert_eq!(e.signature, 0);
        assert!((e.theta.iter().sum::<Complex64>().re + 2.0).abs() < 1e-14);
        assert!(e.check_trace_identities() <= 1.0);
    }

    #[test]
    fn cube_root_of_two() {
        let e = embeddings(&BinaryCubicForm::new(1, 0, 0, -2), DEFAULT_PRECISION).unwrap();
        assert!((e.roots[0].re - 2f64.cbrt()).abs() < 1e-15);
        let s: Complex64 = e.omega.iter().map(|w| w * w).sum();
        assert!(s.norm() < 1e-14);
        assert!(e.check_trace_identities() <= 1.0);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(embeddings(&BinaryCubicForm::new(0, 1, 1, 0), DEFAULT_PRECISION).is_err());
        assert!(embeddings(&BinaryCubicForm::new(1, 2, 1, 0), DEFAULT_PRECISION).is_err());
    }
}
