//! SU(2) substrate: exact half-integers, Clebsch–Gordan coefficients, group
//! elements, spin-1/2 coherent states and Haar sampling.
//!
//! Group elements are stored as the first column `(a, b)` of
//!
//! ```text
//!     U = | a  -b* |
//!         | b   a* |      |a|² + |b|² = 1
//! ```
//!
//! which is the usual unit-quaternion parameterization written with two
//! complex numbers. All conventions are Condon–Shortley.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{FoamError, Result};

/// A two-component spinor in the `{|↑⟩, |↓⟩}` basis.
pub type Spinor = [Complex64; 2];

/// Largest `2j` accepted by [`clebsch_gordan`]. Keeps every factorial
/// product inside `i128`.
pub const MAX_TWICE_SPIN: i32 = 8;

/// A half-integer stored as twice its value, so spin arithmetic never
/// touches floating point.
///
/// Spin labels are non-negative; the same type also carries magnetic
/// quantum numbers, which may be negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInteger {
    twice: i32,
}

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger { twice: 0 };
    pub const HALF: HalfInteger = HalfInteger { twice: 1 };

    pub const fn from_twice(twice: i32) -> Self {
        Self { twice }
    }

    /// A spin label; rejects negative values.
    pub fn spin(twice: i32) -> Result<Self> {
        if twice < 0 {
            return Err(FoamError::HalfInteger(format!(
                "spin must be non-negative, got {twice}/2"
            )));
        }
        Ok(Self { twice })
    }

    /// Parses a float that must be an exact multiple of 1/2.
    pub fn from_f64(value: f64) -> Result<Self> {
        let twice = 2.0 * value;
        if !twice.is_finite() || (twice - twice.round()).abs() > 1e-12 {
            return Err(FoamError::HalfInteger(format!("{value} is not a half-integer")));
        }
        Ok(Self { twice: twice.round() as i32 })
    }

    pub const fn twice(self) -> i32 {
        self.twice
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// Dimension `2j + 1` of the spin-j irrep.
    pub const fn dimension(self) -> i32 {
        self.twice + 1
    }
}

impl std::ops::Add for HalfInteger {
    type Output = HalfInteger;
    fn add(self, rhs: Self) -> Self {
        Self { twice: self.twice + rhs.twice }
    }
}

impl std::ops::Sub for HalfInteger {
    type Output = HalfInteger;
    fn sub(self, rhs: Self) -> Self {
        Self { twice: self.twice - rhs.twice }
    }
}

impl std::ops::Neg for HalfInteger {
    type Output = HalfInteger;
    fn neg(self) -> Self {
        Self { twice: -self.twice }
    }
}

impl std::fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

fn factorial(n: i64) -> i128 {
    debug_assert!(n >= 0);
    (1..=n as i128).product()
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Exact rational `num / den` with `den > 0`.
#[derive(Debug, Clone, Copy)]
struct Rational {
    num: i128,
    den: i128,
}

impl Rational {
    fn new(num: i128, den: i128) -> Self {
        let g = gcd(num, den).max(1);
        let sign = if den < 0 { -1 } else { 1 };
        Self { num: sign * num / g, den: sign * den / g }
    }

    fn add(self, other: Self) -> Self {
        let g = gcd(self.den, other.den);
        let den = self.den / g * other.den;
        Self::new(self.num * (den / self.den) + other.num * (den / other.den), den)
    }
}

fn check_projection(j: HalfInteger, m: HalfInteger) -> Result<()> {
    if j.twice < 0 {
        return Err(FoamError::HalfInteger(format!("negative spin {j}")));
    }
    if j.twice > MAX_TWICE_SPIN {
        return Err(FoamError::HalfInteger(format!(
            "spin {j} exceeds supported maximum {}/2",
            MAX_TWICE_SPIN
        )));
    }
    if m.twice.abs() > j.twice || (j.twice - m.twice) % 2 != 0 {
        return Err(FoamError::HalfInteger(format!("projection {m} invalid for spin {j}")));
    }
    Ok(())
}

/// Clebsch–Gordan coefficient `⟨j1 m1; j2 m2 | J M⟩` from Racah's
/// single-sum formula.
///
/// The squared coefficient is assembled as an exact rational; only the final
/// square root is floating point. Selection-rule violations (M ≠ m1 + m2,
/// broken triangle) return 0; malformed inputs (|m| > j, parity mismatch,
/// j beyond [`MAX_TWICE_SPIN`]) return an error.
pub fn clebsch_gordan(
    j1: HalfInteger,
    m1: HalfInteger,
    j2: HalfInteger,
    m2: HalfInteger,
    j: HalfInteger,
    m: HalfInteger,
) -> Result<f64> {
    check_projection(j1, m1)?;
    check_projection(j2, m2)?;
    check_projection(j, m)?;

    if m1.twice + m2.twice != m.twice {
        return Ok(0.0);
    }
    if j.twice > j1.twice + j2.twice
        || j.twice < (j1.twice - j2.twice).abs()
        || (j1.twice + j2.twice + j.twice) % 2 != 0
    {
        return Ok(0.0);
    }

    // every combination below is an integer once the triangle/parity checks pass
    let h = |t: i32| i64::from(t / 2);
    let (t1, t2, tj) = (j1.twice, j2.twice, j.twice);
    let (u1, u2, um) = (m1.twice, m2.twice, m.twice);

    let j1_j2_mj = h(t1 + t2 - tj);
    let j1_mj2_j = h(t1 - t2 + tj);
    let mj1_j2_j = h(-t1 + t2 + tj);
    let sum_p1 = h(t1 + t2 + tj) + 1;

    let pre_num = i128::from(tj + 1)
        * factorial(j1_mj2_j)
        * factorial(mj1_j2_j)
        * factorial(j1_j2_mj)
        * factorial(h(tj + um))
        * factorial(h(tj - um))
        * factorial(h(t1 - u1))
        * factorial(h(t1 + u1))
        * factorial(h(t2 - u2))
        * factorial(h(t2 + u2));
    let pre_den = factorial(sum_p1);

    let a = j1_j2_mj; // j1 + j2 - J
    let b = h(t1 - u1); // j1 - m1
    let c = h(t2 + u2); // j2 + m2
    let d = h(tj - t2 + u1); // J - j2 + m1
    let e = h(tj - t1 - u2); // J - j1 - m2

    let k_min = 0.max(-d).max(-e);
    let k_max = a.min(b).min(c);
    let mut sum = Rational::new(0, 1);
    for k in k_min..=k_max {
        let den = factorial(k)
            * factorial(a - k)
            * factorial(b - k)
            * factorial(c - k)
            * factorial(d + k)
            * factorial(e + k);
        let sign = if k % 2 == 0 { 1 } else { -1 };
        sum = sum.add(Rational::new(sign, den));
    }
    if sum.num == 0 {
        return Ok(0.0);
    }

    // C² = pre_num / pre_den * sum²
    let squared = (pre_num as f64 / pre_den as f64)
        * (sum.num as f64 / sum.den as f64).powi(2);
    Ok(sum.num.signum() as f64 * squared.sqrt())
}

/// An element of SU(2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2 {
    a: Complex64,
    b: Complex64,
}

impl Su2 {
    pub fn identity() -> Self {
        Self { a: Complex64::new(1.0, 0.0), b: Complex64::new(0.0, 0.0) }
    }

    /// Builds `U = q0·I + i(q1 σx + q2 σy + q3 σz)` from a unit quaternion,
    /// renormalizing to absorb rounding.
    pub fn from_quaternion(q: [f64; 4]) -> Self {
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        let [q0, q1, q2, q3] = q.map(|x| x / norm);
        Self { a: Complex64::new(q0, q3), b: Complex64::new(-q2, q1) }
    }

    /// `exp(-i angle n̂·σ/2)`, the spin-1/2 rotation by `angle` about `axis`.
    pub fn rotation(axis: [f64; 3], angle: f64) -> Self {
        let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        let (s, c) = (angle / 2.0).sin_cos();
        let [x, y, z] = axis.map(|v| v / norm);
        Self::from_quaternion([c, -s * x, -s * y, -s * z])
    }

    pub fn quaternion(&self) -> [f64; 4] {
        [self.a.re, self.b.im, -self.b.re, self.a.im]
    }

    /// The 2×2 matrix, row-major.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.a, -self.b.conj()], [self.b, self.a.conj()]]
    }

    pub fn compose(&self, other: &Su2) -> Su2 {
        Su2 {
            a: self.a * other.a - self.b.conj() * other.b,
            b: self.b * other.a + self.a.conj() * other.b,
        }
    }

    pub fn inverse(&self) -> Su2 {
        Su2 { a: self.a.conj(), b: -self.b }
    }

    pub fn trace(&self) -> f64 {
        2.0 * self.a.re
    }

    pub fn apply(&self, v: &Spinor) -> Spinor {
        [self.a * v[0] - self.b.conj() * v[1], self.b * v[0] + self.a.conj() * v[1]]
    }

    /// Maximum entrywise deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let m = self.matrix();
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let entry: Complex64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((entry - target).norm());
            }
        }
        worst
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.a.conj() + self.b * self.b.conj()
    }

    pub fn max_abs_diff(&self, other: &Su2) -> f64 {
        (self.a - other.a).norm().max((self.b - other.b).norm())
    }
}

impl std::ops::Mul for Su2 {
    type Output = Su2;
    fn mul(self, rhs: Su2) -> Su2 {
        self.compose(&rhs)
    }
}

/// Group product `g·g′`.
pub fn su2_compose(g: &Su2, h: &Su2) -> Su2 {
    g.compose(h)
}

pub fn su2_inverse(g: &Su2) -> Su2 {
    g.inverse()
}

/// Draws a Haar-distributed element: four i.i.d. standard normals,
/// normalized onto S³ ≅ SU(2). Deterministic given the state of `rng`.
pub fn haar_sample<R: Rng + ?Sized>(rng: &mut R) -> Su2 {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let norm_sq: f64 = q.iter().map(|x| x * x).sum();
        if norm_sq > 1e-24 {
            return Su2::from_quaternion(q);
        }
    }
}

/// Spin-1/2 coherent state `cos(Θ/2)|↑⟩ + e^{iΦ} sin(Θ/2)|↓⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentHalfSpin {
    theta: f64,
    phi: f64,
}

impl CoherentHalfSpin {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) || !phi.is_finite() {
            return Err(FoamError::InvalidArgument(format!(
                "coherent state angles out of range: theta = {theta}, phi = {phi}"
            )));
        }
        Ok(Self { theta, phi })
    }

    /// Coherent state pointing along a unit vector (tolerance 1e-9).
    pub fn from_direction(n: [f64; 3]) -> Result<Self> {
        let norm = n.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(FoamError::NonUnitNormal { norm });
        }
        let theta = (n[2] / norm).clamp(-1.0, 1.0).acos();
        let phi = if n[0].abs() < 1e-15 && n[1].abs() < 1e-15 { 0.0 } else { n[1].atan2(n[0]) };
        Ok(Self { theta, phi })
    }

    pub fn north() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn south() -> Self {
        Self { theta: std::f64::consts::PI, phi: 0.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn spinor(&self) -> Spinor {
        let (s, c) = (self.theta / 2.0).sin_cos();
        [Complex64::new(c, 0.0), Complex64::from_polar(s, self.phi)]
    }

    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// `⟨u|v⟩`.
pub fn spinor_inner(u: &Spinor, v: &Spinor) -> Complex64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

/// `⟨u| g⁻¹ g′ |v⟩` for raw spinors.
pub fn spinor_overlap(u: &Spinor, g: &Su2, h: &Su2, v: &Spinor) -> Complex64 {
    spinor_inner(&g.apply(u), &h.apply(v))
}

/// `⟨n| g⁻¹ g′ |n′⟩` for coherent states.
pub fn coherent_overlap(n: &CoherentHalfSpin, g: &Su2, h: &Su2, n2: &CoherentHalfSpin) -> Complex64 {
    spinor_overlap(&n.spinor(), g, h, &n2.spinor())
}

/// The antiunitary structure map `J|v⟩ = ε |v̄⟩` with `ε = iσ_y`.
///
/// It commutes with SU(2) and satisfies `⟨u|v⟩ = (Ju)ᵀ ε v`, which turns
/// sesquilinear face overlaps into the bilinear spin-0 link pairing.
pub fn structure_map(v: &Spinor) -> Spinor {
    [v[1].conj(), -v[0].conj()]
}

/// Inverse of [`structure_map`] (`J² = -1` on spin 1/2).
pub fn structure_map_inverse(v: &Spinor) -> Spinor {
    [-v[1].conj(), v[0].conj()]
}

/// The antisymmetric spin-0 bilinear form `uᵀ ε v = u↑ v↓ - u↓ v↑`.
pub fn epsilon_pairing(u: &Spinor, v: &Spinor) -> Complex64 {
    u[0] * v[1] - u[1] * v[0]
}
