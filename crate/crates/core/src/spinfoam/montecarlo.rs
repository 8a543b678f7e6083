//! Monte Carlo evaluation of the Ooguri group integrals.
//!
//! Each face carries `⟨J⁻¹n| g⁻¹ g′ |n′⟩`, where `J` is the SU(2) structure
//! map, so the estimator converges to the intertwiner contraction with the
//! coherent boundary projected onto the invariant subspace. Samples are
//! processed in fixed blocks whose generators are keyed by `(seed, block)`,
//! which keeps results bitwise identical for any thread count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{leg_towards, pentagon_links, vertex_state, LEG_OFFSETS};
use crate::error::{FoamError, Result};
use crate::intertwiner::{project_coherent, FaceNormals};
use crate::su2::{haar_sample, spinor_inner, structure_map_inverse, Spinor, Su2};

pub const MC_BLOCK_SIZE: usize = 1 << 14;
pub const MIN_MC_SAMPLES: usize = 1000;

/// Sample mean with per-component standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: Complex64,
    pub std_error_re: f64,
    pub std_error_im: f64,
    pub samples: usize,
}

impl McEstimate {
    /// `√(σ_re² + σ_im²)`.
    pub fn std_error(&self) -> f64 {
        self.std_error_re.hypot(self.std_error_im)
    }

    /// Whether both components lie within `k` standard errors of `exact`.
    pub fn agrees_with(&self, exact: Complex64, k: f64) -> bool {
        (self.mean.re - exact.re).abs() <= k * self.std_error_re
            && (self.mean.im - exact.im).abs() <= k * self.std_error_im
    }
}

#[derive(Clone, Copy, Default)]
struct Moments {
    sum: Complex64,
    sum_sq_re: f64,
    sum_sq_im: f64,
}

fn run_blocks<F>(samples: usize, seed: u64, scale: f64, draw: F) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> Complex64 + Sync,
{
    if samples < MIN_MC_SAMPLES {
        return Err(FoamError::InvalidArgument(format!(
            "at least {MIN_MC_SAMPLES} Monte Carlo samples are required, got {samples}"
        )));
    }
    let blocks = samples.div_ceil(MC_BLOCK_SIZE);
    let partial: Vec<Moments> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(block as u64);
            let count = MC_BLOCK_SIZE.min(samples - block * MC_BLOCK_SIZE);
            let mut m = Moments::default();
            for _ in 0..count {
                let x = draw(&mut rng) * scale;
                m.sum += x;
                m.sum_sq_re += x.re * x.re;
                m.sum_sq_im += x.im * x.im;
            }
            m
        })
        .collect();
    let total = partial.iter().fold(Moments::default(), |acc, m| Moments {
        sum: acc.sum + m.sum,
        sum_sq_re: acc.sum_sq_re + m.sum_sq_re,
        sum_sq_im: acc.sum_sq_im + m.sum_sq_im,
    });
    let n = samples as f64;
    let mean = total.sum / n;
    let var_re = (total.sum_sq_re / n - mean.re * mean.re).max(0.0) * n / (n - 1.0);
    let var_im = (total.sum_sq_im / n - mean.im * mean.im).max(0.0) * n / (n - 1.0);
    Ok(McEstimate {
        mean,
        std_error_re: (var_re / n).sqrt(),
        std_error_im: (var_im / n).sqrt(),
        samples,
    })
}

/// Face normals of the five tetrahedra of one 4-simplex, each in leg order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentBoundary {
    pub tetrahedra: [FaceNormals; 5],
}

impl CoherentBoundary {
    pub fn new(tetrahedra: [FaceNormals; 5]) -> Self {
        Self { tetrahedra }
    }

    /// Twenty unit vectors, tetrahedron-major.
    pub fn from_rows(rows: &[[f64; 3]]) -> Result<Self> {
        if rows.len() != 20 {
            return Err(FoamError::Boundary(format!(
                "expected 20 face normals, got {}",
                rows.len()
            )));
        }
        let mut t = [FaceNormals::regular(); 5];
        for (a, slot) in t.iter_mut().enumerate() {
            *slot = FaceNormals::new(std::array::from_fn(|k| rows[4 * a + k]))?;
        }
        Ok(Self { tetrahedra: t })
    }

    pub fn rows(&self) -> Vec<[f64; 3]> {
        self.tetrahedra.iter().flat_map(|t| *t.normals()).collect()
    }

    /// Independent uniformly random face normals.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            tetrahedra: std::array::from_fn(|_| random_normals(rng)),
        }
    }

    /// Face normals of a regular 4-simplex, read off as the self-dual parts
    /// of its face bivectors.
    pub fn regular_simplex() -> Self {
        let s = 1.0 / 5f64.sqrt();
        let vertices = [
            [1.0, 1.0, 1.0, -s],
            [1.0, -1.0, -1.0, -s],
            [-1.0, 1.0, -1.0, -s],
            [-1.0, -1.0, 1.0, -s],
            [0.0, 0.0, 0.0, 4.0 * s],
        ];
        // outward normal of the tetrahedron opposite vertex a
        let outward: [[f64; 4]; 5] = vertices.map(|p| {
            let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            p.map(|x| -x / n)
        });
        let tetrahedra = std::array::from_fn(|a| {
            let normals = std::array::from_fn(|k| {
                let b = (a + LEG_OFFSETS[k]) % 5;
                normalize3(self_dual(&outward[a], &outward[b]))
            });
            FaceNormals::new(normals).expect("unit by construction")
        });
        Self { tetrahedra }
    }

    /// Coefficients of each tetrahedron's projection onto `{|0⟩, |1⟩}`.
    pub fn projections(&self) -> [[Complex64; 2]; 5] {
        self.tetrahedra.map(|t| project_coherent(&t))
    }
}

fn random_normals<R: Rng + ?Sized>(rng: &mut R) -> FaceNormals {
    let normals = std::array::from_fn(|_| {
        let z: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let r = (1.0 - z * z).max(0.0).sqrt();
        [r * phi.cos(), r * phi.sin(), z]
    });
    FaceNormals::new(normals).expect("unit by construction")
}

fn self_dual(u: &[f64; 4], v: &[f64; 4]) -> [f64; 3] {
    let b = |i: usize, j: usize| u[i] * v[j] - u[j] * v[i];
    [b(0, 1) + b(2, 3), b(0, 2) + b(3, 1), b(0, 3) + b(1, 2)]
}

fn normalize3(v: [f64; 3]) -> [f64; 3] {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.map(|x| x / n)
}

/// Bra and ket spinors of every leg: `(J⁻¹|n⟩, |n⟩)`.
fn leg_spinors(t: &FaceNormals) -> [(Spinor, Spinor); 4] {
    t.coherent_states().map(|c| {
        let ket = c.spinor();
        (structure_map_inverse(&ket), ket)
    })
}

/// Exact value `2¹⁰ Σ_i f(i) Π_a g_a(i_a)` of the single-vertex integral.
pub fn contraction_amplitude_single(b: &CoherentBoundary) -> Complex64 {
    let w = vertex_state();
    let proj = b.projections();
    let overlap: Complex64 = (0..32usize)
        .map(|idx| {
            (0..5).fold(w.amplitudes()[idx], |acc, a| acc * proj[a][super::bit(idx, a, 5)])
        })
        .sum();
    overlap * 1024.0 * w.normalization()
}

/// Monte Carlo estimate of the single-vertex Ooguri amplitude, including the
/// `2¹⁰` face factor. The first group element is gauge-fixed to the identity.
pub fn mc_amplitude_single(b: &CoherentBoundary, samples: usize, seed: u64) -> Result<McEstimate> {
    let spinors = b.tetrahedra.map(|t| leg_spinors(&t));
    let links: Vec<(usize, usize, usize, usize)> = pentagon_links()
        .iter()
        .map(|&(t, h)| (t, leg_towards(t, h), h, leg_towards(h, t)))
        .collect();

    run_blocks(samples, seed, 1024.0, |rng| {
        let mut g = [Su2::identity(); 5];
        for slot in g.iter_mut().skip(1) {
            *slot = haar_sample(rng);
        }
        links.iter().fold(Complex64::new(1.0, 0.0), |acc, &(t, kt, h, kh)| {
            let bra = g[t].apply(&spinors[t][kt].0);
            let ket = g[h].apply(&spinors[h][kh].1);
            acc * spinor_inner(&bra, &ket)
        })
    })
}

/// Coherent data for two 4-simplices glued along tetrahedron 4 of each.
///
/// `a[t]` and `b[t]` hold the four leg normals of tetrahedron `t` (`0..4`)
/// of each vertex; the leg towards tetrahedron 4 lies on a bulk face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentBoundary8 {
    pub a: [FaceNormals; 4],
    pub b: [FaceNormals; 4],
}

impl CoherentBoundary8 {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            a: std::array::from_fn(|_| random_normals(rng)),
            b: std::array::from_fn(|_| random_normals(rng)),
        }
    }
}

/// Exact two-vertex value `2¹⁶ Σ_k f_A(·,k) f_B(·,k)` on the projected data.
pub fn contraction_amplitude_double(b: &CoherentBoundary8) -> Complex64 {
    let w = vertex_state();
    let pa = b.a.map(|t| project_coherent(&t));
    let pb = b.b.map(|t| project_coherent(&t));
    let side = |proj: &[[Complex64; 2]; 4], k: usize| -> Complex64 {
        (0..16usize)
            .map(|i| {
                (0..4).fold(w.amplitudes()[(i << 1) | k], |acc, t| {
                    acc * proj[t][super::bit(i, t, 4)]
                })
            })
            .sum()
    };
    let z = w.normalization();
    (0..2).map(|k| side(&pa, k) * side(&pb, k)).sum::<Complex64>() * 65536.0 * z * z
}

/// Monte Carlo estimate of the glued two-vertex amplitude (experimental).
///
/// Bulk faces carry `⟨J⁻¹n_a| g_a⁻¹ h g′_a |n′_a⟩` where `h` is the holonomy
/// through the shared tetrahedron. The variance is much larger than in the
/// single-vertex case and no accuracy target is attached to it.
pub fn mc_amplitude_double(b: &CoherentBoundary8, samples: usize, seed: u64) -> Result<McEstimate> {
    let sa = b.a.map(|t| leg_spinors(&t));
    let sb = b.b.map(|t| leg_spinors(&t));
    let internal: Vec<(usize, usize, usize, usize)> = pentagon_links()
        .iter()
        .filter(|&&(t, h)| t < 4 && h < 4)
        .map(|&(t, h)| (t, leg_towards(t, h), h, leg_towards(h, t)))
        .collect();

    run_blocks(samples, seed, 65536.0, |rng| {
        let mut ga = [Su2::identity(); 4];
        let mut gb = [Su2::identity(); 4];
        for g in ga.iter_mut().skip(1).chain(gb.iter_mut().skip(1)) {
            *g = haar_sample(rng);
        }
        let h = haar_sample(rng);
        let face = |g: &[Su2; 4], s: &[[(Spinor, Spinor); 4]; 4], &(t, kt, hd, kh): &(usize, usize, usize, usize)| {
            spinor_inner(&g[t].apply(&s[t][kt].0), &g[hd].apply(&s[hd][kh].1))
        };
        let mut acc = Complex64::new(1.0, 0.0);
        for l in &internal {
            acc *= face(&ga, &sa, l) * face(&gb, &sb, l);
        }
        for t in 0..4 {
            let k = leg_towards(t, 4);
            let bra = ga[t].apply(&sa[t][k].0);
            let ket = h.apply(&gb[t].apply(&sb[t][k].1));
            acc *= spinor_inner(&bra, &ket);
        }
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intertwiner::IntertwinerBloch;

    #[test]
    fn regular_simplex_faces_close_and_match() {
        let b = CoherentBoundary::regular_simplex();
        for (a, t) in b.tetrahedra.iter().enumerate() {
            let n = t.normals();
            for c in 0..3 {
                assert!(n.iter().map(|v| v[c]).sum::<f64>().abs() < 1e-12);
            }
            for i in 0..4 {
                for j in (i + 1)..4 {
                    let d: f64 = (0..3).map(|c| n[i][c] * n[j][c]).sum();
                    assert!((d + 1.0 / 3.0).abs() < 1e-12);
                }
                let other = (a + LEG_OFFSETS[i]) % 5;
                let back = b.tetrahedra[other].normals()[leg_towards(other, a)];
                for c in 0..3 {
                    assert!((n[i][c] + back[c]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn regular_simplex_projects_onto_one_volume_eigenstate() {
        let b = CoherentBoundary::regular_simplex();
        for p in b.projections() {
            assert!((p[0].norm_sqr() + p[1].norm_sqr() - 2.0 / 9.0).abs() < 1e-12);
            let bloch = IntertwinerBloch::from_amplitudes(p[0], p[1]).unwrap();
            assert!((bloch.theta - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
            assert!((bloch.phi - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
        }
    }

    #[test]
    fn estimates_are_deterministic_and_block_consistent() {
        let b = CoherentBoundary::regular_simplex();
        let x = mc_amplitude_single(&b, 40_000, 7).unwrap();
        let y = mc_amplitude_single(&b, 40_000, 7).unwrap();
        assert_eq!(x, y);
        let z = mc_amplitude_single(&b, 40_000, 8).unwrap();
        assert_ne!(x.mean, z.mean);
    }

    #[test]
    fn too_few_samples_rejected() {
        let b = CoherentBoundary::regular_simplex();
        assert!(mc_amplitude_single(&b, 10, 0).is_err());
    }

    #[test]
    fn random_boundary_rows_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = CoherentBoundary::random(&mut rng);
        let back = CoherentBoundary::from_rows(&b.rows()).unwrap();
        for (x, y) in b.rows().iter().zip(back.rows()) {
            for c in 0..3 {
                assert!((x[c] - y[c]).abs() < 1e-15);
            }
        }
        assert!(CoherentBoundary::from_rows(&b.rows()[..19]).is_err());
    }

    #[test]
    fn two_vertex_estimate_is_statistically_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b = CoherentBoundary8::random(&mut rng);
        let exact = contraction_amplitude_double(&b);
        let est = mc_amplitude_double(&b, 200_000, 5).unwrap();
        assert!(est.agrees_with(exact, 5.0), "{est:?} vs {exact}");
    }
}
