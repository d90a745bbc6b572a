//! Dense Hermitian eigensolver (cyclic Jacobi with phase rotations).
//!
//! Every matrix in this crate is small (dimension ≤ ~30), so a quadratically
//! convergent Jacobi sweep is both simpler and more accurate than iterative
//! Krylov-style methods, and it avoids an external LAPACK dependency.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

/// Eigendecomposition of a Hermitian matrix: `a = v · diag(w) · v†`.
///
/// Returns eigenvalues sorted in ascending order with the matching
/// eigenvector columns. The input is assumed Hermitian; only its Hermitian
/// part influences the result.
pub fn eigh(a: &Array2<C64>) -> (Array1<f64>, Array2<C64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigh requires a square matrix");
    if n == 0 {
        return (Array1::zeros(0), Array2::zeros((0, 0)));
    }

    // Work on the explicit Hermitian average so tiny asymmetries in the
    // input cannot push the iteration off the Hermitian manifold.
    let mut m: Array2<C64> = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            m[[i, j]] = 0.5 * (a[[i, j]] + a[[j, i]].conj());
        }
    }
    let mut v: Array2<C64> = Array2::eye(n);

    let scale: f64 = m
        .iter()
        .map(|z| z.norm())
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let tol = 1e-15 * scale;

    for _sweep in 0..100 {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[[p, q]].norm());
            }
        }
        if off <= tol {
            break;
        }

        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                let r = apq.norm();
                if r <= tol {
                    m[[p, q]] = C64::new(0.0, 0.0);
                    m[[q, p]] = C64::new(0.0, 0.0);
                    continue;
                }
                // Factor out the phase of the pivot, then do a real Jacobi
                // rotation on the remaining 2x2 symmetric block.
                let phase = apq / r;
                let app = m[[p, p]].re;
                let aqq = m[[q, q]].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let ph_conj = phase.conj();

                // Columns: m <- m · U with U the (p,q) plane rotation.
                for i in 0..n {
                    let mip = m[[i, p]];
                    let miq = m[[i, q]];
                    m[[i, p]] = c * mip - s * ph_conj * miq;
                    m[[i, q]] = s * mip + c * ph_conj * miq;
                }
                // Rows: m <- U† · m.
                for j in 0..n {
                    let mpj = m[[p, j]];
                    let mqj = m[[q, j]];
                    m[[p, j]] = c * mpj - s * phase * mqj;
                    m[[q, j]] = s * mpj + c * phase * mqj;
                }
                // The pivot is annihilated by construction; pin it exactly
                // and keep the diagonal real.
                m[[p, q]] = C64::new(0.0, 0.0);
                m[[q, p]] = C64::new(0.0, 0.0);
                m[[p, p]] = C64::new(m[[p, p]].re, 0.0);
                m[[q, q]] = C64::new(m[[q, q]].re, 0.0);

                for i in 0..n {
                    let vip = v[[i, p]];
                    let viq = v[[i, q]];
                    v[[i, p]] = c * vip - s * ph_conj * viq;
                    v[[i, q]] = s * vip + c * ph_conj * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].re.partial_cmp(&m[[j, j]].re).unwrap());

    let w = Array1::from_iter(order.iter().map(|&i| m[[i, i]].re));
    let mut vs: Array2<C64> = Array2::zeros((n, n));
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            vs[[i, new]] = v[[i, old]];
        }
    }
    (w, vs)
}

/// Eigenvalues only.
pub fn eigvalsh(a: &Array2<C64>) -> Array1<f64> {
    eigh(a).0
}

/// Hermitian matrix function: `f(a) = v · diag(f(w)) · v†`.
pub fn hermitian_fn(a: &Array2<C64>, f: impl Fn(f64) -> C64) -> Array2<C64> {
    let n = a.nrows();
    let (w, v) = eigh(a);
    let mut out: Array2<C64> = Array2::zeros((n, n));
    for k in 0..n {
        let fk = f(w[k]);
        if fk.norm() == 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = v[[i, k]];
            for j in 0..n {
                out[[i, j]] += fk * vik * v[[j, k]].conj();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> Array2<C64> {
        let mut a: Array2<C64> = Array2::zeros((n, n));
        for i in 0..n {
            a[[i, i]] = C64::new(rng.gen::<f64>() - 0.5, 0.0);
            for j in (i + 1)..n {
                let z = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                a[[i, j]] = z;
                a[[j, i]] = z.conj();
            }
        }
        a
    }

    fn max_abs(a: &Array2<C64>) -> f64 {
        a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn pauli_x_eigenvalues() {
        let mut a: Array2<C64> = Array2::zeros((2, 2));
        a[[0, 1]] = C64::new(1.0, 0.0);
        a[[1, 0]] = C64::new(1.0, 0.0);
        let (w, v) = eigh(&a);
        assert!((w[0] + 1.0).abs() < 1e-14);
        assert!((w[1] - 1.0).abs() < 1e-14);
        // eigenvectors (1, ∓1)/√2 up to phase
        for k in 0..2 {
            let ratio = v[[1, k]] / v[[0, k]];
            assert!((ratio.re - w[k]).abs() < 1e-12 && ratio.im.abs() < 1e-12);
        }
    }

    #[test]
    fn pauli_y_eigenvalues() {
        let mut a: Array2<C64> = Array2::zeros((2, 2));
        a[[0, 1]] = C64::new(0.0, -1.0);
        a[[1, 0]] = C64::new(0.0, 1.0);
        let w = eigvalsh(&a);
        assert!((w[0] + 1.0).abs() < 1e-14);
        assert!((w[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 3, 5, 8, 13, 26] {
            let a = random_hermitian(n, &mut rng);
            let (w, v) = eigh(&a);
            // v diag(w) v† == a
            let mut recon: Array2<C64> = Array2::zeros((n, n));
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        recon[[i, j]] += C64::new(w[k], 0.0) * v[[i, k]] * v[[j, k]].conj();
                    }
                }
            }
            let err = max_abs(&(&recon - &a));
            assert!(err < 1e-12, "reconstruction error {err} at n={n}");
            // v†v == I
            let vd = v.t().mapv(|z| z.conj());
            let gram = vd.dot(&v);
            let eye: Array2<C64> = Array2::eye(n);
            assert!(max_abs(&(&gram - &eye)) < 1e-12);
            // ascending order
            for k in 1..n {
                assert!(w[k] >= w[k - 1]);
            }
        }
    }

    #[test]
    fn degenerate_spectrum() {
        // identity plus a rank-one bump keeps a (n-1)-fold degenerate level
        let n = 6;
        let mut a: Array2<C64> = Array2::eye(n);
        a[[0, 0]] = C64::new(3.0, 0.0);
        let (w, _) = eigh(&a);
        for k in 0..n - 1 {
            assert!((w[k] - 1.0).abs() < 1e-14);
        }
        assert!((w[n - 1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_fn_square_root() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_hermitian(5, &mut rng);
        // a² is PSD; its Hermitian square root squared must give a² back
        let a2 = a.dot(&a);
        let root = hermitian_fn(&a2, |x| C64::new(x.max(0.0).sqrt(), 0.0));
        let back = root.dot(&root);
        assert!(max_abs(&(&back - &a2)) < 1e-12);
    }
}
