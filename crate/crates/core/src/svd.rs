//! One-sided (Hestenes) Jacobi SVD for small complex matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

const JACOBI_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 80;

/// `A = left * diag(values) * right^H` with `r = min(m, n)` singular triples,
/// values descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub values: Vec<f64>,
    /// `m x r`, orthonormal columns.
    pub left: DMatrix<Complex64>,
    /// `n x r`, orthonormal columns.
    pub right: DMatrix<Complex64>,
}

pub fn jacobi_svd(a: &DMatrix<Complex64>) -> Svd {
    if a.ncols() > a.nrows() {
        let Svd {
            values,
            left,
            right,
        } = tall_svd(&a.adjoint());
        return Svd {
            values,
            left: right,
            right: left,
        };
    }
    tall_svd(a)
}

fn column_dot(w: &DMatrix<Complex64>, p: usize, q: usize) -> Complex64 {
    w.column(p)
        .iter()
        .zip(w.column(q).iter())
        .map(|(a, b)| a.conj() * b)
        .sum()
}

/// Requires `nrows >= ncols`.
fn tall_svd(a: &DMatrix<Complex64>) -> Svd {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = DMatrix::<Complex64>::identity(n, n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = column_dot(&w, p, q);
                let g = gamma.norm();
                if g == 0.0 || g <= JACOBI_TOLERANCE * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut w, &mut v] {
                    for row in 0..mat.nrows() {
                        let x = mat[(row, p)];
                        let y = mat[(row, q)] * phase;
                        mat[(row, p)] = x * c - y * s;
                        mat[(row, q)] = x * s + y * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let cutoff = values.first().copied().unwrap_or(0.0) * 1e-14 + f64::MIN_POSITIVE;
    let right = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    let mut left = DMatrix::<Complex64>::zeros(m, n);
    let mut filled = Vec::new();
    for (c, &j) in order.iter().enumerate() {
        if norms[j] > cutoff {
            let col = w.column(j) / Complex64::new(norms[j], 0.0);
            left.set_column(c, &col);
            filled.push(c);
        }
    }
    complete_orthonormal(&mut left, &filled);
    Svd {
        values,
        left,
        right,
    }
}

/// Fills the columns of `basis` not listed in `filled` with unit vectors
/// orthogonal to everything already present (Gram-Schmidt on the standard basis).
fn complete_orthonormal(basis: &mut DMatrix<Complex64>, filled: &[usize]) {
    let (m, r) = basis.shape();
    let mut done: Vec<usize> = filled.to_vec();
    let mut candidate = 0;
    for c in 0..r {
        if filled.contains(&c) {
            continue;
        }
        while candidate < m {
            let mut e = nalgebra::DVector::<Complex64>::zeros(m);
            e[candidate] = Complex64::new(1.0, 0.0);
            candidate += 1;
            for _ in 0..2 {
                for &d in &done {
                    let col = basis.column(d);
                    let proj: Complex64 = col.iter().zip(e.iter()).map(|(a, b)| a.conj() * b).sum();
                    e -= col * proj;
                }
            }
            let norm = e.norm();
            if norm > 1e-8 {
                basis.set_column(c, &(e / Complex64::new(norm, 0.0)));
                done.push(c);
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn check(a: &DMatrix<Complex64>) {
        let svd = jacobi_svd(a);
        let r = a.nrows().min(a.ncols());
        assert_eq!(svd.values.len(), r);
        assert!(svd.values.windows(2).all(|w| w[0] >= w[1]));
        let sigma = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            r,
            svd.values.iter().map(|&s| c(s, 0.0)),
        ));
        let rebuilt = &svd.left * sigma * svd.right.adjoint();
        assert!((rebuilt - a).camax() < 1e-12);
        let id = DMatrix::<Complex64>::identity(r, r);
        assert!((svd.left.adjoint() * &svd.left - &id).camax() < 1e-12);
        assert!((svd.right.adjoint() * &svd.right - &id).camax() < 1e-12);

        let mut oracle: Vec<f64> = a
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        oracle.sort_by(|x, y| y.total_cmp(x));
        for (x, y) in svd.values.iter().zip(&oracle) {
            assert!((x - y).abs() < 1e-12, "{x} vs oracle {y}");
        }
    }

    #[test]
    fn scalar() {
        let a = DMatrix::from_element(1, 1, Complex64::from_polar(0.7, 1.1));
        let svd = jacobi_svd(&a);
        assert!((svd.values[0] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn shapes_against_oracle() {
        let square = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.5),
                c(0.2, -0.1),
                c(0.0, 0.3),
                c(-0.4, 0.0),
                c(0.9, 0.9),
                c(0.1, 0.0),
                c(0.3, -0.2),
                c(0.0, 0.0),
                c(0.5, 0.1),
            ],
        );
        check(&square);
        check(&square.columns(0, 2).into_owned());
        check(&square.rows(0, 2).into_owned());
    }

    #[test]
    fn rank_deficient() {
        let a = DMatrix::from_row_slice(
            3,
            2,
            &[
                c(1.0, 0.0),
                c(2.0, 0.0),
                c(0.0, 1.0),
                c(0.0, 2.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
            ],
        );
        check(&a);
        let zero = DMatrix::<Complex64>::zeros(2, 3);
        let svd = jacobi_svd(&zero);
        assert!(svd.values.iter().all(|&s| s == 0.0));
        let id = DMatrix::<Complex64>::identity(2, 2);
        assert!((svd.left.adjoint() * &svd.left - id).camax() < 1e-12);
    }
}
