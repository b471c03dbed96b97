//! Fock-space helpers shared by the closed-form and brute-force layers.

use crate::C64;

/// `ln k!` for `k = 0..=n_max`.
pub fn ln_factorials(n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n_max {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Levels needed above a state's support so that displacing it by `beta`
/// loses no appreciable norm.
pub fn displacement_margin(support: usize, beta: C64) -> usize {
    let b = beta.norm();
    let r = (support as f64).sqrt() + b + 7.0;
    ((r * r - support as f64).max(0.0)).ceil() as usize + 20
}

/// Apply `exp(β c† − β* c)` to a Fock vector.
///
/// The generator is applied through short Taylor steps of norm ≤ 1/2 on a
/// working space of `v.len() + displacement_margin` levels. Returns the
/// first `out_dim` entries and the norm² that ended up above `out_dim`.
pub fn displace_vector(v: &[C64], beta: C64, out_dim: usize) -> (Vec<C64>, f64) {
    let work = v.len().max(out_dim) + displacement_margin(v.len().max(out_dim), beta);
    let mut x = vec![C64::new(0.0, 0.0); work];
    x[..v.len()].copy_from_slice(v);
    if beta != C64::new(0.0, 0.0) {
        let sqrt: Vec<f64> = (0..=work).map(|k| (k as f64).sqrt()).collect();
        let gen_norm = 2.0 * beta.norm() * sqrt[work];
        let steps = (gen_norm / 0.5).ceil().max(1.0) as usize;
        let b = beta / steps as f64;
        let apply = |y: &[C64]| -> Vec<C64> {
            let mut out = vec![C64::new(0.0, 0.0); work];
            for n in 0..work {
                let mut acc = C64::new(0.0, 0.0);
                if n > 0 {
                    acc += b * sqrt[n] * y[n - 1];
                }
                if n + 1 < work {
                    acc -= b.conj() * sqrt[n + 1] * y[n + 1];
                }
                out[n] = acc;
            }
            out
        };
        for _ in 0..steps {
            let scale: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let mut term = x.clone();
            let mut sum = x.clone();
            for k in 1..60 {
                term = apply(&term);
                let inv = 1.0 / k as f64;
                let mut tn = 0.0;
                for (s, t) in sum.iter_mut().zip(term.iter_mut()) {
                    *t *= inv;
                    *s += *t;
                    tn += t.norm_sqr();
                }
                if tn.sqrt() <= 1e-18 * scale {
                    break;
                }
            }
            x = sum;
        }
    }
    let lost: f64 = x.iter().skip(out_dim).map(|z| z.norm_sqr()).sum();
    x.truncate(out_dim);
    x.resize(out_dim, C64::new(0.0, 0.0));
    (x, lost)
}

/// Coherent-state amplitudes `e^{−|β|²/2} β^n / √n!` for `n < dim`.
pub fn coherent_vector(beta: C64, dim: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(dim);
    let mut a = C64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        out.push(a);
        a = a * beta / ((n + 1) as f64).sqrt();
    }
    out
}

/// Normalized even (`sign = +1`) or odd (`sign = −1`) cat state `|β⟩ ± |−β⟩`.
pub fn cat_vector(beta: C64, sign: f64, dim: usize) -> Vec<C64> {
    let plus = coherent_vector(beta, dim);
    let minus = coherent_vector(-beta, dim);
    let mut v: Vec<C64> = plus.iter().zip(&minus).map(|(a, b)| a + b * sign).collect();
    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= n;
    }
    v
}
