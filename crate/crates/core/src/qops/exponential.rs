//! Closed ODEs for the memory integrals of sum-of-exponential kernels.
//!
//! With `K(tau) = sum_m a_m exp(-r_m tau)` split `X = sum_m X^(m)`:
//! `d/dt X^(m) = a_m x(t, t) - r_m X^(m) + M(X) X^(m)`.

use super::{flag_sample, zero_vec, CoefficientSystem, QbarSeries, SolveOptions, TimeGrid};
use crate::kernels::ExpTerm;
use crate::linalg::C64;

pub(super) fn solve<S: CoefficientSystem + ?Sized>(
    system: &S,
    terms: &[ExpTerm],
    grid: TimeGrid,
    opts: &SolveOptions,
) -> QbarSeries {
    let nf = system.n_fields();
    let nt = terms.len();
    let init = system.initial();
    let sub = opts.substeps.max(1);
    let dt = grid.h / sub as f64;

    let mut m = zero_vec(nf * nf);
    let mut big = zero_vec(nf);
    let mut rhs = |y: &[C64], d: &mut [C64]| {
        big.fill(C64::from(0.0));
        for part in y.chunks(nf) {
            for (b, p) in big.iter_mut().zip(part) {
                *b += p;
            }
        }
        system.generator(&big, &mut m);
        for (t, term) in terms.iter().enumerate() {
            let part = &y[t * nf..(t + 1) * nf];
            for r in 0..nf {
                let row = &m[r * nf..(r + 1) * nf];
                let mx: C64 = row.iter().zip(part).map(|(a, b)| a * b).sum();
                d[t * nf + r] = term.amplitude * init[r] - term.rate * part[r] + mx;
            }
        }
    };

    let len = nf * nt;
    let mut y = zero_vec(len);
    let (mut k1, mut k2, mut k3, mut k4) = (zero_vec(len), zero_vec(len), zero_vec(len), zero_vec(len));
    let mut tmp = zero_vec(len);

    let total = |y: &[C64]| {
        let mut out = zero_vec(nf);
        for part in y.chunks(nf) {
            for (o, p) in out.iter_mut().zip(part) {
                *o += p;
            }
        }
        out
    };

    let mut series = QbarSeries::new(grid.h, nf);
    series.push(0.0, zero_vec(nf));
    for k in 0..grid.n {
        for _ in 0..sub {
            rhs(&y, &mut k1);
            for q in 0..len {
                tmp[q] = y[q] + k1[q] * (0.5 * dt);
            }
            rhs(&tmp, &mut k2);
            for q in 0..len {
                tmp[q] = y[q] + k2[q] * (0.5 * dt);
            }
            rhs(&tmp, &mut k3);
            for q in 0..len {
                tmp[q] = y[q] + k3[q] * dt;
            }
            rhs(&tmp, &mut k4);
            for q in 0..len {
                y[q] += (k1[q] + k2[q] * 2.0 + k3[q] * 2.0 + k4[q]) * (dt / 6.0);
            }
        }
        let x = total(&y);
        let flagged = flag_sample(&x, grid.h, opts.divergence_threshold);
        series.push((k + 1) as f64 * grid.h, x);
        if flagged {
            series.singular_at = Some(k + 1);
            break;
        }
    }
    series
}
