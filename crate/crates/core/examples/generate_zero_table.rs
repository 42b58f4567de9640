//! Regenerates the bundled table of zero ordinates.
//!
//! Scans Hardy's Z(t) for sign changes, refines each bracket, and checks
//! the running count against the smooth part of the zero-counting function.
//!
//!     cargo run --release --example generate_zero_table -- 10000 > data/zeros_first_10000.txt

use std::f64::consts::PI;

use nbbd::special::{hardy_theta, hardy_z, PrecisionSpec};

fn z(t: f64) -> f64 {
    hardy_z(t, &PrecisionSpec::default()).expect("Z(t)")
}

fn refine(mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> f64 {
    // Illinois variant of regula falsi
    let mut side = 0i8;
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 {
            break;
        }
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = z(c);
        if fc == 0.0 {
            return c;
        }
        if (fc > 0.0) == (fa > 0.0) {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    0.5 * (a + b)
}

/// Zeros in `(lo, hi)` found by a finer scan, for brackets where |Z| dips
/// without a sign change.
fn fine_scan(lo: f64, hi: f64, out: &mut Vec<f64>) {
    let steps = 200;
    let h = (hi - lo) / steps as f64;
    let mut a = lo;
    let mut fa = z(a);
    for k in 1..=steps {
        let b = lo + h * k as f64;
        let fb = z(b);
        if fa * fb < 0.0 {
            out.push(refine(a, b, fa, fb));
        }
        a = b;
        fa = fb;
    }
}

fn main() {
    let count: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("count"))
        .unwrap_or(10_000);
    let mut zeros: Vec<f64> = Vec::with_capacity(count);
    let mut t = 10.0;
    let mut ft = z(t);
    let mut prev = (t, ft);
    while zeros.len() < count {
        let spacing = 2.0 * PI / (t / (2.0 * PI)).ln().max(1.0);
        let h = 0.1 * spacing;
        let next = t + h;
        let fnext = z(next);
        if ft * fnext < 0.0 {
            zeros.push(refine(t, next, ft, fnext));
        } else if prev.1 * ft > 0.0 && ft.abs() < prev.1.abs() && ft.abs() < fnext.abs() && ft.abs() < 0.5 {
            // local minimum of |Z| with no sign change: look for a close pair
            let before = zeros.len();
            fine_scan(prev.0, next, &mut zeros);
            zeros[before..].sort_by(f64::total_cmp);
            let fresh: Vec<f64> = zeros.drain(before..).collect();
            for r in fresh {
                if zeros.last().is_none_or(|&l| r > l + 1e-9) {
                    zeros.push(r);
                }
            }
        }
        prev = (t, ft);
        t = next;
        ft = fnext;
    }
    zeros.truncate(count);

    // theta(gamma_k)/pi + 1 - (k - 1/2) averages to zero; a missed pair
    // would shift it by 2 from that point on.
    let window = 50;
    for start in (0..count.saturating_sub(window)).step_by(window) {
        let mean: f64 = (start..start + window)
            .map(|k| hardy_theta(zeros[k]).unwrap() / PI + 1.0 - (k as f64 + 0.5))
            .sum::<f64>()
            / window as f64;
        assert!(mean.abs() < 0.75, "count drift {mean} near zero #{}", start + 1);
    }

    println!("# ordinates of the first {count} nontrivial zeros of zeta, 9 decimals");
    for g in zeros {
        println!("{g:.9}");
    }
}
