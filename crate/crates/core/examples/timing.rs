//! Rough single-core timings of the hot kernels, used to size Monte Carlo
//! budgets. Run with `cargo run -p mesowig --example timing --release`.

use std::time::Instant;

use mesowig::ensemble::{sample_matrix, EnsembleSpec};
use mesowig::spectral;
use num_complex::Complex64;

fn main() {
    for n in [256usize, 512, 1024, 2048] {
        let spec = EnsembleSpec::goe(n, 1);
        let t0 = Instant::now();
        let m = sample_matrix(&spec, 0).unwrap();
        let t1 = Instant::now();
        let s = spectral::eigenvalues(&m, 1e-10).unwrap();
        let t2 = Instant::now();
        println!(
            "GOE N={n}: fill {:.3}s eig {:.3}s (lambda_max {:.4})",
            (t1 - t0).as_secs_f64(),
            (t2 - t1).as_secs_f64(),
            s.eigenvalues().last().unwrap()
        );
    }
    for n in [512usize, 1024] {
        let spec = EnsembleSpec::gue(n, 1);
        let t0 = Instant::now();
        let m = sample_matrix(&spec, 0).unwrap();
        let t1 = Instant::now();
        let s = spectral::eigenvalues(&m, 1e-10).unwrap();
        let t2 = Instant::now();
        println!(
            "GUE N={n}: fill {:.3}s eig {:.3}s (lambda_max {:.4})",
            (t1 - t0).as_secs_f64(),
            (t2 - t1).as_secs_f64(),
            s.eigenvalues().last().unwrap()
        );
    }
    {
        let n = 512usize;
        let spec = EnsembleSpec::goe(n, 1);
        let m = sample_matrix(&spec, 0).unwrap();
        let z = Complex64::new(0.1, (n as f64).powf(-0.5));
        let t0 = Instant::now();
        let g = spectral::resolvent_matrix(&m, z).unwrap();
        let t1 = Instant::now();
        println!(
            "resolvent N={n}: {:.3}s (G00 = {:.4})",
            (t1 - t0).as_secs_f64(),
            g.entry(0, 0)
        );
    }
}
